#pragma once

// File formats shared by the CLI and the tests:
//   - polynomial JSON fragments (load/save with validation),
//   - moment-table cache files keyed by (polynomial hash, range, grid),
//   - a small JSON writer that pins every floating-point field to 17
//     significant digits and maps non-finite values to null,
//   - certificate report serialization,
//   - CSV kernel dumps.
//
// All writers go through an atomic write-temp-then-rename so readers never
// observe a half-written file.  Input parsing uses nlohmann/json, whose parse
// errors carry line/column diagnostics; outputs with pinned byte format use
// the dedicated writer below instead.

#include <atomic>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "polypick/certify.hpp"
#include "polypick/decomp.hpp"

namespace polypick {

/// Thrown for malformed input files, unreadable paths and cache mismatches.
/// The CLI maps this (together with invalid configuration) to exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kMomentConvention = "C_gamma = int z^gamma dmu";

// ---------------------------------------------------------------------------
// Atomic file writes.

namespace detail {

inline std::string unique_suffix() {
  static std::atomic<std::uint64_t> counter{0};
  static const std::uint64_t salt = []() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }();
  return hash_hex(salt ^ (0x9e3779b97f4a7c15ull * (++counter)));
}

}  // namespace detail

/// Writes `contents` to a sibling temp file and renames it over `path`.
/// Creates missing parent directories.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  }
  fs::path tmp = path;
  tmp += ".tmp-" + detail::unique_suffix();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename temp file onto " + path.string());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("cannot read " + path.string());
  return std::move(buf).str();
}

// ---------------------------------------------------------------------------
// JSON writer with pinned float formatting (17 significant digits, non-finite
// values become null).  Pretty-printed with two-space indents; scalar integer
// arrays are kept on one line.

class JsonWriter {
 public:
  void begin_object() { open('{'); }
  void end_object() { close('}'); }
  void begin_array() { open('['); }
  void end_array() { close(']'); }

  void key(std::string_view k) {
    separate();
    string_token(k);
    out_ += ": ";
    pending_value_ = true;
  }

  void value(std::string_view s) {
    separate();
    string_token(s);
  }
  void value(const char* s) { value(std::string_view(s)); }
  void value(bool b) {
    separate();
    out_ += b ? "true" : "false";
  }
  void value(int v) { integer(static_cast<long long>(v)); }
  void value(long long v) { integer(v); }
  void value(std::uint64_t v) {
    separate();
    out_ += std::to_string(v);
  }
  void value(double v) {
    separate();
    number_token(v);
  }
  /// Inline array of integers, e.g. "[4, 8, 16]".
  void value(const std::vector<int>& v) {
    separate();
    out_ += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0) out_ += ", ";
      out_ += std::to_string(v[i]);
    }
    out_ += ']';
  }
  void value(const MultiIndex& v) {
    std::vector<int> entries(static_cast<std::size_t>(v.dim()));
    for (int i = 0; i < v.dim(); ++i) entries[static_cast<std::size_t>(i)] = v[i];
    value(entries);
  }

  /// Finishes the document; the writer must be back at depth zero.
  std::string take() && {
    if (!first_in_scope_.empty()) throw std::logic_error("JsonWriter: unclosed container");
    out_ += '\n';
    return std::move(out_);
  }

 private:
  void integer(long long v) {
    separate();
    out_ += std::to_string(v);
  }

  void open(char c) {
    separate();
    out_ += c;
    first_in_scope_.push_back(true);
  }

  void close(char c) {
    if (first_in_scope_.empty()) throw std::logic_error("JsonWriter: close without open");
    const bool empty = first_in_scope_.back();
    first_in_scope_.pop_back();
    if (!empty) {
      out_ += '\n';
      indent(first_in_scope_.size());
    }
    out_ += c;
  }

  // Emits the separator (comma, newline, indent) owed before the next token.
  void separate() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (first_in_scope_.empty()) return;
    if (!first_in_scope_.back()) out_ += ',';
    first_in_scope_.back() = false;
    out_ += '\n';
    indent(first_in_scope_.size());
  }

  void indent(std::size_t depth) { out_.append(2 * depth, ' '); }

  void number_token(double v) {
    if (!std::isfinite(v)) {
      out_ += "null";
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out_ += buf;
  }

  void string_token(std::string_view s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\r': out_ += "\\r"; break;
        case '\t': out_ += "\\t"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<bool> first_in_scope_;
  bool pending_value_ = false;
};

// ---------------------------------------------------------------------------
// Polynomial JSON fragment:
//   {"d": int, "degree": [int...],
//    "coefficients": [{"index": [int...], "re": float, "im": float}, ...]}
// Indices must be unique and lie inside the degree box.

namespace detail {

inline MultiIndex index_from_json(const nlohmann::json& j, int d, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != d)
    throw IoError(std::string(what) + ": expected an array of " + std::to_string(d) +
                  " integers");
  std::vector<int> entries(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const auto& e = j[static_cast<std::size_t>(i)];
    if (!e.is_number_integer())
      throw IoError(std::string(what) + ": entry " + std::to_string(i) + " is not an integer");
    entries[static_cast<std::size_t>(i)] = e.get<int>();
  }
  return MultiIndex{std::move(entries)};
}

inline double number_field(const nlohmann::json& j, const char* key, bool required,
                           double fallback) {
  if (!j.contains(key)) {
    if (required) throw IoError(std::string("coefficient: missing \"") + key + "\"");
    return fallback;
  }
  if (!j[key].is_number()) throw IoError(std::string("coefficient: \"") + key + "\" not a number");
  return j[key].get<double>();
}

}  // namespace detail

inline Polynomial polynomial_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw IoError("polynomial: expected a JSON object");
  if (!j.contains("d") || !j["d"].is_number_integer())
    throw IoError("polynomial: missing integer field \"d\"");
  const int d = j["d"].get<int>();
  if (d < 1) throw IoError("polynomial: \"d\" must be at least 1");
  if (!j.contains("degree")) throw IoError("polynomial: missing field \"degree\"");
  MultiIndex degree = detail::index_from_json(j["degree"], d, "polynomial degree");
  if (!degree.nonnegative()) throw IoError("polynomial: degree entries must be nonnegative");
  if (!j.contains("coefficients") || !j["coefficients"].is_array())
    throw IoError("polynomial: missing array field \"coefficients\"");

  Polynomial::CoeffMap coeffs;
  for (const auto& entry : j["coefficients"]) {
    if (!entry.is_object() || !entry.contains("index"))
      throw IoError("coefficient: expected an object with an \"index\" field");
    MultiIndex alpha = detail::index_from_json(entry["index"], d, "coefficient index");
    if (!alpha.nonnegative() || !leq(alpha, degree))
      throw IoError("coefficient index outside the degree box");
    const double re = detail::number_field(entry, "re", true, 0.0);
    const double im = detail::number_field(entry, "im", false, 0.0);
    if (!coeffs.emplace(std::move(alpha), Complex(re, im)).second)
      throw IoError("duplicate coefficient index");
  }
  return Polynomial(d, std::move(degree), std::move(coeffs));
}

inline nlohmann::json polynomial_to_json(const Polynomial& p) {
  nlohmann::json j;
  j["d"] = p.dim();
  std::vector<int> degree(static_cast<std::size_t>(p.dim()));
  for (int i = 0; i < p.dim(); ++i) degree[static_cast<std::size_t>(i)] = p.degree()[i];
  j["degree"] = degree;
  j["coefficients"] = nlohmann::json::array();
  for (const auto& [alpha, c] : p.coefficients()) {
    nlohmann::json e;
    std::vector<int> idx(static_cast<std::size_t>(p.dim()));
    for (int i = 0; i < p.dim(); ++i) idx[static_cast<std::size_t>(i)] = alpha[i];
    e["index"] = idx;
    e["re"] = c.real();
    e["im"] = c.imag();
    j["coefficients"].push_back(std::move(e));
  }
  return j;
}

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

inline Polynomial load_polynomial(const std::filesystem::path& path) {
  const nlohmann::json j = parse_json_file(path);  // parse errors carry the path already
  try {
    return polynomial_from_json(j);
  } catch (const std::invalid_argument& e) {
    throw IoError(path.string() + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

inline void save_polynomial(const std::filesystem::path& path, const Polynomial& p) {
  write_file_atomic(path, polynomial_to_json(p).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Moment cache.  One JSON file per (polynomial hash, range R, grid M) holding
// the header {poly_hash, d, R, M, convention} plus the dense complex moment
// array listed in graded lexicographic order of gamma + R.

inline std::filesystem::path moment_cache_path(const std::filesystem::path& dir,
                                               std::uint64_t poly_hash, const MultiIndex& range,
                                               int grid) {
  std::string name = hash_hex(poly_hash) + "_R";
  for (int i = 0; i < range.dim(); ++i) {
    if (i > 0) name += 'x';
    name += std::to_string(range[i]);
  }
  name += "_M" + std::to_string(grid) + ".json";
  return dir / name;
}

namespace detail {

/// All shifts delta = gamma + R for gamma in [-R, R]^d, in graded-lex order.
inline std::vector<MultiIndex> graded_shifts(const MultiIndex& range) {
  const int d = range.dim();
  std::vector<MultiIndex> out;
  MultiIndex delta = MultiIndex::zero(d);
  for (;;) {
    out.push_back(delta);
    int axis = d - 1;
    while (axis >= 0 && delta[axis] == 2 * range[axis]) {
      delta[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
    ++delta[axis];
  }
  std::sort(out.begin(), out.end());  // MultiIndex orders by degree, then lex
  return out;
}

/// Row-major offset of gamma inside the dense [-R, R]^d value table.
inline std::size_t moment_offset(const MultiIndex& range, const MultiIndex& gamma) {
  std::size_t off = 0;
  for (int i = 0; i < range.dim(); ++i)
    off = off * static_cast<std::size_t>(2 * range[i] + 1) +
          static_cast<std::size_t>(gamma[i] + range[i]);
  return off;
}

}  // namespace detail

inline void save_moment_cache(const std::filesystem::path& path, const MomentTable& table) {
  nlohmann::json j;
  j["poly_hash"] = hash_hex(table.poly_hash());
  j["d"] = table.dim();
  std::vector<int> range(static_cast<std::size_t>(table.dim()));
  for (int i = 0; i < table.dim(); ++i) range[static_cast<std::size_t>(i)] = table.range()[i];
  j["R"] = range;
  j["M"] = table.grid();
  j["convention"] = kMomentConvention;
  j["order"] = "graded-lex over gamma + R";
  j["aliasing_error"] = table.aliasing_error();
  j["density_bound"] = table.density_bound();
  nlohmann::json values = nlohmann::json::array();
  for (const MultiIndex& delta : detail::graded_shifts(table.range())) {
    const Complex& c = table.at(delta - table.range());
    values.push_back({c.real(), c.imag()});
  }
  j["values"] = std::move(values);
  write_file_atomic(path, j.dump() + "\n");
}

inline MomentTable load_moment_cache(const std::filesystem::path& path) {
  const nlohmann::json j = parse_json_file(path);
  try {
    if (!j.is_object() || !j.contains("poly_hash") || !j.contains("d") || !j.contains("R") ||
        !j.contains("M") || !j.contains("convention") || !j.contains("values"))
      throw IoError("moment cache: missing header field");
    if (j["convention"].get<std::string>() != kMomentConvention)
      throw IoError("moment cache: unknown moment convention");
    const int d = j["d"].get<int>();
    MultiIndex range = detail::index_from_json(j["R"], d, "moment cache R");
    const int grid = j["M"].get<int>();
    const std::uint64_t poly_hash = std::stoull(j["poly_hash"].get<std::string>(), nullptr, 16);
    const auto shifts = detail::graded_shifts(range);
    const auto& values = j["values"];
    if (!values.is_array() || values.size() != shifts.size())
      throw IoError("moment cache: value count does not match the range");
    std::vector<Complex> dense(shifts.size());
    for (std::size_t i = 0; i < shifts.size(); ++i) {
      const auto& pair = values[i];
      if (!pair.is_array() || pair.size() != 2)
        throw IoError("moment cache: values must be [re, im] pairs");
      dense[detail::moment_offset(range, shifts[i] - range)] =
          Complex(pair[0].get<double>(), pair[1].get<double>());
    }
    const double aliasing = j.value("aliasing_error", 0.0);
    const double density = j.value("density_bound", 0.0);
    return MomentTable(std::move(range), grid, poly_hash, std::move(dense), aliasing, density);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

/// Loads the cached table for (p, range, grid) when present and consistent,
/// otherwise computes it (and stores the result unless caching is disabled).
/// A corrupt or mismatched cache file is silently recomputed and replaced.
inline MomentTable cached_moments(const Polynomial& p, const MultiIndex& range, int grid,
                                  const std::filesystem::path& cache_dir, bool use_cache,
                                  const StabilityVerdict* verdict = nullptr) {
  if (grid == 0) grid = default_moment_grid(range);
  const std::uint64_t h = polynomial_hash(p);
  const std::filesystem::path path = moment_cache_path(cache_dir, h, range, grid);
  if (use_cache && std::filesystem::exists(path)) {
    try {
      MomentTable table = load_moment_cache(path);
      if (table.poly_hash() == h && table.range() == range && table.grid() == grid) return table;
    } catch (const IoError&) {
      // fall through to recompute
    }
  }
  MomentTable table = compute_moments(p, range, grid, verdict);
  if (use_cache) save_moment_cache(path, table);
  return table;
}

// ---------------------------------------------------------------------------
// Certificate report JSON.

namespace detail {

inline void write_polynomial(JsonWriter& w, const Polynomial& p) {
  w.begin_object();
  w.key("d");
  w.value(p.dim());
  w.key("degree");
  w.value(p.degree());
  w.key("coefficients");
  w.begin_array();
  for (const auto& [alpha, c] : p.coefficients()) {
    w.begin_object();
    w.key("index");
    w.value(alpha);
    w.key("re");
    w.value(c.real());
    w.key("im");
    w.value(c.imag());
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

inline void write_check(JsonWriter& w, const CheckRecord& c) {
  w.begin_object();
  w.key("id");
  w.value(c.id);
  w.key("paper_anchor");
  w.value(c.paper_anchor);
  w.key("kernel");
  w.value(c.kernel);
  w.key("n_points");
  w.value(c.n_points);
  w.key("min_eig");
  w.value(c.min_eig);
  w.key("max_residual");
  w.value(c.max_residual);
  w.key("tol");
  w.value(c.tol);
  w.key("pass");
  w.value(c.pass);
  w.end_object();
}

}  // namespace detail

inline std::string report_to_json(const CertificateReport& report) {
  JsonWriter w;
  w.begin_object();
  w.key("polynomial");
  detail::write_polynomial(w, report.p);
  w.key("n");
  w.value(report.n);
  w.key("config");
  w.begin_object();
  w.key("ladder");
  w.value(report.config.ladder);
  w.key("grid");
  w.value(report.config.grid);
  w.key("point_count");
  w.value(report.config.point_count);
  w.key("radius");
  w.value(report.config.radius);
  w.key("seed");
  w.value(report.config.seed);
  w.key("tol_psd");
  w.value(report.config.tol_psd);
  w.key("tol_identity");
  w.value(report.config.tol_identity);
  w.key("tol_limit");
  w.value(report.config.tol_limit);
  w.key("tol_split");
  w.value(report.config.tol_split);
  w.key("tol_moment");
  w.value(report.config.tol_moment);
  w.key("trend_factor");
  w.value(report.config.trend_factor);
  w.key("sandwich_slack");
  w.value(report.config.sandwich_slack);
  w.key("gkvw_j");
  w.value(report.config.gkvw_j);
  w.key("gkvw_k");
  w.value(report.config.gkvw_k);
  w.end_object();
  w.key("convention");
  w.value(kMomentConvention);
  w.key("grid_used");
  w.value(report.grid_used);
  w.key("point_mode");
  w.value(report.point_mode);
  w.key("stability");
  w.begin_object();
  w.key("stable");
  w.value(report.stability.stable);
  w.key("margin");
  w.value(report.stability.margin);
  w.key("grid");
  w.value(report.stability.grid);
  w.key("margin_threshold");
  w.value(report.stability.margin_threshold);
  w.end_object();
  w.key("checks");
  w.begin_array();
  for (const CheckRecord& c : report.checks) detail::write_check(w, c);
  w.end_array();
  w.key("pass");
  w.value(report.pass);
  w.key("timestamp");
  w.value(report.timestamp);
  w.end_object();
  return std::move(w).take();
}

inline void write_report(const std::filesystem::path& path, const CertificateReport& report) {
  write_file_atomic(path, report_to_json(report));
}

// ---------------------------------------------------------------------------
// CSV kernel dumps: header i,j,z_i,z_j,re,im; one file per kernel handle.
// Points are formatted as semicolon-joined coordinates (CSV-safe, no commas).

namespace detail {

inline std::string csv_safe_name(std::string_view name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
  return out.empty() ? std::string("kernel") : out;
}

inline std::string format_point(const Point& z) {
  std::string out;
  char buf[96];
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i > 0) out += ';';
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z[i].real(), z[i].imag());
    out += buf;
  }
  return out;
}

}  // namespace detail

/// Samples the kernel on the point set and writes one CSV file into `dir`,
/// named from the kernel label.  Returns the path written.
inline std::filesystem::path write_kernel_csv(const std::filesystem::path& dir,
                                              const KernelHandle& kernel,
                                              const std::vector<Point>& points) {
  const Eigen::MatrixXcd M = kernel_matrix(kernel, points);
  std::string csv = "i,j,z_i,z_j,re,im\n";
  char buf[96];
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      csv += std::to_string(i) + ',' + std::to_string(j) + ',';
      csv += detail::format_point(points[static_cast<std::size_t>(i)]) + ',';
      csv += detail::format_point(points[static_cast<std::size_t>(j)]) + ',';
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", M(i, j).real(), M(i, j).imag());
      csv += buf;
    }
  const std::filesystem::path path = dir / (detail::csv_safe_name(kernel.name()) + ".csv");
  write_file_atomic(path, csv);
  return path;
}

// ---------------------------------------------------------------------------
// Point-set specs of the form "random:COUNT:RADIUS:SEED".

inline PointSet parse_point_spec(int dim, const std::string& spec) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  for (;;) {
    const auto colon = spec.find(':', start);
    parts.push_back(spec.substr(start, colon == std::string::npos ? colon : colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 4 || parts[0] != "random")
    throw IoError("point spec must look like random:COUNT:RADIUS:SEED, got \"" + spec + "\"");
  int count = 0;
  double radius = 0.0;
  std::uint64_t seed = 0;
  try {
    std::size_t used = 0;
    count = std::stoi(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("count");
    radius = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("radius");
    seed = std::stoull(parts[3], &used);
    if (used != parts[3].size()) throw std::invalid_argument("seed");
  } catch (const std::invalid_argument& e) {
    throw IoError("point spec \"" + spec + "\": bad " + e.what() + " field");
  } catch (const std::out_of_range&) {
    throw IoError("point spec \"" + spec + "\": value out of range");
  }
  return PointSet::random(dim, count, radius, seed);
}

}  // namespace polypick
