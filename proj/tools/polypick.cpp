// polypick: stability checks, Bernstein-Szego moments, truncated kernel
// decompositions and positivity certificates for stable polydisk polynomials.
//
// Subcommands: stability | moments | decompose | certify | sweep.
// Exit codes: 0 success (and, for certify, all checks passed); 1 a certificate
// failed; 2 input or configuration error (including unstable denominators for
// the measure-dependent subcommands).

#include <CLI11.hpp>
#include <iostream>

#include "polypick/io.hpp"

namespace {

using namespace polypick;

constexpr const char* kCacheDir = "moment-cache";

struct Options {
  std::string input;
  std::string output;
  int grid = 0;
  std::vector<int> ladder{4, 8, 16};
  std::vector<int> subset{1};
  int gkvw_j = 1;
  int gkvw_k = 2;
  std::string points = "random:12:0.6:1234";
  double tol_psd = 1e-9;
  double tol_identity = 1e-9;
  bool no_cache = false;
  std::string csv_kernels;
};

void add_common_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--input", opt.input, "polynomial JSON file")->required();
  cmd->add_option("--output", opt.output, "write the JSON result here instead of stdout");
  cmd->add_option("--M", opt.grid, "moment grid size per dimension (power of two, 0 = default)");
  cmd->add_option("--N", opt.ladder, "truncation ladder, e.g. 4,8,16")->delimiter(',');
  cmd->add_option("--S", opt.subset, "variable subset for the split, e.g. 1 or 1,3")
      ->delimiter(',');
  cmd->add_option("--j", opt.gkvw_j, "first twist variable of the two-kernel pair");
  cmd->add_option("--k", opt.gkvw_k, "second twist variable of the two-kernel pair");
  cmd->add_option("--points", opt.points, "evaluation points, random:COUNT:RADIUS:SEED");
  cmd->add_option("--tol-psd", opt.tol_psd, "relative eigenvalue tolerance for exact claims");
  cmd->add_option("--tol-identity", opt.tol_identity,
                  "absolute tolerance for exact kernel identities");
  cmd->add_flag("--no-cache", opt.no_cache, "bypass the on-disk moment cache");
  cmd->add_option("--csv-kernels", opt.csv_kernels,
                  "directory for CSV dumps of the sampled kernels");
}

void emit(const Options& opt, std::string json) {
  if (opt.output.empty()) {
    std::cout << json;
  } else {
    write_file_atomic(opt.output, json);
    std::cerr << "wrote " << opt.output << "\n";
  }
}

void write_point(JsonWriter& w, const Point& z) {
  w.begin_array();
  for (const Complex& zj : z) {
    w.begin_array();
    w.value(zj.real());
    w.value(zj.imag());
    w.end_array();
  }
  w.end_array();
}

void write_stability(JsonWriter& w, const StabilityVerdict& v) {
  w.begin_object();
  w.key("stable");
  w.value(v.stable);
  w.key("margin");
  w.value(v.margin);
  w.key("grid");
  w.value(v.grid);
  w.key("margin_threshold");
  w.value(v.margin_threshold);
  w.key("stages");
  w.begin_array();
  for (const StabilityStage& s : v.stages) {
    w.begin_object();
    w.key("variable");
    w.value(s.variable);
    w.key("slices");
    w.value(static_cast<long long>(s.slices));
    w.key("min_root_modulus");
    w.value(s.min_root_modulus);
    w.key("degenerate");
    w.value(s.degenerate);
    w.key("pass");
    w.value(s.pass);
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

/// Header shared by every result document.
void write_preamble(JsonWriter& w, const Polynomial& p, const StabilityVerdict& v) {
  w.key("polynomial");
  detail::write_polynomial(w, p);
  w.key("stability");
  write_stability(w, v);
}

/// Measure-dependent subcommands refuse unstable denominators with exit 2,
/// embedding the verdict in the result document.
int reject_unstable(const Options& opt, const Polynomial& p, const StabilityVerdict& verdict) {
  JsonWriter w;
  w.begin_object();
  write_preamble(w, p, verdict);
  w.end_object();
  emit(opt, std::move(w).take());
  std::cerr << "error: polynomial is not stable on the closed polydisk\n";
  return 2;
}

int run_stability(const Options& opt) {
  const Polynomial p = load_polynomial(opt.input);
  const StabilityVerdict verdict = check_stability(p);
  JsonWriter w;
  w.begin_object();
  write_preamble(w, p, verdict);
  w.end_object();
  emit(opt, std::move(w).take());
  return verdict.stable ? 0 : 2;
}

int run_moments(const Options& opt) {
  const Polynomial p = load_polynomial(opt.input);
  const StabilityVerdict verdict = check_stability(p);
  if (!verdict.stable) return reject_unstable(opt, p, verdict);

  SuiteConfig config;
  config.ladder = opt.ladder;
  const MultiIndex range = suite_moment_range(p.degree(), config);
  const MomentTable table =
      cached_moments(p, range, opt.grid, kCacheDir, !opt.no_cache, &verdict);

  // With --output the full table is written in the cache file format;
  // the summary always goes to stdout.
  if (!opt.output.empty()) save_moment_cache(opt.output, table);
  JsonWriter w;
  w.begin_object();
  write_preamble(w, p, verdict);
  w.key("R");
  w.value(table.range());
  w.key("M");
  w.value(table.grid());
  w.key("convention");
  w.value(kMomentConvention);
  w.key("C0");
  w.value(table.at(MultiIndex::zero(p.dim())).real());
  w.key("aliasing_error");
  w.value(table.aliasing_error());
  w.key("density_bound");
  w.value(table.density_bound());
  if (!opt.output.empty()) {
    w.key("table_file");
    w.value(opt.output);
  }
  w.end_object();
  std::cout << std::move(w).take();
  if (!opt.output.empty()) std::cerr << "wrote " << opt.output << "\n";
  return 0;
}

int run_decompose(const Options& opt) {
  const Polynomial p = load_polynomial(opt.input);
  const StabilityVerdict verdict = check_stability(p);
  if (!verdict.stable) return reject_unstable(opt, p, verdict);
  const MultiIndex n = p.degree();

  SuiteConfig config;
  config.ladder = opt.ladder;
  const MultiIndex range = suite_moment_range(n, config);
  const MomentTable table =
      cached_moments(p, range, opt.grid, kCacheDir, !opt.no_cache, &verdict);
  const PointSet pts = parse_point_spec(p.dim(), opt.points);

  JsonWriter w;
  w.begin_object();
  write_preamble(w, p, verdict);
  w.key("S");
  w.value(opt.subset);
  w.key("point_mode");
  w.value(pts.mode);
  w.key("rows");
  w.begin_array();
  for (int N : opt.ladder) {
    const DecompositionSpec spec(p, n, opt.subset, N);
    const DecompositionResult result = decompose(spec, table, pts);
    w.begin_object();
    w.key("N");
    w.value(N);
    w.key("K");
    w.value(result.KS.name());
    w.key("L");
    w.value(result.LT.name());
    w.key("max_residual");
    w.value(result.max_residual);
    w.key("mean_residual");
    w.value(result.mean_residual);
    w.key("worst_z");
    write_point(w, result.worst_z);
    w.key("worst_zeta");
    write_point(w, result.worst_zeta);
    w.end_object();
    if (!opt.csv_kernels.empty() && N == opt.ladder.back()) {
      for (const KernelHandle* kern :
           {&result.P, &result.KS, &result.LS, &result.KT, &result.LT})
        write_kernel_csv(opt.csv_kernels, *kern, pts.points);
    }
  }
  w.end_array();
  w.end_object();
  emit(opt, std::move(w).take());
  return 0;
}

int run_sweep(const Options& opt) {
  const Polynomial p = load_polynomial(opt.input);
  const StabilityVerdict verdict = check_stability(p);
  if (!verdict.stable) return reject_unstable(opt, p, verdict);
  const MultiIndex n = p.degree();

  SuiteConfig config;
  config.ladder = opt.ladder;
  const MultiIndex range = suite_moment_range(n, config);
  const MomentTable table =
      cached_moments(p, range, opt.grid, kCacheDir, !opt.no_cache, &verdict);
  const PointSet pts = parse_point_spec(p.dim(), opt.points);
  const std::vector<SweepRow> rows =
      truncation_sweep(p, n, opt.subset, opt.ladder, table, pts);

  JsonWriter w;
  w.begin_object();
  write_preamble(w, p, verdict);
  w.key("S");
  w.value(opt.subset);
  w.key("point_mode");
  w.value(pts.mode);
  w.key("rows");
  w.begin_array();
  for (const SweepRow& row : rows) {
    w.begin_object();
    w.key("N");
    w.value(row.truncation);
    w.key("max_residual");
    w.value(row.max_residual);
    w.key("min_shifted_eigenvalue");
    w.value(row.min_shifted_eigenvalue);
    w.end_object();
  }
  w.end_array();
  w.key("residuals_nonincreasing");
  w.value(sweep_residuals_nonincreasing(rows));
  w.end_object();
  emit(opt, std::move(w).take());
  return 0;
}

int run_certify(const Options& opt) {
  const Polynomial p = load_polynomial(opt.input);
  const MultiIndex n = p.degree();

  SuiteConfig config;
  config.ladder = opt.ladder;
  config.grid = opt.grid;
  config.tol_psd = opt.tol_psd;
  config.tol_identity = opt.tol_identity;
  config.gkvw_j = opt.gkvw_j;
  config.gkvw_k = opt.gkvw_k;
  const PointSet pts = parse_point_spec(p.dim(), opt.points);
  config.point_count = static_cast<int>(pts.size());
  config.radius = pts.radius;
  config.seed = pts.seed;

  const StabilityVerdict verdict = check_stability(p);
  CertificateReport report = [&] {
    if (!verdict.stable) return run_suite(p, n, config);  // stability-only report
    const MomentTable table = cached_moments(p, suite_moment_range(n, config), config.grid,
                                             kCacheDir, !opt.no_cache, &verdict);
    return run_suite(p, n, config, &table);
  }();

  emit(opt, report_to_json(report));
  if (!opt.csv_kernels.empty() && report.stability.stable) {
    const MomentTable table = cached_moments(p, suite_moment_range(n, config), config.grid,
                                             kCacheDir, !opt.no_cache, &verdict);
    const int N = config.ladder.back();
    const PointSet suite_pts =
        PointSet::random(p.dim(), config.point_count, config.radius, config.seed);
    write_kernel_csv(opt.csv_kernels, explicit_P(p, n), suite_pts.points);
    for (int d = p.dim(), mask = 1; mask < (1 << d) - 1; ++mask) {
      std::vector<int> S;
      for (int j = 0; j < d; ++j)
        if (mask & (1 << j)) S.push_back(j + 1);
      const DecompositionSpec spec(p, n, S, N);
      write_kernel_csv(opt.csv_kernels, build_KS(spec, table), suite_pts.points);
      write_kernel_csv(opt.csv_kernels, build_LS(spec, table), suite_pts.points);
    }
  }
  if (!report.stability.stable) {
    std::cerr << "error: polynomial is not stable on the closed polydisk\n";
    return 2;
  }
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structured positivity certificates for polydisk Pick kernels"};
  app.require_subcommand(1);
  Options opt;
  CLI::App* stability = app.add_subcommand("stability", "stability verdict for a polynomial");
  CLI::App* moments = app.add_subcommand("moments", "Fourier moments of the associated measure");
  CLI::App* decompose =
      app.add_subcommand("decompose", "truncated split of the Pick kernel for a subset S");
  CLI::App* certify = app.add_subcommand("certify", "full positivity certificate suite");
  CLI::App* sweep = app.add_subcommand("sweep", "residual and eigenvalue trends over a ladder");
  for (CLI::App* cmd : {stability, moments, decompose, certify, sweep})
    add_common_flags(cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (stability->parsed()) return run_stability(opt);
    if (moments->parsed()) return run_moments(opt);
    if (decompose->parsed()) return run_decompose(opt);
    if (certify->parsed()) return run_certify(opt);
    return run_sweep(opt);
  } catch (const polypick::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
