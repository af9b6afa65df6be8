// End-to-end tests of the installed CLI binary: exit code contract, report
// determinism, cache reuse and the CSV dump format.  The binary path comes in
// through the POLYPICK_CLI_PATH compile definition.

#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() /
          ("polypick_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    write("trivial.json", R"({"d": 2, "degree": [1, 1],
      "coefficients": [{"index": [0, 0], "re": 1.0, "im": 0.0}]})");
    write("affine.json", R"({"d": 2, "degree": [1, 1], "coefficients": [
      {"index": [0, 0], "re": 4.0, "im": 0.0},
      {"index": [1, 0], "re": -1.0, "im": 0.0},
      {"index": [0, 1], "re": -1.0, "im": 0.0}]})");
    write("two_minus_sum.json", R"({"d": 2, "degree": [1, 1], "coefficients": [
      {"index": [0, 0], "re": 2.0, "im": 0.0},
      {"index": [1, 0], "re": -1.0, "im": 0.0},
      {"index": [0, 1], "re": -1.0, "im": 0.0}]})");
    write("broken.json", "{\"d\": 2,, }");
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
  }

  /// Runs the CLI with `dir` as working directory; stdout+stderr land in
  /// `capture` under `dir`.  Returns the exit code.
  int run(const std::string& args, const std::string& capture = "out.txt") const {
    const std::string cmd = "cd " + dir.string() + " && " + POLYPICK_CLI_PATH + " " + args +
                            " > " + capture + " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(dir / name);
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
  }

  json parse(const std::string& name) const { return json::parse(slurp(name)); }
};

std::string strip_timestamp(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.find("\"timestamp\"") == std::string::npos) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("certify exits zero on an all-pass report and reuses the cache") {
  Workspace ws;
  REQUIRE(ws.run("certify --input trivial.json --output report.json") == 0);
  const json report = ws.parse("report.json");
  CHECK(report["pass"] == true);
  CHECK(report["stability"]["stable"] == true);
  CHECK(report["checks"].size() == 20);
  CHECK(report["convention"] == "C_gamma = int z^gamma dmu");

  // first run populated the moment cache; rerunning must reuse it and
  // reproduce the report byte for byte apart from the timestamp
  REQUIRE(fs::exists(ws.dir / "moment-cache"));
  const auto cache_entry = *fs::directory_iterator(ws.dir / "moment-cache");
  const auto first_write = fs::last_write_time(cache_entry);
  REQUIRE(ws.run("certify --input trivial.json --output second.json") == 0);
  CHECK(fs::last_write_time(cache_entry) == first_write);
  CHECK(strip_timestamp(ws.slurp("report.json")) == strip_timestamp(ws.slurp("second.json")));

  // --no-cache must not create entries for a fresh polynomial
  fs::remove_all(ws.dir / "moment-cache");
  REQUIRE(ws.run("certify --input trivial.json --no-cache --output third.json") == 0);
  CHECK_FALSE(fs::exists(ws.dir / "moment-cache"));
  CHECK(strip_timestamp(ws.slurp("report.json")) == strip_timestamp(ws.slurp("third.json")));
}

TEST_CASE("certify exits one when a certificate fails") {
  Workspace ws;
  // a two-step ladder stops at N=4 where the split residual is far above
  // the identity tolerance, so the split certificates fail
  REQUIRE(ws.run("certify --input affine.json --N 2,4 --output report.json") == 1);
  const json report = ws.parse("report.json");
  CHECK(report["pass"] == false);
  bool found_failed_split = false;
  for (const auto& check : report["checks"])
    if (check["id"] == "split:{1}" && check["pass"] == false) found_failed_split = true;
  CHECK(found_failed_split);
}

TEST_CASE("unstable polynomials exit two with the verdict embedded") {
  Workspace ws;
  REQUIRE(ws.run("stability --input two_minus_sum.json --output verdict.json") == 2);
  CHECK(ws.parse("verdict.json")["stability"]["stable"] == false);

  REQUIRE(ws.run("certify --input two_minus_sum.json --output report.json") == 2);
  const json report = ws.parse("report.json");
  CHECK(report["pass"] == false);
  CHECK(report["stability"]["stable"] == false);
  CHECK(report["checks"].size() == 1);  // only the stability rejection

  REQUIRE(ws.run("moments --input two_minus_sum.json --output t.json") == 2);
  REQUIRE(ws.run("decompose --input two_minus_sum.json --output t.json") == 2);
}

TEST_CASE("stability accepts a stable polynomial with exit zero") {
  Workspace ws;
  REQUIRE(ws.run("stability --input affine.json --output verdict.json") == 0);
  const json verdict = ws.parse("verdict.json");
  CHECK(verdict["stability"]["stable"] == true);
  CHECK(verdict["stability"]["margin"].get<double>() > 1.0);
}

TEST_CASE("malformed input and bad flags exit two") {
  Workspace ws;
  CHECK(ws.run("stability --input broken.json") == 2);
  CHECK_THAT(ws.slurp("out.txt"), Catch::Matchers::ContainsSubstring("line 1"));
  CHECK(ws.run("stability --input does_not_exist.json") == 2);
  CHECK(ws.run("stability") == 2);                               // missing --input
  CHECK(ws.run("frobnicate --input trivial.json") == 2);         // unknown subcommand
  CHECK(ws.run("certify --input trivial.json --N 8,4") == 2);    // bad ladder
  CHECK(ws.run("certify --input trivial.json --points weird") == 2);
  CHECK(ws.run("decompose --input affine.json --S 3") == 2);     // subset out of range
}

TEST_CASE("decompose reports a residual ladder with ten-fold drops") {
  Workspace ws;
  REQUIRE(ws.run("decompose --input affine.json --S 1 --N 4,8,16 "
                 "--points random:12:0.5:42 --output dec.json") == 0);
  const json dec = ws.parse("dec.json");
  REQUIRE(dec["rows"].size() == 3);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& row : dec["rows"]) {
    const double res = row["max_residual"].get<double>();
    CHECK(res * 10.0 <= prev);
    prev = res;
  }
  CHECK(dec["rows"][0]["K"] == "K{1}^4");
  CHECK(dec["rows"][0]["L"] == "L{2}^4");
}

TEST_CASE("sweep tracks the eigenvalue trend toward contractivity") {
  Workspace ws;
  REQUIRE(ws.run("sweep --input affine.json --S 1 --N 4,8,16 --output sweep.json") == 0);
  const json sweep = ws.parse("sweep.json");
  CHECK(sweep["residuals_nonincreasing"] == true);
  const auto& rows = sweep["rows"];
  REQUIRE(rows.size() == 3);
  CHECK(rows[2]["min_shifted_eigenvalue"].get<double>() >
        rows[0]["min_shifted_eigenvalue"].get<double>());
  CHECK(rows[2]["min_shifted_eigenvalue"].get<double>() >= -1e-5);
}

TEST_CASE("csv kernel dumps produce one well-formed file per kernel") {
  Workspace ws;
  REQUIRE(ws.run("decompose --input affine.json --S 1 --N 4 --csv-kernels kernels "
                 "--output dec.json") == 0);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(ws.dir / "kernels"))
    names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"K_1__4.csv", "K_2__4.csv", "L_1__4.csv", "L_2__4.csv",
                                          "P_399164_.csv"});
  std::ifstream in(ws.dir / "kernels" / "K_1__4.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "i,j,z_i,z_j,re,im");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 144);  // 12x12 point pairs
}

TEST_CASE("moments writes the cache file format to the output path") {
  Workspace ws;
  REQUIRE(ws.run("moments --input affine.json --M 64 --N 4 --output table.json") == 0);
  const json table = ws.parse("table.json");
  CHECK(table["M"] == 64);
  CHECK(table["convention"] == "C_gamma = int z^gamma dmu");
  CHECK(table["R"] == std::vector<int>{3, 3});  // max(N-1, 2n_j) with n=(1,1), N=4
  CHECK(table["values"].size() == 49);
}
