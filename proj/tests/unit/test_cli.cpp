#include <doctest.h>

#include "config.hpp"
#include "oracles.hpp"
#include "runner.hpp"

#include "fnls/io.hpp"
#include "fnls/parallel.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fnls::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fnls_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text, Kind kind) {
  try {
    parse_config(text, kind);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

// Every regular file under `dir`, keyed by relative path.
std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

int shell(const std::string& args) {
  const int status = std::system((std::string(FNLS_BINARY) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("defaults are filled in") {
  const RunConfig cfg = parse_config(R"({"H": 0.7})", Kind::fbm);
  CHECK(cfg.params.at("n") == 256);
  CHECK(cfg.params.at("replicates") == 1000);
  CHECK(cfg.params.at("T") == 1.0);
  CHECK(cfg.params.at("sampler") == "exact");
  CHECK(cfg.seed == 0);
  const json r = resolved(cfg);
  CHECK(r.at("kind") == "fbm");
  CHECK(r.at("H") == 0.7);
}

TEST_CASE("validation errors carry the JSON path") {
  CHECK(error_of(R"({"H": 1.2})", Kind::fbm) == "/H: H must lie in (0,1)");
  const std::string window = error_of(R"({"H": 0.3, "alpha": 0.1})", Kind::convolve);
  CHECK(window.rfind("/alpha: ", 0) == 0);
  CHECK(window.find("0.2 < alpha < 0.7") != std::string::npos);
  CHECK(error_of(R"({"H": 0.7, "bogus": 1})", Kind::fbm).rfind("/bogus", 0) == 0);
  CHECK(error_of(R"({"H": 0.7, "grid": {"N": 12}})", Kind::convolve).rfind("/grid/N", 0) == 0);
  CHECK(error_of(R"({"H": 0.7, "kind": "solve"})", Kind::fbm).rfind("/kind", 0) == 0);
  CHECK(error_of("{", Kind::fbm).rfind("/: ", 0) == 0);
  CHECK(error_of(R"({"H": 0.7, "replicates": 10})", Kind::ldp).rfind("/replicates", 0) == 0);
  CHECK(error_of(R"({"H": 0.7, "family_sizes": [16, 8]})", Kind::support).rfind("/family_sizes", 0) == 0);
  CHECK(error_of(R"({"H": 0.7, "r": 3})", Kind::convolve).rfind("/r", 0) == 0);
  CHECK_THROWS_AS(parse_config(R"({"x": 1})", Kind::oracle_suite), ConfigError);
  CHECK(error_of(R"({"H": 0.7, "seed": -1})", Kind::fbm).rfind("/seed", 0) == 0);
  CHECK(parse_config(json{{"H", 0.7}, {"seed", 42}}, Kind::fbm).seed == 42);
}

TEST_CASE("same config and seed give identical bytes") {
  const RunConfig cfg = parse_config(R"({"H": 0.7, "grid": {"N": 8}, "n": 8, "modes": 4, "seed": 3})", Kind::convolve);
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  fnls::set_thread_count(1);
  REQUIRE(run(cfg, a) == kSuccess);
  fnls::set_thread_count(3);
  REQUIRE(run(cfg, b) == kSuccess);
  fnls::set_thread_count(1);
  const auto ta = tree(a);
  CHECK(ta.count("manifest.json") == 1);
  CHECK(ta.count("modes.csv") == 1);
  CHECK(ta == tree(b));
  RunConfig other = cfg;
  other.seed = 4;
  const fs::path c = scratch("det_c");
  REQUIRE(run(other, c) == kSuccess);
  CHECK(slurp(a / "modes.csv") != slurp(c / "modes.csv"));
}

TEST_CASE("manifest echoes the resolved config") {
  const fs::path out = scratch("manifest");
  REQUIRE(run(parse_config(R"({"H": 0.3, "n": 16, "replicates": 5, "seed": 9})", Kind::fbm), out) == kSuccess);
  const json m = json::parse(slurp(out / "manifest.json"));
  CHECK(m.at("kind") == "fbm");
  CHECK(m.at("seed") == 9);
  CHECK(m.at("status") == "ok");
  CHECK(m.at("config").at("replicates") == 5);
  CHECK(m.at("config") == json::parse(slurp(out / "config.json")));
  const std::string csv = slurp(out / "paths.csv");
  // header t_0..t_16, then one row per replicate
  CHECK(csv.rfind("t_0,t_1,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 5);
}

TEST_CASE("ldp emits a rate report and a ladder") {
  const fs::path out = scratch("ldp");
  const RunConfig cfg = parse_config(
      R"({"H": 0.7, "grid": {"N": 8}, "modes": 4, "dt": 0.125, "replicates": 200, "iterations": 30, "basis_dim": 16,
          "eps_ladder": [0.5, 0.25]})",
      Kind::ldp);
  REQUIRE(run(cfg, out) == kSuccess);
  const json report = json::parse(slurp(out / "rate_report.json"));
  CHECK(report.contains("pseudo_inverse_rate"));
  CHECK(report.contains("variational_bound"));
  CHECK(report.contains("slope"));
  const std::string ladder = slurp(out / "ladder.csv");
  CHECK(ladder.rfind("eps,p,ci_lo,ci_hi,neg_eps_log_p\n", 0) == 0);
  CHECK(std::count(ladder.begin(), ladder.end(), '\n') == 3);
}

TEST_CASE("oracle suite report") {
  const std::vector<OracleResult> results = run_oracle_suite(0);
  CHECK(results.size() >= 30);
  for (const auto& r : results) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
    CHECK(r.residual <= r.tolerance);
  }
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  fs::create_directories(dir);
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"H": 1.2})";
  const fs::path good = dir / "good.json";
  std::ofstream(good) << R"({"H": 0.5, "n": 8, "replicates": 2})";
  CHECK(shell("fbm --config " + good.string() + " --out " + (dir / "ok").string()) == 0);
  CHECK(shell("fbm --config " + bad.string() + " --out " + (dir / "v").string()) == 1);
  CHECK(shell("fbm --threads -2") == 1);
  CHECK(shell("frobnicate") == 1);
  CHECK(shell("fbm --config " + (dir / "missing.json").string()) == 3);
  // an output path under a regular file cannot be created
  CHECK(shell("fbm --config " + good.string() + " --out " + (good / "sub").string()) == 3);
}
