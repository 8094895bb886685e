// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "config.hpp"
#include "runner.hpp"

#include "fnls/io.hpp"
#include "fnls/kernel.hpp"
#include "fnls/ldp.hpp"
#include "fnls/random.hpp"
#include "fnls/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

using namespace fnls;
using cli::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(std::initializer_list<std::pair<const char*, double>> items) {
  std::ostringstream ss;
  ss.precision(4);
  bool first = true;
  for (const auto& [k, v] : items) {
    ss << (first ? "" : " ") << k << "=" << v;
    first = false;
  }
  return ss.str();
}

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "fnls_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs one experiment through the command-line pipeline and returns its manifest.
json run_experiment(const std::string& name, cli::Kind kind, const json& doc, int& status) {
  const fs::path out = workdir() / name;
  status = cli::run(cli::parse_config(doc, kind), out);
  return json::parse(io::read_file(out / "manifest.json"));
}

json read_json(const fs::path& p) { return json::parse(io::read_file(p)); }

Outcome fbm_law() {
  double worst = 0.0;
  for (double h : {0.3, 0.5, 0.7}) {
    const TimeGrid tg(1.0, 64);
    const ScalarPathSet set = sample_fbm_exact(h, tg, 5000, derive_key(42, {1}));
    Stream rng(42, {2, static_cast<std::uint64_t>(h * 10)});
    for (int pair = 0; pair < 10; ++pair) {
      int a = static_cast<int>(rng.uniform() * 65);
      int b = static_cast<int>(rng.uniform() * 65);
      if (a == b) b = (a + 7) % 65;
      if (a > b) std::swap(a, b);
      double m2 = 0.0;
      double m4 = 0.0;
      for (int r = 0; r < set.replicates(); ++r) {
        const double d = set.values(r, b) - set.values(r, a);
        m2 += d * d;
        m4 += d * d * d * d;
      }
      m2 /= set.replicates();
      m4 /= set.replicates();
      const double se = std::sqrt((m4 - m2 * m2) / set.replicates());
      worst = std::max(worst, std::abs(m2 - std::pow(tg.point(b) - tg.point(a), 2.0 * h)) / se);
    }
  }
  return {worst < 4.0, fmt({{"max_abs_z", worst}})};
}

Outcome kernel_factorization() {
  auto error = [](double h) {
    const TimeGrid tg(1.0, 256);
    const Eigen::MatrixXd q = kernel_covariance_matrix(HurstKernel(h), tg);
    double worst = 0.0;
    for (int i = 1; i <= 256; ++i) {
      for (int j = 1; j <= 256; ++j) {
        worst = std::max(worst, std::abs(q(i - 1, j - 1) - fbm_covariance(h, tg.point(i), tg.point(j))));
      }
    }
    return worst;
  };
  const double e5 = error(0.5);
  const double e7 = error(0.7);
  const double e3 = error(0.3);
  return {std::max(e5, e7) < 1e-3 && e3 < 1e-2, fmt({{"err_H0.5", e5}, {"err_H0.7", e7}, {"err_H0.3", e3}})};
}

Outcome half_degeneracy() {
  const HurstKernel k(0.5);
  Stream rng(42, {3});
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double t = 10.0 * rng.uniform() + 1e-12;
    const double s = t * rng.uniform() + 1e-300;
    worst = std::max(worst, std::abs(k(t, s) - 1.0));
  }
  const bool exact = normalization_constant(0.5) == 1.0;
  return {worst == 0.0 && exact, fmt({{"max_dev", worst}, {"c_half_exact", exact ? 1.0 : 0.0}})};
}

Outcome group() {
  const GridSpec grid(1, 64, std::numbers::pi);
  Stream rng(42, {4});
  std::vector<cplx> c(grid.size());
  for (int k = 0; k < grid.size(); ++k) c[k] = std::pow(1.0 + grid.xi_squared(k), -1.5) * cplx(rng.normal(), rng.normal());
  ComplexField u = from_spectrum(grid, c);
  double drift = 0.0;
  for (int i = 0; i < 200; ++i) {
    const ComplexField v = apply_group(u, 10.0 * rng.normal());
    for (double s : {0.0, 1.0, 2.0}) drift = std::max(drift, std::abs(sobolev_norm(v, s) / sobolev_norm(u, s) - 1.0));
    u = v;
  }
  double ratio = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double gamma = 0.95 * i / 19.0;
    for (int j = 0; j < 20; ++j) {
      const double t = std::pow(10.0, -3.0 + 4.0 * j / 19.0);
      ratio = std::max(ratio, group_deviation_norm(grid, gamma, t) / (std::pow(2.0, 1.0 - gamma) * std::pow(t, gamma)));
    }
  }
  return {drift < 1e-12 && ratio <= 1.0, fmt({{"isometry_drift", drift}, {"max_pg_ratio", ratio}})};
}

Outcome covariance_factorization() {
  const GridSpec grid(1, 8, std::numbers::pi);
  double residual = 0.0;
  double worst_z = 0.0;
  for (double h : {0.55, 0.7}) {
    const CorrelationSpec spec = build_correlation(grid, 4.0, h, 0.2, 4);
    const HurstKernel kernel(h);
    const DiscreteLOperator op(spec, kernel, TimeGrid(1.0, 8));
    const Eigen::MatrixXd q = build_Q(spec, kernel, op.timegrid());
    residual = std::max(residual, verify_factorization(q, op));
    const int draws = 20000;
    Eigen::MatrixXd x(op.rows(), draws);
    for (int r = 0; r < draws; ++r) x.col(r) = op.flatten(op.sample(derive_key(42, {5}), r));
    const Eigen::MatrixXd cov = x * x.transpose() / draws;
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const double se = std::sqrt((q(i, i) * q(j, j) + q(i, j) * q(i, j)) / draws);
        worst_z = std::max(worst_z, std::abs(cov(i, j) - q(i, j)) / se);
      }
    }
  }
  return {residual < 1e-10 && worst_z < 5.0, fmt({{"residual", residual}, {"max_abs_z", worst_z}})};
}

Outcome deterministic_solver() {
  const GridSpec pw(1, 32, std::numbers::pi);
  const auto nl = NonlinearitySpec::kerr(-1.0, 1.0);
  const ComplexField u0 = ComplexField::from_function(pw, [](double x, double) { return 0.5 * std::polar(1.0, 2.0 * x); });
  const Trajectory t1 = solve_mild(u0, nl, nullptr, 0.0, SolverConfig{1.0, 1e-3, 0, 0});
  const double omega = 4.0 - nl.rate(0.25);
  ComplexField diff(pw);
  for (int j = 0; j < pw.size(); ++j) {
    diff.values[j] = t1.state(1000)->values[j] - 0.5 * std::polar(1.0, 2.0 * pw.coordinate(j, 0) + omega);
  }
  const double pw_err = l2_norm(diff);

  const GridSpec grid(1, 256, 20.0);
  const ComplexField sol = ComplexField::from_function(grid, [](double x, double) { return std::sqrt(2.0) / std::cosh(x); });
  const auto focus = NonlinearitySpec::kerr(1.0, 1.0);
  const Trajectory t2 = solve_mild(sol, focus, nullptr, 0.0, SolverConfig{1.0, 1e-3, 0, 0});
  double dm = 0.0;
  double dh = 0.0;
  for (const auto& d : t2.diagnostics) {
    dm = std::max(dm, std::abs(d.mass - t2.diagnostics[0].mass));
    dh = std::max(dh, std::abs(d.hamiltonian - t2.diagnostics[0].hamiltonian));
  }
  auto error = [&](double dt) {
    const Trajectory t = solve_mild(sol, focus, nullptr, 0.0, SolverConfig{1.0, dt, 0, 0});
    ComplexField d(grid);
    for (int j = 0; j < grid.size(); ++j) d.values[j] = t.state(t.timegrid.steps())->values[j] - std::polar(1.0, -1.0) * sol.values[j];
    return l2_norm(d);
  };
  const double order = std::log2(error(0.02) / error(0.01));
  return {pw_err < 1e-6 && dm < 1e-8 && dh < 1e-6 && order >= 1.9,
          fmt({{"plane_wave_err", pw_err}, {"mass_drift", dm}, {"hamiltonian_drift", dh}, {"order", order}})};
}

Outcome ldp_triangle() {
  const json doc = {{"H", 0.7},
                    {"r", 4},
                    {"alpha", 0.2},
                    {"modes", 8},
                    {"grid", {{"dim", 1}, {"N", 8}, {"L", std::numbers::pi}}},
                    {"T", 1.0},
                    {"dt", 1.0 / 16},
                    {"nonlinearity", {{"kind", "none"}}},
                    {"initial", {{"kind", "zero"}}},
                    {"event", {{"kind", "terminal-ball-exit"}, {"delta", 0.6}, {"s", 0}}},
                    {"eps_ladder", {0.25, 0.16, 0.09, 0.04}},
                    {"replicates", 20000},
                    {"seed", 42}};
  int status = 0;
  const json m = run_experiment("ldp", cli::Kind::ldp, doc, status);
  const json& s = m.at("summary");
  if (status != 0 || !s.at("mc_rate").is_number() || !s.at("pseudo_inverse_rate").is_number()) {
    return {false, "ldp run did not produce three rates"};
  }
  const double mc = s.at("mc_rate");
  const double pinv = s.at("pseudo_inverse_rate");
  const double opt = s.at("variational_bound");
  auto close = [](double a, double b) { return std::abs(a - b) <= 0.25 * std::min(a, b); };
  return {s.at("optimizer_feasible").get<bool>() && close(mc, pinv) && close(mc, opt) && close(pinv, opt),
          fmt({{"mc", mc}, {"pinv", pinv}, {"optimizer", opt}})};
}

Outcome holder() {
  double worst = 0.0;
  int status = 0;
  bool ok = true;
  for (double h : {0.3, 0.5, 0.7}) {
    const json m = run_experiment("holder_fbm_" + std::to_string(static_cast<int>(h * 10)), cli::Kind::holder,
                                  {{"source", "fbm"}, {"H", h}, {"n", 1 << 14}, {"sampler", "fast"}, {"seed", 42}},
                                  status);
    ok = ok && status == 0;
    worst = std::max(worst, std::abs(m.at("summary").at("mean_exponent").get<double>() - h));
  }
  const json z = run_experiment("holder_z", cli::Kind::holder,
                                {{"source", "convolution"},
                                 {"H", 0.7},
                                 {"n", 4096},
                                 {"paths", 20},
                                 {"modes", 8},
                                 {"grid", {{"N", 16}}},
                                 {"s", 1},
                                 {"seed", 42}},
                                status);
  const double lowest = z.at("summary").at("min_exponent");
  return {ok && status == 0 && worst <= 0.08 && lowest >= 0.6,
          fmt({{"fbm_max_error", worst}, {"z_min_exponent_H1", lowest}})};
}

Outcome support() {
  int status = 0;
  const json m = run_experiment("support", cli::Kind::support,
                                {{"H", 0.7},
                                 {"samples", 50},
                                 {"family_sizes", {8, 16, 32, 64}},
                                 {"modes", 8},
                                 {"grid", {{"N", 16}}},
                                 {"seed", 42}},
                                status);
  const json& d = m.at("summary").at("median_distance");
  std::ostringstream ss;
  ss.precision(4);
  ss << "medians=";
  for (std::size_t i = 0; i < d.size(); ++i) ss << (i ? "," : "") << d[i].get<double>();
  return {status == 0 && m.at("summary").at("monotone_nonincreasing").get<bool>(), ss.str()};
}

Outcome cemetery() {
  auto doc = [](double lambda) {
    return json{{"grid", {{"N", 2048}, {"L", 1.6}}},
                {"T", 2e-3},
                {"dt", 1e-6},
                {"M", 1e3},
                {"snapshot_stride", 50},
                {"nonlinearity", {{"kind", "kerr"}, {"lambda", lambda}, {"sigma", 2}}},
                {"initial", {{"kind", "gaussian"}, {"amplitude", 6.32}, {"width", 0.1}}}};
  };
  int s1 = 0;
  int s2 = 0;
  const json focus = run_experiment("cemetery_focus", cli::Kind::solve, doc(1.0), s1);
  const json defocus = run_experiment("cemetery_defocus", cli::Kind::solve, doc(-1.0), s2);
  const bool blew = focus.at("summary").at("blew_up");
  const bool twin = defocus.at("summary").at("blew_up");
  if (s1 != 0 || s2 != 0 || !blew) return {false, "focusing run did not reach the cemetery"};
  const int c = focus.at("summary").at("cemetery_step");
  // no stored field at or after the cemetery step
  int late = 0;
  int stored = 0;
  for (const auto& e : fs::directory_iterator(workdir() / "cemetery_focus" / "fields")) {
    ++stored;
    if (std::stoi(e.path().stem().string().substr(5)) >= c) ++late;
  }
  return {late == 0 && stored > 0 && !twin,
          fmt({{"blowup_time", focus.at("summary").at("blowup_time").get<double>()},
               {"post_cemetery_fields", static_cast<double>(late)},
               {"defocusing_blew_up", twin ? 1.0 : 0.0}})};
}

Outcome duality_restriction() {
  Stream rng(42, {6});
  const TimeGrid tg(1.0, 16);
  double duality = 0.0;
  for (double h : {0.3, 0.5, 0.7}) {
    for (int trial = 0; trial < 4; ++trial) {
      double c[8];
      for (double& x : c) x = rng.normal();
      const auto phi = PiecewiseConstant::sample(tg, [&](double t) { return c[0] + c[1] * t + c[2] * t * t + c[3] * t * t * t; });
      const auto g = PiecewiseConstant::sample(tg, [&](double t) { return c[4] + c[5] * t + c[6] * t * t + c[7] * t * t * t; });
      const auto [left, right] = duality_pairing(HurstKernel(h), phi, g, 1.0);
      duality = std::max(duality, std::abs(left - right));
    }
  }
  double restriction = 0.0;
  for (double h : {0.3, 0.7}) {
    const HurstKernel k(h);
    const auto phi = PiecewiseConstant::sample(tg, [&](double) { return rng.normal(); });
    for (double t : {0.375, 0.6, 0.9}) {
      const auto head = phi.restricted(t);
      const auto masked = phi.masked(t);
      for (int i = 1; i < 40; ++i) {
        const double s = t * i / 40.0;
        restriction = std::max(restriction, std::abs(apply_kt_star(k, head, t, s) - apply_kt_star(k, masked, 1.0, s)));
      }
    }
  }
  return {duality < 1e-5 && restriction < 1e-8, fmt({{"duality_gap", duality}, {"restriction_gap", restriction}})};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"fbm_law", fbm_law},
      {"kernel_factorization", kernel_factorization},
      {"half_degeneracy", half_degeneracy},
      {"group_isometry_and_bound", group},
      {"covariance_factorization", covariance_factorization},
      {"deterministic_solver", deterministic_solver},
      {"linear_ldp_triangle", ldp_triangle},
      {"holder_regularity", holder},
      {"support_monotone", support},
      {"cemetery_semantics", cemetery},
      {"duality_and_restriction", duality_restriction},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, body] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %-26s %7.1fs  %s\n", o.pass ? "PASS" : "FAIL", index, name.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
