#include "runner.hpp"

#include "oracles.hpp"

#include "fnls/holder.hpp"
#include "fnls/io.hpp"
#include "fnls/kernel.hpp"
#include "fnls/ldp.hpp"
#include "fnls/quadrature.hpp"
#include "fnls/random.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace fnls::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

// Collects artifact names; every file goes through write_atomic.
class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    io::write_atomic(dir_ / name, content);
    names_.push_back(name);
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

// Non-finite numbers have no JSON spelling; they are written as strings.
json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string step_name(int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fields/step_%06d.csv", k);
  return buf;
}

json grid_json(const GridSpec& g) {
  return {{"dim", g.dim()},         {"N", g.points()},        {"L", g.half_width()},
          {"spacing", g.spacing()}, {"volume", g.volume()}};
}

json correlation_json(const CorrelationSpec& spec) {
  return {{"H", spec.hurst},
          {"alpha", spec.alpha},
          {"r", spec.decay},
          {"modes", spec.modes},
          {"eigenvalues", spec.eigenvalues},
          {"hs_norm", number(spec.hs_norm)},
          {"tail_ratio", number(spec.tail_ratio)}};
}

ConvolutionMethod method_from(const json& params) {
  return params.at("method").get<std::string>() == "fbm_path" ? ConvolutionMethod::fbm_path
                                                               : ConvolutionMethod::volterra;
}

void write_trajectory(Artifacts& out, const Trajectory& traj) {
  out.write("diagnostics.csv", io::diagnostics_csv(traj));
  for (std::size_t i = 0; i < traj.snapshot_steps.size(); ++i) {
    out.write(step_name(traj.snapshot_steps[i]), io::field_csv(traj.snapshots[i]));
  }
}

json trajectory_summary(const Trajectory& traj) {
  const auto& first = traj.diagnostics.front();
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  double max_h1 = 0.0;
  for (const auto& d : traj.diagnostics) {
    if (d.cemetery) break;
    mass_drift = std::max(mass_drift, std::abs(d.mass - first.mass));
    energy_drift = std::max(energy_drift, std::abs(d.hamiltonian - first.hamiltonian));
    max_h1 = std::max(max_h1, d.h1);
  }
  json j = {{"steps", traj.timegrid.steps()},
            {"threshold_M", traj.threshold},
            {"blew_up", traj.blew_up()},
            {"blowup_time", number(traj.blowup_time)},
            {"max_mass_drift", mass_drift},
            {"max_hamiltonian_drift", energy_drift},
            {"max_h1", max_h1},
            {"snapshots", traj.snapshot_steps.size()}};
  j["cemetery_step"] = traj.cemetery_step ? json(*traj.cemetery_step) : json(nullptr);
  return j;
}

std::string control_csv(const DiscreteLOperator& op, const Control& h) {
  std::string out = "s,weight";
  for (int m = 0; m < op.modes(); ++m) {
    out += ",m" + std::to_string(m) + "_re,m" + std::to_string(m) + "_im";
  }
  out += '\n';
  for (int p = 0; p < op.nodes().size(); ++p) {
    std::vector<double> row{op.nodes().nodes[p], h.weights[p]};
    for (int r = 0; r < h.values.rows(); ++r) row.push_back(h.values(r, p));
    out += io::join_row(row) + '\n';
  }
  return out;
}

json holder_json(const HolderReport& r) {
  return {{"exponent", number(r.exponent)}, {"r_squared", number(r.r_squared)},
          {"min_lag", r.min_lag},          {"max_lag", r.max_lag},
          {"lags", r.lags},                {"increments", r.increments},
          {"degenerate", r.degenerate}};
}

// Owns the operator the problem points at, so it is neither copied nor moved.
struct ProblemParts {
  explicit ProblemParts(const json& p)
      : grid(grid_from(p)),
        spec(correlation_from(p, grid)),
        kernel(p.at("H").get<double>()),
        cfg(solver_from(p)),
        op(spec, kernel, cfg.timegrid()),
        problem{initial_from(p, grid), nonlinearity_from(p), cfg, &op} {}
  ProblemParts(const ProblemParts&) = delete;
  ProblemParts& operator=(const ProblemParts&) = delete;

  GridSpec grid;
  CorrelationSpec spec;
  HurstKernel kernel;
  SolverConfig cfg;  // the operator lives on the solver's own time grid
  DiscreteLOperator op;
  Problem problem;
};

// ---------------------------------------------------------------------------

json run_fbm(const RunConfig& cfg, Artifacts& out) {
  const json& p = cfg.params;
  const double hurst = p.at("H");
  const TimeGrid tg(p.at("T").get<double>(), p.at("n").get<int>());
  const int reps = p.at("replicates");
  const ScalarPathSet paths = p.at("sampler") == "fast" ? sample_fbm_fast(hurst, tg, reps, cfg.seed)
                                                        : sample_fbm_exact(hurst, tg, reps, cfg.seed);
  out.write("paths.csv", io::paths_csv(paths));
  // terminal variance against T^{2H} as a quick sanity figure
  double m2 = 0.0;
  for (int r = 0; r < reps; ++r) m2 += paths.values(r, tg.steps()) * paths.values(r, tg.steps());
  return {{"replicates", reps},
          {"terminal_second_moment", m2 / reps},
          {"terminal_variance_exact", std::pow(tg.horizon(), 2.0 * hurst)}};
}

json run_convolve(const RunConfig& cfg, Artifacts& out) {
  const json& p = cfg.params;
  const GridSpec grid = grid_from(p);
  const CorrelationSpec spec = correlation_from(p, grid);
  const HurstKernel kernel(spec.hurst);
  const TimeGrid tg(p.at("T").get<double>(), p.at("n").get<int>());
  const ConvolutionPath z =
      sample_convolution(spec, kernel, tg, cfg.seed, method_from(p), 0, p.at("refine").get<int>());
  out.write_json("grid.json", grid_json(grid));
  std::string modes = "t";
  for (int m = 0; m < spec.size(); ++m) {
    modes += ",m" + std::to_string(m) + "_re,m" + std::to_string(m) + "_im";
  }
  modes += '\n';
  for (int k = 0; k <= tg.steps(); ++k) {
    std::vector<double> row{tg.point(k)};
    for (int m = 0; m < spec.size(); ++m) {
      row.push_back(z.coefficients(k, m).real());
      row.push_back(z.coefficients(k, m).imag());
    }
    modes += io::join_row(row) + '\n';
    out.write(step_name(k), io::field_csv(z.field(k)));
  }
  out.write("modes.csv", modes);
  return {{"correlation", correlation_json(spec)},
          {"terminal_h1", z.distance(tg.steps(), 0, 1.0)}};
}

json run_solve(const RunConfig& cfg, Artifacts& out) {
  const json& p = cfg.params;
  const GridSpec grid = grid_from(p);
  const ComplexField u0 = initial_from(p, grid);
  const NonlinearitySpec nl = nonlinearity_from(p);
  const SolverConfig sc = solver_from(p);
  const double eps = p.at("eps");
  std::optional<ConvolutionPath> z;
  json extra = json::object();
  if (eps > 0.0) {
    const CorrelationSpec spec = correlation_from(p, grid);
    const HurstKernel kernel(spec.hurst);
    z = sample_convolution(spec, kernel, sc.timegrid(), cfg.seed, method_from(p), 0,
                           p.at("refine").get<int>());
    extra = correlation_json(spec);
  }
  const Trajectory traj = solve_mild(u0, nl, z ? &*z : nullptr, eps, sc);
  out.write_json("grid.json", grid_json(grid));
  write_trajectory(out, traj);
  json s = trajectory_summary(traj);
  if (!extra.empty()) s["correlation"] = extra;
  return s;
}

json run_skeleton(const RunConfig& cfg, Artifacts& out) {
  const json& p = cfg.params;
  const ProblemParts parts(p);
  const json& c = p.at("control");
  const double scale = c.at("scale");
  Control h = parts.op.zero_control();
  if (c.at("kind") == "random") {
    h = random_control(parts.op, cfg.seed, 0, scale);
  } else if (c.at("kind") == "constant") {
    for (int m = 0; m < parts.op.modes(); ++m) h.values.row(2 * m).setConstant(scale);
  }
  const Trajectory traj = parts.problem.skeleton(h);
  out.write_json("grid.json", grid_json(parts.grid));
  write_trajectory(out, traj);
  out.write("control.csv", control_csv(parts.op, h));
  json s = trajectory_summary(traj);
  s["control_energy"] = h.energy();
  s["correlation"] = correlation_json(parts.spec);
  return s;
}

json run_ldp(const RunConfig& cfg, Artifacts& out) {
  const json& p = cfg.params;
  const ProblemParts parts(p);
  const json& e = p.at("event");
  EventSpec event{parse_event_kind(e.at("kind")), e.at("delta"), e.at("s")};
  const std::vector<double> ladder = p.at("eps_ladder");
  const int reps = p.at("replicates");

  RateReport report;
  std::vector<double> probs;
  std::string csv = "eps,p,ci_lo,ci_hi,neg_eps_log_p\n";
  json rungs = json::array();
  // common random numbers: every rung reuses the replicate streams of `seed`
  for (double eps : ladder) {
    const ProbabilityEstimate est = estimate_event_probability(parts.problem, event, eps, reps, cfg.seed);
    report.ladder.push_back(est);
    probs.push_back(est.p);
    const double y = est.p > 0.0 ? -eps * std::log(est.p) : std::numeric_limits<double>::infinity();
    csv += io::join_row({eps, est.p, est.ci_lo, est.ci_hi, y}) + '\n';
    rungs.push_back({{"eps", eps},
                     {"replicates", est.replicates},
                     {"hits", est.hits},
                     {"p", est.p},
                     {"ci_lo", est.ci_lo},
                     {"ci_hi", est.ci_hi},
                     {"neg_eps_log_p", number(y)},
                     {"never_hit", est.never_hit}});
  }
  report.slope = ldp_slope(ladder, probs);

  json pinv = nullptr;
  if (parts.problem.nl.kind == NonlinearitySpec::Kind::none &&
      event.kind == EventSpec::Kind::terminal_ball_exit) {
    const RateResult rr = terminal_ball_rate(parts.op, event.threshold, event.sobolev);
    report.pseudo_inverse_rate = rr.rate;
    pinv = number(rr.rate);
  }

  MinimizeOptions mo;
  mo.basis_dim = p.at("basis_dim");
  mo.iterations = p.at("iterations");
  const MinimizeResult mr = minimize_rate(parts.problem, event, mo);
  report.variational_bound = mr.energy;

  // 95% positivity of the slope: intercept minus 1.96 standard errors
  const bool positive = report.slope.sufficient &&
                        report.slope.rate - 1.959964 * report.slope.rate_stderr > 0.0;
  json rate_report = {
      {"event", {{"kind", to_string(event.kind)}, {"delta", event.threshold}, {"s", event.sobolev}}},
      {"ladder", rungs},
      {"slope",
       {{"rate", number(report.slope.rate)},
        {"rate_stderr", number(report.slope.rate_stderr)},
        {"eps_coefficient", number(report.slope.eps_coefficient)},
        {"constant_fit", number(report.slope.constant_fit)},
        {"drift", number(report.slope.drift)},
        {"points", report.slope.points},
        {"sufficient", report.slope.sufficient},
        {"positive_at_95", positive}}},
      {"pseudo_inverse_rate", pinv},
      {"variational_bound",
       {{"rate", number(mr.energy)},
        {"feasible", mr.feasible},
        {"evaluations", mr.evaluations},
        {"shortfall", number(mr.shortfall)}}}};
  out.write_json("rate_report.json", rate_report);
  out.write("ladder.csv", csv);
  return {{"mc_rate", number(report.slope.rate)},
          {"pseudo_inverse_rate", pinv},
          {"variational_bound", number(mr.energy)},
          {"optimizer_feasible", mr.feasible}};
}

json run_holder(const RunConfig& cfg, Artifacts& out) {
  const json& p = cfg.params;
  const double hurst = p.at("H");
  const TimeGrid tg(p.at("T").get<double>(), p.at("n").get<int>());
  const int paths = p.at("paths");
  HolderOptions opts;
  opts.min_lag = p.at("min_lag");
  opts.max_lag = p.at("max_lag");
  opts.statistic = p.at("statistic") == "sup" ? HolderOptions::Statistic::sup : HolderOptions::Statistic::rms;

  std::vector<HolderReport> reports(paths);
  if (p.at("source") == "fbm") {
    const ScalarPathSet set = p.at("sampler") == "exact" ? sample_fbm_exact(hurst, tg, paths, cfg.seed)
                                                         : sample_fbm_fast(hurst, tg, paths, cfg.seed);
    for (int r = 0; r < paths; ++r) {
      std::vector<double> series(tg.steps() + 1);
      for (int k = 0; k <= tg.steps(); ++k) series[k] = set.values(r, k);
      reports[r] = holder_exponent(series, tg.dt(), opts);
    }
  } else {
    const GridSpec grid = grid_from(p);
    const CorrelationSpec spec = correlation_from(p, grid);
    const HurstKernel kernel(hurst);
    for (int r = 0; r < paths; ++r) {
      const ConvolutionPath z = sample_convolution(spec, kernel, tg, cfg.seed, method_from(p),
                                                   static_cast<std::uint64_t>(r), p.at("refine").get<int>());
      reports[r] = holder_exponent(z, p.at("s").get<double>(), opts);
    }
  }
  json list = json::array();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double mean = 0.0;
  for (const auto& r : reports) {
    list.push_back(holder_json(r));
    lo = std::min(lo, r.exponent);
    hi = std::max(hi, r.exponent);
    mean += r.exponent / paths;
  }
  out.write_json("holder_report.json", {{"H", hurst},
                                        {"source", p.at("source")},
                                        {"paths", list},
                                        {"mean_exponent", number(mean)},
                                        {"min_exponent", number(lo)},
                                        {"max_exponent", number(hi)}});
  return {{"mean_exponent", number(mean)}, {"min_exponent", number(lo)}, {"max_exponent", number(hi)}};
}

json run_support(const RunConfig& cfg, Artifacts& out, bool& ok) {
  const json& p = cfg.params;
  const ProblemParts parts(p);
  const int count = p.at("samples");
  const std::vector<int> sizes = p.at("family_sizes");
  const double s = p.at("s");

  std::vector<Trajectory> samples;
  samples.reserve(count);
  for (int r = 0; r < count; ++r) samples.push_back(parts.problem.sample(1.0, cfg.seed, r));
  // member 0 is h = 0; the rest are white-noise controls, so families are nested
  std::vector<Trajectory> family;
  family.reserve(sizes.back());
  family.push_back(parts.problem.skeleton(parts.op.zero_control()));
  for (int j = 1; j < sizes.back(); ++j) {
    family.push_back(parts.problem.skeleton(random_control(parts.op, cfg.seed, j)));
  }
  std::vector<double> medians;
  for (int size : sizes) {
    const std::vector<Trajectory> head(family.begin(), family.begin() + size);
    medians.push_back(support_distance(samples, head, s));
  }
  ok = true;
  for (std::size_t i = 1; i < medians.size(); ++i) ok = ok && medians[i] <= medians[i - 1];
  json m = json::array();
  for (double x : medians) m.push_back(number(x));
  out.write_json("support_report.json",
                 {{"samples", count}, {"family_sizes", sizes}, {"median_distance", m}, {"s", s},
                  {"monotone_nonincreasing", ok}});
  return {{"median_distance", m}, {"monotone_nonincreasing", ok}};
}

json run_oracles(const RunConfig& cfg, Artifacts& out, bool& ok) {
  const std::vector<OracleResult> results = run_oracle_suite(cfg.seed);
  json list = json::array();
  int failed = 0;
  for (const auto& r : results) {
    failed += r.passed ? 0 : 1;
    list.push_back({{"name", r.name},
                    {"passed", r.passed},
                    {"residual", number(r.residual)},
                    {"tolerance", number(r.tolerance)},
                    {"detail", r.detail}});
  }
  ok = failed == 0;
  const int total = static_cast<int>(results.size());
  out.write_json("oracle_report.json",
                 {{"oracles", list}, {"passed", total - failed}, {"failed", failed}});
  return {{"passed", total - failed}, {"failed", failed}};
}

}  // namespace

GridSpec grid_from(const json& params) {
  const json& g = params.at("grid");
  return GridSpec(g.at("dim"), g.at("N"), g.at("L"));
}

CorrelationSpec correlation_from(const json& params, const GridSpec& grid) {
  return build_correlation(grid, params.at("r"), params.at("H"), params.at("alpha"),
                           params.at("modes"));
}

NonlinearitySpec nonlinearity_from(const json& params) {
  const json& n = params.at("nonlinearity");
  NonlinearitySpec nl;
  nl.kind = parse_nonlinearity_kind(n.at("kind"));
  nl.lambda = n.at("lambda");
  nl.sigma = n.at("sigma");
  nl.kappa = n.at("kappa");
  nl.validate();
  return nl;
}

ComplexField initial_from(const json& params, const GridSpec& grid) {
  const json& u = params.at("initial");
  const std::string kind = u.at("kind");
  const double a = u.at("amplitude");
  const double w = u.at("width");
  const double xi = std::numbers::pi * u.at("wavenumber").get<int>() / grid.half_width();
  const double eta = u.at("eta");
  ComplexField f(grid);
  for (int j = 0; j < grid.size(); ++j) {
    const double x = grid.coordinate(j, 0);
    const double y = grid.dim() == 2 ? grid.coordinate(j, 1) : 0.0;
    const cplx wave = std::polar(1.0, xi * x);
    if (kind == "gaussian") {
      f.values[j] = a * std::exp(-(x * x + y * y) / (w * w)) * wave;
    } else if (kind == "plane_wave") {
      f.values[j] = a * wave;
    } else if (kind == "soliton") {
      f.values[j] = std::sqrt(2.0) * eta / std::cosh(eta * x) * wave;
    }
  }
  return f;
}

SolverConfig solver_from(const json& params) {
  SolverConfig cfg;
  cfg.horizon = params.at("T");
  cfg.dt = params.at("dt");
  cfg.blowup_threshold = params.at("M");
  cfg.snapshot_stride = params.contains("snapshot_stride") ? params.at("snapshot_stride").get<int>() : 1;
  return cfg;
}

Control random_control(const DiscreteLOperator& op, std::uint64_t seed, std::uint64_t index,
                       double scale) {
  Stream stream(seed, {0x5eed, index});
  const double sd = scale / std::sqrt(op.timegrid().dt());
  Eigen::MatrixXd cells(2 * op.modes(), op.steps());
  for (int c = 0; c < cells.cols(); ++c) {
    for (int r = 0; r < cells.rows(); ++r) cells(r, c) = sd * stream.normal();
  }
  return op.control_from_cells(cells);
}

int run(const RunConfig& cfg, const fs::path& out_dir) {
  Artifacts out(out_dir);
  json summary;
  bool ok = true;
  switch (cfg.kind) {
    case Kind::fbm: summary = run_fbm(cfg, out); break;
    case Kind::convolve: summary = run_convolve(cfg, out); break;
    case Kind::solve: summary = run_solve(cfg, out); break;
    case Kind::skeleton: summary = run_skeleton(cfg, out); break;
    case Kind::ldp: summary = run_ldp(cfg, out); break;
    case Kind::holder: summary = run_holder(cfg, out); break;
    case Kind::support: summary = run_support(cfg, out, ok); break;
    case Kind::oracle_suite: summary = run_oracles(cfg, out, ok); break;
  }
  const json config = resolved(cfg);
  out.write_json("config.json", config);
  json manifest = {{"program", "fnls"},
                   {"version", kVersion},
                   {"kind", to_string(cfg.kind)},
                   {"seed", cfg.seed},
                   {"config", config},
                   {"reproduce", "fnls " + to_string(cfg.kind) + " --config config.json"},
                   {"summary", summary},
                   {"status", ok ? "ok" : "invariant-failure"}};
  manifest["outputs"] = out.names();
  io::write_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return ok ? kSuccess : kInvariantFailure;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const io::IoError*>(&e) != nullptr) return kIoError;
  if (dynamic_cast<const fs::filesystem_error*>(&e) != nullptr) return kIoError;
  if (dynamic_cast<const InvariantFailure*>(&e) != nullptr) return kInvariantFailure;
  if (dynamic_cast<const NotPositiveSemidefinite*>(&e) != nullptr) return kInvariantFailure;
  if (dynamic_cast<const QuadratureError*>(&e) != nullptr) return kInvariantFailure;
  if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr) return kValidationError;
  if (dynamic_cast<const std::domain_error*>(&e) != nullptr) return kValidationError;
  return kInvariantFailure;
}

}  // namespace fnls::cli
