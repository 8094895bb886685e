#include "fnls/solver.hpp"

#include "fnls/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace fnls {

int SolverConfig::steps() const {
  if (!(horizon > 0.0) || !(dt > 0.0)) throw std::invalid_argument("horizon and dt must be positive");
  const double ratio = horizon / dt;
  const long long n = std::llround(ratio);
  if (n < 1 || std::abs(n * dt - horizon) > 1e-9 * horizon) {
    throw std::invalid_argument("dt must divide the horizon T");
  }
  return static_cast<int>(n);
}

double SolverConfig::resolved_threshold(const ComplexField& u0) const {
  const double norm0 = sobolev_norm(u0, 1.0);
  double m = blowup_threshold;
  if (!(m > 0.0)) m = norm0 > 0.0 ? 1e3 * norm0 : 1e3;
  if (!(m > norm0)) throw std::invalid_argument("blow-up threshold M must exceed ||u0||_H1");
  return m;
}

const ComplexField* Trajectory::state(int step) const {
  if (is_cemetery(step)) return nullptr;
  for (std::size_t i = 0; i < snapshot_steps.size(); ++i) {
    if (snapshot_steps[i] == step) return &snapshots[i];
  }
  return nullptr;
}

namespace {

StepDiagnostics diagnose(const ComplexField& u, const NonlinearitySpec& nl, double t) {
  StepDiagnostics d;
  d.t = t;
  d.mass = mass(u);
  auto c = spectrum(u);
  double grad = 0.0;
  double h1 = 0.0;
  for (int k = 0; k < u.grid.size(); ++k) {
    const double xi2 = u.grid.xi_squared(k);
    const double a = std::norm(c[k]);
    grad += xi2 * a;
    h1 += (1.0 + xi2) * a;
  }
  grad *= u.grid.volume();
  d.h1 = std::sqrt(h1 * u.grid.volume());
  double pot = 0.0;
  if (nl.kind != NonlinearitySpec::Kind::none) {
    for (const auto& z : u.values) pot += nl.potential(std::norm(z));
    pot *= u.grid.cell_measure();
  }
  d.hamiltonian = 0.5 * grad - pot;
  return d;
}

}  // namespace

Trajectory solve_mild(const ComplexField& u0, const NonlinearitySpec& nl,
                      const ConvolutionPath* forcing, double eps, const SolverConfig& cfg) {
  nl.validate();
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  const TimeGrid tg = cfg.timegrid();
  const int n = tg.steps();
  const double dt = tg.dt();
  const GridSpec& grid = u0.grid;
  if (forcing != nullptr) {
    if (forcing->timegrid.steps() != n ||
        std::abs(forcing->timegrid.horizon() - tg.horizon()) > 1e-12 * tg.horizon()) {
      throw std::invalid_argument("forcing path is not sampled on the solver time grid");
    }
    if (!(forcing->grid == grid)) throw std::invalid_argument("forcing lives on a different grid");
  }

  Trajectory traj{tg, eps, cfg.resolved_threshold(u0), {}, {}, {}, std::nullopt,
                  std::numeric_limits<double>::infinity()};
  traj.diagnostics.reserve(n + 1);
  traj.diagnostics.push_back(diagnose(u0, nl, 0.0));
  traj.snapshot_steps.push_back(0);
  traj.snapshots.push_back(u0);

  const bool forced = forcing != nullptr && eps > 0.0;
  const double amp = std::sqrt(eps) / std::sqrt(grid.volume());
  std::vector<cplx> group(grid.size());
  for (int k = 0; k < grid.size(); ++k) group[k] = std::polar(1.0, grid.xi_squared(k) * dt);
  const double inv_size = 1.0 / grid.size();

  std::vector<cplx> v = u0.values;
  std::vector<cplx> kick(grid.size());
  for (int k = 0; k < n; ++k) {
    nonlinear_substep(nl, v, 0.5 * dt);
    fft::forward(v.data(), grid.dim(), grid.points());
    for (int j = 0; j < grid.size(); ++j) v[j] *= group[j] * inv_size;
    fft::backward(v.data(), grid.dim(), grid.points());
    nonlinear_substep(nl, v, 0.5 * dt);
    if (forced) {
      std::fill(kick.begin(), kick.end(), cplx{});
      for (std::size_t m = 0; m < forcing->modes.size(); ++m) {
        const int flat = forcing->modes[m];
        const cplx d = forcing->coefficients(k + 1, m) - group[flat] * forcing->coefficients(k, m);
        kick[flat] = cplx(0.0, -amp) * d;
      }
      fft::backward(kick.data(), grid.dim(), grid.points());
      for (int j = 0; j < grid.size(); ++j) v[j] += kick[j];
    }

    ComplexField u(grid, v);
    StepDiagnostics diag = diagnose(u, nl, tg.point(k + 1));
    if (!u.finite() || !std::isfinite(diag.h1) || diag.h1 > traj.threshold) {
      traj.cemetery_step = k + 1;
      traj.blowup_time = tg.point(k + 1);
      for (int j = k + 1; j <= n; ++j) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        traj.diagnostics.push_back({tg.point(j), nan, nan, nan, true});
      }
      break;
    }
    traj.diagnostics.push_back(diag);
    const bool keep = (cfg.snapshot_stride > 0 && (k + 1) % cfg.snapshot_stride == 0) || k + 1 == n;
    if (keep) {
      traj.snapshot_steps.push_back(k + 1);
      traj.snapshots.push_back(std::move(u));
    }
  }
  return traj;
}

Trajectory solve_skeleton(const ComplexField& u0, const Control& h, const NonlinearitySpec& nl,
                          const DiscreteLOperator& op, const SolverConfig& cfg) {
  const ConvolutionPath forcing = op.apply(h);
  return solve_mild(u0, nl, &forcing, 1.0, cfg);
}

std::optional<int> detect_blowup(const Trajectory& traj, double threshold) {
  for (std::size_t k = 0; k < traj.diagnostics.size(); ++k) {
    const auto& d = traj.diagnostics[k];
    if (d.cemetery || !(d.h1 <= threshold)) return static_cast<int>(k);
  }
  return std::nullopt;
}

}  // namespace fnls
