#include "fnls/ldp.hpp"

#include "fnls/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fnls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const DiscreteLOperator& require_op(const Problem& problem) {
  if (problem.op == nullptr) throw std::invalid_argument("problem has no noise operator");
  return *problem.op;
}

double field_norm(const ComplexField& u, double s) { return sobolev_norm(u, s); }

double difference_norm(const ComplexField& a, const ComplexField& b, double s) {
  ComplexField d(a.grid);
  for (std::size_t j = 0; j < a.values.size(); ++j) d.values[j] = a.values[j] - b.values[j];
  return field_norm(d, s);
}

}  // namespace

Trajectory Problem::deterministic() const { return solve_mild(u0, nl, nullptr, 0.0, cfg); }

Trajectory Problem::sample(double eps, std::uint64_t seed, std::uint64_t replicate) const {
  if (eps == 0.0) return deterministic();
  const ConvolutionPath z = require_op(*this).sample(seed, replicate);
  return solve_mild(u0, nl, &z, eps, cfg);
}

Trajectory Problem::skeleton(const Control& h) const {
  return solve_skeleton(u0, h, nl, require_op(*this), cfg);
}

double EventSpec::shortfall(const Trajectory& traj, const Trajectory& reference) const {
  if (traj.blew_up()) return -kInf;
  const int n = traj.timegrid.steps();
  switch (kind) {
    case Kind::terminal_ball_exit: {
      if (reference.blew_up()) return -kInf;
      const ComplexField* u = traj.state(n);
      const ComplexField* ubar = reference.state(n);
      if (u == nullptr || ubar == nullptr) throw std::logic_error("terminal state was not recorded");
      return threshold - difference_norm(*u, *ubar, sobolev);
    }
    case Kind::sup_norm_exceed: {
      double best = 0.0;
      if (sobolev == 0.0 || sobolev == 1.0) {
        for (const auto& d : traj.diagnostics) {
          best = std::max(best, sobolev == 0.0 ? std::sqrt(d.mass) : d.h1);
        }
      } else {
        for (const auto& u : traj.snapshots) best = std::max(best, field_norm(u, sobolev));
      }
      return threshold - best;
    }
    case Kind::blowup_before_horizon: {
      double best = 0.0;
      for (const auto& d : traj.diagnostics) best = std::max(best, d.h1);
      return std::log(traj.threshold) - std::log(best);
    }
  }
  return kInf;
}

bool EventSpec::occurs(const Trajectory& traj, const Trajectory& reference) const {
  return shortfall(traj, reference) < 0.0;
}

std::string to_string(EventSpec::Kind kind) {
  switch (kind) {
    case EventSpec::Kind::terminal_ball_exit:
      return "terminal-ball-exit";
    case EventSpec::Kind::sup_norm_exceed:
      return "sup-norm-exceed";
    case EventSpec::Kind::blowup_before_horizon:
      return "blow-up-before-T";
  }
  return "";
}

EventSpec::Kind parse_event_kind(const std::string& name) {
  if (name == "terminal-ball-exit") return EventSpec::Kind::terminal_ball_exit;
  if (name == "sup-norm-exceed") return EventSpec::Kind::sup_norm_exceed;
  if (name == "blow-up-before-T") return EventSpec::Kind::blowup_before_horizon;
  throw std::invalid_argument("unknown event kind '" + name + "'");
}

void wilson_interval(int hits, int trials, double& lo, double& hi) {
  if (trials <= 0) throw std::invalid_argument("Wilson interval needs trials > 0");
  constexpr double z = 1.959964;
  const double n = trials;
  const double p = hits / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  lo = std::max(0.0, center - half);
  hi = std::min(1.0, center + half);
}

ProbabilityEstimate estimate_event_probability(const Problem& problem, const EventSpec& event,
                                               double eps, int replicates, std::uint64_t seed) {
  if (replicates < 100) throw std::invalid_argument("probability estimates need >= 100 replicates");
  Problem lean = problem;
  const bool needs_fields = event.kind == EventSpec::Kind::sup_norm_exceed &&
                            event.sobolev != 0.0 && event.sobolev != 1.0;
  lean.cfg.snapshot_stride = needs_fields ? 1 : 0;
  const Trajectory reference = lean.deterministic();
  std::vector<char> hit(replicates, 0);
  parallel_for(replicates, [&](int r) {
    const Trajectory traj = lean.sample(eps, seed, static_cast<std::uint64_t>(r));
    hit[r] = event.occurs(traj, reference) ? 1 : 0;
  });
  ProbabilityEstimate est;
  est.eps = eps;
  est.replicates = replicates;
  est.hits = static_cast<int>(std::count(hit.begin(), hit.end(), 1));
  est.p = static_cast<double>(est.hits) / replicates;
  wilson_interval(est.hits, replicates, est.ci_lo, est.ci_hi);
  est.never_hit = est.hits == 0;
  return est;
}

RateResult terminal_ball_rate(const DiscreteLOperator& op, double delta, double sobolev) {
  const int n = op.steps();
  std::vector<int> rows;
  std::vector<double> scale;
  for (int m = 0; m < op.modes(); ++m) {
    for (int c = 0; c < 2; ++c) {
      rows.push_back(op.row_index(m, n, c));
      scale.push_back(std::pow(1.0 + op.spec().omega(m), 0.5 * sobolev));
    }
  }
  const Eigen::MatrixXd cov = op.covariance();
  const int k = static_cast<int>(rows.size());
  Eigen::MatrixXd b(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) b(i, j) = scale[i] * cov(rows[i], rows[j]) * scale[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  const Eigen::VectorXd top = eig.eigenvectors().col(k - 1);
  Eigen::VectorXd f(k);
  for (int i = 0; i < k; ++i) f[i] = delta * top[i] / scale[i];
  return gaussian_rate(op, f, rows);
}

SlopeFit ldp_slope(const std::vector<double>& eps, const std::vector<double>& p) {
  if (eps.size() != p.size()) throw std::invalid_argument("ladder and probabilities differ in length");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (p[i] > 0.0) {
      xs.push_back(eps[i]);
      ys.push_back(-eps[i] * std::log(p[i]));
    }
  }
  SlopeFit fit;
  fit.points = static_cast<int>(xs.size());
  fit.sufficient = fit.points >= 4;
  if (xs.empty()) return fit;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  fit.constant_fit = my;
  fit.drift = *std::max_element(ys.begin(), ys.end()) - *std::min_element(ys.begin(), ys.end());
  fit.rate = my;
  if (xs.size() < 2) return fit;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) return fit;
  fit.eps_coefficient = sxy / sxx;
  fit.rate = my - fit.eps_coefficient * mx;
  if (xs.size() > 2) {
    double rss = 0.0;
    double sx2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - (fit.rate + fit.eps_coefficient * xs[i]);
      rss += r * r;
      sx2 += xs[i] * xs[i];
    }
    fit.rate_stderr = std::sqrt(rss / (n - 2.0) * sx2 / (n * sxx));
  }
  return fit;
}

namespace {

// Clamped uniform B-splines of degree min(3, count-1) on [0, T], evaluated at x.
std::vector<double> bspline_row(int count, double horizon, double x) {
  const int degree = std::min(3, count - 1);
  const int interior = count - degree - 1;
  std::vector<double> knots;
  for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
  for (int i = 1; i <= interior; ++i) knots.push_back(horizon * i / (interior + 1));
  for (int i = 0; i <= degree; ++i) knots.push_back(horizon);
  // Cox-de Boor on the knot span.
  std::vector<double> basis(knots.size() - 1, 0.0);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (knots[i] <= x && x < knots[i + 1]) basis[i] = 1.0;
  }
  if (x >= horizon) basis[count - 1 + 0] = 1.0;
  for (int d = 1; d <= degree; ++d) {
    for (std::size_t i = 0; i + d + 1 < knots.size(); ++i) {
      double v = 0.0;
      const double l = knots[i + d] - knots[i];
      const double r = knots[i + d + 1] - knots[i + 1];
      if (l > 0.0) v += (x - knots[i]) / l * basis[i];
      if (r > 0.0) v += (knots[i + d + 1] - x) / r * basis[i + 1];
      basis[i] = v;
    }
  }
  basis.resize(count);
  return basis;
}

class PenaltyProblem {
 public:
  PenaltyProblem(const Problem& problem, const EventSpec& event, const MinimizeOptions& options)
      : op_(require_op(problem)),
        event_(event),
        options_(options),
        reference_(problem.deterministic()),
        lean_(problem) {
    rows_ = 2 * op_.modes();
    if (rows_ == 0) throw std::invalid_argument("no active noise modes to control");
    per_row_ = options.basis_dim / rows_;
    if (per_row_ < 1) {
      throw std::invalid_argument("basis_dim is smaller than the number of mode directions");
    }
    const NodeSet& nodes = op_.nodes();
    basis_ = Eigen::MatrixXd(per_row_, nodes.size());
    for (int p = 0; p < nodes.size(); ++p) {
      const auto row = bspline_row(per_row_, nodes.grid.horizon(), nodes.nodes[p]);
      for (int b = 0; b < per_row_; ++b) basis_(b, p) = row[b];
    }
    lean_.cfg.snapshot_stride = 0;
  }

  int dimension() const { return rows_ * per_row_; }

  Control control(const Eigen::VectorXd& c) const {
    Control h = op_.zero_control();
    const Eigen::Map<const Eigen::MatrixXd> coeff(c.data(), rows_, per_row_);
    h.values = coeff * basis_;
    return h;
  }

  /// Shortfall against delta (1 + margin) when `padded`, else against delta.
  double shortfall(const Eigen::VectorXd& c, bool padded) const {
    const Trajectory traj = lean_.skeleton(control(c));
    const double s = event_.shortfall(traj, reference_);
    return padded ? s + options_.margin * std::abs(event_.threshold) : s;
  }

  double objective(const Eigen::VectorXd& c, double mu) const {
    evaluations.fetch_add(1, std::memory_order_relaxed);
    const double gap = std::max(0.0, shortfall(c, true));
    return control(c).energy() + mu * gap * gap;
  }

  const Trajectory& reference() const { return reference_; }

  mutable std::atomic<int> evaluations{0};

 private:
  const DiscreteLOperator& op_;
  EventSpec event_;
  MinimizeOptions options_;
  Trajectory reference_;
  Problem lean_;
  int rows_ = 0;
  int per_row_ = 0;
  Eigen::MatrixXd basis_;
};

Eigen::VectorXd gradient(const PenaltyProblem& pp, const Eigen::VectorXd& x, double mu) {
  const int dim = static_cast<int>(x.size());
  std::vector<double> plus(dim);
  std::vector<double> minus(dim);
  std::vector<double> step(dim);
  parallel_for(2 * dim, [&](int j) {
    const int i = j / 2;
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    Eigen::VectorXd y = x;
    y[i] += (j % 2 == 0) ? h : -h;
    const double f = pp.objective(y, mu);
    if (j % 2 == 0) {
      plus[i] = f;
      step[i] = h;
    } else {
      minus[i] = f;
    }
  });
  Eigen::VectorXd g(dim);
  for (int i = 0; i < dim; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    g[i] = (plus[i] - minus[i]) / (2.0 * h);
  }
  return g;
}

Eigen::VectorXd bfgs(const PenaltyProblem& pp, Eigen::VectorXd x, double mu, int iterations) {
  const int dim = static_cast<int>(x.size());
  double f = pp.objective(x, mu);
  Eigen::VectorXd g = gradient(pp, x, mu);
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(dim, dim);
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd d = -inv * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      inv.setIdentity();
      d = -g;
      slope = g.dot(d);
    }
    if (!(slope < 0.0)) break;
    double t = 1.0;
    Eigen::VectorXd xn = x + d;
    double fn = pp.objective(xn, mu);
    int tries = 0;
    while (!(fn <= f + 1e-4 * t * slope) && tries < 50) {
      t *= 0.5;
      xn = x + t * d;
      fn = pp.objective(xn, mu);
      ++tries;
    }
    if (!(fn <= f)) break;
    const Eigen::VectorXd gn = gradient(pp, xn, mu);
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
      inv = (id - rho * s * y.transpose()) * inv * (id - rho * y * s.transpose()) +
            rho * s * s.transpose();
    }
    const double change = f - fn;
    x = xn;
    f = fn;
    g = gn;
    if (g.norm() < 1e-9 * std::max(1.0, f) || change < 1e-13 * std::max(1.0, std::abs(f))) break;
  }
  return x;
}

}  // namespace

MinimizeResult minimize_rate(const Problem& problem, const EventSpec& event,
                             const MinimizeOptions& options) {
  if (options.basis_dim < 1 || options.basis_dim > 64) {
    throw std::invalid_argument("basis_dim must lie in [1, 64]");
  }
  PenaltyProblem pp(problem, event, options);
  const int dim = pp.dimension();
  MinimizeResult out;
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim);
  if (pp.shortfall(zero, false) < 0.0) {
    out.h = pp.control(zero);
    out.feasible = true;
    out.shortfall = pp.shortfall(zero, false);
    return out;
  }

  // Smallest multiple of each basis direction that realizes the padded event.
  auto scale_to_feasible = [&](const Eigen::VectorXd& dir, double& scale) {
    double hi = 1.0;
    int grow = 0;
    while (pp.shortfall(hi * dir, true) > 0.0 && grow < 40) {
      hi *= 2.0;
      ++grow;
    }
    if (pp.shortfall(hi * dir, true) > 0.0) return false;
    double lo = 0.0;
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (pp.shortfall(mid * dir, true) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    scale = hi;
    return true;
  };

  std::vector<double> scales(dim, kInf);
  std::vector<char> ok(dim, 0);
  parallel_for(dim, [&](int b) {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(dim);
    dir[b] = 1.0;
    double s = 0.0;
    if (scale_to_feasible(dir, s)) {
      scales[b] = s;
      ok[b] = 1;
    }
  });
  Eigen::VectorXd x = zero;
  double start_energy = 1.0;
  {
    double best = kInf;
    for (int b = 0; b < dim; ++b) {
      if (!ok[b]) continue;
      Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
      c[b] = scales[b];
      const double e = pp.control(c).energy();
      if (e < best) {
        best = e;
        x = c;
      }
    }
    if (std::isfinite(best)) start_energy = std::max(best, 1e-12);
  }

  const double delta = std::max(std::abs(event.threshold), 1e-12);
  double mu = 10.0 * start_energy / (delta * delta);
  for (int round = 0; round < options.penalty_rounds; ++round) {
    x = bfgs(pp, x, mu, options.iterations);
    if (pp.shortfall(x, false) <= 0.0) break;
    mu *= 10.0;
  }

  // Pull the control back radially to the padded boundary when that stays feasible.
  if (pp.shortfall(x, true) <= 0.0) {
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (pp.shortfall(mid * x, true) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    x *= hi;
  }

  out.h = pp.control(x);
  out.energy = out.h.energy();
  out.shortfall = pp.shortfall(x, false);
  out.feasible = out.shortfall <= 0.0;
  out.evaluations = pp.evaluations.load();
  return out;
}

double path_distance(const Trajectory& a, const Trajectory& b, double s) {
  if (a.timegrid.steps() != b.timegrid.steps()) {
    throw std::invalid_argument("trajectories live on different time grids");
  }
  double best = 0.0;
  for (int k = 0; k <= a.timegrid.steps(); ++k) {
    const bool da = a.is_cemetery(k);
    const bool db = b.is_cemetery(k);
    if (da && db) continue;
    if (da != db) return kInf;
    const ComplexField* ua = a.state(k);
    const ComplexField* ub = b.state(k);
    if (ua == nullptr || ub == nullptr) continue;
    best = std::max(best, difference_norm(*ua, *ub, s));
  }
  return best;
}

double support_distance(const std::vector<Trajectory>& samples,
                        const std::vector<Trajectory>& family, double s) {
  if (samples.empty() || family.empty()) throw std::invalid_argument("empty sample or family");
  std::vector<double> nearest(samples.size(), kInf);
  parallel_for(static_cast<int>(samples.size()), [&](int i) {
    for (const auto& f : family) nearest[i] = std::min(nearest[i], path_distance(samples[i], f, s));
  });
  std::sort(nearest.begin(), nearest.end());
  const std::size_t mid = nearest.size() / 2;
  if (nearest.size() % 2 == 1) return nearest[mid];
  return 0.5 * (nearest[mid - 1] + nearest[mid]);
}

}  // namespace fnls
