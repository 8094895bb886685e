#include "fnls/kernel.hpp"

#include "fnls/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fnls {

TimeGrid::TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("time horizon must be positive and finite");
  }
  if (steps < 1) throw std::invalid_argument("time grid needs at least one step");
}

std::vector<double> TimeGrid::points() const {
  std::vector<double> out(steps_ + 1);
  for (int k = 0; k <= steps_; ++k) out[k] = point(k);
  return out;
}

double normalization_constant(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::domain_error("H must lie in (0,1)");
  const double num = 2.0 * hurst * std::tgamma(1.5 - hurst);
  const double den = std::tgamma(hurst + 0.5) * std::tgamma(2.0 - 2.0 * hurst);
  return std::sqrt(num / den);
}

HurstKernel::HurstKernel(double hurst) : hurst_(hurst), c_h_(normalization_constant(hurst)) {}

double HurstKernel::along_gap(double s, double gap) const {
  if (!(s > 0.0)) throw std::domain_error("kernel evaluated at s <= 0");
  if (gap < 0.0) return 0.0;
  if (gap == 0.0) {
    if (hurst_ > 0.5) return 0.0;
    if (hurst_ == 0.5) return 1.0;
    return std::numeric_limits<double>::infinity();
  }
  const double a = hurst_ - 0.5;
  const double leading = std::pow(gap, a);
  if (a == 0.0) return c_h_ * leading;

  // \int_s^{s+gap} (u-s)^{H-3/2} (1 - (s/u)^{1/2-H}) du = s^a J(gap/s) with u = s(1+y),
  //   J(R) = \int_0^R y^{a-1} (1 - (1+y)^a) dy.
  // On [0, 1] take y = v^2; beyond 1 take y = e^w, which keeps both pieces smooth.
  const double ratio = gap / s;
  auto near = [a](double v) {
    if (v < 1e-100) return 0.0;  // integrand ~ v^{2H}
    return -2.0 * std::pow(v, 2.0 * a - 1.0) * std::expm1(a * std::log1p(v * v));
  };
  auto far = [a](double w) {
    const double y = std::exp(w);
    return -std::pow(y, a) * std::expm1(a * std::log1p(y));
  };
  double j = quad::tanh_sinh_checked(near, 0.0, std::sqrt(std::min(ratio, 1.0)), "kernel_eval",
                                     1e-14, 1e-9);
  if (ratio > 1.0) {
    j += quad::tanh_sinh_checked(far, 0.0, std::log(ratio), "kernel_eval", 1e-14, 1e-9);
  }
  const double tail = std::pow(s, a) * j;
  return c_h_ * (leading - a * tail);
}

double HurstKernel::operator()(double t, double s) const {
  if (!(s > 0.0)) throw std::domain_error("kernel evaluated at s <= 0");
  if (s > t) return 0.0;
  return along_gap(s, t - s);
}

double HurstKernel::time_derivative(double t, double s) const {
  if (!(s > 0.0)) throw std::domain_error("kernel derivative evaluated at s <= 0");
  if (s == t) throw std::domain_error("kernel derivative is not defined on the diagonal s = t");
  if (s > t) return 0.0;
  const double a = hurst_ - 0.5;
  return c_h_ * a * std::pow(t - s, a - 1.0) * std::pow(s / t, -a);
}

double kernel_eval(const HurstKernel& kernel, double t, double s) { return kernel(t, s); }

double kernel_time_derivative(const HurstKernel& kernel, double t, double s) {
  return kernel.time_derivative(t, s);
}

double fbm_covariance(double hurst, double t, double s) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::domain_error("H must lie in (0,1)");
  if (t < 0.0 || s < 0.0) throw std::domain_error("fBm covariance needs t, s >= 0");
  const double p = 2.0 * hurst;
  return 0.5 * (std::pow(s, p) + std::pow(t, p) - std::pow(std::abs(t - s), p));
}

Eigen::MatrixXd build_covariance_matrix(double hurst, const TimeGrid& grid) {
  const int n = grid.steps();
  Eigen::MatrixXd cov(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      cov(i, j) = cov(j, i) = fbm_covariance(hurst, grid.point(i + 1), grid.point(j + 1));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -kPsdTolerance) {
    throw NotPositiveSemidefinite("fBm covariance matrix is not positive semidefinite", min_eig);
  }
  return cov;
}

NodeSet NodeSet::build(const TimeGrid& grid, int nodes_per_half, int grading) {
  if (nodes_per_half < 1 || grading < 1) throw std::invalid_argument("invalid node rule");
  const quad::Rule& rule = quad::gauss_legendre(nodes_per_half);
  NodeSet out{grid, {}, {}, {}, {}};
  const double half = 0.5 * grid.dt();
  const int total = 2 * nodes_per_half * grid.steps();
  out.nodes.reserve(total);
  out.weights.reserve(total);
  out.offsets.reserve(total);
  out.cell.reserve(total);
  for (int c = 0; c < grid.steps(); ++c) {
    const double a = grid.point(c);
    // left half, clustered at t_c
    for (int i = 0; i < nodes_per_half; ++i) {
      const double v = rule.nodes[i];
      const double dx = half * std::pow(v, grading);
      out.nodes.push_back(c == 0 ? dx : a + dx);
      out.offsets.push_back(2.0 * half - dx);
      out.weights.push_back(half * grading * std::pow(v, grading - 1) * rule.weights[i]);
      out.cell.push_back(c);
    }
    // right half, clustered at t_{c+1}
    for (int i = nodes_per_half - 1; i >= 0; --i) {
      const double v = rule.nodes[i];
      const double dx = half * std::pow(v, grading);
      out.nodes.push_back(grid.point(c + 1) - dx);
      out.offsets.push_back(dx);
      out.weights.push_back(half * grading * std::pow(v, grading - 1) * rule.weights[i]);
      out.cell.push_back(c);
    }
  }
  return out;
}

double NodeSet::gap_to(int i, int k) const {
  return (grid.point(k) - grid.point(cell[i] + 1)) + offsets[i];
}

Eigen::MatrixXd kernel_covariance_matrix(const HurstKernel& kernel, const TimeGrid& grid,
                                         int nodes_per_half, int grading) {
  const int n = grid.steps();
  const NodeSet nodes = NodeSet::build(grid, nodes_per_half, grading);
  const int per_cell = 2 * nodes_per_half;
  // values(i, p) = K(t_{i+1}, s_p) for nodes below t_{i+1}.
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, nodes.size());
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < (i + 1) * per_cell; ++p) {
      values(i, p) = kernel.along_gap(nodes.nodes[p], nodes.gap_to(p, i + 1));
    }
  }
  Eigen::MatrixXd cov(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (int p = 0; p < (j + 1) * per_cell; ++p) {
        acc += nodes.weights[p] * values(i, p) * values(j, p);
      }
      cov(i, j) = cov(j, i) = acc;
    }
  }
  return cov;
}

PiecewiseConstant::PiecewiseConstant(std::vector<double> b, std::vector<double> v)
    : breaks(std::move(b)), values(std::move(v)) {
  if (breaks.size() != values.size() + 1 || values.empty()) {
    throw std::invalid_argument("step function needs one more break than values");
  }
  if (breaks.front() != 0.0) throw std::invalid_argument("step function must start at 0");
  for (std::size_t c = 0; c + 1 < breaks.size(); ++c) {
    if (!(breaks[c + 1] > breaks[c])) throw std::invalid_argument("breaks must increase");
  }
}

PiecewiseConstant PiecewiseConstant::sample(const TimeGrid& grid,
                                            const std::function<double(double)>& f) {
  std::vector<double> values(grid.steps());
  for (int c = 0; c < grid.steps(); ++c) values[c] = f(grid.point(c) + 0.5 * grid.dt());
  return {grid.points(), std::move(values)};
}

PiecewiseConstant PiecewiseConstant::indicator(double t, double horizon) {
  if (!(t > 0.0)) throw std::invalid_argument("indicator needs t > 0");
  if (t >= horizon) return {{0.0, horizon}, {1.0}};
  return {{0.0, t, horizon}, {1.0, 0.0}};
}

double PiecewiseConstant::operator()(double x) const {
  if (x < 0.0 || x > horizon()) return 0.0;
  auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
  const auto c = std::min<std::ptrdiff_t>(std::distance(breaks.begin(), it) - 1, cells() - 1);
  return values[static_cast<std::size_t>(c)];
}

PiecewiseConstant PiecewiseConstant::restricted(double t) const {
  std::vector<double> b{0.0};
  std::vector<double> v;
  for (int c = 0; c < cells() && breaks[c] < t; ++c) {
    v.push_back(values[c]);
    b.push_back(std::min(breaks[c + 1], t));
  }
  return {std::move(b), std::move(v)};
}

PiecewiseConstant PiecewiseConstant::masked(double t) const {
  std::vector<double> b{0.0};
  std::vector<double> v;
  for (int c = 0; c < cells(); ++c) {
    if (breaks[c] < t && breaks[c + 1] > t) {
      v.push_back(values[c]);
      b.push_back(t);
      v.push_back(0.0);
      b.push_back(breaks[c + 1]);
    } else {
      v.push_back(breaks[c] < t ? values[c] : 0.0);
      b.push_back(breaks[c + 1]);
    }
  }
  return {std::move(b), std::move(v)};
}

namespace {

void require_horizon(const PiecewiseConstant& f, double horizon) {
  if (std::abs(f.horizon() - horizon) > 1e-12 * std::max(1.0, horizon)) {
    throw std::invalid_argument("step function horizon does not match T");
  }
}

}  // namespace

double apply_kt_star(const HurstKernel& kernel, const PiecewiseConstant& phi, double horizon,
                     double s) {
  require_horizon(phi, horizon);
  if (!(s > 0.0 && s < horizon)) throw std::domain_error("K_T^* is evaluated for 0 < s < T");
  const auto first = std::upper_bound(phi.breaks.begin(), phi.breaks.end(), s);
  const int own = static_cast<int>(std::distance(phi.breaks.begin(), first)) - 1;
  const double phi_s = phi.values[own];
  double acc = phi_s * kernel(horizon, s);
  // Telescoping over the cells strictly after the one holding s.
  double k_left = own + 1 < phi.cells() ? kernel(phi.breaks[own + 1], s) : 0.0;
  for (int c = own + 1; c < phi.cells(); ++c) {
    const double k_right = kernel(phi.breaks[c + 1], s);
    acc += (phi.values[c] - phi_s) * (k_right - k_left);
    k_left = k_right;
  }
  return acc;
}

double apply_kt_star(const HurstKernel& kernel, const std::function<double(double)>& phi,
                     double horizon, double s) {
  if (!(s > 0.0 && s < horizon)) throw std::domain_error("K_T^* is evaluated for 0 < s < T");
  const double phi_s = phi(s);
  const double a = kernel.hurst() - 0.5;
  const double c = kernel.normalization();
  double acc = phi_s * kernel(horizon, s);
  if (a == 0.0) return acc;
  // r = s + v^2: (phi(r)-phi(s)) dK/dr 2v dv ~ v^{2H} near v = 0.
  auto integrand = [&](double v) {
    const double gap = v * v;
    if (gap == 0.0) return 0.0;  // underflow; the integrand vanishes there anyway
    const double r = s + gap;
    const double dk = c * a * std::pow(gap, a - 1.0) * std::pow(s / r, -a);
    return (phi(r) - phi_s) * dk * 2.0 * v;
  };
  acc += quad::tanh_sinh_checked(integrand, 0.0, std::sqrt(horizon - s), "apply_kt_star", 1e-12,
                                 1e-7);
  return acc;
}

double kernel_transform(const HurstKernel& kernel, const PiecewiseConstant& h, double t) {
  double acc = 0.0;
  for (int c = 0; c < h.cells() && h.breaks[c] < t; ++c) {
    if (h.values[c] == 0.0) continue;
    const double a = h.breaks[c];
    const double b = std::min(h.breaks[c + 1], t);
    auto integrand = [&](double s) { return kernel(t, s); };
    acc += h.values[c] * quad::tanh_sinh_checked(integrand, a, b, "kernel_transform", 1e-12, 1e-7);
  }
  return acc;
}

std::pair<double, double> duality_pairing(const HurstKernel& kernel, const PiecewiseConstant& phi,
                                          const PiecewiseConstant& h, double horizon) {
  require_horizon(phi, horizon);
  require_horizon(h, horizon);

  std::vector<double> cuts = phi.breaks;
  cuts.insert(cuts.end(), h.breaks.begin(), h.breaks.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-14; }),
             cuts.end());

  double left = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c];
    const double b = cuts[c + 1];
    const double hv = h(0.5 * (a + b));
    if (hv == 0.0) continue;
    auto integrand = [&](double s) { return apply_kt_star(kernel, phi, horizon, s); };
    left += hv * quad::tanh_sinh_checked(integrand, a, b, "duality_pairing", 1e-10, 1e-6);
  }

  double right = 0.0;
  double kh_prev = 0.0;
  for (int c = 0; c < phi.cells(); ++c) {
    const double kh = kernel_transform(kernel, h, phi.breaks[c + 1]);
    right += phi.values[c] * (kh - kh_prev);
    kh_prev = kh;
  }
  return {left, right};
}

double rkhs_weight(const HurstKernel& kernel) {
  const double h = kernel.hurst();
  if (!(h > 0.5)) throw std::domain_error("the singular-weight inner product needs H > 1/2");
  const double c = kernel.normalization();
  return c * c * (h - 0.5) * (h - 0.5) * std::beta(2.0 - 2.0 * h, h - 0.5);
}

double rkhs_inner_product(const HurstKernel& kernel, const PiecewiseConstant& phi,
                          const PiecewiseConstant& psi, double horizon) {
  const double weight = rkhs_weight(kernel);
  require_horizon(phi, horizon);
  require_horizon(psi, horizon);
  const double p = 2.0 * kernel.hurst();
  // Second antiderivative of |x|^{p-2}: G'' = |x|^{p-2}.
  auto g = [p](double x) { return std::pow(std::abs(x), p) / (p * (p - 1.0)); };
  double acc = 0.0;
  for (int i = 0; i < phi.cells(); ++i) {
    if (phi.values[i] == 0.0) continue;
    const double a = phi.breaks[i];
    const double b = phi.breaks[i + 1];
    for (int j = 0; j < psi.cells(); ++j) {
      if (psi.values[j] == 0.0) continue;
      const double c = psi.breaks[j];
      const double d = psi.breaks[j + 1];
      const double block = g(b - c) + g(a - d) - g(b - d) - g(a - c);
      acc += phi.values[i] * psi.values[j] * block;
    }
  }
  return weight * acc;
}

}  // namespace fnls
