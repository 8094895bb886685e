#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fnls {

/// Uniform grid t_k = k T / n on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);

  double horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return steps_; }
  double dt() const noexcept { return horizon_ / steps_; }
  /// t_k, with t_n returned as exactly T.
  double point(int k) const noexcept { return k == steps_ ? horizon_ : k * dt(); }
  std::vector<double> points() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  int steps_;
};

/// The Volterra kernel of fractional Brownian motion with Hurst index H,
///
///   K(t,s) = c_H (t-s)^{H-1/2}
///          + c_H (1/2-H) \int_s^t (u-s)^{H-3/2} (1 - (s/u)^{1/2-H}) du,   s < t,
///
/// so that beta^H(t) = \int_0^t K(t,s) dbeta(s) for a standard Brownian motion beta.
class HurstKernel {
 public:
  explicit HurstKernel(double hurst);

  double hurst() const noexcept { return hurst_; }
  double normalization() const noexcept { return c_h_; }

  /// K(t,s). Zero for s > t; at s == t the limit (0, 1 or +inf as H >, =, < 1/2).
  /// Throws std::domain_error for s <= 0.
  double operator()(double t, double s) const;

  /// K(s + gap, s) with the gap supplied directly; exact near the diagonal.
  double along_gap(double s, double gap) const;

  /// dK/dt(t,s) = c_H (H-1/2) (t-s)^{H-3/2} (s/t)^{1/2-H} for 0 < s < t.
  double time_derivative(double t, double s) const;

 private:
  double hurst_;
  double c_h_;
};

/// c_H = (2H Gamma(3/2-H) / (Gamma(H+1/2) Gamma(2-2H)))^{1/2}.
double normalization_constant(double hurst);

double kernel_eval(const HurstKernel& kernel, double t, double s);
double kernel_time_derivative(const HurstKernel& kernel, double t, double s);

/// E[beta^H(t) beta^H(s)] = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2.
double fbm_covariance(double hurst, double t, double s);

/// Quadrature nodes in time: every cell [t_c, t_{c+1}] is split in two halves,
/// each carrying a Gauss-Legendre rule graded toward the cell end point
/// (x = end -+ (h/2) v^p). offsets[i] = t_{c+1} - nodes[i] is stored exactly so
/// that kernel gaps near the diagonal never lose precision.
struct NodeSet {
  TimeGrid grid;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> offsets;
  std::vector<int> cell;

  static NodeSet build(const TimeGrid& grid, int nodes_per_half = 12, int grading = 8);
  int size() const noexcept { return static_cast<int>(nodes.size()); }
  /// t_k - nodes[i] for t_k >= t_{cell[i]+1}, computed without cancellation.
  double gap_to(int i, int k) const;
};

/// Covariance of (beta^H(t_1), ..., beta^H(t_n)); t_0 = 0 is excluded because
/// its row is identically zero. Throws NotPositiveSemidefinite when the
/// smallest eigenvalue is below -1e-10.
Eigen::MatrixXd build_covariance_matrix(double hurst, const TimeGrid& grid);

/// The same matrix assembled as \int_0^{t_i ^ t_j} K(t_i,r) K(t_j,r) dr with a
/// graded Gauss-Legendre rule on every grid cell (q nodes per half cell).
Eigen::MatrixXd kernel_covariance_matrix(const HurstKernel& kernel, const TimeGrid& grid,
                                         int nodes_per_half = 8, int grading = 6);

class NotPositiveSemidefinite : public std::runtime_error {
 public:
  NotPositiveSemidefinite(const std::string& what, double min_eigenvalue)
      : std::runtime_error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

inline constexpr double kPsdTolerance = 1e-10;

/// Scalar paths on a time grid; row r is replicate r, column k is t_k.
struct ScalarPathSet {
  TimeGrid grid;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values;
  std::uint64_t seed = 0;
  double hurst = 0.5;

  int replicates() const noexcept { return static_cast<int>(values.rows()); }
};

/// Cholesky sampler; replicate r draws from Stream(seed, {r}).
ScalarPathSet sample_fbm_exact(double hurst, const TimeGrid& grid, int replicates,
                               std::uint64_t seed);

/// Circulant embedding of the stationary increment sequence (Davies-Harte).
/// Falls back to sample_fbm_exact when the embedding has a negative eigenvalue.
ScalarPathSet sample_fbm_fast(double hurst, const TimeGrid& grid, int replicates,
                              std::uint64_t seed);

/// Step function on [0, T]: value[c] on [breaks[c], breaks[c+1]).
struct PiecewiseConstant {
  std::vector<double> breaks;
  std::vector<double> values;

  PiecewiseConstant() = default;
  PiecewiseConstant(std::vector<double> breaks, std::vector<double> values);

  /// Samples f at cell midpoints of a uniform grid.
  static PiecewiseConstant sample(const TimeGrid& grid, const std::function<double(double)>& f);
  /// 1_{[0,t)} on [0,T].
  static PiecewiseConstant indicator(double t, double horizon);

  double horizon() const { return breaks.back(); }
  int cells() const noexcept { return static_cast<int>(values.size()); }
  double operator()(double x) const;
  PiecewiseConstant restricted(double t) const;
  PiecewiseConstant masked(double t) const;
};

/// (K_T^* phi)(s) = phi(s) K(T,s) + \int_s^T (phi(t) - phi(s)) K(dt,s).
/// For a step function the integral telescopes exactly over the jumps.
double apply_kt_star(const HurstKernel& kernel, const PiecewiseConstant& phi, double horizon,
                     double s);

/// Derivative form of K_T^* for a smooth integrand, by quadrature of
/// (phi(r) - phi(s)) dK/dr(r,s) on (s, T] after r = s + v^2.
double apply_kt_star(const HurstKernel& kernel, const std::function<double(double)>& phi,
                     double horizon, double s);

/// Both sides of \int_0^T (K_T^* phi)(t) h(t) dt = \int_0^T phi(t) (Kh)(dt),
/// (Kh)(t) = \int_0^t K(t,s) h(s) ds. Returned as (left, right).
std::pair<double, double> duality_pairing(const HurstKernel& kernel, const PiecewiseConstant& phi,
                                          const PiecewiseConstant& h, double horizon);

/// (Kh)(t) = \int_0^t K(t,s) h(s) ds.
double kernel_transform(const HurstKernel& kernel, const PiecewiseConstant& h, double t);

/// <phi, psi> = c_H^2 (H-1/2)^2 B(2-2H, H-1/2) \iint phi(u) psi(v) |u-v|^{2H-2} du dv,
/// H > 1/2. The singular weight is integrated exactly over each pair of cells.
double rkhs_inner_product(const HurstKernel& kernel, const PiecewiseConstant& phi,
                          const PiecewiseConstant& psi, double horizon);

/// c_H^2 (H-1/2)^2 B(2-2H, H-1/2); equals H(2H-1).
double rkhs_weight(const HurstKernel& kernel);

}  // namespace fnls
