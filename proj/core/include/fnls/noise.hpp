#pragma once

#include "fnls/kernel.hpp"
#include "fnls/spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <vector>

namespace fnls {

/// The correlation operator, diagonal in the Fourier basis: Phi e_k = phi_k e_k
/// on the active modes, zero elsewhere.
struct CorrelationSpec {
  GridSpec grid;
  double hurst = 0.5;
  double alpha = 0.0;
  double decay = 0.0;            // r in phi_k = (1+|xi_k|^2)^{-r/2}
  std::vector<int> modes;        // flat spectral indices, lowest |xi| first
  std::vector<double> eigenvalues;
  double hs_norm = 0.0;          // (sum phi^2 (1+|xi|^2)^{1+2(H+alpha)})^{1/2}
  double tail_ratio = 0.0;       // share of that sum carried by the outermost shell
  double n2_sum = 0.0;           // sum phi^2 (1+|xi|^2)^2

  int size() const noexcept { return static_cast<int>(modes.size()); }
  double omega(int m) const noexcept { return grid.xi_squared(modes[m]); }
  bool is_zero() const noexcept;
};

/// Throws std::invalid_argument (with the inequality) unless
/// (1/2-H) 1_{H<1/2} < alpha < (1-H) 1_{H<1/2} + 1_{H>=1/2}.
void check_alpha_window(double hurst, double alpha);

/// phi_k = (1+|xi_k|^2)^{-r/2}; requires r > 1 + 2(H+alpha) + d/2.
/// mode_limit > 0 keeps only that many lowest-frequency modes.
CorrelationSpec build_correlation(const GridSpec& grid, double decay, double hurst, double alpha,
                                  int mode_limit = 0);
/// All eigenvalues zero; Z vanishes identically.
CorrelationSpec zero_correlation(const GridSpec& grid, double hurst, int mode_limit = 0);

/// Stochastic convolution sampled on a time grid, stored as coefficients of the
/// orthonormal modes e_k: Z(t_j) = sum_m coefficients(j, m) e_{modes[m]}.
struct ConvolutionPath {
  TimeGrid timegrid;
  GridSpec grid;
  std::vector<int> modes;
  Eigen::MatrixXcd coefficients;  // (n+1) x modes, row 0 is zero
  double hurst = 0.5;
  std::uint64_t seed = 0;

  ComplexField field(int step) const;
  /// ||Z(t_i) - Z(t_j)||_{H^s}
  double distance(int i, int j, double s) const;
};

ConvolutionPath zero_path(const CorrelationSpec& spec, const TimeGrid& timegrid);

class DiscreteLOperator;

/// Control h in L^2(0,T;L^2) restricted to the active modes, given by its
/// values at the operator's time nodes. Row 2m+c holds the real (c=0) or
/// imaginary (c=1) direction of mode m.
struct Control {
  Eigen::MatrixXd values;
  std::vector<double> weights;

  /// \int_0^T ||h(s)||^2 ds by the node rule.
  double norm_squared() const;
  double energy() const { return 0.5 * norm_squared(); }
  Control scaled(double a) const;
};

struct OperatorOptions {
  int nodes_per_half = 24;
  int grading = 8;
  int panel_nodes = 16;
};

/// Discretization of h -> \int_0^t U(t-s) Phi (K h)(ds). Per mode m the block
/// A_m(k, p) = phi_m G_m(t_k, s_p), where
///   G(t,s) = K(t,s) + i w \int_s^t e^{i w (t-r)} K(r,s) dr,  w = |xi_m|^2,
/// is K_t^* applied to s -> e^{i w (t-s)}; A_m(k, p) = 0 whenever s_p >= t_k.
class DiscreteLOperator {
 public:
  DiscreteLOperator(const CorrelationSpec& spec, const HurstKernel& kernel,
                    const TimeGrid& timegrid, OperatorOptions options = {});

  const CorrelationSpec& spec() const noexcept { return spec_; }
  const TimeGrid& timegrid() const noexcept { return timegrid_; }
  const NodeSet& nodes() const noexcept { return nodes_; }
  double hurst() const noexcept { return hurst_; }
  const Eigen::MatrixXcd& block(int mode) const { return blocks_.at(mode); }

  int steps() const noexcept { return timegrid_.steps(); }
  int modes() const noexcept { return spec_.size(); }
  int rows() const noexcept { return 2 * steps() * modes(); }
  int cols() const noexcept { return 2 * nodes_.size() * modes(); }
  /// Real row of component c (0 = Re, 1 = Im) of mode m at t_k, k in 1..n.
  int row_index(int mode, int step, int component) const noexcept {
    return 2 * (mode * steps() + step - 1) + component;
  }

  /// Real matrix L~ = [Re; Im] A diag(sqrt(w)); Z = L~ xi with xi ~ N(0, I).
  Eigen::MatrixXd whitened() const;
  /// L~ L~^T
  Eigen::MatrixXd covariance() const;

  Control zero_control() const;
  /// Piecewise constant control: cell_values is (2 modes) x n.
  Control control_from_cells(const Eigen::MatrixXd& cell_values) const;
  /// Control from whitened coordinates z (length cols()).
  Control control_from_whitened(const Eigen::VectorXd& z) const;

  /// (Lh)(t_k) as a path.
  ConvolutionPath apply(const Control& h) const;
  /// One draw of Z; replicate r of mode m uses Stream(seed, {r, m}).
  ConvolutionPath sample(std::uint64_t seed, std::uint64_t replicate = 0) const;

  /// Stacks a path into the real row layout.
  Eigen::VectorXd flatten(const ConvolutionPath& path) const;

 private:
  CorrelationSpec spec_;
  TimeGrid timegrid_;
  NodeSet nodes_;
  double hurst_;
  std::vector<Eigen::MatrixXcd> blocks_;
};

enum class ConvolutionMethod { volterra, fbm_path };

/// Z on the time grid. volterra draws through the discretized L operator;
/// fbm_path draws fBm paths per mode direction and integrates
///   Z = phi (B(t) + i w \int_0^t e^{i w (t-r)} B(r) dr)
/// exactly for the piecewise-linear interpolant of B on a grid refined by
/// `refine`. fbm_path scales to long time grids.
ConvolutionPath sample_convolution(const CorrelationSpec& spec, const HurstKernel& kernel,
                                   const TimeGrid& timegrid, std::uint64_t seed,
                                   ConvolutionMethod method = ConvolutionMethod::volterra,
                                   std::uint64_t replicate = 0, int refine = 1);

/// Covariance of the stacked real path built directly from the double
/// integral with weight H(2H-1)|u-v|^{2H-2} (H > 1/2), or the Ito isometry
/// at H = 1/2. Same layout as DiscreteLOperator::covariance().
Eigen::MatrixXd build_Q(const CorrelationSpec& spec, const HurstKernel& kernel,
                        const TimeGrid& timegrid);

/// max |Q - L~ L~^T|
double verify_factorization(const Eigen::MatrixXd& q, const DiscreteLOperator& op);

struct RateResult {
  double rate = std::numeric_limits<double>::infinity();
  bool feasible = false;
  double residual = 0.0;  // relative residual of the best fit
  Control h_star;
};

/// (1/2) min{||h||^2 : (Lh)_rows = f} by the pseudo-inverse of L~_rows L~_rows^T.
/// rows selects a subset of the stacked layout (all rows when empty); f has
/// one entry per selected row. Infeasible (rate = +inf) when the relative
/// residual exceeds 1e-6.
RateResult gaussian_rate(const DiscreteLOperator& op, const Eigen::VectorXd& f,
                         const std::vector<int>& rows = {});

inline constexpr double kRateResidualTolerance = 1e-6;

}  // namespace fnls
