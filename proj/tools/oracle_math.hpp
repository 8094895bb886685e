#pragma once

// Reference computations that do not share code paths with the library:
// statistical tests, closed forms and brute-force integrators.

#include "fnls/noise.hpp"
#include "fnls/nonlinearity.hpp"
#include "fnls/spectral.hpp"

#include <vector>

namespace fnls::oracle {

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);
/// Critical value at level 0.01: 1.628 sqrt((n+m)/(n m)).
double ks_critical(std::size_t n, std::size_t m);

/// Anderson-Darling A^2 against the fully specified N(mu, sd^2).
double anderson_darling(std::vector<double> v, double mu, double sd);
/// Upper 1% point of A^2 for a fully specified distribution.
inline constexpr double kAndersonDarlingCritical = 3.857;

/// c_H from the Gamma-function closed form in long double.
long double gamma_normalization(long double hurst);

/// K(t,s) by long double tanh-sinh on the defining integral after the
/// substitution u = s + v^2.
double reference_kernel(double hurst, double t, double s);

/// P(sum_i lambda_i chi^2_1 > x) by Imhof's inversion formula.
double imhof_tail(const std::vector<double>& lambda, double x);

/// Sample variance and its standard error from raw draws.
struct Moments {
  double variance = 0.0;
  double stderr_variance = 0.0;
};
Moments variance_of(const std::vector<double>& draws);

/// Split-step integrator written out with an O(N^2) DFT, for tiny grids:
/// the same scheme as solve_mild but sharing none of its code. `forcing`
/// holds the (n+1) x modes coefficients of the driving path.
std::vector<std::vector<cplx>> naive_split_step(const GridSpec& grid, const std::vector<cplx>& u0,
                                                const NonlinearitySpec& nl,
                                                const std::vector<int>& modes,
                                                const Eigen::MatrixXcd& forcing, double dt,
                                                double eps);

}  // namespace fnls::oracle
