#pragma once

#include "fnls/spectral.hpp"

#include <stdexcept>
#include <string>

namespace fnls {

/// f(u) = g(|u|^2) u with
///   kerr:      g(rho) = lambda rho^sigma
///   saturated: g(rho) = lambda rho^sigma / (1 + kappa rho^sigma)
///   none:      g = 0 (linear problem)
struct NonlinearitySpec {
  enum class Kind { none, kerr, saturated };

  Kind kind = Kind::none;
  double lambda = 1.0;
  double sigma = 1.0;
  double kappa = 1.0;

  static NonlinearitySpec linear() { return {}; }
  static NonlinearitySpec kerr(double lambda, double sigma);
  static NonlinearitySpec saturated(double lambda, double sigma, double kappa);

  void validate() const;
  /// g(rho)
  double rate(double rho) const;
  /// F(rho) = (1/2) \int_0^rho g, so that the energy density is F(|u|^2).
  double potential(double rho) const;
};

std::string to_string(NonlinearitySpec::Kind kind);
NonlinearitySpec::Kind parse_nonlinearity_kind(const std::string& name);

/// Raised when f(u) overflows; the solver treats this as the onset of blow-up.
class NonlinearityOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Pointwise f(u) in physical space.
ComplexField evaluate_nonlinearity(const NonlinearitySpec& nl, const ComplexField& u);

/// Exact flow of i u_t = f(u) over time tau: u <- u e^{-i g(|u|^2) tau}.
void nonlinear_substep(const NonlinearitySpec& nl, std::vector<cplx>& values, double tau);

/// (1/2) ||grad u||^2 - \int F(|u|^2) dx.
double hamiltonian(const ComplexField& u, const NonlinearitySpec& nl);

}  // namespace fnls
