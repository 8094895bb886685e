#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fnls {

/// Raised when an adaptive rule cannot reach its tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error)
      : std::runtime_error(what), estimate_(estimate), error_(error) {}
  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

namespace quad {

/// Gauss-Legendre rule on [0, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// q-point Gauss-Legendre rule mapped to [0, 1]. Cached per q.
const Rule& gauss_legendre(int q);

/// Nodes and weights on [a, b] clustered at one endpoint: x = a + (b-a) v^p
/// (toward_left) or x = b - (b-a) v^p. An endpoint behaviour |x - e|^c turns
/// into v^{p(c+1)-1}, which Gauss-Legendre integrates to high order.
void graded_rule(double a, double b, int q, int grading, bool toward_left,
                 std::vector<double>& nodes, std::vector<double>& weights);

/// Abscissae never coincide with the endpoints, so integrands may be singular there.
using Integrand = std::function<double(double)>;

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Double-exponential (tanh-sinh) integration on a finite interval; handles
/// algebraic endpoint singularities.
Estimate tanh_sinh(const Integrand& f, double a, double b, double tolerance = 1e-12);

/// Same as tanh_sinh but throws QuadratureError when the error estimate
/// exceeds `accept * max(1, |value|)`.
double tanh_sinh_checked(const Integrand& f, double a, double b, const char* what,
                         double tolerance = 1e-12, double accept = 1e-8);

}  // namespace quad
}  // namespace fnls
