#include "fnls/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace fnls::quad {

namespace {

Rule make_gauss_legendre(int q) {
  Rule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  for (int i = 0; i < q; ++i) {
    // Newton iteration on P_q from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[q - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[q - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const Rule& gauss_legendre(int q) {
  if (q < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
  static std::mutex mutex;
  static std::map<int, Rule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, make_gauss_legendre(q)).first;
  return it->second;
}

void graded_rule(double a, double b, int q, int grading, bool toward_left,
                 std::vector<double>& nodes, std::vector<double>& weights) {
  const Rule& gl = gauss_legendre(q);
  const double h = b - a;
  for (int i = 0; i < q; ++i) {
    const double v = gl.nodes[i];
    const double vp = std::pow(v, grading);
    const double jac = h * grading * std::pow(v, grading - 1);
    nodes.push_back(toward_left ? a + h * vp : b - h * vp);
    weights.push_back(gl.weights[i] * jac);
  }
}

Estimate tanh_sinh(const Integrand& f, double a, double b, double tolerance) {
  Estimate out;
  if (!(b > a)) return out;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
  double l1 = 0.0;
  out.value = integrator.integrate(f, a, b, tolerance, &out.error, &l1);
  return out;
}

double tanh_sinh_checked(const Integrand& f, double a, double b, const char* what,
                         double tolerance, double accept) {
  const Estimate e = tanh_sinh(f, a, b, tolerance);
  if (!std::isfinite(e.value) || e.error > accept * std::max(1.0, std::abs(e.value))) {
    throw QuadratureError(std::string(what) + ": quadrature did not converge (error estimate " +
                              std::to_string(e.error) + ")",
                          e.value, e.error);
  }
  return e.value;
}

}  // namespace fnls::quad
