#include "fnls/nonlinearity.hpp"

#include "fnls/quadrature.hpp"

#include <cmath>

namespace fnls {

NonlinearitySpec NonlinearitySpec::kerr(double lambda, double sigma) {
  NonlinearitySpec nl{Kind::kerr, lambda, sigma, 0.0};
  nl.validate();
  return nl;
}

NonlinearitySpec NonlinearitySpec::saturated(double lambda, double sigma, double kappa) {
  NonlinearitySpec nl{Kind::saturated, lambda, sigma, kappa};
  nl.validate();
  return nl;
}

void NonlinearitySpec::validate() const {
  if (kind == Kind::none) return;
  if (lambda != 1.0 && lambda != -1.0) throw std::invalid_argument("lambda must be +1 or -1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be positive");
  if (kind == Kind::saturated && !(kappa > 0.0)) {
    throw std::invalid_argument("kappa must be positive for the saturated nonlinearity");
  }
}

double NonlinearitySpec::rate(double rho) const {
  switch (kind) {
    case Kind::none:
      return 0.0;
    case Kind::kerr:
      return lambda * std::pow(rho, sigma);
    case Kind::saturated: {
      const double p = std::pow(rho, sigma);
      return lambda * p / (1.0 + kappa * p);
    }
  }
  return 0.0;
}

double NonlinearitySpec::potential(double rho) const {
  if (kind == Kind::none || rho <= 0.0) return 0.0;
  if (kind == Kind::kerr) return lambda * std::pow(rho, sigma + 1.0) / (2.0 * sigma + 2.0);
  // r = rho v^2 clusters nodes where r^sigma is not smooth.
  static const quad::Rule& rule = quad::gauss_legendre(24);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = rule.nodes[i];
    acc += rule.weights[i] * rate(rho * v * v) * 2.0 * v;
  }
  return 0.5 * rho * acc;
}

std::string to_string(NonlinearitySpec::Kind kind) {
  switch (kind) {
    case NonlinearitySpec::Kind::none:
      return "none";
    case NonlinearitySpec::Kind::kerr:
      return "kerr";
    case NonlinearitySpec::Kind::saturated:
      return "saturated";
  }
  return "none";
}

NonlinearitySpec::Kind parse_nonlinearity_kind(const std::string& name) {
  if (name == "none") return NonlinearitySpec::Kind::none;
  if (name == "kerr") return NonlinearitySpec::Kind::kerr;
  if (name == "saturated") return NonlinearitySpec::Kind::saturated;
  throw std::invalid_argument("unknown nonlinearity kind '" + name + "'");
}

ComplexField evaluate_nonlinearity(const NonlinearitySpec& nl, const ComplexField& u) {
  ComplexField out(u.grid);
  for (std::size_t j = 0; j < u.values.size(); ++j) {
    const cplx z = u.values[j];
    out.values[j] = nl.rate(std::norm(z)) * z;
    if (!std::isfinite(out.values[j].real()) || !std::isfinite(out.values[j].imag())) {
      throw NonlinearityOverflow("nonlinearity overflowed at grid index " + std::to_string(j));
    }
  }
  return out;
}

void nonlinear_substep(const NonlinearitySpec& nl, std::vector<cplx>& values, double tau) {
  if (nl.kind == NonlinearitySpec::Kind::none) return;
  for (auto& z : values) z *= std::polar(1.0, -nl.rate(std::norm(z)) * tau);
}

double hamiltonian(const ComplexField& u, const NonlinearitySpec& nl) {
  double pot = 0.0;
  if (nl.kind != NonlinearitySpec::Kind::none) {
    for (const auto& z : u.values) pot += nl.potential(std::norm(z));
    pot *= u.grid.cell_measure();
  }
  return 0.5 * gradient_norm_squared(u) - pot;
}

}  // namespace fnls
