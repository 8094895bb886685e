#include "oracle_math.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/statistics/anderson_darling.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fnls::oracle {

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = a.size();
  const double nb = b.size();
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_critical(std::size_t n, std::size_t m) {
  return 1.628 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

double anderson_darling(std::vector<double> v, double mu, double sd) {
  std::sort(v.begin(), v.end());
  return boost::math::statistics::anderson_darling_normality_statistic(v, mu, sd);
}

long double gamma_normalization(long double hurst) {
  const long double num = 2.0L * hurst * std::tgamma(1.5L - hurst);
  const long double den = std::tgamma(hurst + 0.5L) * std::tgamma(2.0L - 2.0L * hurst);
  return std::sqrt(num / den);
}

double reference_kernel(double hurst, double t, double s) {
  if (!(s > 0.0) || s > t) throw std::domain_error("reference kernel needs 0 < s <= t");
  const long double h = hurst;
  const long double c = gamma_normalization(h);
  const long double gap = static_cast<long double>(t) - s;
  if (gap == 0.0L) return hurst > 0.5 ? 0.0 : (hurst == 0.5 ? 1.0 : INFINITY);
  const long double ls = s;
  // u = s + v^2 leaves an integrand ~ v^{2H} at 0, which tanh-sinh shrugs off
  auto f = [&](long double v) -> long double {
    if (v <= 0.0L) return 0.0L;
    if (v * v < 1e-30L * ls) return 2.0L * (0.5L - h) * std::pow(v, 2.0L * h) / ls;
    const long double tail = -std::expm1(-(0.5L - h) * std::log1p(v * v / ls));
    return 2.0L * std::pow(v, 2.0L * h - 2.0L) * tail;
  };
  thread_local boost::math::quadrature::tanh_sinh<long double> rule(12);
  const long double integral = rule.integrate(f, 0.0L, std::sqrt(gap), 1e-14L);
  return static_cast<double>(c * std::pow(gap, h - 0.5L) + c * (0.5L - h) * integral);
}

double imhof_tail(const std::vector<double>& lambda, double x) {
  auto integrand = [&](double u) {
    if (u == 0.0) {
      double sum = 0.0;
      for (double l : lambda) sum += l;
      return 0.5 * (sum - x);
    }
    double theta = -0.5 * x * u;
    double log_rho = 0.0;
    for (double l : lambda) {
      theta += 0.5 * std::atan(l * u);
      log_rho += 0.25 * std::log1p(l * l * u * u);
    }
    return std::sin(theta) / (u * std::exp(log_rho));
  };
  using boost::math::quadrature::gauss_kronrod;
  // Panels short enough to resolve the oscillation, which never runs faster
  // than max(x, sum lambda) / 2. The envelope A(u) = 1/(u rho(u)) decreases;
  // once the phase speed |theta'| settles near x/2 the tail is at most
  // 2 A(U) / |theta'|, and without it we fall back on the crude bound
  // 2 / (pi k U^{k/2} prod sqrt(lambda)).
  double sum = 0.0;
  double log_root = 0.0;
  for (double l : lambda) {
    if (!(l > 0.0)) throw std::domain_error("Imhof inversion needs positive weights");
    sum += l;
    log_root += 0.5 * std::log(l);
  }
  const double k = lambda.size();
  const double width = std::numbers::pi / std::max(0.5 * std::max(x, sum), 1e-12);
  double total = 0.0;
  double a = 0.0;
  for (int panel = 0; panel < 1000000; ++panel) {
    const double b = a + width;
    total += gauss_kronrod<double, 31>::integrate(integrand, a, b, 0, 1e-12);
    a = b;
    double log_rho = 0.0;
    double speed = 0.5 * x;
    for (double l : lambda) {
      log_rho += 0.25 * std::log1p(l * l * a * a);
      speed -= 0.5 * l / (1.0 + l * l * a * a);
    }
    const double envelope = std::exp(-log_rho) / a;
    const double crude = 2.0 / (std::numbers::pi * k) * std::exp(-0.5 * k * std::log(a) - log_root);
    const double oscillatory = speed > 0.25 * x ? 2.0 * envelope / speed : INFINITY;
    if (std::min(crude, oscillatory) < 1e-11) break;
  }
  return 0.5 + total / std::numbers::pi;
}

Moments variance_of(const std::vector<double>& draws) {
  const double n = draws.size();
  double mean = 0.0;
  for (double x : draws) mean += x;
  mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : draws) {
    const double d = (x - mean) * (x - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  // Var(s^2) ~ (m4 - m2^2) / n
  return {m2 * n / (n - 1.0), std::sqrt(std::max(0.0, m4 - m2 * m2) / n)};
}

namespace {

std::vector<cplx> dft(const std::vector<cplx>& in, int sign) {
  const std::size_t n = in.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += in[j] * std::polar(1.0, sign * 2.0 * std::numbers::pi * double((j * k) % n) / n);
    }
    out[k] = acc;
  }
  return out;
}

void phase_rotate(const NonlinearitySpec& nl, std::vector<cplx>& u, double tau) {
  if (nl.kind == NonlinearitySpec::Kind::none) return;
  for (auto& z : u) {
    const double rho = std::norm(z);
    double g = nl.lambda * std::pow(rho, nl.sigma);
    if (nl.kind == NonlinearitySpec::Kind::saturated) g /= 1.0 + nl.kappa * std::pow(rho, nl.sigma);
    z *= std::exp(cplx(0.0, -g * tau));
  }
}

}  // namespace

std::vector<std::vector<cplx>> naive_split_step(const GridSpec& grid, const std::vector<cplx>& u0,
                                                const NonlinearitySpec& nl,
                                                const std::vector<int>& modes,
                                                const Eigen::MatrixXcd& forcing, double dt,
                                                double eps) {
  if (grid.dim() != 1) throw std::invalid_argument("naive stepper is one-dimensional");
  const int n = grid.points();
  const double len = 2.0 * grid.half_width();
  std::vector<double> xi2(n);
  for (int k = 0; k < n; ++k) {
    const int w = k < n / 2 ? k : k - n;
    xi2[k] = std::pow(2.0 * std::numbers::pi * w / len, 2);
  }
  // forcing field of one row of coefficients, summed mode by mode in x
  auto field = [&](int step) {
    std::vector<cplx> f(n);
    for (int j = 0; j < n; ++j) {
      for (std::size_t m = 0; m < modes.size(); ++m) {
        const double phase = 2.0 * std::numbers::pi * double((modes[m] * j) % n) / n;
        f[j] += forcing(step, m) * std::polar(1.0 / std::sqrt(len), phase);
      }
    }
    return f;
  };
  auto propagate = [&](std::vector<cplx> v) {
    std::vector<cplx> c = dft(v, -1);
    for (int k = 0; k < n; ++k) c[k] *= std::exp(cplx(0.0, xi2[k] * dt)) / double(n);
    return dft(c, +1);
  };

  std::vector<std::vector<cplx>> out{u0};
  std::vector<cplx> u = u0;
  const int steps = static_cast<int>(forcing.rows()) - 1;
  for (int k = 0; k < steps; ++k) {
    phase_rotate(nl, u, 0.5 * dt);
    u = propagate(u);
    phase_rotate(nl, u, 0.5 * dt);
    const std::vector<cplx> next = field(k + 1);
    const std::vector<cplx> prev = propagate(field(k));
    for (int j = 0; j < n; ++j) u[j] += cplx(0.0, -std::sqrt(eps)) * (next[j] - prev[j]);
    out.push_back(u);
  }
  return out;
}

}  // namespace fnls::oracle
