#include "fnls/spectral.hpp"

#include "fnls/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fnls {

GridSpec::GridSpec(int dim, int points, double half_width)
    : dim_(dim), n_(points), half_width_(half_width) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  if (points < 8 || (points & (points - 1)) != 0) {
    throw std::invalid_argument("grid points per dimension must be a power of two >= 8, got " +
                                std::to_string(points));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw std::invalid_argument("grid half-width L must be positive");
  }
}

double GridSpec::cell_measure() const noexcept { return std::pow(spacing(), dim_); }
double GridSpec::volume() const noexcept { return std::pow(2.0 * half_width_, dim_); }

double GridSpec::frequency(int k) const noexcept {
  return std::numbers::pi * wavenumber(k) / half_width_;
}

std::array<int, 2> GridSpec::unflatten(int flat) const noexcept {
  if (dim_ == 1) return {flat, 0};
  return {flat / n_, flat % n_};
}

double GridSpec::xi_squared(int flat) const noexcept {
  const auto idx = unflatten(flat);
  const double a = frequency(idx[0]);
  if (dim_ == 1) return a * a;
  const double b = frequency(idx[1]);
  return a * a + b * b;
}

double GridSpec::coordinate(int flat, int axis) const noexcept {
  return -half_width_ + unflatten(flat)[axis] * spacing();
}

ComplexField::ComplexField(const GridSpec& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != g.size()) {
    throw std::invalid_argument("field size does not match its grid");
  }
}

bool ComplexField::finite() const noexcept {
  return std::all_of(values.begin(), values.end(),
                     [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

std::vector<cplx> spectrum(const ComplexField& u) {
  std::vector<cplx> c = u.values;
  fft::forward(c.data(), u.grid.dim(), u.grid.points());
  const double scale = 1.0 / u.grid.size();
  for (auto& z : c) z *= scale;
  return c;
}

ComplexField from_spectrum(const GridSpec& grid, std::vector<cplx> coefficients) {
  if (static_cast<int>(coefficients.size()) != grid.size()) {
    throw std::invalid_argument("spectrum size does not match the grid");
  }
  fft::backward(coefficients.data(), grid.dim(), grid.points());
  return ComplexField(grid, std::move(coefficients));
}

double sobolev_norm_spectral(const GridSpec& grid, const std::vector<cplx>& c, double s) {
  double acc = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const double w = s == 0.0 ? 1.0 : std::pow(1.0 + grid.xi_squared(k), s);
    acc += w * std::norm(c[k]);
  }
  return std::sqrt(acc * grid.volume());
}

double sobolev_norm(const ComplexField& u, double s) {
  return sobolev_norm_spectral(u.grid, spectrum(u), s);
}

double l2_inner(const ComplexField& u, const ComplexField& v) {
  if (!(u.grid == v.grid)) throw std::invalid_argument("inner product of fields on different grids");
  double acc = 0.0;
  for (std::size_t j = 0; j < u.values.size(); ++j) {
    acc += u.values[j].real() * v.values[j].real() + u.values[j].imag() * v.values[j].imag();
  }
  return acc * u.grid.cell_measure();
}

double l2_norm(const ComplexField& u) { return std::sqrt(l2_inner(u, u)); }

double mass(const ComplexField& u) { return l2_inner(u, u); }

void apply_group_spectral(const GridSpec& grid, std::vector<cplx>& c, double t) {
  if (t == 0.0) return;
  for (int k = 0; k < grid.size(); ++k) c[k] *= std::polar(1.0, grid.xi_squared(k) * t);
}

ComplexField apply_group(const ComplexField& u, double t) {
  if (t == 0.0) return u;
  auto c = spectrum(u);
  apply_group_spectral(u.grid, c, t);
  return from_spectrum(u.grid, std::move(c));
}

double group_deviation_norm(const GridSpec& grid, double gamma, double t) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0,1)");
  double best = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const double xi2 = grid.xi_squared(k);
    // |e^{i theta} - 1| = 2 |sin(theta/2)|
    const double dev = 2.0 * std::abs(std::sin(0.5 * xi2 * t));
    best = std::max(best, dev * std::pow(1.0 + xi2, -gamma));
  }
  return best;
}

double gradient_norm_squared(const ComplexField& u) {
  const auto c = spectrum(u);
  double acc = 0.0;
  for (int k = 0; k < u.grid.size(); ++k) acc += u.grid.xi_squared(k) * std::norm(c[k]);
  return acc * u.grid.volume();
}

ComplexField fourier_mode(const GridSpec& grid, int flat) {
  std::vector<cplx> c(grid.size(), cplx{});
  c.at(flat) = 1.0 / std::sqrt(grid.volume());
  return from_spectrum(grid, std::move(c));
}

}  // namespace fnls
