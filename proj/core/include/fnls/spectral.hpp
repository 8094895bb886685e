#pragma once

#include <array>
#include <complex>
#include <vector>

namespace fnls {

using cplx = std::complex<double>;

/// Periodic grid on [-L, L)^d with N points per dimension.
/// Frequencies are xi_k = pi k / L, k in {-N/2, ..., N/2 - 1}, stored in FFT order.
class GridSpec {
 public:
  GridSpec(int dim, int points, double half_width);

  int dim() const noexcept { return dim_; }
  int points() const noexcept { return n_; }
  double half_width() const noexcept { return half_width_; }

  int size() const noexcept { return dim_ == 1 ? n_ : n_ * n_; }
  double spacing() const noexcept { return 2.0 * half_width_ / n_; }
  double cell_measure() const noexcept;
  /// (2L)^d
  double volume() const noexcept;

  /// Signed wavenumber of FFT slot k along one axis.
  int wavenumber(int k) const noexcept { return k < n_ / 2 ? k : k - n_; }
  double frequency(int k) const noexcept;
  /// |xi|^2 of the flat spectral index.
  double xi_squared(int flat) const noexcept;
  /// Position along axis `axis` of the flat physical index.
  double coordinate(int flat, int axis) const noexcept;
  std::array<int, 2> unflatten(int flat) const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int dim_;
  int n_;
  double half_width_;
};

/// Grid function in physical space.
struct ComplexField {
  GridSpec grid;
  std::vector<cplx> values;

  explicit ComplexField(const GridSpec& g) : grid(g), values(g.size(), cplx{}) {}
  ComplexField(const GridSpec& g, std::vector<cplx> v);

  template <class F>
  static ComplexField from_function(const GridSpec& g, F&& f) {
    ComplexField u(g);
    for (int j = 0; j < g.size(); ++j) {
      u.values[j] = g.dim() == 1 ? cplx(f(g.coordinate(j, 0), 0.0))
                                 : cplx(f(g.coordinate(j, 0), g.coordinate(j, 1)));
    }
    return u;
  }

  bool finite() const noexcept;
};

/// Fourier coefficients c_k = DFT(u)_k / N^d, so u(x_j) = sum_k c_k e^{2 pi i k.j / N}.
std::vector<cplx> spectrum(const ComplexField& u);
ComplexField from_spectrum(const GridSpec& grid, std::vector<cplx> coefficients);

/// (sum_k (1+|xi_k|^2)^s |c_k|^2 (2L)^d)^{1/2}; s = 0 is the L^2 norm.
double sobolev_norm(const ComplexField& u, double s);
double sobolev_norm_spectral(const GridSpec& grid, const std::vector<cplx>& coefficients, double s);

/// Re \int u conj(v) dx (a real inner product).
double l2_inner(const ComplexField& u, const ComplexField& v);
double l2_norm(const ComplexField& u);

/// U(t): c_k -> e^{i |xi_k|^2 t} c_k.
ComplexField apply_group(const ComplexField& u, double t);
void apply_group_spectral(const GridSpec& grid, std::vector<cplx>& coefficients, double t);

/// sup_k |e^{i|xi_k|^2 t} - 1| (1+|xi_k|^2)^{-gamma}.
double group_deviation_norm(const GridSpec& grid, double gamma, double t);

/// ||grad u||^2 computed spectrally.
double gradient_norm_squared(const ComplexField& u);
double mass(const ComplexField& u);

/// Orthonormal Fourier mode e_k(x_j) = e^{2 pi i k.j/N} / (2L)^{d/2}.
ComplexField fourier_mode(const GridSpec& grid, int flat);

}  // namespace fnls
