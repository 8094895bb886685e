#include "fnls/fft.hpp"
#include "fnls/kernel.hpp"
#include "fnls/parallel.hpp"
#include "fnls/random.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace fnls {
namespace {

void check_args(double hurst, int replicates) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::domain_error("H must lie in (0,1)");
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
}

ScalarPathSet empty_set(double hurst, const TimeGrid& grid, int replicates, std::uint64_t seed) {
  ScalarPathSet out{grid, {}, seed, hurst};
  out.values.setZero(replicates, grid.steps() + 1);
  return out;
}

}  // namespace

ScalarPathSet sample_fbm_exact(double hurst, const TimeGrid& grid, int replicates,
                               std::uint64_t seed) {
  check_args(hurst, replicates);
  const Eigen::MatrixXd cov = build_covariance_matrix(hurst, grid);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveSemidefinite("Cholesky factorization of the fBm covariance failed", 0.0);
  }
  const Eigen::MatrixXd lower = llt.matrixL();
  const int n = grid.steps();
  ScalarPathSet out = empty_set(hurst, grid, replicates, seed);
  parallel_for(replicates, [&](int r) {
    Stream rng(seed, {static_cast<std::uint64_t>(r)});
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.normal();
    const Eigen::VectorXd x = lower.triangularView<Eigen::Lower>() * z;
    for (int i = 0; i < n; ++i) out.values(r, i + 1) = x[i];
  });
  return out;
}

ScalarPathSet sample_fbm_fast(double hurst, const TimeGrid& grid, int replicates,
                              std::uint64_t seed) {
  check_args(hurst, replicates);
  const int n = grid.steps();
  const int m = 2 * n;
  const double p = 2.0 * hurst;
  const double scale = std::pow(grid.dt(), p);
  auto gamma = [&](int k) {
    const double a = std::abs(k + 1.0);
    const double b = std::abs(static_cast<double>(k));
    const double c = std::abs(k - 1.0);
    return 0.5 * scale * (std::pow(a, p) - 2.0 * std::pow(b, p) + std::pow(c, p));
  };

  // First row of the circulant embedding of the increment autocovariance.
  std::vector<std::complex<double>> row(m);
  for (int j = 0; j <= n; ++j) row[j] = gamma(j);
  for (int j = n + 1; j < m; ++j) row[j] = gamma(m - j);
  fft::forward(row.data(), 1, m);

  std::vector<double> root(m);
  double largest = 0.0;
  for (int j = 0; j < m; ++j) largest = std::max(largest, std::abs(row[j].real()));
  for (int j = 0; j < m; ++j) {
    const double lambda = row[j].real();
    if (lambda < -1e-10 * largest) return sample_fbm_exact(hurst, grid, replicates, seed);
    root[j] = std::sqrt(std::max(lambda, 0.0) / m);
  }

  ScalarPathSet out = empty_set(hurst, grid, replicates, seed);
  parallel_for(replicates, [&](int r) {
    Stream rng(seed, {static_cast<std::uint64_t>(r)});
    std::vector<std::complex<double>> w(m);
    for (int j = 0; j < m; ++j) {
      const double a = rng.normal();
      const double b = rng.normal();
      w[j] = root[j] * std::complex<double>(a, b);
    }
    fft::forward(w.data(), 1, m);
    double level = 0.0;
    for (int i = 0; i < n; ++i) {
      level += w[i].real();
      out.values(r, i + 1) = level;
    }
  });
  return out;
}

}  // namespace fnls
