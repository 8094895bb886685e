#include <doctest.h>

#include "fnls/holder.hpp"
#include "fnls/kernel.hpp"
#include "fnls/random.hpp"

#include <cmath>
#include <numbers>

using namespace fnls;

TEST_CASE("Lipschitz path has exponent 1") {
  std::vector<double> series(4097);
  for (std::size_t i = 0; i < series.size(); ++i) series[i] = 3.0 * i / 4096.0;
  const HolderReport r = holder_exponent(series, 1.0 / 4096);
  CHECK(r.exponent == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.r_squared == doctest::Approx(1.0));
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("fBm exponent is recovered") {
  for (double h : {0.3, 0.7}) {
    const TimeGrid tg(1.0, 1 << 14);
    const ScalarPathSet set = sample_fbm_fast(h, tg, 1, derive_key(99, {static_cast<std::uint64_t>(h * 10)}));
    std::vector<double> series(set.values.row(0).data(), set.values.row(0).data() + tg.steps() + 1);
    CHECK(std::abs(holder_exponent(series, tg.dt()).exponent - h) < 0.08);
    HolderOptions sup;
    sup.statistic = HolderOptions::Statistic::sup;
    CHECK(std::abs(holder_exponent(series, tg.dt(), sup).exponent - h) < 0.15);
  }
}

TEST_CASE("degenerate and short inputs") {
  const std::vector<double> flat(2048, 1.5);
  CHECK(holder_exponent(flat, 1.0 / 2047).degenerate);
  CHECK_THROWS_AS(holder_exponent(std::vector<double>(100, 0.0), 0.01), std::invalid_argument);
}

TEST_CASE("lags are dyadic within the window") {
  std::vector<double> series(4097);
  Stream rng(1, {0});
  double x = 0.0;
  for (auto& v : series) v = (x += rng.normal());
  HolderOptions o;
  o.min_lag = 4;
  o.max_lag = 256;
  const HolderReport r = holder_exponent(series, 1.0, o);
  CHECK(r.lags.front() == 4);
  CHECK(r.lags.back() == 256);
  for (std::size_t i = 1; i < r.lags.size(); ++i) CHECK(r.lags[i] == 2 * r.lags[i - 1]);
  CHECK(r.increments.size() == r.lags.size());
  CHECK(std::abs(r.exponent - 0.5) < 0.1);
}

TEST_CASE("stochastic convolution in H^1") {
  const GridSpec grid(1, 16, std::numbers::pi);
  const CorrelationSpec spec = build_correlation(grid, 4.0, 0.7, 0.2, 8);
  const ConvolutionPath z = sample_convolution(spec, HurstKernel(0.7), TimeGrid(1.0, 4096), 3,
                                               ConvolutionMethod::fbm_path, 0);
  CHECK(holder_exponent(z, 1.0).exponent >= 0.6);
}
