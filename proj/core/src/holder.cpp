#include "fnls/holder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fnls {

HolderReport holder_exponent(int points, double dt, const std::function<double(int, int)>& distance,
                             const HolderOptions& options) {
  if (points < 1024) throw std::invalid_argument("Hoelder estimation needs at least 1024 samples");
  if (!(dt > 0.0)) throw std::invalid_argument("sample spacing must be positive");
  HolderReport report;
  report.min_lag = std::max(1, options.min_lag);
  report.max_lag = options.max_lag > 0 ? options.max_lag : (points - 1) / 8;
  for (int lag = report.min_lag; lag <= report.max_lag; lag *= 2) report.lags.push_back(lag);
  if (report.lags.size() < 2) throw std::invalid_argument("lag range holds fewer than two lags");

  std::vector<double> xs;
  std::vector<double> ys;
  for (int lag : report.lags) {
    double stat = 0.0;
    const int count = points - lag;
    for (int i = 0; i < count; ++i) {
      const double d = distance(i, i + lag);
      if (options.statistic == HolderOptions::Statistic::sup) {
        stat = std::max(stat, d);
      } else {
        stat += d * d;
      }
    }
    if (options.statistic == HolderOptions::Statistic::rms) stat = std::sqrt(stat / count);
    report.increments.push_back(stat);
    if (stat > 0.0 && std::isfinite(stat)) {
      xs.push_back(std::log(lag * dt));
      ys.push_back(std::log(stat));
    }
  }
  if (xs.size() < report.lags.size()) {
    report.degenerate = true;
    report.exponent = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  report.exponent = sxy / sxx;
  report.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  report.degenerate = !(report.exponent >= -1e-9 && report.exponent <= 1.0 + 1e-9);
  return report;
}

HolderReport holder_exponent(const std::vector<double>& series, double dt,
                             const HolderOptions& options) {
  return holder_exponent(
      static_cast<int>(series.size()), dt,
      [&](int i, int j) { return std::abs(series[j] - series[i]); }, options);
}

HolderReport holder_exponent(const ConvolutionPath& path, double s, const HolderOptions& options) {
  return holder_exponent(
      path.timegrid.steps() + 1, path.timegrid.dt(),
      [&](int i, int j) { return path.distance(i, j, s); }, options);
}

}  // namespace fnls
