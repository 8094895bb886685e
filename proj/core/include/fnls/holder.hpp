#pragma once

#include "fnls/noise.hpp"

#include <functional>
#include <vector>

namespace fnls {

struct HolderOptions {
  enum class Statistic { rms, sup };

  int min_lag = 4;
  int max_lag = 0;  // 0 selects (points - 1) / 8
  Statistic statistic = Statistic::rms;
};

struct HolderReport {
  double exponent = 0.0;
  double r_squared = 0.0;
  int min_lag = 0;
  int max_lag = 0;
  std::vector<int> lags;
  std::vector<double> increments;  // statistic per lag
  bool degenerate = false;
};

/// Regression of log(increment statistic) on log(lag dt) over dyadic lags.
/// distance(i, j) is the norm of the increment between samples i and j.
/// Needs at least 1024 samples.
HolderReport holder_exponent(int points, double dt, const std::function<double(int, int)>& distance,
                             const HolderOptions& options = {});
HolderReport holder_exponent(const std::vector<double>& series, double dt,
                             const HolderOptions& options = {});
/// Exponent of t -> Z(t) in H^s.
HolderReport holder_exponent(const ConvolutionPath& path, double s = 1.0,
                             const HolderOptions& options = {});

}  // namespace fnls
