#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fnls::cli {

struct OracleResult {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Every derived-value oracle at small scale; residual <= tolerance passes.
/// Each check is isolated, so an exception inside one is recorded as its failure.
std::vector<OracleResult> run_oracle_suite(std::uint64_t seed);

}  // namespace fnls::cli
