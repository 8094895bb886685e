#pragma once

#include "config.hpp"

#include "fnls/noise.hpp"
#include "fnls/nonlinearity.hpp"
#include "fnls/solver.hpp"
#include "fnls/spectral.hpp"

#include <filesystem>
#include <stdexcept>

namespace fnls::cli {

enum ExitCode : int { kSuccess = 0, kValidationError = 1, kInvariantFailure = 2, kIoError = 3 };

/// A check that the run itself performs failed (not a bad input).
class InvariantFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Builders from the resolved parameter object.
GridSpec grid_from(const json& params);
CorrelationSpec correlation_from(const json& params, const GridSpec& grid);
NonlinearitySpec nonlinearity_from(const json& params);
ComplexField initial_from(const json& params, const GridSpec& grid);
SolverConfig solver_from(const json& params);

/// White-noise control: cell values N(0, scale^2 / dt) per mode direction,
/// so that Lh has the law of Z when scale = 1. Member `index` of a family
/// draws from Stream(seed, {0x5eed, index}).
Control random_control(const DiscreteLOperator& op, std::uint64_t seed, std::uint64_t index,
                       double scale = 1.0);

/// Runs the experiment and writes its artifacts plus manifest.json and
/// config.json under `out`. Returns an ExitCode; exceptions escape to the caller.
int run(const RunConfig& cfg, const std::filesystem::path& out);

/// Maps an exception escaping `run` (or parsing) to an ExitCode.
int exit_code_for(const std::exception& e);

}  // namespace fnls::cli
