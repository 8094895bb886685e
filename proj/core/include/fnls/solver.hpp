#pragma once

#include "fnls/kernel.hpp"
#include "fnls/noise.hpp"
#include "fnls/nonlinearity.hpp"
#include "fnls/spectral.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace fnls {

struct SolverConfig {
  double horizon = 1.0;
  double dt = 1e-3;
  /// H^1 cap M; <= 0 selects 1e3 ||u0||_{H^1} (1e3 when u0 = 0).
  double blowup_threshold = 0.0;
  /// Keep the field every `snapshot_stride` steps (0 keeps only t_0 and t_n).
  int snapshot_stride = 1;

  /// Number of steps; throws unless dt divides the horizon.
  int steps() const;
  TimeGrid timegrid() const { return TimeGrid(horizon, steps()); }
  /// The cap actually used for a given initial datum; throws if M <= ||u0||_{H^1}.
  double resolved_threshold(const ComplexField& u0) const;
};

struct StepDiagnostics {
  double t = 0.0;
  double mass = 0.0;
  double h1 = 0.0;
  double hamiltonian = 0.0;
  bool cemetery = false;
};

/// Solution path; after the cemetery step every state is the absorbing
/// marker and no field is stored.
struct Trajectory {
  TimeGrid timegrid;
  double epsilon = 0.0;
  double threshold = 0.0;
  std::vector<StepDiagnostics> diagnostics;  // one per t_k
  std::vector<int> snapshot_steps;
  std::vector<ComplexField> snapshots;
  std::optional<int> cemetery_step;
  double blowup_time = std::numeric_limits<double>::infinity();

  bool blew_up() const noexcept { return cemetery_step.has_value(); }
  bool is_cemetery(int step) const noexcept { return cemetery_step && step >= *cemetery_step; }
  /// Stored field at `step`, or nullptr (cemetery or not recorded).
  const ComplexField* state(int step) const;
};

/// Strang splitting of the mild formulation with additive forcing:
///   u_{k+1} = N(dt/2) U(dt) N(dt/2) u_k - i sqrt(eps) D_k,
///   D_k = Z(t_{k+1}) - U(dt) Z(t_k).
/// `forcing` may be null (no noise).
Trajectory solve_mild(const ComplexField& u0, const NonlinearitySpec& nl,
                      const ConvolutionPath* forcing, double eps, const SolverConfig& cfg);

/// The skeleton S(u0, h): solve_mild with eps = 1 driven by (Lh)(t_k).
Trajectory solve_skeleton(const ComplexField& u0, const Control& h, const NonlinearitySpec& nl,
                          const DiscreteLOperator& op, const SolverConfig& cfg);

/// First step whose H^1 norm exceeds M (or that is already the cemetery).
std::optional<int> detect_blowup(const Trajectory& traj, double threshold);

}  // namespace fnls
