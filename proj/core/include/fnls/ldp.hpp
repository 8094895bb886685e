#pragma once

#include "fnls/noise.hpp"
#include "fnls/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fnls {

/// Initial datum, nonlinearity, stepping and the noise operator of one experiment.
struct Problem {
  ComplexField u0;
  NonlinearitySpec nl;
  SolverConfig cfg;
  const DiscreteLOperator* op = nullptr;

  Trajectory deterministic() const;
  /// u^eps driven by draw `replicate` of Z.
  Trajectory sample(double eps, std::uint64_t seed, std::uint64_t replicate) const;
  Trajectory skeleton(const Control& h) const;
};

struct EventSpec {
  enum class Kind { terminal_ball_exit, sup_norm_exceed, blowup_before_horizon };

  Kind kind = Kind::terminal_ball_exit;
  double threshold = 0.0;  // delta
  double sobolev = 0.0;    // norm index s

  /// How far the trajectory is from realizing the event; <= 0 means realized.
  /// terminal_ball_exit: delta - ||u(T) - ubar(T)||_{H^s} (ubar the noise-free flow)
  /// sup_norm_exceed:    delta - sup_k ||u(t_k)||_{H^s}
  /// blowup_before_horizon: log M - log sup_k ||u(t_k)||_{H^1}
  /// The cemetery realizes every event.
  double shortfall(const Trajectory& traj, const Trajectory& reference) const;
  bool occurs(const Trajectory& traj, const Trajectory& reference) const;
};

std::string to_string(EventSpec::Kind kind);
EventSpec::Kind parse_event_kind(const std::string& name);

struct ProbabilityEstimate {
  double eps = 0.0;
  int replicates = 0;
  int hits = 0;
  double p = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool never_hit = false;
};

/// Wilson score interval at level 0.05.
void wilson_interval(int hits, int trials, double& lo, double& hi);

ProbabilityEstimate estimate_event_probability(const Problem& problem, const EventSpec& event,
                                               double eps, int replicates, std::uint64_t seed);

struct SlopeFit {
  double rate = 0.0;           // intercept of the affine fit of -eps log p against eps
  double rate_stderr = 0.0;
  double eps_coefficient = 0.0;
  double constant_fit = 0.0;   // mean of -eps log p
  double drift = 0.0;          // max - min of -eps log p over the ladder
  int points = 0;
  bool sufficient = false;     // at least four rungs with p > 0
};

SlopeFit ldp_slope(const std::vector<double>& eps, const std::vector<double>& p);

/// Cheapest exit from the terminal H^s ball for the linear problem:
/// gaussian_rate at delta times the top eigenvector of the (weighted) terminal
/// covariance, so rate = delta^2 / (2 lambda_max).
RateResult terminal_ball_rate(const DiscreteLOperator& op, double delta, double sobolev = 0.0);

struct RateReport {
  std::vector<ProbabilityEstimate> ladder;
  SlopeFit slope;
  double pseudo_inverse_rate = 0.0;
  double variational_bound = 0.0;
};

struct MinimizeOptions {
  int basis_dim = 64;
  int iterations = 200;          // BFGS iterations per penalty level
  int penalty_rounds = 8;
  double margin = 1e-3;          // target delta (1 + margin)
};

struct MinimizeResult {
  Control h;
  double energy = 0.0;           // (1/2)||h||^2, an upper bound on the infimum
  bool feasible = false;
  int evaluations = 0;
  double shortfall = 0.0;
};

/// Penalized minimization of (1/2)||h||^2 over controls spanned by
/// (mode direction) x (cubic B-spline in time), with the penalty raised x10
/// until the skeleton realizes the event.
MinimizeResult minimize_rate(const Problem& problem, const EventSpec& event,
                             const MinimizeOptions& options = {});

/// sup_k ||a(t_k) - b(t_k)||_{H^s} over the recorded steps; the cemetery is
/// at distance 0 from itself and +inf from any field.
double path_distance(const Trajectory& a, const Trajectory& b, double s = 1.0);

/// Median over samples of the distance to the nearest family member.
double support_distance(const std::vector<Trajectory>& samples,
                        const std::vector<Trajectory>& family, double s = 1.0);

}  // namespace fnls
