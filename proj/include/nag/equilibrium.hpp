// Full-information reference equilibrium machinery: the synchronous
// projected pseudo-gradient fixed-point solver used as ground truth, the
// variational-inequality equilibrium check, sampling-based estimation of the
// regularity constants, the sufficient-condition report, and the strict-
// monotonicity probe that underwrites equilibrium uniqueness.
#pragma once

#include "nag/game.hpp"
#include "nag/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace nag {

struct ReferencePoint {
  StrategyProfile point;
  double residual = 0.0;           // last fixed-point displacement norm
  std::int64_t iterations_used = 0;

  const std::vector<Vector>& x_star() const { return point.x; }
  const Vector& y_star() const { return point.y; }
};

struct SolveOptions {
  // step <= 0 selects the conservative default min(C) / (4 (Lbar + max C)^2)
  // from constants estimated internally with a fixed seed. Override with an
  // analytic or tuned value when the estimate is too pessimistic.
  double step = 0.0;
  double tol = 1e-10;           // stop when the iterate moves less than this
  std::int64_t max_iter = 2000000;
};

// Raised when the fixed-point iteration does not reach tol; carries the best
// iterate so callers can inspect how far it got.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(std::string message, ReferencePoint best)
      : std::runtime_error(std::move(message)), best_(std::move(best)) {}
  const ReferencePoint& best() const { return best_; }

 private:
  ReferencePoint best_;
};

// Iterates z <- P(z - step * g(z)) with fresh, full information (all players
// simultaneously, true aggregates) until the displacement drops below tol.
// Strict monotonicity of g makes this contractive for small steps; the fixed
// point satisfies the variational characterization of an equilibrium.
ReferencePoint solve_reference_gne(const GameSpec& spec, const SolveOptions& options = {});

double default_contraction_step(const GameConstants& constants);

// Unilateral-deviation probe in variational form: at an equilibrium,
// d_n(x*, sigma*, y*)^T (x - x*) >= 0 for every feasible x (and likewise for
// the leader). Samples random feasible probes and returns the most negative
// directional value found, 0 when none is negative.
double verify_gne(const GameSpec& spec, const ReferencePoint& candidate,
                  int probes_per_agent, RandomStream& rng);

// Sampling estimates of the curvature constants: C as the smallest
// strong-convexity quotient seen, L / L0 as the largest Lipschitz quotient
// seen. Exact for affine oracles; a lower/upper-biased estimate in general,
// so analytic overrides are accepted wherever these feed a check.
GameConstants estimate_constants(const GameSpec& spec, int sample_pairs,
                                 RandomStream& rng);

// Sufficient conditions for the dynamics to converge: every follower needs
// C_n > (kappa/delta) * Lbar and the leader needs C_0 > kappa * Kbar * Lbar,
// with Lbar = max(2L, L0). These are sufficient only; a failed margin does
// not preclude convergence.
struct ConditionReport {
  double kappa = 1.0;
  double delta = 1.0;
  double gap_bound = 1.0;  // Kbar
  double l_bar = 0.0;
  std::vector<double> follower_margins;  // C_n - (kappa/delta) Lbar
  double leader_margin = 0.0;            // C_0 - kappa Kbar Lbar
  bool conditions_hold = false;
};

ConditionReport check_convergence_conditions(const GameConstants& constants,
                                             double kappa, double delta,
                                             double gap_bound);

// Evaluates Psi = (z - z')^T (g(z) - g(z')) on random feasible pairs together
// with the strong-monotonicity certificate
// (C0 - Lbar)||dy||^2 + sum_n (C_n - Lbar)||dx_n||^2 at the same pair.
struct MonotonicityProbe {
  double min_psi = 0.0;
  double certificate_at_min = 0.0;
  std::int64_t pairs = 0;
};

MonotonicityProbe monotonicity_probe(const GameSpec& spec, const GameConstants& constants,
                                     std::int64_t pairs, RandomStream& rng);

}  // namespace nag
