// Built-in affine-oracle game family. Follower n plays
//   d_n(x, sigma, y) = self * x + coupling * sigma + leader_pull * y + offset
// and the leader plays
//   d_0(y, sigma_0) = leader_self * y + leader_coupling * sigma_0 + leader_offset,
// all on symmetric boxes. Affine oracles come from quadratic costs, have
// exact curvature constants, and admit a closed-form interior equilibrium,
// which makes this family the workhorse for testing the engine.
#pragma once

#include "nag/game.hpp"

#include <optional>

namespace nag {

struct AffineGameParams {
  int n_followers = 2;
  int follower_dim = 1;
  int leader_dim = 1;

  double self = 5.0;          // strong-convexity constant of each follower
  double coupling = 1.0;      // weight on the neighbor aggregate
  double leader_pull = 1.0;   // weight on the leader strategy
  double offset = -1.0;

  double leader_self = 10.0;  // strong-convexity constant of the leader
  double leader_coupling = 1.0;
  double leader_offset = 0.0;

  double box_half_width = 1.0;

  // Empty means the complete graph. Neighbor weights are uniform over each
  // row's neighbors; leader weights are uniform over followers.
  Eigen::MatrixXi adjacency;
};

GameSpec make_affine_game(const AffineGameParams& params);

// The canonical two-follower scalar instance used throughout the tests.
AffineGameParams quadratic_test_params();
GameSpec make_quadratic_test_game();

// Path-graph variant 0 - 1 - ... - (n-1) of the same costs; with three or
// more followers the gossip protocol is genuinely partial on this graph.
AffineGameParams quadratic_path_params(int n_followers);

// Closed-form equilibrium from the stacked stationarity system, valid while
// the solution is interior to the boxes (checked; throws otherwise). This is
// an independent route to the equilibrium, used to cross-check the solver.
StrategyProfile affine_interior_equilibrium(const AffineGameParams& params);

}  // namespace nag
