// Game definition: players, feasible boxes, communication weights, and the
// sub-gradient oracles, together with the aggregation/projection primitives
// everything else is built on.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nag {

using Vector = Eigen::VectorXd;

// Axis-aligned box with finite bounds. The only feasible-set shape supported:
// projection is an exact componentwise clamp and covers the built-in games.
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {}

  static Box interval(double lo, double hi) {
    Vector l(1), u(1);
    l << lo;
    u << hi;
    return Box(std::move(l), std::move(u));
  }
  static Box cube(int dim, double lo, double hi) {
    return Box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
  }

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& p, double tol = 0.0) const;
  Vector center() const { return 0.5 * (lower + upper); }
  // Euclidean length of the main diagonal, sup of ||a - b|| over the box.
  double diagonal() const { return (upper - lower).norm(); }
};

// d_n(x_n, sigma_n, y): sub-gradient of follower n's cost in its own strategy.
using FollowerSubgradient =
    std::function<Vector(const Vector& x, const Vector& sigma, const Vector& y)>;
// d_0(y, sigma_0): sub-gradient of the leader's cost in y.
using LeaderSubgradient = std::function<Vector(const Vector& y, const Vector& sigma)>;

// A joint strategy profile z = (x_1..x_N, y).
struct StrategyProfile {
  std::vector<Vector> x;
  Vector y;

  double distance_to(const StrategyProfile& other) const;
  double squared_distance_to(const StrategyProfile& other) const;
};

struct GameSpec {
  int n_followers = 0;  // N
  int follower_dim = 0; // strategy dimension shared by all followers
  int leader_dim = 0;

  std::vector<Box> follower_sets;  // X_n, one per follower
  Box leader_set;                  // Y

  Eigen::MatrixXi adjacency;   // N x N, zero diagonal; a(n,m)=1 iff n hears m
  Eigen::MatrixXd weights;     // N x N, w(n,m) > 0 iff a(n,m) = 1, rows sum to 1
  Vector leader_weights;       // length N, nonnegative, sums to 1

  std::vector<FollowerSubgradient> follower_oracles;
  LeaderSubgradient leader_oracle;

  std::vector<int> neighbors(int n) const;
  int degree(int n) const;
};

// Tolerance for the weight-sum invariants. The model states exact sums;
// floating point demands a little slack.
inline constexpr double kWeightSumTolerance = 1e-12;

// Checks every structural invariant of the game. Violations are returned as
// human-readable strings with indices; an empty report means the game is valid.
std::vector<std::string> validate_game(const GameSpec& spec);

// Weighted neighbor aggregate sigma_n = sum_{m in N_n} w_nm x_m.
// `strategy_by_index` is indexed by follower id; entries for non-neighbors are
// ignored and may be empty. A missing (empty) neighbor entry is an error.
Vector sigma_follower(int n, const std::vector<Vector>& strategy_by_index,
                      const GameSpec& spec);

// Leader aggregate sigma_0 = sum_n w_0n x_n over all followers.
Vector sigma_leader(const std::vector<Vector>& x_all, const GameSpec& spec);

// Componentwise clamp of `point` onto `box`.
Vector project_box(const Vector& point, const Box& box);

// Constants describing the game's regularity. Curvature (C, L) comes from
// estimate_constants in the equilibrium module or from analytic overrides;
// bounds (A, B) come from estimate_bounds below.
struct GameConstants {
  std::vector<double> strong_convexity_followers;  // C_n
  double strong_convexity_leader = 0.0;            // C_0
  double lipschitz_follower = 0.0;                 // L
  double lipschitz_leader = 0.0;                   // L_0

  std::vector<double> subgradient_bounds_followers;  // A_n
  double subgradient_bound_leader = 0.0;             // A_0
  std::vector<double> diameters;                     // B_n

  double l_bar() const {
    return std::max(2.0 * lipschitz_follower, lipschitz_leader);
  }
  // Merge curvature estimates with bound estimates into one record.
  GameConstants merged_with(const GameConstants& bounds) const;
};

// Certified lower bounds on sup ||d_n|| (A_n) and sup ||d_0|| (A_0) by
// exhaustive tensor-grid sampling, inflated by `safety_factor`, plus the box
// diameters B_n. Grid maxima under-estimate the true suprema in general; the
// built-in oracle families are monotone per coordinate, so corners (grid = 2)
// are already exact for them. Oracle failures are rethrown with the grid
// location attached.
GameConstants estimate_bounds(const GameSpec& spec, int grid_points_per_axis,
                              double safety_factor = 1.1);

}  // namespace nag
