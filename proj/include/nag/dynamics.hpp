// The interleaved leader-follower dynamics: followers take projected
// sub-gradient steps on stale neighbor views, gated per iteration by their
// activity bit; the leader steps on the true follower aggregate at its
// wake-up iterations and broadcasts immediately.
//
// One iteration k:
//   1. if k is a wake-up, the leader updates y from the current true
//      aggregate and the followers see the new value at once;
//   2. a communication event (links, activities) is sampled;
//   3. every active follower steps simultaneously from the views available at
//      the start of the iteration;
//   4. local views are refreshed through the sampled links with the
//      start-of-iteration strategies.
#pragma once

#include "nag/comm.hpp"
#include "nag/game.hpp"
#include "nag/schedule.hpp"

#include <cstdint>
#include <vector>

namespace nag {

// Full record of one run. Scalar diagnostics are stored at every iteration;
// strategy snapshots honor `snapshot_stride` to keep long traces affordable.
struct Trace {
  // run metadata
  std::uint64_t seed = 0;
  std::uint64_t run_id = 0;
  ProtocolSpec protocol;
  std::int64_t horizon = 0;
  int n_followers = 0;
  int follower_dim = 0;
  int leader_dim = 0;
  std::int64_t snapshot_stride = 1;
  bool has_reference = false;

  // per-iteration diagnostics, indexed k (and k * N + n where applicable)
  std::vector<std::uint8_t> activity;        // horizon * N
  std::vector<std::uint8_t> links;           // horizon * N * N
  std::vector<std::uint8_t> leader_updated;  // horizon
  std::vector<double> follower_alpha;        // horizon * N
  std::vector<double> leader_alpha;          // horizon, value in force at k
  std::vector<double> increment;             // horizon * N, ||x_n^{k+1} - x_n^k||
  std::vector<double> pair_staleness;        // horizon * N * N, after view refresh
  std::vector<double> max_staleness;         // horizon
  std::vector<double> dist_to_reference;     // horizon, ||z^k - z*|| (empty w/o reference)

  // one entry per leader update j
  std::vector<std::int64_t> leader_update_iterations;
  std::vector<double> lyapunov;  // ||y-y*||^2 + sum_n ||x_n-x*||^2 (empty w/o reference)

  // thinned strategy snapshots: x at start of iteration, y after any wake-up
  std::vector<std::int64_t> snapshot_iterations;
  std::vector<std::vector<Vector>> x_snapshots;
  std::vector<Vector> y_snapshots;

  // state after the last iteration
  std::vector<Vector> x_final;
  Vector y_final;
  double final_distance = -1.0;  // -1 when no reference

  std::uint8_t activity_at(std::int64_t k, int n) const {
    return activity[static_cast<std::size_t>(k) * n_followers + n];
  }
  std::uint8_t link_at(std::int64_t k, int n, int m) const {
    return links[(static_cast<std::size_t>(k) * n_followers + n) * n_followers + m];
  }
  double increment_at(std::int64_t k, int n) const {
    return increment[static_cast<std::size_t>(k) * n_followers + n];
  }
  double staleness_at(std::int64_t k, int n, int m) const {
    return pair_staleness[(static_cast<std::size_t>(k) * n_followers + n) * n_followers + m];
  }
};

// One follower update: sigma from the local views, then a projected step
// x <- P(x - e * alpha * d_n(x, sigma, y)). Inactive followers return x as is.
Vector follower_step(int n, const Vector& x_n, const LocalInfoState& views,
                     const Vector& y, int activity_bit, double alpha,
                     const GameSpec& spec);

// One leader update from the true follower aggregate: y <- P(y - alpha * d0).
Vector leader_step(const Vector& y, const std::vector<Vector>& x_all, double alpha0,
                   const GameSpec& spec);

struct RunOptions {
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
  std::uint64_t run_id = 0;
  std::int64_t snapshot_stride = 1;
  const StrategyProfile* reference = nullptr;  // optional, enables distance metrics
};

Trace run(const GameSpec& spec, const ProtocolSpec& protocol,
          const StepSchedule& steps, const LeaderSchedule& leader,
          const StrategyProfile& initial, const RunOptions& options);

struct IncrementViolation {
  int follower = 0;
  std::int64_t iteration = 0;
  double increment = 0.0;
  double bound = 0.0;
};

// Verifies ||x_n^{k+1} - x_n^k|| <= A_n * alpha_n^k (+ 1e-9 slack) on the
// whole trace. With certified A_n the report must be empty.
std::vector<IncrementViolation> check_increment_bound(const Trace& trace,
                                                      const GameConstants& constants,
                                                      const StepSchedule& schedule);

// Partial sums S_nm(K) = sum_{k<K} alpha_n^k * staleness(k, n, m), the
// empirical handle on the staleness series' convergence.
struct StalenessSeries {
  int n_followers = 0;
  std::int64_t horizon = 0;
  std::vector<double> cumulative;  // (horizon + 1) * N * N, cumulative[0] = 0

  double at(std::int64_t upto, int n, int m) const {
    return cumulative[(static_cast<std::size_t>(upto) * n_followers + n) * n_followers + m];
  }
};

StalenessSeries staleness_series(const Trace& trace, const StepSchedule& schedule);

// First iteration after which the distance-to-reference stays below
// `threshold` through the end of the run (horizon if it never settles).
std::int64_t iterations_to_threshold(const Trace& trace, double threshold);

}  // namespace nag
