#include "nag/dynamics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nag {

Vector follower_step(int n, const Vector& x_n, const LocalInfoState& views,
                     const Vector& y, int activity_bit, double alpha,
                     const GameSpec& spec) {
  if (activity_bit == 0) return x_n;
  const Vector sigma = sigma_follower(n, views.row(n), spec);
  const Vector g = spec.follower_oracles[static_cast<std::size_t>(n)](x_n, sigma, y);
  return project_box(x_n - alpha * g, spec.follower_sets[static_cast<std::size_t>(n)]);
}

Vector leader_step(const Vector& y, const std::vector<Vector>& x_all, double alpha0,
                   const GameSpec& spec) {
  const Vector sigma0 = sigma_leader(x_all, spec);
  const Vector g0 = spec.leader_oracle(y, sigma0);
  return project_box(y - alpha0 * g0, spec.leader_set);
}

namespace {

void require_feasible(const Vector& v, const Box& box, std::int64_t k, int agent) {
  if (box.contains(v)) return;
  std::ostringstream os;
  os << "infeasible strategy at iteration " << k << " for agent " << agent
     << " (leader = -1); an oracle likely returned a non-finite value";
  throw std::runtime_error(os.str());
}

}  // namespace

Trace run(const GameSpec& spec, const ProtocolSpec& protocol,
          const StepSchedule& steps, const LeaderSchedule& leader,
          const StrategyProfile& initial, const RunOptions& options) {
  if (options.horizon < 1) throw std::invalid_argument("run: horizon must be >= 1");
  if (options.snapshot_stride < 1)
    throw std::invalid_argument("run: snapshot stride must be >= 1");
  if (static_cast<int>(initial.x.size()) != spec.n_followers)
    throw std::invalid_argument("run: initial profile has wrong follower count");
  for (int n = 0; n < spec.n_followers; ++n) {
    if (!spec.follower_sets[static_cast<std::size_t>(n)].contains(initial.x[n]))
      throw std::invalid_argument("run: initial follower strategy is infeasible");
  }
  if (!spec.leader_set.contains(initial.y))
    throw std::invalid_argument("run: initial leader strategy is infeasible");
  if (static_cast<int>(steps.followers.size()) != spec.n_followers)
    throw std::invalid_argument("run: schedule has wrong follower count");
  if (protocol.kind == ProtocolSpec::Kind::gossip) {
    for (int n = 0; n < spec.n_followers; ++n) {
      if (spec.degree(n) == 0) {
        std::ostringstream os;
        os << "run: gossip protocol needs every follower connected, but follower "
           << n << " has no neighbor";
        throw std::runtime_error(os.str());
      }
    }
  }

  const int N = spec.n_followers;
  const std::int64_t K = options.horizon;
  const StrategyProfile* ref = options.reference;

  Trace trace;
  trace.seed = options.seed;
  trace.run_id = options.run_id;
  trace.protocol = protocol;
  trace.horizon = K;
  trace.n_followers = N;
  trace.follower_dim = spec.follower_dim;
  trace.leader_dim = spec.leader_dim;
  trace.snapshot_stride = options.snapshot_stride;
  trace.has_reference = ref != nullptr;

  trace.activity.assign(static_cast<std::size_t>(K) * N, 0);
  trace.links.assign(static_cast<std::size_t>(K) * N * N, 0);
  trace.leader_updated.assign(static_cast<std::size_t>(K), 0);
  trace.follower_alpha.assign(static_cast<std::size_t>(K) * N, 0.0);
  trace.leader_alpha.assign(static_cast<std::size_t>(K), 0.0);
  trace.increment.assign(static_cast<std::size_t>(K) * N, 0.0);
  trace.pair_staleness.assign(static_cast<std::size_t>(K) * N * N, 0.0);
  trace.max_staleness.assign(static_cast<std::size_t>(K), 0.0);
  if (ref) trace.dist_to_reference.assign(static_cast<std::size_t>(K), 0.0);

  RandomStream rng = RandomStream::for_run(options.seed, options.run_id);

  std::vector<Vector> x = initial.x;
  Vector y = initial.y;
  LocalInfoState views = make_fresh_views(spec, x);
  std::vector<Vector> x_next(static_cast<std::size_t>(N));

  std::int64_t leader_updates = 0;
  double alpha0_in_force = 0.0;

  for (std::int64_t k = 0; k < K; ++k) {
    // Leader block. Wake-ups use the true current aggregate; the new y is
    // broadcast instantly, so followers below already see it.
    if (leader.contains(k)) {
      const double alpha0 = leader_step_size(steps, leader_updates);
      y = leader_step(y, x, alpha0, spec);
      require_feasible(y, spec.leader_set, k, -1);
      ++leader_updates;
      alpha0_in_force = alpha0;
      trace.leader_updated[static_cast<std::size_t>(k)] = 1;
      trace.leader_update_iterations.push_back(k);
      if (ref) {
        double phi = (y - ref->y).squaredNorm();
        for (int n = 0; n < N; ++n) phi += (x[static_cast<std::size_t>(n)] - ref->x[static_cast<std::size_t>(n)]).squaredNorm();
        trace.lyapunov.push_back(phi);
      }
    }
    trace.leader_alpha[static_cast<std::size_t>(k)] = alpha0_in_force;

    if (ref) {
      double sq = (y - ref->y).squaredNorm();
      for (int n = 0; n < N; ++n) sq += (x[static_cast<std::size_t>(n)] - ref->x[static_cast<std::size_t>(n)]).squaredNorm();
      trace.dist_to_reference[static_cast<std::size_t>(k)] = std::sqrt(sq);
    }
    if (k % options.snapshot_stride == 0) {
      trace.snapshot_iterations.push_back(k);
      trace.x_snapshots.push_back(x);
      trace.y_snapshots.push_back(y);
    }

    // Follower block: sample the event, step the active followers from the
    // start-of-iteration views, then refresh views with the sampled links.
    const CommEvent event = sample_events(protocol, spec, k, rng);
    for (int n = 0; n < N; ++n) {
      trace.activity[static_cast<std::size_t>(k) * N + n] =
          static_cast<std::uint8_t>(event.activity[n]);
      for (int m = 0; m < N; ++m) {
        trace.links[(static_cast<std::size_t>(k) * N + n) * N + m] =
            static_cast<std::uint8_t>(event.links(n, m));
      }
    }

    for (int n = 0; n < N; ++n) {
      const double alpha = follower_step_size(steps, n, k);
      trace.follower_alpha[static_cast<std::size_t>(k) * N + n] = alpha;
      x_next[static_cast<std::size_t>(n)] =
          follower_step(n, x[static_cast<std::size_t>(n)], views, y, event.activity[n], alpha, spec);
      require_feasible(x_next[static_cast<std::size_t>(n)],
                       spec.follower_sets[static_cast<std::size_t>(n)], k, n);
      trace.increment[static_cast<std::size_t>(k) * N + n] =
          (x_next[static_cast<std::size_t>(n)] - x[static_cast<std::size_t>(n)]).norm();
    }

    views = update_local_info(views, event, x);
    const Eigen::MatrixXd stale = staleness(views, x);
    double max_stale = 0.0;
    for (int n = 0; n < N; ++n) {
      for (int m = 0; m < N; ++m) {
        trace.pair_staleness[(static_cast<std::size_t>(k) * N + n) * N + m] = stale(n, m);
        max_stale = std::max(max_stale, stale(n, m));
      }
    }
    trace.max_staleness[static_cast<std::size_t>(k)] = max_stale;

    x.swap(x_next);
  }

  trace.x_final = x;
  trace.y_final = y;
  if (ref) {
    double sq = (y - ref->y).squaredNorm();
    for (int n = 0; n < N; ++n) sq += (x[static_cast<std::size_t>(n)] - ref->x[static_cast<std::size_t>(n)]).squaredNorm();
    trace.final_distance = std::sqrt(sq);
  }
  return trace;
}

std::vector<IncrementViolation> check_increment_bound(const Trace& trace,
                                                      const GameConstants& constants,
                                                      const StepSchedule& schedule) {
  if (static_cast<int>(constants.subgradient_bounds_followers.size()) != trace.n_followers)
    throw std::invalid_argument("check_increment_bound: missing A_n bounds");
  std::vector<IncrementViolation> violations;
  for (std::int64_t k = 0; k < trace.horizon; ++k) {
    for (int n = 0; n < trace.n_followers; ++n) {
      const double bound =
          constants.subgradient_bounds_followers[static_cast<std::size_t>(n)] *
          follower_step_size(schedule, n, k);
      const double inc = trace.increment_at(k, n);
      if (inc > bound + 1e-9) violations.push_back({n, k, inc, bound});
    }
  }
  return violations;
}

StalenessSeries staleness_series(const Trace& trace, const StepSchedule& schedule) {
  const int N = trace.n_followers;
  StalenessSeries series;
  series.n_followers = N;
  series.horizon = trace.horizon;
  series.cumulative.assign(static_cast<std::size_t>(trace.horizon + 1) * N * N, 0.0);
  for (std::int64_t k = 0; k < trace.horizon; ++k) {
    for (int n = 0; n < N; ++n) {
      const double alpha = follower_step_size(schedule, n, k);
      for (int m = 0; m < N; ++m) {
        const std::size_t idx = (static_cast<std::size_t>(k) * N + n) * N + m;
        const std::size_t next = (static_cast<std::size_t>(k + 1) * N + n) * N + m;
        series.cumulative[next] = series.cumulative[idx] + alpha * trace.staleness_at(k, n, m);
      }
    }
  }
  return series;
}

std::int64_t iterations_to_threshold(const Trace& trace, double threshold) {
  if (!trace.has_reference)
    throw std::invalid_argument("iterations_to_threshold: trace has no reference");
  if (trace.final_distance >= threshold) return trace.horizon;
  std::int64_t settled = 0;
  for (std::int64_t k = trace.horizon - 1; k >= 0; --k) {
    if (trace.dist_to_reference[static_cast<std::size_t>(k)] >= threshold) {
      settled = k + 1;
      break;
    }
  }
  return settled;
}

}  // namespace nag
