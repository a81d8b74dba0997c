// Diminishing step-size sequences and the leader's wake-up set.
//
// Sequences are restricted to the power family a / (b + i)^p with p in
// (0.5, 1], which satisfies the divergent-sum / convergent-squared-sum
// requirements analytically, so validation reduces to range checks.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nag {

struct PowerStep {
  double scale = 1.0;     // a > 0
  double offset = 1.0;    // b >= 1
  double exponent = 1.0;  // p in (0.5, 1]

  double at(std::int64_t i) const;
};

struct StepSchedule {
  std::vector<PowerStep> followers;
  PowerStep leader;

  static StepSchedule uniform(int n_followers, PowerStep follower, PowerStep leader);
};

std::vector<std::string> validate_schedule(const StepSchedule& schedule);

// Periodic leader wake-up set {0, T, 2T, ...}; the gap bound is the period.
struct LeaderSchedule {
  std::int64_t period = 1;

  bool contains(std::int64_t k) const { return k % period == 0; }
  double gap_bound() const { return static_cast<double>(period); }  // K-bar
  std::vector<std::int64_t> iterations(std::int64_t horizon) const;
};

// Follower n's step at global iteration k.
double follower_step_size(const StepSchedule& schedule, int n, std::int64_t k);

// The leader's step is indexed by its own completed-update count, not by the
// global clock, so it is held constant between wake-ups.
double leader_step_size(const StepSchedule& schedule, std::int64_t leader_updates_so_far);

// The leader step value in force at global iteration k: the value used at the
// most recent wake-up <= k.
double realized_leader_step(const StepSchedule& schedule, const LeaderSchedule& leader,
                            std::int64_t k);

struct KappaReport {
  double kappa = 1.0;              // max over k of (max agent step) / (min agent step)
  std::int64_t argmax_iteration = 0;
  // For schedules sharing one exponent the k -> infinity ratio is exact:
  // follower scales a_n compete against the leader's effective a_0 * T^p.
  double tail_limit = 1.0;
  bool tail_limit_valid = false;
};

// Numerical bound for the step-size ratio over [0, horizon), with the shared-
// exponent tail limit folded in when available (making kappa valid for all k).
KappaReport kappa_bound(const StepSchedule& schedule, std::int64_t horizon,
                        const LeaderSchedule& leader);

}  // namespace nag
