#include "nag/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nag {

double PowerStep::at(std::int64_t i) const {
  return scale / std::pow(offset + static_cast<double>(i), exponent);
}

StepSchedule StepSchedule::uniform(int n_followers, PowerStep follower, PowerStep leader) {
  StepSchedule schedule;
  schedule.followers.assign(static_cast<std::size_t>(n_followers), follower);
  schedule.leader = leader;
  return schedule;
}

namespace {

void check_params(const PowerStep& step, const std::string& who,
                  std::vector<std::string>& report) {
  if (!(step.scale > 0.0)) report.push_back(who + ": scale must be positive");
  if (!(step.offset >= 1.0)) report.push_back(who + ": offset must be >= 1");
  if (!(step.exponent > 0.5 && step.exponent <= 1.0))
    report.push_back(who + ": exponent must lie in (0.5, 1]");
}

}  // namespace

std::vector<std::string> validate_schedule(const StepSchedule& schedule) {
  std::vector<std::string> report;
  for (std::size_t n = 0; n < schedule.followers.size(); ++n) {
    std::ostringstream os;
    os << "follower " << n << " step";
    check_params(schedule.followers[n], os.str(), report);
  }
  check_params(schedule.leader, "leader step", report);
  return report;
}

std::vector<std::int64_t> LeaderSchedule::iterations(std::int64_t horizon) const {
  std::vector<std::int64_t> result;
  for (std::int64_t k = 0; k < horizon; k += period) result.push_back(k);
  return result;
}

double follower_step_size(const StepSchedule& schedule, int n, std::int64_t k) {
  return schedule.followers[static_cast<std::size_t>(n)].at(k);
}

double leader_step_size(const StepSchedule& schedule, std::int64_t leader_updates_so_far) {
  return schedule.leader.at(leader_updates_so_far);
}

double realized_leader_step(const StepSchedule& schedule, const LeaderSchedule& leader,
                            std::int64_t k) {
  return schedule.leader.at(k / leader.period);
}

KappaReport kappa_bound(const StepSchedule& schedule, std::int64_t horizon,
                        const LeaderSchedule& leader) {
  if (horizon < 1) throw std::invalid_argument("kappa_bound: horizon must be >= 1");
  if (schedule.followers.empty())
    throw std::invalid_argument("kappa_bound: schedule has no followers");

  KappaReport report;
  for (std::int64_t k = 0; k < horizon; ++k) {
    double hi = realized_leader_step(schedule, leader, k);
    double lo = hi;
    for (std::size_t n = 0; n < schedule.followers.size(); ++n) {
      const double alpha = schedule.followers[n].at(k);
      hi = std::max(hi, alpha);
      lo = std::min(lo, alpha);
    }
    const double ratio = hi / lo;
    if (ratio > report.kappa) {
      report.kappa = ratio;
      report.argmax_iteration = k;
    }
  }

  const double p = schedule.followers.front().exponent;
  bool shared = schedule.leader.exponent == p;
  for (const PowerStep& step : schedule.followers) shared = shared && step.exponent == p;
  if (shared) {
    // alpha_n ~ a_n k^{-p} while the held leader step ~ a_0 (k/T)^{-p}, so the
    // limiting ratio is governed by the effective scales below.
    double hi = schedule.leader.scale * std::pow(static_cast<double>(leader.period), p);
    double lo = hi;
    for (const PowerStep& step : schedule.followers) {
      hi = std::max(hi, step.scale);
      lo = std::min(lo, step.scale);
    }
    report.tail_limit = hi / lo;
    report.tail_limit_valid = true;
    report.kappa = std::max(report.kappa, report.tail_limit);
  }
  return report;
}

}  // namespace nag
