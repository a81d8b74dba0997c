#include "nag/schedule.hpp"

#include <doctest.h>

#include <cmath>

using namespace nag;

TEST_SUITE_BEGIN("schedule");

TEST_CASE("power steps evaluate a / (b + k)^p") {
  const PowerStep harmonic{1.0, 1.0, 1.0};
  CHECK(harmonic.at(0) == 1.0);
  CHECK(harmonic.at(9) == doctest::Approx(0.1).epsilon(1e-15));

  const PowerStep slow{2.0, 4.0, 0.75};
  CHECK(slow.at(5) == doctest::Approx(2.0 / std::pow(9.0, 0.75)).epsilon(1e-15));
}

TEST_CASE("leader step is held between wake-ups") {
  const StepSchedule schedule = StepSchedule::uniform(2, {1, 1, 1}, {1, 1, 1});
  const LeaderSchedule leader{10};
  // the j-th update uses the j-th element of the leader's own sequence
  CHECK(leader_step_size(schedule, 0) == 1.0);
  CHECK(leader_step_size(schedule, 1) == 0.5);
  // between wake-ups the value in force does not change
  CHECK(realized_leader_step(schedule, leader, 5) == realized_leader_step(schedule, leader, 0));
  CHECK(realized_leader_step(schedule, leader, 9) == realized_leader_step(schedule, leader, 0));
  CHECK(realized_leader_step(schedule, leader, 10) == 0.5);
}

TEST_CASE("validation enforces the family's parameter ranges") {
  StepSchedule good = StepSchedule::uniform(2, {1, 1, 1}, {1, 1, 0.6});
  CHECK(validate_schedule(good).empty());
  StepSchedule bad = good;
  bad.followers[1].exponent = 0.5;  // boundary excluded
  bad.leader.scale = 0.0;
  CHECK(validate_schedule(bad).size() == 2);
}

TEST_CASE("leader iteration sets") {
  CHECK(LeaderSchedule{10}.iterations(25) == std::vector<std::int64_t>{0, 10, 20});
  CHECK(LeaderSchedule{1}.iterations(4) == std::vector<std::int64_t>{0, 1, 2, 3});
  // periodic gaps all equal the period, which is the gap bound
  const auto iters = LeaderSchedule{10}.iterations(100);
  for (std::size_t i = 1; i < iters.size(); ++i) CHECK(iters[i] - iters[i - 1] == 10);
  CHECK(LeaderSchedule{10}.gap_bound() == 10.0);
}

TEST_CASE("kappa for identical schedules with a synchronous leader is one") {
  const StepSchedule schedule = StepSchedule::uniform(3, {1, 1, 1}, {1, 1, 1});
  const KappaReport report = kappa_bound(schedule, 1000, LeaderSchedule{1});
  CHECK(report.kappa == doctest::Approx(1.0));
}

TEST_CASE("kappa for scale-2 mismatch is two") {
  StepSchedule schedule = StepSchedule::uniform(2, {1, 1, 1}, {1, 1, 1});
  schedule.followers[1].scale = 2.0;
  schedule.leader.scale = 2.0;  // keep the leader inside the follower envelope
  const KappaReport report = kappa_bound(schedule, 1000, LeaderSchedule{1});
  CHECK(report.kappa == doctest::Approx(2.0));
}

TEST_CASE("kappa with a held leader peaks at the end of a period") {
  const StepSchedule schedule = StepSchedule::uniform(2, {1, 1, 1}, {1, 1, 1});
  const KappaReport report = kappa_bound(schedule, 100000, LeaderSchedule{10});
  // follower 1/(1+k) against the held leader 1/(1+floor(k/10)):
  // the ratio approaches 10 at k = 10j + 9
  CHECK(report.kappa == doctest::Approx(10.0).epsilon(1e-3));
  CHECK(report.tail_limit_valid);
  CHECK(report.tail_limit == doctest::Approx(10.0));
}

TEST_CASE("sequences are non-increasing") {
  StepSchedule schedule = StepSchedule::uniform(2, {3, 2, 0.8}, {0.5, 1, 0.6});
  for (const PowerStep& step : {schedule.followers[0], schedule.leader}) {
    double prev = step.at(0);
    for (std::int64_t k = 1; k < 2000; ++k) {
      const double cur = step.at(k);
      CHECK(cur <= prev);
      prev = cur;
    }
  }
}

TEST_CASE("partial sums keep growing while squared sums saturate") {
  // For p = 1 the partial sum is ~ ln(k): the tail from 1e5 to 1e6 must keep
  // adding about ln(10), i.e. no plateau.
  const PowerStep harmonic{1.0, 1.0, 1.0};
  double sum = 0.0, at_1e5 = 0.0;
  for (std::int64_t k = 0; k < 1000000; ++k) {
    sum += harmonic.at(k);
    if (k + 1 == 100000) at_1e5 = sum;
  }
  CHECK(sum - at_1e5 >= 0.9 * std::log(10.0));

  // Squared sums converge for p near 1: the tail beyond 1e5 contributes less
  // than 1e-4 of the total. (Close to p = 0.5 the tail decays too slowly for
  // this finite check; p >= 0.9 is comfortably inside.)
  for (double p : {0.9, 1.0}) {
    const PowerStep step{1.0, 1.0, p};
    double total = 0.0, head = 0.0;
    for (std::int64_t k = 0; k < 10000000; ++k) {
      const double a = step.at(k);
      total += a * a;
      if (k + 1 == 100000) head = total;
    }
    CHECK((total - head) / total < 1e-4);
  }
}

TEST_SUITE_END();
