#include "nag/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nag {

namespace {

Vector random_in_box(const Box& box, RandomStream& rng) {
  Vector v(box.dim());
  for (int d = 0; d < box.dim(); ++d) v[d] = rng.uniform(box.lower[d], box.upper[d]);
  return v;
}

std::vector<Vector> random_profile(const GameSpec& spec, RandomStream& rng) {
  std::vector<Vector> x(static_cast<std::size_t>(spec.n_followers));
  for (int n = 0; n < spec.n_followers; ++n)
    x[static_cast<std::size_t>(n)] = random_in_box(spec.follower_sets[static_cast<std::size_t>(n)], rng);
  return x;
}

// Stacked pseudo-gradient with true, fresh aggregates.
void evaluate_map(const GameSpec& spec, const StrategyProfile& z,
                  std::vector<Vector>& gx, Vector& gy) {
  for (int n = 0; n < spec.n_followers; ++n) {
    const Vector sigma = sigma_follower(n, z.x, spec);
    gx[static_cast<std::size_t>(n)] =
        spec.follower_oracles[static_cast<std::size_t>(n)](z.x[static_cast<std::size_t>(n)], sigma, z.y);
  }
  gy = spec.leader_oracle(z.y, sigma_leader(z.x, spec));
}

}  // namespace

double default_contraction_step(const GameConstants& constants) {
  double c_min = constants.strong_convexity_leader;
  double c_max = constants.strong_convexity_leader;
  for (double c : constants.strong_convexity_followers) {
    c_min = std::min(c_min, c);
    c_max = std::max(c_max, c);
  }
  const double denom = constants.l_bar() + c_max;
  if (!(c_min > 0.0) || !(denom > 0.0))
    throw std::invalid_argument("default_contraction_step: needs positive curvature");
  return c_min / (4.0 * denom * denom);
}

ReferencePoint solve_reference_gne(const GameSpec& spec, const SolveOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve_reference_gne: tol must be positive");

  double step = options.step;
  if (step <= 0.0) {
    RandomStream rng(0x51A7E5EEDull);  // fixed internal seed, keeps the default deterministic
    step = default_contraction_step(estimate_constants(spec, 256, rng));
  }

  StrategyProfile z;
  z.x.resize(static_cast<std::size_t>(spec.n_followers));
  for (int n = 0; n < spec.n_followers; ++n)
    z.x[static_cast<std::size_t>(n)] = spec.follower_sets[static_cast<std::size_t>(n)].center();
  z.y = spec.leader_set.center();

  std::vector<Vector> gx(static_cast<std::size_t>(spec.n_followers));
  Vector gy;
  double displacement = std::numeric_limits<double>::infinity();
  double previous = std::numeric_limits<double>::infinity();

  for (std::int64_t it = 0; it < options.max_iter; ++it) {
    evaluate_map(spec, z, gx, gy);
    double moved_sq = 0.0;
    for (int n = 0; n < spec.n_followers; ++n) {
      auto& xn = z.x[static_cast<std::size_t>(n)];
      const Vector next = project_box(xn - step * gx[static_cast<std::size_t>(n)],
                                      spec.follower_sets[static_cast<std::size_t>(n)]);
      moved_sq += (next - xn).squaredNorm();
      xn = next;
    }
    const Vector y_next = project_box(z.y - step * gy, spec.leader_set);
    moved_sq += (y_next - z.y).squaredNorm();
    z.y = y_next;

    previous = displacement;
    displacement = std::sqrt(moved_sq);
    if (displacement < options.tol) {
      // For a contraction with factor rho the remaining gap to the fixed
      // point is at most rho / (1 - rho) times the last move; keep iterating
      // until that certified gap also sits within a few tol.
      const double rho = std::min(displacement / previous, 0.999);
      const double gap = displacement * rho / (1.0 - rho);
      if (gap < 5.0 * options.tol || displacement == 0.0) {
        ReferencePoint result;
        result.point = std::move(z);
        result.residual = displacement;
        result.iterations_used = it + 1;
        return result;
      }
    }
  }

  ReferencePoint best;
  best.point = std::move(z);
  best.residual = displacement;
  best.iterations_used = options.max_iter;
  std::ostringstream os;
  os << "reference solver did not reach tol " << options.tol << " within "
     << options.max_iter << " iterations (residual " << displacement
     << "); tune the step or check the game's monotonicity";
  throw NonConvergenceError(os.str(), std::move(best));
}

double verify_gne(const GameSpec& spec, const ReferencePoint& candidate,
                  int probes_per_agent, RandomStream& rng) {
  const StrategyProfile& z = candidate.point;
  double worst = 0.0;

  for (int n = 0; n < spec.n_followers; ++n) {
    const Vector sigma = sigma_follower(n, z.x, spec);
    const Vector d = spec.follower_oracles[static_cast<std::size_t>(n)](z.x[static_cast<std::size_t>(n)], sigma, z.y);
    for (int p = 0; p < probes_per_agent; ++p) {
      const Vector probe = random_in_box(spec.follower_sets[static_cast<std::size_t>(n)], rng);
      worst = std::min(worst, d.dot(probe - z.x[static_cast<std::size_t>(n)]));
    }
  }
  const Vector d0 = spec.leader_oracle(z.y, sigma_leader(z.x, spec));
  for (int p = 0; p < probes_per_agent; ++p) {
    const Vector probe = random_in_box(spec.leader_set, rng);
    worst = std::min(worst, d0.dot(probe - z.y));
  }
  return worst;
}

GameConstants estimate_constants(const GameSpec& spec, int sample_pairs,
                                 RandomStream& rng) {
  if (sample_pairs < 100)
    throw std::invalid_argument("estimate_constants: need at least 100 sample pairs");

  GameConstants constants;
  constants.strong_convexity_followers.assign(static_cast<std::size_t>(spec.n_followers),
                                              std::numeric_limits<double>::infinity());
  constants.strong_convexity_leader = std::numeric_limits<double>::infinity();
  constants.lipschitz_follower = 0.0;
  constants.lipschitz_leader = 0.0;

  for (int n = 0; n < spec.n_followers; ++n) {
    const auto& oracle = spec.follower_oracles[static_cast<std::size_t>(n)];
    const Box& box = spec.follower_sets[static_cast<std::size_t>(n)];
    double& c_n = constants.strong_convexity_followers[static_cast<std::size_t>(n)];

    for (int s = 0; s < sample_pairs; ++s) {
      // strong-convexity quotient at a common (sigma, y)
      const Vector sigma = sigma_follower(n, random_profile(spec, rng), spec);
      const Vector y = random_in_box(spec.leader_set, rng);
      const Vector x1 = random_in_box(box, rng);
      const Vector x2 = random_in_box(box, rng);
      const double gap_sq = (x1 - x2).squaredNorm();
      if (gap_sq > 1e-24) {
        const double quotient =
            (oracle(x1, sigma, y) - oracle(x2, sigma, y)).dot(x1 - x2) / gap_sq;
        c_n = std::min(c_n, quotient);
      }

      // Lipschitz quotient in (sigma, y) at a common x
      const Vector x = random_in_box(box, rng);
      const Vector sigma1 = sigma_follower(n, random_profile(spec, rng), spec);
      const Vector sigma2 = sigma_follower(n, random_profile(spec, rng), spec);
      const Vector y1 = random_in_box(spec.leader_set, rng);
      const Vector y2 = random_in_box(spec.leader_set, rng);
      const double denom = (sigma1 - sigma2).norm() + (y1 - y2).norm();
      if (denom > 1e-12) {
        const double quotient =
            (oracle(x, sigma1, y1) - oracle(x, sigma2, y2)).norm() / denom;
        constants.lipschitz_follower = std::max(constants.lipschitz_follower, quotient);
      }
    }
  }

  for (int s = 0; s < sample_pairs; ++s) {
    const Vector sigma = sigma_leader(random_profile(spec, rng), spec);
    const Vector y1 = random_in_box(spec.leader_set, rng);
    const Vector y2 = random_in_box(spec.leader_set, rng);
    const double gap_sq = (y1 - y2).squaredNorm();
    if (gap_sq > 1e-24) {
      const double quotient =
          (spec.leader_oracle(y1, sigma) - spec.leader_oracle(y2, sigma)).dot(y1 - y2) / gap_sq;
      constants.strong_convexity_leader = std::min(constants.strong_convexity_leader, quotient);
    }

    const Vector y = random_in_box(spec.leader_set, rng);
    const Vector sigma1 = sigma_leader(random_profile(spec, rng), spec);
    const Vector sigma2 = sigma_leader(random_profile(spec, rng), spec);
    const double denom = (sigma1 - sigma2).norm();
    if (denom > 1e-12) {
      const double quotient =
          (spec.leader_oracle(y, sigma1) - spec.leader_oracle(y, sigma2)).norm() / denom;
      constants.lipschitz_leader = std::max(constants.lipschitz_leader, quotient);
    }
  }

  return constants;
}

ConditionReport check_convergence_conditions(const GameConstants& constants,
                                             double kappa, double delta,
                                             double gap_bound) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("check_convergence_conditions: delta must lie in (0, 1]");
  if (!(kappa >= 1.0))
    throw std::invalid_argument("check_convergence_conditions: kappa must be >= 1");
  if (!(gap_bound >= 1.0))
    throw std::invalid_argument("check_convergence_conditions: gap bound must be >= 1");

  ConditionReport report;
  report.kappa = kappa;
  report.delta = delta;
  report.gap_bound = gap_bound;
  report.l_bar = constants.l_bar();

  bool hold = true;
  report.follower_margins.reserve(constants.strong_convexity_followers.size());
  for (double c : constants.strong_convexity_followers) {
    const double margin = c - (kappa / delta) * report.l_bar;
    report.follower_margins.push_back(margin);
    hold = hold && margin > 0.0;
  }
  report.leader_margin =
      constants.strong_convexity_leader - kappa * gap_bound * report.l_bar;
  hold = hold && report.leader_margin > 0.0;
  report.conditions_hold = hold;
  return report;
}

MonotonicityProbe monotonicity_probe(const GameSpec& spec, const GameConstants& constants,
                                     std::int64_t pairs, RandomStream& rng) {
  if (pairs < 1) throw std::invalid_argument("monotonicity_probe: pairs must be >= 1");

  const double l_bar = constants.l_bar();
  MonotonicityProbe probe;
  probe.pairs = pairs;
  probe.min_psi = std::numeric_limits<double>::infinity();

  std::vector<Vector> gx1(static_cast<std::size_t>(spec.n_followers));
  std::vector<Vector> gx2(static_cast<std::size_t>(spec.n_followers));
  Vector gy1, gy2;

  for (std::int64_t s = 0; s < pairs; ++s) {
    StrategyProfile z1, z2;
    z1.x = random_profile(spec, rng);
    z1.y = random_in_box(spec.leader_set, rng);
    do {
      z2.x = random_profile(spec, rng);
      z2.y = random_in_box(spec.leader_set, rng);
    } while (z1.squared_distance_to(z2) < 1e-24);

    evaluate_map(spec, z1, gx1, gy1);
    evaluate_map(spec, z2, gx2, gy2);

    double psi = (z1.y - z2.y).dot(gy1 - gy2);
    double certificate =
        (constants.strong_convexity_leader - l_bar) * (z1.y - z2.y).squaredNorm();
    for (int n = 0; n < spec.n_followers; ++n) {
      const Vector dx = z1.x[static_cast<std::size_t>(n)] - z2.x[static_cast<std::size_t>(n)];
      psi += dx.dot(gx1[static_cast<std::size_t>(n)] - gx2[static_cast<std::size_t>(n)]);
      certificate +=
          (constants.strong_convexity_followers[static_cast<std::size_t>(n)] - l_bar) *
          dx.squaredNorm();
    }
    if (psi < probe.min_psi) {
      probe.min_psi = psi;
      probe.certificate_at_min = certificate;
    }
  }
  return probe;
}

}  // namespace nag
