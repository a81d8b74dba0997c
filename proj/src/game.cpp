#include "nag/game.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nag {

bool Box::contains(const Vector& p, double tol) const {
  if (p.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] >= lower[i] - tol) || !(p[i] <= upper[i] + tol)) return false;
  }
  return true;
}

double StrategyProfile::squared_distance_to(const StrategyProfile& other) const {
  double total = (y - other.y).squaredNorm();
  for (std::size_t n = 0; n < x.size(); ++n) {
    total += (x[n] - other.x[n]).squaredNorm();
  }
  return total;
}

double StrategyProfile::distance_to(const StrategyProfile& other) const {
  return std::sqrt(squared_distance_to(other));
}

std::vector<int> GameSpec::neighbors(int n) const {
  std::vector<int> result;
  for (int m = 0; m < n_followers; ++m) {
    if (adjacency(n, m) != 0) result.push_back(m);
  }
  return result;
}

int GameSpec::degree(int n) const {
  int deg = 0;
  for (int m = 0; m < n_followers; ++m) deg += adjacency(n, m) != 0;
  return deg;
}

namespace {

std::string indexed(const std::string& what, int n) {
  std::ostringstream os;
  os << what << " (follower " << n << ")";
  return os.str();
}

bool finite_box(const Box& box) {
  return box.lower.allFinite() && box.upper.allFinite();
}

}  // namespace

std::vector<std::string> validate_game(const GameSpec& spec) {
  std::vector<std::string> report;
  const int n = spec.n_followers;

  if (n <= 0) report.push_back("n_followers must be positive");
  if (spec.follower_dim <= 0) report.push_back("follower_dim must be positive");
  if (spec.leader_dim <= 0) report.push_back("leader_dim must be positive");
  if (!report.empty()) return report;  // counts broken, nothing else is indexable

  if (static_cast<int>(spec.follower_sets.size()) != n)
    report.push_back("follower_sets size does not match n_followers");
  if (spec.adjacency.rows() != n || spec.adjacency.cols() != n)
    report.push_back("adjacency must be N x N");
  if (spec.weights.rows() != n || spec.weights.cols() != n)
    report.push_back("weights must be N x N");
  if (spec.leader_weights.size() != n)
    report.push_back("leader_weights must have length N");
  if (static_cast<int>(spec.follower_oracles.size()) != n)
    report.push_back("follower_oracles size does not match n_followers");
  if (!spec.leader_oracle) report.push_back("leader_oracle missing");
  if (!report.empty()) return report;

  for (int i = 0; i < n; ++i) {
    const Box& box = spec.follower_sets[i];
    if (box.dim() != spec.follower_dim || box.upper.size() != spec.follower_dim) {
      report.push_back(indexed("follower box dimension mismatch", i));
      continue;
    }
    if (!finite_box(box)) report.push_back(indexed("follower box has non-finite bound", i));
    for (int d = 0; d < box.dim(); ++d) {
      if (!(box.lower[d] <= box.upper[d])) {
        std::ostringstream os;
        os << "follower box lower > upper (follower " << i << ", coordinate " << d << ")";
        report.push_back(os.str());
      }
    }
  }
  if (spec.leader_set.dim() != spec.leader_dim ||
      spec.leader_set.upper.size() != spec.leader_dim) {
    report.push_back("leader box dimension mismatch");
  } else {
    if (!finite_box(spec.leader_set)) report.push_back("leader box has non-finite bound");
    for (int d = 0; d < spec.leader_set.dim(); ++d) {
      if (!(spec.leader_set.lower[d] <= spec.leader_set.upper[d])) {
        std::ostringstream os;
        os << "leader box lower > upper (coordinate " << d << ")";
        report.push_back(os.str());
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    if (spec.adjacency(i, i) != 0) {
      std::ostringstream os;
      os << "adjacency diagonal must be zero (follower " << i << ")";
      report.push_back(os.str());
    }
    double row_sum = 0.0;
    for (int m = 0; m < n; ++m) {
      const int a = spec.adjacency(i, m);
      const double w = spec.weights(i, m);
      if (a != 0 && a != 1) {
        std::ostringstream os;
        os << "adjacency entry not binary (" << i << "," << m << ")";
        report.push_back(os.str());
      }
      if (a == 1 && !(w > 0.0)) {
        std::ostringstream os;
        os << "weight must be positive on edge (" << i << "," << m << ")";
        report.push_back(os.str());
      }
      if (a == 0 && w != 0.0) {
        std::ostringstream os;
        os << "nonzero weight off the graph (" << i << "," << m << ")";
        report.push_back(os.str());
      }
      if (w < 0.0) {
        std::ostringstream os;
        os << "negative weight (" << i << "," << m << ")";
        report.push_back(os.str());
      }
      row_sum += w;
    }
    if (std::abs(row_sum - 1.0) > kWeightSumTolerance) {
      std::ostringstream os;
      os << "weight row " << i << " sums to " << row_sum << ", expected 1";
      report.push_back(os.str());
    }
  }

  double leader_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = spec.leader_weights[i];
    if (w < 0.0) {
      std::ostringstream os;
      os << "negative leader weight (follower " << i << ")";
      report.push_back(os.str());
    }
    leader_sum += w;
  }
  if (std::abs(leader_sum - 1.0) > kWeightSumTolerance) {
    std::ostringstream os;
    os << "leader weights sum to " << leader_sum << ", expected 1";
    report.push_back(os.str());
  }

  return report;
}

Vector sigma_follower(int n, const std::vector<Vector>& strategy_by_index,
                      const GameSpec& spec) {
  if (n < 0 || n >= spec.n_followers)
    throw std::invalid_argument("sigma_follower: follower index out of range");
  if (static_cast<int>(strategy_by_index.size()) != spec.n_followers)
    throw std::invalid_argument("sigma_follower: expected one entry per follower");

  Vector sigma = Vector::Zero(spec.follower_dim);
  for (int m = 0; m < spec.n_followers; ++m) {
    const double w = spec.weights(n, m);
    if (w == 0.0) continue;
    const Vector& xm = strategy_by_index[m];
    if (xm.size() != spec.follower_dim) {
      std::ostringstream os;
      os << "sigma_follower: missing or mis-sized strategy for neighbor " << m
         << " of follower " << n;
      throw std::invalid_argument(os.str());
    }
    sigma += w * xm;
  }
  return sigma;
}

Vector sigma_leader(const std::vector<Vector>& x_all, const GameSpec& spec) {
  if (static_cast<int>(x_all.size()) != spec.n_followers)
    throw std::invalid_argument("sigma_leader: expected one strategy per follower");
  Vector sigma = Vector::Zero(spec.follower_dim);
  for (int m = 0; m < spec.n_followers; ++m) {
    if (x_all[m].size() != spec.follower_dim)
      throw std::invalid_argument("sigma_leader: strategy dimension mismatch");
    sigma += spec.leader_weights[m] * x_all[m];
  }
  return sigma;
}

Vector project_box(const Vector& point, const Box& box) {
  if (point.size() != box.lower.size())
    throw std::invalid_argument("project_box: dimension mismatch");
  return point.cwiseMax(box.lower).cwiseMin(box.upper);
}

GameConstants GameConstants::merged_with(const GameConstants& bounds) const {
  GameConstants merged = *this;
  merged.subgradient_bounds_followers = bounds.subgradient_bounds_followers;
  merged.subgradient_bound_leader = bounds.subgradient_bound_leader;
  merged.diameters = bounds.diameters;
  return merged;
}

namespace {

// Odometer over a tensor grid: `index` counts in base `points` over `axes`
// positions. Returns false once the grid is exhausted.
bool advance(std::vector<int>& index, int points) {
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (++index[i] < points) return true;
    index[i] = 0;
  }
  return false;
}

double grid_coord(double lo, double hi, int i, int points) {
  return lo + (hi - lo) * (static_cast<double>(i) / (points - 1));
}

Vector grid_point(const Box& box, const std::vector<int>& index, std::size_t offset,
                  int points) {
  Vector v(box.dim());
  for (int d = 0; d < box.dim(); ++d) {
    v[d] = grid_coord(box.lower[d], box.upper[d], index[offset + d], points);
  }
  return v;
}

}  // namespace

GameConstants estimate_bounds(const GameSpec& spec, int grid_points_per_axis,
                              double safety_factor) {
  if (grid_points_per_axis < 2)
    throw std::invalid_argument("estimate_bounds: need at least 2 grid points per axis");
  if (safety_factor < 1.0)
    throw std::invalid_argument("estimate_bounds: safety factor must be >= 1");

  const int g = grid_points_per_axis;
  GameConstants constants;
  constants.subgradient_bounds_followers.resize(spec.n_followers, 0.0);
  constants.diameters.resize(spec.n_followers, 0.0);

  for (int n = 0; n < spec.n_followers; ++n) {
    constants.diameters[n] = spec.follower_sets[n].diagonal();

    const std::vector<int> nbrs = spec.neighbors(n);
    const std::size_t axes =
        static_cast<std::size_t>(spec.follower_dim) * (1 + nbrs.size()) +
        static_cast<std::size_t>(spec.leader_dim);
    double total = 1.0;
    for (std::size_t i = 0; i < axes; ++i) total *= g;
    if (total > 5e7)
      throw std::invalid_argument(
          "estimate_bounds: grid too large; reduce grid_points_per_axis");

    std::vector<int> index(axes, 0);
    double best = 0.0;
    do {
      std::size_t offset = 0;
      const Vector x = grid_point(spec.follower_sets[n], index, offset, g);
      offset += spec.follower_dim;
      Vector sigma = Vector::Zero(spec.follower_dim);
      for (int m : nbrs) {
        sigma += spec.weights(n, m) * grid_point(spec.follower_sets[m], index, offset, g);
        offset += spec.follower_dim;
      }
      const Vector y = grid_point(spec.leader_set, index, offset, g);
      try {
        best = std::max(best, spec.follower_oracles[n](x, sigma, y).norm());
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "estimate_bounds: follower " << n << " oracle failed at grid x=("
           << x.transpose() << "), sigma=(" << sigma.transpose() << "), y=("
           << y.transpose() << "): " << e.what();
        throw std::runtime_error(os.str());
      }
    } while (advance(index, g));
    constants.subgradient_bounds_followers[n] = best * safety_factor;
  }

  {
    const std::size_t axes =
        static_cast<std::size_t>(spec.leader_dim) +
        static_cast<std::size_t>(spec.follower_dim) * spec.n_followers;
    double total = 1.0;
    for (std::size_t i = 0; i < axes; ++i) total *= g;
    if (total > 5e7)
      throw std::invalid_argument(
          "estimate_bounds: grid too large; reduce grid_points_per_axis");

    std::vector<int> index(axes, 0);
    double best = 0.0;
    do {
      std::size_t offset = 0;
      const Vector y = grid_point(spec.leader_set, index, offset, g);
      offset += spec.leader_dim;
      Vector sigma = Vector::Zero(spec.follower_dim);
      for (int m = 0; m < spec.n_followers; ++m) {
        sigma += spec.leader_weights[m] *
                 grid_point(spec.follower_sets[m], index, offset, g);
        offset += spec.follower_dim;
      }
      try {
        best = std::max(best, spec.leader_oracle(y, sigma).norm());
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "estimate_bounds: leader oracle failed at grid y=(" << y.transpose()
           << "), sigma=(" << sigma.transpose() << "): " << e.what();
        throw std::runtime_error(os.str());
      }
    } while (advance(index, g));
    constants.subgradient_bound_leader = best * safety_factor;
  }

  return constants;
}

}  // namespace nag
