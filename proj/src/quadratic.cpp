#include "nag/quadratic.hpp"

#include <stdexcept>

namespace nag {

namespace {

Eigen::MatrixXi complete_graph(int n) {
  Eigen::MatrixXi a = Eigen::MatrixXi::Ones(n, n);
  a.diagonal().setZero();
  return a;
}

Eigen::MatrixXd uniform_neighbor_weights(const Eigen::MatrixXi& adjacency) {
  const int n = static_cast<int>(adjacency.rows());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int deg = adjacency.row(i).sum();
    if (deg == 0) throw std::invalid_argument("affine game: follower has no neighbor");
    for (int m = 0; m < n; ++m) {
      if (adjacency(i, m) != 0) w(i, m) = 1.0 / deg;
    }
  }
  return w;
}

}  // namespace

GameSpec make_affine_game(const AffineGameParams& params) {
  GameSpec spec;
  spec.n_followers = params.n_followers;
  spec.follower_dim = params.follower_dim;
  spec.leader_dim = params.leader_dim;
  spec.adjacency =
      params.adjacency.size() > 0 ? params.adjacency : complete_graph(params.n_followers);
  spec.weights = uniform_neighbor_weights(spec.adjacency);
  spec.leader_weights =
      Vector::Constant(params.n_followers, 1.0 / params.n_followers);

  spec.follower_sets.assign(
      static_cast<std::size_t>(params.n_followers),
      Box::cube(params.follower_dim, -params.box_half_width, params.box_half_width));
  spec.leader_set = Box::cube(params.leader_dim, -params.box_half_width, params.box_half_width);

  // All followers share the same affine oracle; sigma and y enter through
  // fixed scalar couplings (y through its mean when dimensions differ).
  const double self = params.self;
  const double coupling = params.coupling;
  const double leader_pull = params.leader_pull;
  const double offset = params.offset;
  for (int n = 0; n < params.n_followers; ++n) {
    spec.follower_oracles.push_back(
        [self, coupling, leader_pull, offset](const Vector& x, const Vector& sigma,
                                              const Vector& y) -> Vector {
          return self * x + coupling * sigma +
                 Vector::Constant(x.size(), leader_pull * y.mean() + offset);
        });
  }
  const double leader_self = params.leader_self;
  const double leader_coupling = params.leader_coupling;
  const double leader_offset = params.leader_offset;
  spec.leader_oracle = [leader_self, leader_coupling, leader_offset](
                           const Vector& y, const Vector& sigma) -> Vector {
    return leader_self * y +
           Vector::Constant(y.size(), leader_coupling * sigma.mean() + leader_offset);
  };
  return spec;
}

AffineGameParams quadratic_test_params() { return AffineGameParams{}; }

GameSpec make_quadratic_test_game() { return make_affine_game(quadratic_test_params()); }

AffineGameParams quadratic_path_params(int n_followers) {
  AffineGameParams params;
  params.n_followers = n_followers;
  params.adjacency = Eigen::MatrixXi::Zero(n_followers, n_followers);
  for (int i = 0; i + 1 < n_followers; ++i) {
    params.adjacency(i, i + 1) = 1;
    params.adjacency(i + 1, i) = 1;
  }
  return params;
}

StrategyProfile affine_interior_equilibrium(const AffineGameParams& params) {
  if (params.follower_dim != 1 || params.leader_dim != 1)
    throw std::invalid_argument("affine_interior_equilibrium: scalar strategies only");

  const int n = params.n_followers;
  const Eigen::MatrixXi adjacency =
      params.adjacency.size() > 0 ? params.adjacency : complete_graph(n);
  const Eigen::MatrixXd w = uniform_neighbor_weights(adjacency);

  // Stationarity of every oracle at once: rows 0..n-1 are the followers,
  // row n is the leader.
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n + 1, n + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  for (int i = 0; i < n; ++i) {
    system(i, i) = params.self;
    for (int m = 0; m < n; ++m) system(i, m) += params.coupling * w(i, m);
    system(i, n) = params.leader_pull;
    rhs[i] = -params.offset;
  }
  for (int m = 0; m < n; ++m) system(n, m) = params.leader_coupling / n;
  system(n, n) = params.leader_self;
  rhs[n] = -params.leader_offset;

  const Eigen::VectorXd solution = system.partialPivLu().solve(rhs);

  StrategyProfile z;
  z.x.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (std::abs(solution[i]) >= params.box_half_width)
      throw std::runtime_error("affine_interior_equilibrium: solution not interior");
    z.x[static_cast<std::size_t>(i)] = Vector::Constant(1, solution[i]);
  }
  if (std::abs(solution[n]) >= params.box_half_width)
    throw std::runtime_error("affine_interior_equilibrium: solution not interior");
  z.y = Vector::Constant(1, solution[n]);
  return z;
}

}  // namespace nag
