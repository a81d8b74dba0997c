#include "nag/smallcell.hpp"

#include "nag/rng.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace nag {

std::vector<std::string> validate_params(const SmallCellParams& params) {
  std::vector<std::string> report;
  if (params.n_cells < 2) report.push_back("n_cells must be at least 2");
  if (!(params.region_radius_km > 0)) report.push_back("region radius must be positive");
  if (!(params.neighbor_radius_km > 0)) report.push_back("neighbor radius must be positive");
  if (!(params.bandwidth > 0)) report.push_back("bandwidth must be positive");
  if (!(params.power_cap > 0)) report.push_back("power cap must be positive");
  if (!(params.price_cap > 0)) report.push_back("price cap must be positive");
  if (!(params.leader_penalty > 0)) report.push_back("leader penalty must be positive");
  if (!(params.noise_density > 0)) report.push_back("noise density must be positive");
  if (params.leader_period < 1) report.push_back("leader period must be >= 1");
  if (!(params.user_distance_min_km > 0) ||
      !(params.user_distance_max_km >= params.user_distance_min_km))
    report.push_back("user distance range is invalid");
  if (params.max_placement_attempts < 1)
    report.push_back("max_placement_attempts must be >= 1");
  return report;
}

SmallCellGeometry geometry_from_positions(const std::vector<double>& pos_x_km,
                                          const std::vector<double>& pos_y_km,
                                          const std::vector<double>& user_distance,
                                          const SmallCellParams& params) {
  const int n = static_cast<int>(pos_x_km.size());
  if (static_cast<int>(pos_y_km.size()) != n ||
      static_cast<int>(user_distance.size()) != n)
    throw std::invalid_argument("geometry_from_positions: size mismatch");

  SmallCellGeometry geometry;
  geometry.pos_x_km = pos_x_km;
  geometry.pos_y_km = pos_y_km;
  geometry.user_distance = user_distance;
  geometry.distance_km = Eigen::MatrixXd::Zero(n, n);
  geometry.adjacency = Eigen::MatrixXi::Zero(n, n);
  geometry.gain_sum.assign(static_cast<std::size_t>(n), 0.0);

  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) {
      if (i == m) continue;
      const double dx = pos_x_km[static_cast<std::size_t>(i)] - pos_x_km[static_cast<std::size_t>(m)];
      const double dy = pos_y_km[static_cast<std::size_t>(i)] - pos_y_km[static_cast<std::size_t>(m)];
      const double dist = std::hypot(dx, dy);
      geometry.distance_km(i, m) = dist;
      if (dist < params.neighbor_radius_km) {
        geometry.adjacency(i, m) = 1;
        geometry.gain_sum[static_cast<std::size_t>(i)] +=
            std::pow(dist, -params.path_loss_exponent);
      }
    }
  }
  for (double v : geometry.gain_sum) geometry.gain_total += v;
  return geometry;
}

namespace {

GameSpec game_from_geometry(const SmallCellParams& params,
                            const SmallCellGeometry& geometry) {
  const int n = params.n_cells;
  GameSpec spec;
  spec.n_followers = n;
  spec.follower_dim = 1;
  spec.leader_dim = 1;
  spec.adjacency = geometry.adjacency;
  spec.follower_sets.assign(static_cast<std::size_t>(n),
                            Box::interval(0.0, params.power_cap));
  spec.leader_set = Box::interval(0.0, params.price_cap);

  // Path-gain-proportional weights: sigma_n is then exactly the physical
  // interference divided by gain_sum[n].
  spec.weights = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) {
      if (geometry.adjacency(i, m) != 0) {
        spec.weights(i, m) =
            std::pow(geometry.distance_km(i, m), -params.path_loss_exponent) /
            geometry.gain_sum[static_cast<std::size_t>(i)];
      }
    }
  }
  spec.leader_weights = Vector(n);
  for (int i = 0; i < n; ++i)
    spec.leader_weights[i] = geometry.gain_sum[static_cast<std::size_t>(i)] / geometry.gain_total;

  auto shared = std::make_shared<const SmallCellGeometry>(geometry);
  const SmallCellParams p = params;
  for (int i = 0; i < n; ++i) {
    spec.follower_oracles.push_back(
        [i, p, shared](const Vector& x, const Vector& sigma, const Vector& y) -> Vector {
          return Vector::Constant(1, sbs_subgradient(i, x[0], sigma[0], y[0], p, *shared));
        });
  }
  spec.leader_oracle = [p, shared](const Vector& y, const Vector& sigma) -> Vector {
    return Vector::Constant(1, mbs_subgradient(y[0], sigma[0], p, *shared));
  };
  return spec;
}

}  // namespace

SmallCellScenario build_scenario(const SmallCellParams& params) {
  {
    const auto report = validate_params(params);
    if (!report.empty()) {
      std::ostringstream os;
      os << "build_scenario: invalid parameters:";
      for (const auto& line : report) os << " " << line << ";";
      throw std::invalid_argument(os.str());
    }
  }

  RandomStream rng(params.placement_seed);
  const int n = params.n_cells;
  std::vector<double> pos_x(static_cast<std::size_t>(n));
  std::vector<double> pos_y(static_cast<std::size_t>(n));
  std::vector<double> user_distance(static_cast<std::size_t>(n));

  for (int attempt = 0; attempt < params.max_placement_attempts; ++attempt) {
    for (int i = 0; i < n; ++i) {
      // area-uniform placement in the disk
      const double radius = params.region_radius_km * std::sqrt(rng.uniform01());
      const double angle = 2.0 * M_PI * rng.uniform01();
      pos_x[static_cast<std::size_t>(i)] = radius * std::cos(angle);
      pos_y[static_cast<std::size_t>(i)] = radius * std::sin(angle);
      user_distance[static_cast<std::size_t>(i)] =
          rng.uniform(params.user_distance_min_km, params.user_distance_max_km);
    }
    SmallCellGeometry geometry =
        geometry_from_positions(pos_x, pos_y, user_distance, params);
    bool isolated = false;
    for (int i = 0; i < n; ++i) {
      if (geometry.adjacency.row(i).sum() == 0) {
        isolated = true;
        break;
      }
    }
    if (isolated) continue;

    SmallCellScenario scenario;
    scenario.params = params;
    scenario.geometry = std::move(geometry);
    scenario.game = game_from_geometry(params, scenario.geometry);
    return scenario;
  }

  std::ostringstream os;
  os << "build_scenario: no placement without isolated cells found in "
     << params.max_placement_attempts << " attempts (seed " << params.placement_seed
     << "); enlarge the neighbor radius or add cells";
  throw std::runtime_error(os.str());
}

double sbs_cost(int n, double power, double sigma, double price,
                const SmallCellParams& params, const SmallCellGeometry& geometry) {
  const double gain = std::pow(geometry.user_distance[static_cast<std::size_t>(n)],
                               -params.path_loss_exponent);
  const double interference =
      geometry.gain_sum[static_cast<std::size_t>(n)] * sigma;  // denormalized aggregate
  const double sinr = gain * power / (params.noise_density + interference);
  const double rate = params.bandwidth * std::log1p(sinr);
  const double payment = price * geometry.gain_sum[static_cast<std::size_t>(n)] * power;
  return payment - rate;
}

double sbs_subgradient(int n, double power, double sigma, double price,
                       const SmallCellParams& params, const SmallCellGeometry& geometry) {
  const double gain = std::pow(geometry.user_distance[static_cast<std::size_t>(n)],
                               -params.path_loss_exponent);
  const double interference = geometry.gain_sum[static_cast<std::size_t>(n)] * sigma;
  return price * geometry.gain_sum[static_cast<std::size_t>(n)] -
         params.bandwidth * gain /
             (params.noise_density + interference + gain * power);
}

double mbs_cost(double price, double sigma0, const SmallCellParams& params,
                const SmallCellGeometry& geometry) {
  return params.leader_penalty * price * price -
         geometry.gain_total * sigma0 * price;
}

double mbs_subgradient(double price, double sigma0, const SmallCellParams& params,
                       const SmallCellGeometry& geometry) {
  return 2.0 * params.leader_penalty * price - geometry.gain_total * sigma0;
}

}  // namespace nag
