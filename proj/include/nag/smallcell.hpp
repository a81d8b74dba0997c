// Small-cell power allocation scenario: SBS followers pick transmit powers,
// the MBS leader prices interference.
//
// SBS n maximizes rate minus interference payment,
//   A * ln(1 + S_n) - price * v_n * x_n,
//   S_n = r_n^-beta x_n / (N0 + sum_{m in N_n} r_nm^-beta x_m),
// and the MBS maximizes priced revenue minus a quadratic brake,
//   price * sum_n v_n x_n - B0 * price^2.
// The engine minimizes costs, so both utilities enter negated. The neighbor
// aggregate carries normalized interference: w_nm proportional to r_nm^-beta
// makes gain_sum_n * sigma_n reproduce the physical interference term, and
// leader weights v_n / sum v make gain_total * sigma_0 the priced revenue sum.
#pragma once

#include "nag/comm.hpp"
#include "nag/game.hpp"

#include <cstdint>
#include <vector>

namespace nag {

struct SmallCellParams {
  int n_cells = 10;
  double region_radius_km = 4.0;
  double neighbor_radius_km = 1.0;
  double bandwidth = 2048.0;        // A
  double power_cap = 6.0;           // upper bound on each transmit power
  double path_loss_exponent = 1.0;  // beta
  double price_cap = 7.0;
  double leader_penalty = 100.0;    // B0
  double noise_density = 0.1;       // N0
  std::int64_t leader_period = 10;
  std::uint64_t placement_seed = 1;

  // SBS-to-user average distance range, drawn uniformly per cell.
  double user_distance_min_km = 0.1;
  double user_distance_max_km = 0.5;
  int max_placement_attempts = 100000;
};

std::vector<std::string> validate_params(const SmallCellParams& params);

struct SmallCellGeometry {
  std::vector<double> pos_x_km;
  std::vector<double> pos_y_km;
  Eigen::MatrixXd distance_km;       // r_nm, symmetric
  std::vector<double> user_distance; // r_n
  Eigen::MatrixXi adjacency;         // r_nm < neighbor radius
  std::vector<double> gain_sum;      // v_n = sum over neighbors of r_nm^-beta
  double gain_total = 0.0;           // sum_n v_n
};

struct SmallCellScenario {
  SmallCellParams params;
  SmallCellGeometry geometry;
  GameSpec game;
};

// Geometry derived from explicit positions and user distances (the random
// placement below funnels through this, and tests can pin positions exactly).
SmallCellGeometry geometry_from_positions(const std::vector<double>& pos_x_km,
                                          const std::vector<double>& pos_y_km,
                                          const std::vector<double>& user_distance,
                                          const SmallCellParams& params);

// Places the cells uniformly in the disk, retrying (bounded by
// max_placement_attempts) until no cell is isolated, then assembles the game.
// Deterministic in placement_seed.
SmallCellScenario build_scenario(const SmallCellParams& params);

// Follower cost and its sub-gradient in the transmit power. `sigma` is the
// normalized neighbor aggregate the engine maintains.
double sbs_cost(int n, double power, double sigma, double price,
                const SmallCellParams& params, const SmallCellGeometry& geometry);
double sbs_subgradient(int n, double power, double sigma, double price,
                       const SmallCellParams& params, const SmallCellGeometry& geometry);

// Leader cost and sub-gradient in the price. `sigma0` is the leader aggregate
// sum_n (v_n / gain_total) x_n. The cost is B0 * price^2 exactly quadratic in
// the price, so the leader's strong-convexity constant is 2 * B0.
double mbs_cost(double price, double sigma0, const SmallCellParams& params,
                const SmallCellGeometry& geometry);
double mbs_subgradient(double price, double sigma0, const SmallCellParams& params,
                       const SmallCellGeometry& geometry);

}  // namespace nag
