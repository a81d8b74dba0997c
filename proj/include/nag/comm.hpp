// Stochastic communication layer: per-iteration link/activity events under the
// three protocols, each follower's stale local views, and the gossip
// constraint set with its closed-form marginals.
#pragma once

#include "nag/game.hpp"
#include "nag/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nag {

struct ProtocolSpec {
  enum class Kind { normal, bernoulli, gossip };

  Kind kind = Kind::normal;
  // Bernoulli parameters; normal is the p = q = 1 special case. Ignored by
  // gossip, whose distribution is fully determined by the graph.
  double link_probability = 1.0;
  double activity_probability = 1.0;

  static ProtocolSpec normal() { return {Kind::normal, 1.0, 1.0}; }
  static ProtocolSpec bernoulli(double p, double q) { return {Kind::bernoulli, p, q}; }
  static ProtocolSpec gossip() { return {Kind::gossip, 1.0, 1.0}; }

  std::string name() const;
};

std::vector<std::string> validate_protocol(const ProtocolSpec& protocol);

// One iteration's sampled connectivity matrix and activity vector.
struct CommEvent {
  Eigen::MatrixXi links;     // N x N, links(n,m) = 1 iff n receives m this iteration
  Eigen::VectorXi activity;  // length N
  std::int64_t iteration = 0;
};

// The last strategy each follower received from each neighbor. Entries are
// defined only where the graph has an edge; the rest stay empty.
struct LocalInfoState {
  int n_followers = 0;
  int follower_dim = 0;
  std::vector<Vector> views;  // flattened n * N + m
  std::int64_t iteration = 0;

  const Vector& view(int n, int m) const { return views[static_cast<std::size_t>(n) * n_followers + m]; }
  Vector& view(int n, int m) { return views[static_cast<std::size_t>(n) * n_followers + m]; }

  // Follower n's view row, indexed by neighbor id, as sigma_follower expects.
  std::vector<Vector> row(int n) const;
};

// Initial views: every follower starts with its neighbors' true initial
// strategies, so staleness starts at zero.
LocalInfoState make_fresh_views(const GameSpec& spec, const std::vector<Vector>& x0);

// Draws (L^k, E^k) for one iteration.
//   normal    — every neighbor link on, every follower active.
//   bernoulli — each neighbor link ~ B(p), each activity ~ B(q), independent;
//               links are directed, sampled row-major, then activities by index.
//   gossip    — one waking node uniform over followers, one contact uniform
//               over its neighbors; exactly those two active, both directed
//               links between them on, everything else off.
// Gossip on a graph with an isolated node has no valid outcome and throws.
CommEvent sample_events(const ProtocolSpec& protocol, const GameSpec& spec,
                        std::int64_t iteration, RandomStream& rng);

struct GossipMarginals {
  Eigen::MatrixXd link_probability;  // p(n,m), zero for non-neighbors
  Vector activity_probability;       // q(n)
};

// Closed-form per-slot marginals of the gossip protocol:
//   p_nm = (1/N)(1/|N_n| + 1/|N_m|),  q_n = (1/N)(1 + sum_{m in N_n} 1/|N_m|).
// Requires a symmetric adjacency with no isolated node.
GossipMarginals gossip_probabilities(const Eigen::MatrixXi& adjacency);

// True iff the event lies in the protocol's constraint set: for gossip,
// exactly two active nodes, links equal to the activity product, and no
// non-neighbor pair active together; for normal/bernoulli just l <= a.
bool check_constraint_set(const CommEvent& event, const ProtocolSpec& protocol,
                          const GameSpec& spec);

// View refresh: x_view(n,m) becomes x_current[m] where links(n,m) = 1 and is
// kept otherwise; the iteration counter advances.
LocalInfoState update_local_info(const LocalInfoState& state, const CommEvent& event,
                                 const std::vector<Vector>& x_current);

// Entry (n,m) = ||view(n,m) - x_current[m]|| for neighbors, 0 elsewhere.
Eigen::MatrixXd staleness(const LocalInfoState& state,
                          const std::vector<Vector>& x_current);

}  // namespace nag
