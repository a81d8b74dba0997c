#include "nag/comm.hpp"

#include <sstream>
#include <stdexcept>

namespace nag {

std::string ProtocolSpec::name() const {
  switch (kind) {
    case Kind::normal: return "normal";
    case Kind::bernoulli: return "bernoulli";
    case Kind::gossip: return "gossip";
  }
  return "unknown";
}

std::vector<std::string> validate_protocol(const ProtocolSpec& protocol) {
  std::vector<std::string> report;
  if (protocol.kind == ProtocolSpec::Kind::bernoulli ||
      protocol.kind == ProtocolSpec::Kind::normal) {
    if (!(protocol.link_probability > 0.0 && protocol.link_probability <= 1.0))
      report.push_back("link probability must lie in (0, 1]");
    if (!(protocol.activity_probability > 0.0 && protocol.activity_probability <= 1.0))
      report.push_back("activity probability must lie in (0, 1]");
    if (protocol.kind == ProtocolSpec::Kind::normal &&
        (protocol.link_probability != 1.0 || protocol.activity_probability != 1.0))
      report.push_back("normal protocol requires p = q = 1");
  }
  return report;
}

std::vector<Vector> LocalInfoState::row(int n) const {
  std::vector<Vector> out(n_followers);
  for (int m = 0; m < n_followers; ++m) out[m] = view(n, m);
  return out;
}

LocalInfoState make_fresh_views(const GameSpec& spec, const std::vector<Vector>& x0) {
  if (static_cast<int>(x0.size()) != spec.n_followers)
    throw std::invalid_argument("make_fresh_views: expected one strategy per follower");
  LocalInfoState state;
  state.n_followers = spec.n_followers;
  state.follower_dim = spec.follower_dim;
  state.iteration = 0;
  state.views.resize(static_cast<std::size_t>(spec.n_followers) * spec.n_followers);
  for (int n = 0; n < spec.n_followers; ++n) {
    for (int m = 0; m < spec.n_followers; ++m) {
      if (spec.adjacency(n, m) != 0) state.view(n, m) = x0[m];
    }
  }
  return state;
}

CommEvent sample_events(const ProtocolSpec& protocol, const GameSpec& spec,
                        std::int64_t iteration, RandomStream& rng) {
  const int n = spec.n_followers;
  CommEvent event;
  event.iteration = iteration;
  event.links = Eigen::MatrixXi::Zero(n, n);
  event.activity = Eigen::VectorXi::Zero(n);

  switch (protocol.kind) {
    case ProtocolSpec::Kind::normal:
      event.links = spec.adjacency;
      event.activity.setOnes();
      break;

    case ProtocolSpec::Kind::bernoulli:
      for (int i = 0; i < n; ++i) {
        for (int m = 0; m < n; ++m) {
          if (spec.adjacency(i, m) != 0 && rng.bernoulli(protocol.link_probability))
            event.links(i, m) = 1;
        }
      }
      for (int i = 0; i < n; ++i) {
        if (rng.bernoulli(protocol.activity_probability)) event.activity[i] = 1;
      }
      break;

    case ProtocolSpec::Kind::gossip: {
      const int waker = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
      const std::vector<int> nbrs = spec.neighbors(waker);
      if (nbrs.empty()) {
        std::ostringstream os;
        os << "gossip protocol: follower " << waker << " has no neighbor to contact";
        throw std::runtime_error(os.str());
      }
      const int contact =
          nbrs[static_cast<std::size_t>(rng.uniform_below(nbrs.size()))];
      event.activity[waker] = 1;
      event.activity[contact] = 1;
      event.links(waker, contact) = 1;
      event.links(contact, waker) = 1;
      break;
    }
  }
  return event;
}

GossipMarginals gossip_probabilities(const Eigen::MatrixXi& adjacency) {
  const int n = static_cast<int>(adjacency.rows());
  if (adjacency.cols() != n)
    throw std::invalid_argument("gossip_probabilities: adjacency must be square");
  std::vector<int> degree(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) {
      if (adjacency(i, m) != adjacency(m, i))
        throw std::invalid_argument("gossip_probabilities: adjacency must be symmetric");
      degree[i] += adjacency(i, m) != 0;
    }
    if (degree[i] == 0) {
      std::ostringstream os;
      os << "gossip_probabilities: follower " << i << " is isolated";
      throw std::invalid_argument(os.str());
    }
  }

  GossipMarginals marginals;
  marginals.link_probability = Eigen::MatrixXd::Zero(n, n);
  marginals.activity_probability = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    double q = 1.0;
    for (int m = 0; m < n; ++m) {
      if (adjacency(i, m) == 0) continue;
      marginals.link_probability(i, m) =
          (1.0 / n) * (1.0 / degree[i] + 1.0 / degree[m]);
      q += 1.0 / degree[m];
    }
    marginals.activity_probability[i] = q / n;
  }
  return marginals;
}

bool check_constraint_set(const CommEvent& event, const ProtocolSpec& protocol,
                          const GameSpec& spec) {
  const int n = spec.n_followers;
  // No protocol may create links outside the graph.
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) {
      if (event.links(i, m) != 0 && spec.adjacency(i, m) == 0) return false;
    }
  }
  if (protocol.kind != ProtocolSpec::Kind::gossip) return true;

  if (event.activity.sum() != 2) return false;
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) {
      const int both_active = event.activity[i] * event.activity[m];
      if (i != m && event.links(i, m) != both_active) return false;
      if (i != m && both_active > spec.adjacency(i, m)) return false;
    }
  }
  return true;
}

LocalInfoState update_local_info(const LocalInfoState& state, const CommEvent& event,
                                 const std::vector<Vector>& x_current) {
  if (state.iteration != event.iteration)
    throw std::invalid_argument("update_local_info: state and event iteration differ");
  LocalInfoState next = state;
  const int n = state.n_followers;
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) {
      if (event.links(i, m) != 0) next.view(i, m) = x_current[m];
    }
  }
  next.iteration = state.iteration + 1;
  return next;
}

Eigen::MatrixXd staleness(const LocalInfoState& state,
                          const std::vector<Vector>& x_current) {
  const int n = state.n_followers;
  Eigen::MatrixXd result = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < n; ++m) {
      const Vector& view = state.view(i, m);
      if (view.size() == 0) continue;  // not a neighbor
      result(i, m) = (view - x_current[m]).norm();
    }
  }
  return result;
}

}  // namespace nag
