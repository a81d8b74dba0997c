#include "nag/harness.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace nag {

using nlohmann::json;
using nlohmann::ordered_json;

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(issues.empty() ? "invalid configuration"
                                        : "invalid configuration: " + issues.front() +
                                              (issues.size() > 1 ? " (+ more)" : "")),
      issues_(std::move(issues)) {}

namespace {

// Strict section reader: typed getters record which keys were consumed,
// finish() flags everything else as unknown.
class Section {
 public:
  Section(const json& node, std::string path, std::vector<std::string>& issues)
      : node_(node), path_(std::move(path)), issues_(issues) {
    if (!node_.is_object()) issues_.push_back(path_ + ": expected an object");
  }

  template <typename T>
  bool get(const std::string& key, T& out, bool required) {
    if (!node_.is_object()) return false;
    if (!node_.contains(key)) {
      if (required) issues_.push_back(path_ + "." + key + ": required field missing");
      return false;
    }
    seen_.insert(key);
    try {
      out = node_.at(key).get<T>();
      return true;
    } catch (const json::exception&) {
      issues_.push_back(path_ + "." + key + ": wrong type");
      return false;
    }
  }

  const json* subsection(const std::string& key, bool required) {
    if (!node_.is_object()) return nullptr;
    if (!node_.contains(key)) {
      if (required) issues_.push_back(path_ + "." + key + ": required section missing");
      return nullptr;
    }
    seen_.insert(key);
    return &node_.at(key);
  }

  void reject(const std::string& key, const std::string& why) {
    if (node_.is_object() && node_.contains(key)) {
      seen_.insert(key);
      issues_.push_back(path_ + "." + key + ": " + why);
    }
  }

  void finish() {
    if (!node_.is_object()) return;
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.contains(it.key()))
        issues_.push_back(path_ + "." + it.key() + ": unknown field");
    }
  }

  const std::string& path() const { return path_; }
  std::vector<std::string>& issues() { return issues_; }

 private:
  const json& node_;
  std::string path_;
  std::vector<std::string>& issues_;
  std::set<std::string> seen_;
};

void parse_power_step(const json& node, const std::string& path, PowerStep& step,
                      std::vector<std::string>& issues) {
  Section s(node, path, issues);
  s.get("scale", step.scale, false);
  s.get("offset", step.offset, false);
  s.get("exponent", step.exponent, false);
  s.finish();
  if (!(step.scale > 0)) issues.push_back(path + ".scale: must be positive");
  if (!(step.offset >= 1)) issues.push_back(path + ".offset: must be >= 1");
  if (!(step.exponent > 0.5 && step.exponent <= 1.0))
    issues.push_back(path + ".exponent: must lie in (0.5, 1]");
}

void parse_small_cell(Section& game, ScenarioConfig& config,
                      std::vector<std::string>& issues) {
  SmallCellParams& p = config.small_cell;
  game.get("cells", p.n_cells, false);
  game.get("region_radius_km", p.region_radius_km, false);
  game.get("neighbor_radius_km", p.neighbor_radius_km, false);
  game.get("bandwidth", p.bandwidth, false);
  game.get("power_cap", p.power_cap, false);
  game.get("path_loss_exponent", p.path_loss_exponent, false);
  game.get("price_cap", p.price_cap, false);
  game.get("leader_penalty", p.leader_penalty, false);
  game.get("noise_density", p.noise_density, false);
  game.get("placement_seed", p.placement_seed, false);
  game.get("user_distance_min_km", p.user_distance_min_km, false);
  game.get("user_distance_max_km", p.user_distance_max_km, false);
  game.get("max_placement_attempts", p.max_placement_attempts, false);
  for (const auto& line : validate_params(p)) issues.push_back("game: " + line);
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  std::vector<std::string> issues;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError({std::string("document is not valid JSON: ") + e.what()});
  }

  ScenarioConfig config;
  Section top(root, "$", issues);

  if (const json* node = top.subsection("game", true)) {
    Section game(*node, "game", issues);
    std::string kind;
    if (game.get("kind", kind, true)) {
      if (kind == "quadratic-test") {
        config.game_kind = GameKind::quadratic_test;
      } else if (kind == "small-cell") {
        config.game_kind = GameKind::small_cell;
        parse_small_cell(game, config, issues);
      } else if (kind == "custom-from-file") {
        config.game_kind = GameKind::custom_from_file;
        game.get("path", config.custom_game_path, true);
      } else {
        issues.push_back("game.kind: unknown kind '" + kind + "'");
      }
    }
    game.finish();
  }

  if (const json* node = top.subsection("protocol", true)) {
    Section protocol(*node, "protocol", issues);
    std::string kind;
    if (protocol.get("kind", kind, true)) {
      if (kind == "normal") {
        config.protocol = ProtocolSpec::normal();
        protocol.reject("link_probability", "field not applicable to normal protocol");
        protocol.reject("activity_probability", "field not applicable to normal protocol");
      } else if (kind == "gossip") {
        config.protocol = ProtocolSpec::gossip();
        protocol.reject("link_probability", "field not applicable to gossip protocol");
        protocol.reject("activity_probability", "field not applicable to gossip protocol");
      } else if (kind == "bernoulli") {
        config.protocol.kind = ProtocolSpec::Kind::bernoulli;
        protocol.get("link_probability", config.protocol.link_probability, true);
        protocol.get("activity_probability", config.protocol.activity_probability, true);
        for (const auto& line : validate_protocol(config.protocol))
          issues.push_back("protocol: " + line);
      } else {
        issues.push_back("protocol.kind: unknown kind '" + kind + "'");
      }
    }
    protocol.finish();
  }

  if (const json* node = top.subsection("schedule", true)) {
    Section schedule(*node, "schedule", issues);
    if (const json* f = schedule.subsection("follower", false))
      parse_power_step(*f, "schedule.follower", config.schedule.follower, issues);
    if (const json* l = schedule.subsection("leader", false))
      parse_power_step(*l, "schedule.leader", config.schedule.leader, issues);
    schedule.get("leader_period", config.schedule.leader_period, false);
    if (config.schedule.leader_period < 1)
      issues.push_back("schedule.leader_period: must be >= 1");
    schedule.finish();
  }

  if (const json* node = top.subsection("run", true)) {
    Section run(*node, "run", issues);
    run.get("horizon", config.run.horizon, true);
    run.get("seed", config.run.seed, true);
    run.get("runs", config.run.runs, false);
    std::string initial = "zeros";
    if (run.get("initial", initial, false)) {
      if (initial == "zeros") config.run.initial = InitialPoint::zeros;
      else if (initial == "center") config.run.initial = InitialPoint::center;
      else issues.push_back("run.initial: must be 'zeros' or 'center'");
    }
    run.finish();
    if (config.run.horizon < 1) issues.push_back("run.horizon: must be >= 1");
    if (config.run.runs < 1) issues.push_back("run.runs: must be >= 1");
  }

  if (const json* node = top.subsection("output", false)) {
    Section output(*node, "output", issues);
    output.get("directory", config.output.directory, false);
    output.get("trace_stride", config.output.trace_stride, false);
    output.finish();
    if (config.output.trace_stride < 1)
      issues.push_back("output.trace_stride: must be >= 1");
  }

  if (const json* node = top.subsection("solver", false)) {
    Section solver(*node, "solver", issues);
    solver.get("step", config.solver.step, false);
    solver.get("tol", config.solver.tol, false);
    solver.get("max_iter", config.solver.max_iter, false);
    solver.finish();
    if (!(config.solver.tol > 0)) issues.push_back("solver.tol: must be positive");
    if (config.solver.max_iter < 1) issues.push_back("solver.max_iter: must be >= 1");
  }

  top.finish();
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return config;
}

std::string render_scenario(const ScenarioConfig& config) {
  ordered_json root;

  ordered_json game;
  switch (config.game_kind) {
    case GameKind::quadratic_test:
      game["kind"] = "quadratic-test";
      break;
    case GameKind::small_cell: {
      const SmallCellParams& p = config.small_cell;
      game["kind"] = "small-cell";
      game["cells"] = p.n_cells;
      game["region_radius_km"] = p.region_radius_km;
      game["neighbor_radius_km"] = p.neighbor_radius_km;
      game["bandwidth"] = p.bandwidth;
      game["power_cap"] = p.power_cap;
      game["path_loss_exponent"] = p.path_loss_exponent;
      game["price_cap"] = p.price_cap;
      game["leader_penalty"] = p.leader_penalty;
      game["noise_density"] = p.noise_density;
      game["placement_seed"] = p.placement_seed;
      game["user_distance_min_km"] = p.user_distance_min_km;
      game["user_distance_max_km"] = p.user_distance_max_km;
      game["max_placement_attempts"] = p.max_placement_attempts;
      break;
    }
    case GameKind::custom_from_file:
      game["kind"] = "custom-from-file";
      game["path"] = config.custom_game_path;
      break;
  }
  root["game"] = game;

  ordered_json protocol;
  protocol["kind"] = config.protocol.name();
  if (config.protocol.kind == ProtocolSpec::Kind::bernoulli) {
    protocol["link_probability"] = config.protocol.link_probability;
    protocol["activity_probability"] = config.protocol.activity_probability;
  }
  root["protocol"] = protocol;

  auto step_json = [](const PowerStep& s) {
    ordered_json node;
    node["scale"] = s.scale;
    node["offset"] = s.offset;
    node["exponent"] = s.exponent;
    return node;
  };
  ordered_json schedule;
  schedule["follower"] = step_json(config.schedule.follower);
  schedule["leader"] = step_json(config.schedule.leader);
  schedule["leader_period"] = config.schedule.leader_period;
  root["schedule"] = schedule;

  ordered_json run;
  run["horizon"] = config.run.horizon;
  run["seed"] = config.run.seed;
  run["runs"] = config.run.runs;
  run["initial"] = config.run.initial == InitialPoint::zeros ? "zeros" : "center";
  root["run"] = run;

  ordered_json output;
  output["directory"] = config.output.directory;
  output["trace_stride"] = config.output.trace_stride;
  root["output"] = output;

  ordered_json solver;
  solver["step"] = config.solver.step;
  solver["tol"] = config.solver.tol;
  solver["max_iter"] = config.solver.max_iter;
  root["solver"] = solver;

  return root.dump(2) + "\n";
}

std::optional<std::uint64_t> parse_seed_override(const char* value) {
  if (value == nullptr || *value == '\0') return std::nullopt;
  std::uint64_t seed = 0;
  const char* end = value;
  while (*end != '\0') ++end;
  const auto result = std::from_chars(value, end, seed);
  if (result.ec != std::errc{} || result.ptr != end)
    throw ConfigError({std::string(kSeedEnvVar) + ": not an unsigned integer"});
  return seed;
}

AffineGameParams parse_affine_game_file(const std::string& text) {
  std::vector<std::string> issues;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError({std::string("game file is not valid JSON: ") + e.what()});
  }

  AffineGameParams params;
  Section top(root, "game-file", issues);
  top.get("followers", params.n_followers, true);
  top.get("self", params.self, false);
  top.get("coupling", params.coupling, false);
  top.get("leader_pull", params.leader_pull, false);
  top.get("offset", params.offset, false);
  top.get("leader_self", params.leader_self, false);
  top.get("leader_coupling", params.leader_coupling, false);
  top.get("leader_offset", params.leader_offset, false);
  top.get("box_half_width", params.box_half_width, false);
  std::vector<std::vector<int>> adjacency;
  if (top.get("adjacency", adjacency, false)) {
    const int n = params.n_followers;
    if (static_cast<int>(adjacency.size()) != n) {
      issues.push_back("game-file.adjacency: expected one row per follower");
    } else {
      params.adjacency = Eigen::MatrixXi::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        if (static_cast<int>(adjacency[static_cast<std::size_t>(i)].size()) != n) {
          issues.push_back("game-file.adjacency: row with wrong length");
          break;
        }
        for (int m = 0; m < n; ++m)
          params.adjacency(i, m) = adjacency[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
      }
    }
  }
  top.finish();
  if (params.n_followers < 2) issues.push_back("game-file.followers: must be >= 2");
  if (!(params.self > 0)) issues.push_back("game-file.self: must be positive");
  if (!(params.leader_self > 0)) issues.push_back("game-file.leader_self: must be positive");
  if (!(params.box_half_width > 0))
    issues.push_back("game-file.box_half_width: must be positive");
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return params;
}

StrategyProfile initial_profile(const GameSpec& game, InitialPoint kind) {
  StrategyProfile z;
  z.x.resize(static_cast<std::size_t>(game.n_followers));
  for (int n = 0; n < game.n_followers; ++n) {
    const Box& box = game.follower_sets[static_cast<std::size_t>(n)];
    z.x[static_cast<std::size_t>(n)] =
        kind == InitialPoint::zeros ? Vector::Zero(box.dim()) : box.center();
  }
  z.y = kind == InitialPoint::zeros ? Vector::Zero(game.leader_set.dim())
                                    : game.leader_set.center();
  return z;
}

BuiltScenario build_scenario_config(const ScenarioConfig& config) {
  BuiltScenario built;
  switch (config.game_kind) {
    case GameKind::quadratic_test:
      built.affine = quadratic_test_params();
      built.game = make_affine_game(*built.affine);
      break;
    case GameKind::small_cell:
      built.small_cell = build_scenario(config.small_cell);
      built.game = built.small_cell->game;
      break;
    case GameKind::custom_from_file: {
      std::ifstream in(config.custom_game_path);
      if (!in)
        throw ConfigError({"game.path: cannot open '" + config.custom_game_path + "'"});
      std::stringstream buffer;
      buffer << in.rdbuf();
      built.affine = parse_affine_game_file(buffer.str());
      built.game = make_affine_game(*built.affine);
      break;
    }
  }

  {
    const auto report = validate_game(built.game);
    if (!report.empty()) {
      std::vector<std::string> issues;
      for (const auto& line : report) issues.push_back("game: " + line);
      throw ConfigError(std::move(issues));
    }
  }

  built.protocol = config.protocol;
  built.steps = StepSchedule::uniform(built.game.n_followers, config.schedule.follower,
                                      config.schedule.leader);
  built.leader = LeaderSchedule{config.schedule.leader_period};
  built.initial = initial_profile(built.game, config.run.initial);
  for (int n = 0; n < built.game.n_followers; ++n) {
    if (!built.game.follower_sets[static_cast<std::size_t>(n)].contains(built.initial.x[static_cast<std::size_t>(n)]))
      throw ConfigError({"run.initial: 'zeros' is infeasible for this game, use 'center'"});
  }
  if (!built.game.leader_set.contains(built.initial.y))
    throw ConfigError({"run.initial: 'zeros' is infeasible for this game, use 'center'"});
  return built;
}

ProbabilityFloors protocol_probability_floors(const ProtocolSpec& protocol,
                                              const GameSpec& game) {
  switch (protocol.kind) {
    case ProtocolSpec::Kind::normal:
      return {1.0, 1.0};
    case ProtocolSpec::Kind::bernoulli:
      return {protocol.link_probability, protocol.activity_probability};
    case ProtocolSpec::Kind::gossip: {
      const GossipMarginals marginals = gossip_probabilities(game.adjacency);
      ProbabilityFloors floors{1.0, 1.0};
      for (int n = 0; n < game.n_followers; ++n) {
        floors.delta = std::min(floors.delta, marginals.activity_probability[n]);
        for (int m = 0; m < game.n_followers; ++m) {
          if (game.adjacency(n, m) != 0)
            floors.gamma = std::min(floors.gamma, marginals.link_probability(n, m));
        }
      }
      return floors;
    }
  }
  return {1.0, 1.0};
}

MonteCarloResult monte_carlo(const BuiltScenario& scenario, std::int64_t horizon,
                             std::uint64_t seed, std::int64_t runs,
                             const ReferencePoint& reference) {
  if (runs < 2) throw std::invalid_argument("monte_carlo: need at least 2 runs");
  if (horizon < 1) throw std::invalid_argument("monte_carlo: horizon must be >= 1");

  MonteCarloResult result;
  result.mse.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
  result.final_errors.reserve(static_cast<std::size_t>(runs));

  for (std::int64_t r = 0; r < runs; ++r) {
    RunOptions options;
    options.horizon = horizon;
    options.seed = seed;
    options.run_id = static_cast<std::uint64_t>(r);
    options.snapshot_stride = horizon;  // metrics are full-rate regardless
    options.reference = &reference.point;
    Trace trace;
    try {
      trace = run(scenario.game, scenario.protocol, scenario.steps, scenario.leader,
                  scenario.initial, options);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "monte_carlo: run " << r << " failed: " << e.what();
      throw std::runtime_error(os.str());
    }
    for (std::int64_t k = 0; k < horizon; ++k) {
      const double d = trace.dist_to_reference[static_cast<std::size_t>(k)];
      result.mse[static_cast<std::size_t>(k)] += d * d;
    }
    result.mse[static_cast<std::size_t>(horizon)] +=
        trace.final_distance * trace.final_distance;
    result.final_errors.push_back(trace.final_distance);
  }
  for (double& v : result.mse) v /= static_cast<double>(runs);
  return result;
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string format_trace_csv(const Trace& trace) {
  std::ostringstream os;
  const int N = trace.n_followers;
  const int MF = trace.follower_dim;
  const int ML = trace.leader_dim;

  os << "k";
  for (int n = 0; n < N; ++n)
    for (int d = 0; d < MF; ++d) os << ",x" << (n + 1) << "_" << d;
  for (int d = 0; d < ML; ++d) os << ",y_" << d;
  for (int n = 0; n < N; ++n) os << ",e" << (n + 1);
  os << ",eL";
  for (int n = 0; n < N; ++n) os << ",alpha" << (n + 1);
  os << ",alphaL";
  for (int n = 0; n < N; ++n) os << ",inc" << (n + 1);
  os << ",max_stale,dist_ref,lyapunov\n";

  std::size_t next_update = 0;
  for (std::size_t i = 0; i < trace.snapshot_iterations.size(); ++i) {
    const std::int64_t k = trace.snapshot_iterations[i];
    os << k;
    for (int n = 0; n < N; ++n)
      for (int d = 0; d < MF; ++d)
        os << "," << format_double(trace.x_snapshots[i][static_cast<std::size_t>(n)][d]);
    for (int d = 0; d < ML; ++d) os << "," << format_double(trace.y_snapshots[i][d]);
    for (int n = 0; n < N; ++n) os << "," << int(trace.activity_at(k, n));
    os << "," << int(trace.leader_updated[static_cast<std::size_t>(k)]);
    for (int n = 0; n < N; ++n)
      os << "," << format_double(trace.follower_alpha[static_cast<std::size_t>(k) * N + n]);
    os << "," << format_double(trace.leader_alpha[static_cast<std::size_t>(k)]);
    for (int n = 0; n < N; ++n) os << "," << format_double(trace.increment_at(k, n));
    os << "," << format_double(trace.max_staleness[static_cast<std::size_t>(k)]);
    os << ",";
    if (trace.has_reference)
      os << format_double(trace.dist_to_reference[static_cast<std::size_t>(k)]);
    os << ",";
    while (next_update < trace.leader_update_iterations.size() &&
           trace.leader_update_iterations[next_update] < k)
      ++next_update;
    if (trace.has_reference && next_update < trace.leader_update_iterations.size() &&
        trace.leader_update_iterations[next_update] == k)
      os << format_double(trace.lyapunov[next_update]);
    os << "\n";
  }
  return os.str();
}

std::string format_mse_csv(const MonteCarloResult& result) {
  std::ostringstream os;
  os << "k,mse\n";
  for (std::size_t k = 0; k < result.mse.size(); ++k)
    os << k << "," << format_double(result.mse[k]) << "\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace nag
