// Scenario configuration, trace/summary serialization, and the Monte-Carlo
// driver for the mean-square convergence estimate.
#pragma once

#include "nag/dynamics.hpp"
#include "nag/equilibrium.hpp"
#include "nag/quadratic.hpp"
#include "nag/smallcell.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nag {

enum class GameKind { quadratic_test, small_cell, custom_from_file };

struct ScheduleConfig {
  PowerStep follower{1.0, 1.0, 1.0};
  PowerStep leader{1.0, 1.0, 1.0};
  std::int64_t leader_period = 1;
};

enum class InitialPoint { zeros, center };

struct RunConfig {
  std::int64_t horizon = 0;   // required
  std::uint64_t seed = 0;     // required; never defaulted from the clock
  std::int64_t runs = 1;
  InitialPoint initial = InitialPoint::zeros;
};

struct OutputConfig {
  std::string directory = "out";
  std::int64_t trace_stride = 1;
};

struct SolverConfig {
  double step = 0.0;  // <= 0 selects the conservative default
  double tol = 1e-10;
  std::int64_t max_iter = 2000000;
};

struct ScenarioConfig {
  GameKind game_kind = GameKind::quadratic_test;
  SmallCellParams small_cell;    // populated when game_kind == small_cell
  std::string custom_game_path;  // populated when game_kind == custom_from_file
  ProtocolSpec protocol = ProtocolSpec::normal();
  ScheduleConfig schedule;
  RunConfig run;
  OutputConfig output;
  SolverConfig solver;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Strict parse of the scenario document (JSON): unknown fields are rejected,
// missing required fields and type/range problems are all reported at once
// with their paths via ConfigError.
ScenarioConfig parse_scenario(const std::string& text);
std::string render_scenario(const ScenarioConfig& config);

// Master-seed override, read from the NAGSIM_SEED environment variable.
inline constexpr const char* kSeedEnvVar = "NAGSIM_SEED";
std::optional<std::uint64_t> parse_seed_override(const char* value);

// Affine game description file for game.kind = "custom-from-file".
AffineGameParams parse_affine_game_file(const std::string& text);

struct BuiltScenario {
  GameSpec game;
  ProtocolSpec protocol;
  StepSchedule steps;
  LeaderSchedule leader;
  StrategyProfile initial;
  std::optional<SmallCellScenario> small_cell;  // geometry kept for inspection
  std::optional<AffineGameParams> affine;       // set for affine-backed games
};

BuiltScenario build_scenario_config(const ScenarioConfig& config);

StrategyProfile initial_profile(const GameSpec& game, InitialPoint kind);

// Protocol floor probabilities (gamma for links, delta for activity); for
// gossip these come from the closed-form marginals of the graph.
struct ProbabilityFloors {
  double gamma = 1.0;
  double delta = 1.0;
};
ProbabilityFloors protocol_probability_floors(const ProtocolSpec& protocol,
                                              const GameSpec& game);

struct MonteCarloResult {
  std::vector<double> mse;           // mean ||z^k - z*||^2, k = 0..horizon
  std::vector<double> final_errors;  // per-run ||z^K - z*||
};

// Executes `runs` independent runs with per-run derived streams and averages
// the squared-error trajectories. Deterministic in (seed, runs); extending
// `runs` leaves earlier runs' results untouched.
MonteCarloResult monte_carlo(const BuiltScenario& scenario, std::int64_t horizon,
                             std::uint64_t seed, std::int64_t runs,
                             const ReferencePoint& reference);

// Shortest round-trip decimal formatting, identical bytes for identical input.
std::string format_double(double value);

std::string format_trace_csv(const Trace& trace);
std::string format_mse_csv(const MonteCarloResult& result);

void write_text_file(const std::string& path, const std::string& content);
inline void write_trace_csv(const Trace& trace, const std::string& path) {
  write_text_file(path, format_trace_csv(trace));
}
inline void write_mse_csv(const MonteCarloResult& result, const std::string& path) {
  write_text_file(path, format_mse_csv(result));
}

}  // namespace nag
