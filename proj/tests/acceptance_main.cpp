// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code = number of failed
// criteria. Pass the nagsim binary path as argv[1] to enable the CLI
// criteria (10 and the byte-stability half of 11).

#include "nag/dynamics.hpp"
#include "nag/equilibrium.hpp"
#include "nag/harness.hpp"
#include "nag/quadratic.hpp"
#include "nag/smallcell.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

using namespace nag;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

StrategyProfile zeros_profile(const GameSpec& spec) {
  StrategyProfile z;
  z.x.assign(static_cast<std::size_t>(spec.n_followers), Vector::Zero(spec.follower_dim));
  z.y = Vector::Zero(spec.leader_dim);
  return z;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<unreadable: " + path + ">";
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

int run_cli(const std::string& binary, const std::string& args, const std::string& log) {
  const std::string cmd = binary + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Shared quadratic-game fixtures.
const GameSpec kQuadratic = make_quadratic_test_game();
const StepSchedule kSteps = StepSchedule::uniform(2, {1, 1, 1}, {1, 1, 1});
const LeaderSchedule kLeaderT2{2};
constexpr std::uint64_t kMasterSeed = 2026;

Trace run_quadratic(const ProtocolSpec& protocol, std::int64_t horizon,
                    std::uint64_t run_id, const StrategyProfile& reference) {
  RunOptions options;
  options.horizon = horizon;
  options.seed = kMasterSeed;
  options.run_id = run_id;
  options.snapshot_stride = horizon;
  options.reference = &reference;
  return run(kQuadratic, protocol, kSteps, kLeaderT2, zeros_profile(kQuadratic), options);
}

// ---------------------------------------------------------------- criteria

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  SolveOptions options;
  options.tol = 1e-10;
  const ReferencePoint ref = solve_reference_gne(kQuadratic, options);
  const double elapsed = seconds_since(t0);
  const double err = std::max({std::abs(ref.x_star()[0][0] - 10.0 / 59.0),
                               std::abs(ref.x_star()[1][0] - 10.0 / 59.0),
                               std::abs(ref.y_star()[0] + 1.0 / 59.0)});
  return {err < 1e-6 && elapsed < 1.0,
          "max |z - closed form| = " + fmt(err) + " (tol 1e-6), " + fmt(elapsed) + " s"};
}

Outcome criterion2(const StrategyProfile& reference, bool& converged_out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Trace trace = run_quadratic(ProtocolSpec::normal(), 20000, 0, reference);
  const double elapsed = seconds_since(t0);
  std::int64_t first_below = -1;
  for (std::int64_t k = 0; k < trace.horizon; ++k) {
    if (trace.dist_to_reference[static_cast<std::size_t>(k)] < 1e-2) {
      first_below = k;
      break;
    }
  }
  converged_out = first_below >= 0 && trace.final_distance < 1e-2;
  return {converged_out && elapsed < 5.0,
          "normal protocol reaches 1e-2 at k = " + std::to_string(first_below) +
              ", final error " + fmt(trace.final_distance) + ", " + fmt(elapsed) + " s"};
}

struct Criterion3Data {
  std::size_t increment_violations = 0;  // shared with criterion 5
};

Outcome criterion3(const StrategyProfile& reference, const GameConstants& certified,
                   Criterion3Data& shared) {
  const std::int64_t horizon = 50000;
  const Trace normal = run_quadratic(ProtocolSpec::normal(), horizon, 0, reference);
  shared.increment_violations += check_increment_bound(normal, certified, kSteps).size();
  const std::int64_t t_normal = iterations_to_threshold(normal, 1e-1);

  double mean_bernoulli = 0.0, mean_gossip = 0.0;
  int ordering_ok = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Trace bern = run_quadratic(ProtocolSpec::bernoulli(0.7, 0.7), horizon, s, reference);
    const Trace gossip = run_quadratic(ProtocolSpec::gossip(), horizon, s, reference);
    shared.increment_violations += check_increment_bound(bern, certified, kSteps).size();
    shared.increment_violations += check_increment_bound(gossip, certified, kSteps).size();
    mean_bernoulli += bern.final_distance / 20.0;
    mean_gossip += gossip.final_distance / 20.0;
    const std::int64_t tb = iterations_to_threshold(bern, 1e-1);
    const std::int64_t tg = iterations_to_threshold(gossip, 1e-1);
    if (tg >= tb && tb >= t_normal) ++ordering_ok;
  }

  const bool means_ok = mean_bernoulli < 5e-2 && mean_gossip < 5e-2;
  const bool ordering_pass = ordering_ok >= 18;
  std::string detail = "mean final error: bernoulli " + fmt(mean_bernoulli) + ", gossip " +
                       fmt(mean_gossip) + " (tol 5e-2, " + (means_ok ? "ok" : "FAIL") +
                       "); ordering gossip>=bernoulli>=normal in " +
                       std::to_string(ordering_ok) + "/20 seeds (need 18)";
  if (!ordering_pass) {
    detail +=
        " -- with two followers the gossip constraint set forces both nodes active with "
        "both links every iteration, so the gossip trajectory coincides with the normal "
        "one and the comparison degenerates to bernoulli-vs-normal timing noise";
  }
  return {means_ok && ordering_pass, detail};
}

Outcome criterion4() {
  const int samples = 100000;
  double worst_sigmas = 0.0;
  for (const bool use_path : {false, true}) {
    Eigen::MatrixXi adjacency;
    if (use_path) {
      adjacency = Eigen::MatrixXi::Zero(3, 3);
      adjacency(0, 1) = adjacency(1, 0) = 1;
      adjacency(1, 2) = adjacency(2, 1) = 1;
    } else {
      adjacency = kQuadratic.adjacency;
    }
    AffineGameParams params;
    params.n_followers = static_cast<int>(adjacency.rows());
    params.adjacency = adjacency;
    const GameSpec game = make_affine_game(params);
    const GossipMarginals expected = gossip_probabilities(adjacency);
    const int n = params.n_followers;

    Eigen::MatrixXd link_freq = Eigen::MatrixXd::Zero(n, n);
    Vector activity_freq = Vector::Zero(n);
    RandomStream rng = RandomStream::for_run(kMasterSeed, use_path ? 101 : 100);
    for (int k = 0; k < samples; ++k) {
      const CommEvent event = sample_events(ProtocolSpec::gossip(), game, k, rng);
      for (int i = 0; i < n; ++i) {
        activity_freq[i] += event.activity[i];
        for (int m = 0; m < n; ++m) link_freq(i, m) += event.links(i, m);
      }
    }
    link_freq /= samples;
    activity_freq /= samples;

    for (int i = 0; i < n; ++i) {
      const double q = expected.activity_probability[i];
      const double band = 4.0 * std::sqrt(q * (1.0 - q) / samples);
      const double gap = std::abs(activity_freq[i] - q);
      if (gap > band) return {false, "activity marginal off by " + fmt(gap)};
      worst_sigmas = std::max(worst_sigmas, band > 0 ? gap / (band / 4.0) : (gap > 0 ? 99.0 : 0.0));
      for (int m = 0; m < n; ++m) {
        if (adjacency(i, m) == 0) continue;
        const double p = expected.link_probability(i, m);
        const double band_p = 4.0 * std::sqrt(p * (1.0 - p) / samples);
        const double gap_p = std::abs(link_freq(i, m) - p);
        if (gap_p > band_p) return {false, "link marginal off by " + fmt(gap_p)};
        worst_sigmas =
            std::max(worst_sigmas, band_p > 0 ? gap_p / (band_p / 4.0) : (gap_p > 0 ? 99.0 : 0.0));
      }
    }
  }
  return {true, "all marginals within 4 sigma over 1e5 events (worst " +
                    fmt(worst_sigmas) + " sigma; two-follower graph and 3-path)"};
}

Outcome criterion5(const Criterion3Data& shared) {
  return {shared.increment_violations == 0,
          std::to_string(shared.increment_violations) +
              " step-size bound violations across all criterion 2-3 runs "
              "(certified bounds, grid 3, safety 1.1)"};
}

Outcome criterion6() {
  // The two-follower graph leaves gossip with a single, deterministic event,
  // so the staleness series is identically zero there; the 3-follower path is
  // the smallest graph where gossip genuinely skips links.
  const AffineGameParams params = quadratic_path_params(3);
  const GameSpec game = make_affine_game(params);
  const StepSchedule steps = StepSchedule::uniform(3, {1, 1, 1}, {1, 1, 1});
  RunOptions options;
  options.horizon = 100000;
  options.seed = kMasterSeed;
  options.run_id = 201;
  options.snapshot_stride = options.horizon;
  const Trace trace =
      run(game, ProtocolSpec::gossip(), steps, kLeaderT2, zeros_profile(game), options);
  const StalenessSeries series = staleness_series(trace, steps);

  double worst_ratio = 0.0;
  for (int n = 0; n < 3; ++n) {
    for (int m = 0; m < 3; ++m) {
      if (game.adjacency(n, m) == 0) continue;
      const double head = series.at(10000, n, m);
      const double tail = series.at(100000, n, m) - head;
      if (!(tail < 0.1 * head)) {
        return {false, "pair (" + std::to_string(n) + "," + std::to_string(m) +
                           "): tail " + fmt(tail) + " vs 0.1 * head " + fmt(0.1 * head)};
      }
      worst_ratio = std::max(worst_ratio, tail / head);
    }
  }
  return {true, "3-follower path under gossip: worst tail/head ratio " + fmt(worst_ratio) +
                    " (< 0.1) over all neighbor pairs"};
}

Outcome criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig config;
  config.schedule.leader_period = 2;
  config.run.horizon = 10000;
  config.run.seed = 7;
  BuiltScenario built = build_scenario_config(config);
  built.protocol = ProtocolSpec::gossip();
  SolveOptions options;
  options.tol = 1e-12;
  const ReferencePoint reference = solve_reference_gne(built.game, options);
  const MonteCarloResult result = monte_carlo(built, 10000, 7, 50, reference);
  const double elapsed = seconds_since(t0);
  const double early = result.mse[100];
  const double late = result.mse[10000];
  return {late <= 0.1 * early && elapsed < 60.0,
          "MSE(1e4) = " + fmt(late) + " vs 0.1 * MSE(1e2) = " + fmt(0.1 * early) + ", " +
              fmt(elapsed) + " s, 50 gossip runs"};
}

Outcome criterion8(bool criterion2_converged) {
  RandomStream rng = RandomStream::for_run(kMasterSeed, 301);
  const GameConstants constants = estimate_constants(kQuadratic, 400, rng);
  const bool constants_ok =
      std::abs(constants.strong_convexity_followers[0] - 5.0) < 1e-6 &&
      std::abs(constants.strong_convexity_leader - 10.0) < 1e-6 &&
      std::abs(constants.lipschitz_follower - 1.0) < 1e-6 &&
      std::abs(constants.lipschitz_leader - 1.0) < 1e-6;

  const ConditionReport tight = check_convergence_conditions(constants, 1.0, 1.0, 2.0);
  const bool tight_ok = tight.conditions_hold &&
                        std::abs(tight.follower_margins[0] - 3.0) < 1e-5 &&
                        std::abs(tight.leader_margin - 6.0) < 1e-5;
  const ConditionReport sparse = check_convergence_conditions(constants, 1.0, 1.0, 10.0);
  const bool sparse_ok = !sparse.conditions_hold && sparse.leader_margin < 0.0;

  return {constants_ok && tight_ok && sparse_ok && criterion2_converged,
          "margins at gap 2: follower " + fmt(tight.follower_margins[0]) + ", leader " +
              fmt(tight.leader_margin) + " (hold); at gap 10: leader " +
              fmt(sparse.leader_margin) +
              " (do not hold) while the run still converges - sufficient only"};
}

Outcome criterion9() {
  RandomStream crng = RandomStream::for_run(kMasterSeed, 302);
  const GameConstants constants = estimate_constants(kQuadratic, 300, crng);
  RandomStream rng = RandomStream::for_run(kMasterSeed, 303);
  const MonotonicityProbe probe = monotonicity_probe(kQuadratic, constants, 10000, rng);
  return {probe.min_psi > 0.0,
          "min psi over 1e4 feasible pairs = " + fmt(probe.min_psi) +
              " (certificate at argmin " + fmt(probe.certificate_at_min) + ")"};
}

Outcome criterion10(const std::string& cli, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const int rc = run_cli(cli, "smallcell -o " + dir, dir + "/cli_log.txt");
  if (rc != 0) return {false, "smallcell subcommand exited with code " + std::to_string(rc)};

  // (a) the price column is constant inside every 10-iteration block
  for (const std::string proto : {"normal", "bernoulli", "gossip"}) {
    std::ifstream csv(dir + "/smallcell_" + proto + ".csv");
    if (!csv) return {false, "missing trace for " + proto};
    std::string line;
    std::getline(csv, line);
    const auto header = split_csv(line);
    std::size_t y_col = 0, found = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == "y_0") {
        y_col = c;
        found = 1;
      }
    }
    if (!found) return {false, "no y_0 column in " + proto + " trace"};
    std::string previous;
    std::int64_t k = 0;
    while (std::getline(csv, line)) {
      const auto fields = split_csv(line);
      if (fields.size() <= y_col) return {false, "short row in " + proto + " trace"};
      if (k % 10 != 0 && fields[y_col] != previous) {
        return {false, proto + " price changed at iteration " + std::to_string(k) +
                           ", not a multiple of 10"};
      }
      previous = fields[y_col];
      ++k;
    }
    if (k < 1000) return {false, proto + " trace unexpectedly short"};
  }

  // (b) all three protocols end within 1% of the reference, gossip slowest
  const json summary = json::parse(slurp(dir + "/smallcell_summary.json"));
  double worst_rel = 0.0;
  std::int64_t settle_normal = 0, settle_bernoulli = 0, settle_gossip = 0;
  for (const auto& node : summary.at("protocols")) {
    const double rel = node.at("final_relative_error").get<double>();
    worst_rel = std::max(worst_rel, rel);
    const std::string name = node.at("protocol").get<std::string>();
    const std::int64_t settle = node.at("iterations_to_5pct").get<std::int64_t>();
    if (name == "normal") settle_normal = settle;
    if (name == "bernoulli") settle_bernoulli = settle;
    if (name == "gossip") settle_gossip = settle;
  }
  const bool within = worst_rel < 0.01;
  const bool ordering = settle_gossip >= settle_bernoulli && settle_bernoulli >= settle_normal;
  return {within && ordering,
          "price piecewise-constant on 10-blocks in all traces; worst relative error " +
              fmt(worst_rel) + " (< 0.01); settle-to-5% iterations normal/bernoulli/gossip = " +
              std::to_string(settle_normal) + "/" + std::to_string(settle_bernoulli) + "/" +
              std::to_string(settle_gossip)};
}

Outcome criterion11(const std::string& cli, const std::string& dir) {
  // finite differences on the small-cell sub-gradients
  const SmallCellScenario scenario = build_scenario(SmallCellParams{});
  const SmallCellParams& p = scenario.params;
  const SmallCellGeometry& g = scenario.geometry;
  RandomStream rng = RandomStream::for_run(kMasterSeed, 401);
  const double h = 1e-5;
  double worst_fd = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(p.n_cells)));
    const double x = rng.uniform(0.0, p.power_cap);
    const double sigma = rng.uniform(0.0, p.power_cap);
    const double price = rng.uniform(0.0, p.price_cap);
    const double grad = sbs_subgradient(n, x, sigma, price, p, g);
    const double fd = (sbs_cost(n, x + h, sigma, price, p, g) -
                       sbs_cost(n, x - h, sigma, price, p, g)) /
                      (2.0 * h);
    const double err = std::abs(grad - fd) / std::max({1.0, std::abs(grad), std::abs(fd)});
    worst_fd = std::max(worst_fd, err);
    const double sigma0 = rng.uniform(0.0, p.power_cap);
    const double grad0 = mbs_subgradient(price, sigma0, p, g);
    const double fd0 =
        (mbs_cost(price + h, sigma0, p, g) - mbs_cost(price - h, sigma0, p, g)) / (2.0 * h);
    worst_fd = std::max(worst_fd, std::abs(grad0 - fd0) /
                                      std::max({1.0, std::abs(grad0), std::abs(fd0)}));
  }
  if (worst_fd > 1e-6)
    return {false, "finite-difference mismatch " + fmt(worst_fd) + " > 1e-6"};

  // projection properties
  RandomStream prng = RandomStream::for_run(kMasterSeed, 402);
  const Box box = Box::cube(3, -0.4, 1.7);
  for (int i = 0; i < 10000; ++i) {
    Vector a(3), b(3);
    for (int d = 0; d < 3; ++d) {
      a[d] = prng.uniform(-6, 6);
      b[d] = prng.uniform(-6, 6);
    }
    const Vector pa = project_box(a, box);
    const Vector pb = project_box(b, box);
    if ((project_box(pa, box) - pa).norm() != 0.0)
      return {false, "projection not idempotent"};
    if ((pa - pb).norm() > (a - b).norm() + 1e-15)
      return {false, "projection expanded a pair"};
  }

  // byte-identical outputs across repeated identical invocations
  const std::string scenario_path = dir + "/scenario.json";
  {
    ScenarioConfig config;
    config.protocol = ProtocolSpec::bernoulli(0.7, 0.7);
    config.schedule.leader_period = 2;
    config.run.horizon = 2000;
    config.run.seed = 99;
    config.output.directory = dir + "/a";
    std::filesystem::create_directories(dir);
    write_text_file(scenario_path, render_scenario(config));
  }
  for (const std::string sub : {"a", "b"}) {
    const int rc = run_cli(cli, "run -s " + scenario_path + " -o " + dir + "/" + sub,
                           dir + "/cli_run_" + sub + ".txt");
    if (rc != 0) return {false, "run subcommand exited with code " + std::to_string(rc)};
  }
  for (const std::string file : {"trace.csv", "summary.json", "reference.json"}) {
    if (slurp(dir + "/a/" + file) != slurp(dir + "/b/" + file))
      return {false, file + " differs between identical invocations"};
  }
  return {true, "worst relative finite-difference error " + fmt(worst_fd) +
                    "; projection exact over 1e4 pairs; repeated runs byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::string tmp = "acceptance_tmp";
  std::filesystem::create_directories(tmp);

  const StrategyProfile closed_form = affine_interior_equilibrium(quadratic_test_params());
  const GameConstants certified = estimate_bounds(kQuadratic, 3, 1.1);

  int failures = 0;
  bool criterion2_converged = false;
  Criterion3Data shared;

  const auto report = [&](int id, const char* title, const Outcome& outcome) {
    std::cout << "[" << (outcome.pass ? "PASS" : "FAIL") << "] criterion " << std::setw(2)
              << id << " - " << title << ": " << outcome.detail << "\n";
    if (!outcome.pass) ++failures;
  };

  report(1, "reference solver matches the closed-form equilibrium", criterion1());
  report(2, "convergence under the normal protocol", criterion2(closed_form, criterion2_converged));
  report(3, "convergence under stochastic protocols", criterion3(closed_form, certified, shared));
  report(4, "gossip marginals match the closed-form probabilities", criterion4());
  report(5, "per-step increment bound", criterion5(shared));
  report(6, "staleness series saturates under gossip", criterion6());
  report(7, "mean-square error decays across Monte-Carlo runs", criterion7());
  report(8, "sufficient-condition checker margins", criterion8(criterion2_converged));
  report(9, "strict monotonicity probe", criterion9());
  if (cli.empty()) {
    report(10, "small-cell study end-to-end", {false, "nagsim binary path not supplied"});
    report(11, "numerical hygiene", {false, "nagsim binary path not supplied"});
  } else {
    report(10, "small-cell study end-to-end", criterion10(cli, tmp + "/smallcell"));
    report(11, "numerical hygiene", criterion11(cli, tmp + "/hygiene"));
  }

  std::cout << (11 - failures) << "/11 criteria passed\n";
  return failures;
}
