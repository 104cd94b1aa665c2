#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "bayesrl/agents.hpp"
#include "bayesrl/csv.hpp"
#include "bayesrl/environments.hpp"
#include "bayesrl/harness.hpp"
#include "bayesrl/planning.hpp"

namespace bayesrl {

namespace {

constexpr std::uint64_t kStreamSingleRun = 0x507;

const std::vector<std::string> kCurveHeader = {
    "experiment", "agent", "env",        "param_n", "epsilon", "beta",
    "sigma",      "prior_draw", "seed",  "episode", "regret",  "cum_regret"};
const std::vector<std::string> kSummaryHeader = {
    "experiment", "agent", "env", "param_n", "metric", "value", "stderr",
    "samples"};

std::vector<std::string> agent_name_list() {
  return {std::begin(kAgentNames), std::end(kAgentNames)};
}

// Settings for the `run` subcommand: one agent, one environment, a handful of
// replicate seeds, curves always written.
struct SingleRunConfig {
  std::string agent = "thompson";
  std::string env = "deepsea";
  int size = 0;  // 0 -> per-env default (3 arms / depth 10)
  int episodes = 0;  // 0 -> per-env default (100 / episode cap)
  int seeds = 1;
  std::uint64_t master_seed = 12345;
  double beta = 1.0;
  double sigma = 1.0;
  double epsilon = 1e-3;
  int parallelism = 1;
  std::string out_dir = ".";
};

int run_single(const SingleRunConfig& config) {
  if (config.seeds < 1) {
    throw std::invalid_argument("run: seeds must be >= 1");
  }
  const bool is_deepsea = config.env == "deepsea";
  const int size = config.size > 0 ? config.size : (is_deepsea ? 10 : 3);
  const int episodes = config.episodes > 0
                           ? config.episodes
                           : (is_deepsea ? deepsea_episode_cap(size) : 100);

  TabularMdp env = [&] {
    if (is_deepsea) {
      DeepSeaSpec spec;
      spec.size = size;
      return make_deep_sea(spec);
    }
    Problem1Spec spec{size, config.epsilon};
    return make_problem1(spec, config.env == "problem1-plus");
  }();
  std::unique_ptr<Belief> prior;
  if (is_deepsea) {
    prior = std::make_unique<ConjugateBelief>(make_fresh_belief(env));
  } else {
    Problem1Spec spec{size, config.epsilon};
    prior = std::make_unique<TwoPointBelief>(make_problem1_prior(spec, 0.5));
  }

  // Gap between the optimal return and a greedy policy on the prior mean,
  // recorded on every curve so downstream tools can derive time-to-learn.
  const auto solved = optimal_values(env);
  const Policy uninformed = greedy_policy(optimal_values(prior->mean_mdp()).first);
  const ValueTable uninformed_values = evaluate_policy(env, uninformed);
  double gap = 0.0;
  for (int s = 0; s < env.num_states(); ++s) {
    gap += env.initial_dist()[s] *
           (solved.second.at(0, s) - uninformed_values.at(0, s));
  }

  AgentConfig agent_config;
  agent_config.beta = config.beta;
  agent_config.sigma = config.sigma;

  std::vector<RegretCurve> curves(static_cast<std::size_t>(config.seeds));
  parallel_for(config.seeds, config.parallelism, [&](int seed) {
    Rng rng = Rng::derive(config.master_seed, kStreamSingleRun, 0, seed);
    auto agent = make_agent(config.agent, *prior, agent_config);
    RegretCurve curve = run_episode_loop(*agent, env, episodes, rng);
    curve.agent = config.agent;
    curve.env = config.env;
    curve.param_n = size;
    curve.epsilon = is_deepsea ? 0.0 : config.epsilon;
    curve.beta = config.beta;
    curve.sigma = config.sigma;
    curve.seed = seed;
    curve.uninformed_gap = gap;
    curves[seed] = std::move(curve);
  });

  std::filesystem::create_directories(config.out_dir);
  const std::string curves_path =
      (std::filesystem::path(config.out_dir) / "run_curves.csv").string();
  CsvWriter curve_writer(curves_path, kCurveHeader);
  double total = 0.0;
  double total_sq = 0.0;
  for (const RegretCurve& curve : curves) {
    double cum = 0.0;
    for (std::size_t i = 0; i < curve.per_episode.size(); ++i) {
      cum += curve.per_episode[i];
      curve_writer.write_row(
          {"run", curve.agent, curve.env, std::to_string(curve.param_n),
           format_double(curve.epsilon), format_double(curve.beta),
           format_double(curve.sigma), std::to_string(curve.prior_draw),
           std::to_string(curve.seed), std::to_string(static_cast<int>(i) + 1),
           format_double(curve.per_episode[i]), format_double(cum)});
    }
    total += cum;
    total_sq += cum * cum;
  }
  curve_writer.commit();

  const double mean = total / config.seeds;
  double se = 0.0;
  if (config.seeds > 1) {
    double var = (total_sq - config.seeds * mean * mean) / (config.seeds - 1);
    se = std::sqrt(std::max(0.0, var) / config.seeds);
  }
  const std::string summary_path =
      (std::filesystem::path(config.out_dir) / "run_summary.csv").string();
  CsvWriter summary_writer(summary_path, kSummaryHeader);
  summary_writer.write_row({"run", config.agent, config.env,
                            std::to_string(size), "cumulative_regret",
                            format_double(mean), format_double(se),
                            std::to_string(config.seeds)});
  summary_writer.write_row({"run", config.agent, config.env,
                            std::to_string(size), "uninformed_gap",
                            format_double(gap), format_double(0.0),
                            std::to_string(config.seeds)});
  summary_writer.commit();

  std::cout << "mean cumulative regret over " << config.seeds
            << " seed(s): " << format_double(mean) << "\n";
  std::cout << "wrote " << summary_path << "\n";
  std::cout << "wrote " << curves_path << "\n";
  return 0;
}

// Per-subcommand config files. CLI11's own set_config only reads files for
// the top-level app, so each subcommand gets a plain --config option and the
// file is applied here after parsing: every key feeds the like-named long
// option unless that option was already given on the command line.
void add_config_file_option(CLI::App* cmd,
                            std::map<CLI::App*, std::string>& slots) {
  cmd->add_option("--config", slots[cmd],
                  "Read options from a flat key=value file (# comments); "
                  "command-line flags win")
      ->check(CLI::ExistingFile);
}

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

void apply_config_file(CLI::App& cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open " + path);
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: " + path + ":" +
                                  std::to_string(lineno) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    CLI::Option* opt =
        key.empty() ? nullptr : cmd.get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw std::invalid_argument("config: unknown key '" + key + "' for " +
                                  cmd.get_name());
    }
    if (opt->count() > 0) continue;  // explicit command-line value wins
    opt->add_result(value);
    opt->run_callback();
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{
      "Bayesian exploration experiments on finite-horizon tabular MDPs: "
      "Thompson sampling, soft Q-learning, and K-learning"};
  app.require_subcommand(1);
  const std::vector<std::string> agent_names = agent_name_list();
  std::map<CLI::App*, std::string> config_paths;

  // problem1-sweep
  Problem1SweepConfig p1;
  std::string p1_agent;
  double p1_beta = 0.0;
  auto* p1_cmd = app.add_subcommand(
      "problem1-sweep",
      "Bayesian regret of every agent across arm counts on the two-environment "
      "bandit");
  p1_cmd->add_option("--size-grid", p1.arm_counts,
                     "Comma-separated arm counts (default 3,5,10,30,100)")
      ->delimiter(',');
  p1_cmd->add_option("--epsilon", p1.epsilon, "Distractor-arm shortfall");
  p1_cmd->add_option("--episodes", p1.episodes, "Episodes per run");
  p1_cmd->add_option("--prior-draws", p1.prior_draws,
                     "Environment draws from the prior");
  p1_cmd->add_option("--seeds", p1.seeds_per_draw, "Seeds per environment draw");
  p1_cmd->add_option("--seed", p1.master_seed, "Master seed");
  p1_cmd->add_option("--agent", p1_agent, "Restrict the sweep to one agent")
      ->check(CLI::IsMember(agent_names));
  p1_cmd->add_option("--beta", p1_beta,
                     "Single soft-Q temperature instead of the default grid");
  p1_cmd->add_option("--parallelism", p1.parallelism, "Worker threads");
  p1_cmd->add_option("--out", p1.out_dir, "Output directory");
  p1_cmd->add_flag("--write-curves", p1.write_curves,
                   "Also write per-episode curves for the first cell of each "
                   "sweep point");
  add_config_file_option(p1_cmd, config_paths);

  // deepsea-sweep
  DeepSeaSweepConfig ds;
  std::string ds_agent;
  bool ds_no_early_stop = false;
  auto* ds_cmd = app.add_subcommand(
      "deepsea-sweep",
      "Learning time of every agent across depths on the deep-sea chain");
  ds_cmd->add_option("--size-grid", ds.sizes,
                     "Comma-separated depths (default 4..14)")
      ->delimiter(',');
  ds_cmd->add_option("--episodes", ds.episode_cap,
                     "Episode cap (0 = min(10*2^depth, 50000))");
  ds_cmd->add_option("--seeds", ds.seeds, "Seeds per (agent, depth)");
  ds_cmd->add_option("--seed", ds.master_seed, "Master seed");
  ds_cmd->add_option("--agent", ds_agent, "Restrict the sweep to one agent")
      ->check(CLI::IsMember(agent_names));
  ds_cmd->add_option("--beta", ds.soft_q_beta, "Soft-Q temperature");
  ds_cmd->add_option("--sigma", ds.sigma, "Reward noise scale assumed by K-learning");
  ds_cmd->add_option("--gap-fraction", ds.gap_fraction,
                     "Learned when per-episode regret drops below this fraction "
                     "of the uninformed gap");
  ds_cmd->add_flag("--randomize-actions", ds.randomize_action_map,
                   "Randomize which action index moves right in each state");
  ds_cmd->add_flag("--no-early-stop", ds_no_early_stop,
                   "Keep running episodes after the learning threshold is hit");
  ds_cmd->add_option("--parallelism", ds.parallelism, "Worker threads");
  ds_cmd->add_option("--out", ds.out_dir, "Output directory");
  ds_cmd->add_flag("--write-curves", ds.write_curves,
                   "Also write per-episode curves for the first seed of each "
                   "sweep point");
  add_config_file_option(ds_cmd, config_paths);

  // check-bounds
  BoundBatteryConfig cb;
  auto* cb_cmd = app.add_subcommand(
      "check-bounds",
      "Monte-Carlo battery verifying the K-learning value and optimism bounds "
      "on random beliefs");
  cb_cmd->add_option("--trials", cb.trials, "Random beliefs to test");
  cb_cmd->add_option("--mc-samples", cb.mc_samples,
                     "Posterior samples per bound estimate");
  cb_cmd->add_option("--seed", cb.master_seed, "Master seed");
  cb_cmd->add_option("--sigma", cb.sigma, "Reward noise scale assumed by K-learning");
  cb_cmd->add_option("--parallelism", cb.parallelism, "Worker threads");
  cb_cmd->add_option("--out", cb.out_dir, "Output directory");
  add_config_file_option(cb_cmd, config_paths);

  // run
  SingleRunConfig sr;
  std::vector<int> sr_size_grid;
  auto* sr_cmd = app.add_subcommand(
      "run", "Single agent on a single environment; writes full curves");
  sr_cmd->add_option("--agent", sr.agent, "Agent name")
      ->check(CLI::IsMember(agent_names));
  sr_cmd->add_option("--env", sr.env, "Environment")
      ->check(CLI::IsMember({"problem1-plus", "problem1-minus", "deepsea"}));
  sr_cmd->add_option("--size-grid", sr_size_grid,
                     "Environment size (arm count or depth); first entry used")
      ->delimiter(',');
  sr_cmd->add_option("--episodes", sr.episodes,
                     "Episodes (0 = per-environment default)");
  sr_cmd->add_option("--seeds", sr.seeds, "Replicate seeds");
  sr_cmd->add_option("--seed", sr.master_seed, "Master seed");
  sr_cmd->add_option("--beta", sr.beta, "Agent temperature");
  sr_cmd->add_option("--sigma", sr.sigma, "Reward noise scale assumed by K-learning");
  sr_cmd->add_option("--epsilon", sr.epsilon, "Distractor-arm shortfall");
  sr_cmd->add_option("--parallelism", sr.parallelism, "Worker threads");
  sr_cmd->add_option("--out", sr.out_dir, "Output directory");
  add_config_file_option(sr_cmd, config_paths);

  // bandit-table
  BanditTableConfig bt;
  auto* bt_cmd = app.add_subcommand(
      "bandit-table",
      "Analytic single-episode K-learning temperature and policy across arm "
      "counts");
  bt_cmd->add_option("--size-grid", bt.arm_counts,
                     "Comma-separated arm counts")
      ->delimiter(',');
  bt_cmd->add_option("--epsilon", bt.epsilon, "Distractor-arm shortfall");
  bt_cmd->add_option("--out", bt.out_dir, "Output directory");
  add_config_file_option(bt_cmd, config_paths);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (auto& [cmd, path] : config_paths) {
      if (cmd->parsed() && !path.empty()) apply_config_file(*cmd, path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (p1_cmd->parsed()) {
      if (!p1_agent.empty()) p1.agents = {p1_agent};
      if (p1_beta > 0.0) p1.beta_grid = {p1_beta};
      SweepOutput out = problem1_sweep(p1);
      std::cout << "wrote " << out.summary_path << "\n";
      if (!out.curves_path.empty()) std::cout << "wrote " << out.curves_path << "\n";
    } else if (ds_cmd->parsed()) {
      if (!ds_agent.empty()) ds.agents = {ds_agent};
      ds.early_stop = !ds_no_early_stop;
      SweepOutput out = deepsea_sweep(ds);
      std::cout << "wrote " << out.summary_path << "\n";
      if (!out.curves_path.empty()) std::cout << "wrote " << out.curves_path << "\n";
    } else if (cb_cmd->parsed()) {
      BoundBatteryResult result = check_bounds(cb);
      std::cout << "bound checks: " << result.checks_run << " run, "
                << result.failures << " failed, min slack "
                << format_double(result.min_slack) << "\n";
      if (!result.worst_case.empty()) {
        std::cout << "tightest case: " << result.worst_case << "\n";
      }
      std::cout << "wrote " << result.summary_path << "\n";
      if (!result.all_passed()) {
        std::cerr << "bound check FAILED\n";
        return 2;
      }
    } else if (sr_cmd->parsed()) {
      if (!sr_size_grid.empty()) sr.size = sr_size_grid.front();
      return run_single(sr);
    } else if (bt_cmd->parsed()) {
      BanditTableOutput out = bandit_table(bt);
      for (const BanditTableRow& row : out.rows) {
        std::cout << "N=" << row.num_arms
                  << "  beta*=" << format_double(row.beta_star)
                  << "  informative-arm prob=" << format_double(row.informative_prob)
                  << "\n";
      }
      std::cout << "wrote " << out.summary_path << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace bayesrl
