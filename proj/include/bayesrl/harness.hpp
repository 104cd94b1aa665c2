#ifndef BAYESRL_HARNESS_HPP_
#define BAYESRL_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bayesrl/agents.hpp"
#include "bayesrl/environments.hpp"
#include "bayesrl/mdp.hpp"
#include "bayesrl/posterior.hpp"
#include "bayesrl/rng.hpp"

// Experiment engine: episode loops, regret aggregation, time-to-learn,
// numerical bound checks, and the canned sweeps behind the CLI.
//
// Determinism contract: every (draw, seed) work unit derives its own RNG
// stream from the master seed, so results are a pure function of the config
// and are merged in sorted cell order. `parallelism` only changes the
// execution schedule, never the output bytes.

namespace bayesrl {

// Expected per-episode regrets of the policies one agent actually played on
// one environment, with the identifiers needed for reporting. Entries are
// expectations (policy evaluation on the true environment), not realized
// returns; this removes return noise from every downstream metric.
struct RegretCurve {
  std::string agent;
  std::string env;
  int param_n = 0;
  double epsilon = 0.0;
  double beta = 0.0;
  double sigma = 0.0;
  int prior_draw = 0;
  int seed = 0;
  std::vector<double> per_episode;
  // Optimal return minus the return of the greedy policy of the prior-mean
  // MDP, both on the true environment. Learning thresholds scale off it.
  double uninformed_gap = 0.0;

  double cumulative() const;
  std::vector<double> cumulative_curve() const;
};

struct SummaryRow {
  std::string experiment;
  std::string agent;
  std::string env;
  int param_n = 0;
  std::string metric;
  double value = 0.0;
  double std_error = 0.0;
  long long samples = 0;
};

struct EpisodeLoopOptions {
  // Stop recording once an episode's expected regret falls below this
  // absolute threshold. Sound for first-crossing metrics (time_to_learn)
  // because later episodes cannot change them.
  std::optional<double> stop_below;
};

// Runs `episodes` episodes: each one asks the agent for a policy, records
// that policy's expected per-episode regret on `env`, simulates the episode,
// and feeds every transition back to the agent. Identifier fields and
// uninformed_gap are left for the caller to fill.
RegretCurve run_episode_loop(Agent& agent, const TabularMdp& env, int episodes,
                             Rng& rng, const EpisodeLoopOptions& options = {});

// First episode (1-based) whose expected per-episode regret is below
// gap_fraction * curve.uninformed_gap; nullopt when the curve never gets
// there. Requires gap_fraction in (0, 1).
std::optional<int> time_to_learn(const RegretCurve& curve, double gap_fraction);

// KL(p || q) for two distributions over the same support. 0 log 0 = 0;
// p_i > 0 with q_i = 0 gives +infinity. Throws std::invalid_argument if
// either argument is not a probability vector.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// Outcome of one numerical bound check. `pass` means every checked cell
// satisfied its inequality within 3 Monte-Carlo standard errors. min_slack
// is the smallest (margin + 3 se) over cells, min_margin the smallest raw
// margin; both are +infinity when nothing was checked.
struct BoundCheckReport {
  bool pass = true;
  double min_slack = 0.0;
  double min_margin = 0.0;
  int cells_checked = 0;
  int worst_h = -1;
  int worst_s = -1;
  int worst_a = -1;
  std::string note;
};

// Checks, at every (h, s), that the count-bonus plan's value dominates the
// posterior-expected optimal value plus the scaled divergence between the
// posterior probability of optimality and the plan's policy:
//   V_K[h](s) >= E[V*[h](s)] + KL(P(opt at h,s) || policy[h](s)) / beta.
// Both expectations are estimated from `mc_samples` posterior draws; the
// inequality is asserted with 3-standard-error slack (delta method for the
// divergence term). Uses episode 1, so the episode temperature equals
// params.beta.
BoundCheckReport value_bound_check(const Belief& belief,
                                   const KLearningParams& params,
                                   int mc_samples, Rng& rng);

// Checks the two-sided optimism chain at every (h, s, a):
//   K[h](s,a) >= cgf_mc(beta_ep) / beta_ep >= E[Q*[h](s,a)]
// where cgf_mc is the overflow-safe log-mean-exp of beta_ep * Q* over
// posterior draws. The left inequality gets 3-standard-error slack; the
// right one holds exactly on shared samples (Jensen) and is asserted to
// floating-point tolerance. Appends a note when beta_ep * range(Q*) is large
// enough to make the Monte-Carlo CGF unreliable.
BoundCheckReport optimism_check(const Belief& belief, int episode,
                                const KLearningParams& params, int mc_samples,
                                Rng& rng);

// Runs body(0..count-1), spreading work over up to `parallelism` threads.
// Bodies must only write to their own slots. Rethrows the first body
// exception after all workers finish.
void parallel_for(int count, int parallelism,
                  const std::function<void(int)>& body);

// ---------------------------------------------------------------------------
// Canned experiments. Each driver returns its summary rows and writes
// summary (and optionally curve) CSVs under out_dir; files are written to a
// temp name and renamed, so failed runs leave nothing behind.

struct SweepOutput {
  std::vector<SummaryRow> summary;
  std::string summary_path;
  std::string curves_path;  // empty when curves were not written
};

// Bayes-regret table on the one-informative-arm bandit: environments drawn
// from the two-point prior (stratified half plus, half minus), one summary
// point per agent and arm count. The soft backup agent is swept over
// beta_grid and also reported at its per-N best.
struct Problem1SweepConfig {
  std::vector<int> arm_counts{3, 5, 10, 30, 100};
  double epsilon = 1e-3;
  int episodes = 100;
  int prior_draws = 200;
  int seeds_per_draw = 50;
  std::uint64_t master_seed = 12345;
  std::vector<std::string> agents{"bayes-optimal", "thompson", "k-bandit",
                                  "soft-q"};
  std::vector<double> beta_grid;  // empty -> default log grid 1e-3..1e2
  int parallelism = 1;
  std::string out_dir = ".";
  bool write_curves = false;
};
SweepOutput problem1_sweep(const Problem1SweepConfig& config);

// Log-spaced default grid for the soft backup temperature sweep.
std::vector<double> default_soft_q_beta_grid();

// Mean cumulative regret of one agent on each fixed variant of the bandit
// (the agent still starts from the uniform prior), plus the max over
// variants.
struct WorstCaseConfig {
  std::string agent = "thompson";
  int num_arms = 3;
  double epsilon = 1e-3;
  int episodes = 100;
  int seeds = 10000;
  std::uint64_t master_seed = 12345;
  int parallelism = 1;
  std::string out_dir = ".";
  bool write_curves = false;
};
SweepOutput worst_case_problem1(const WorstCaseConfig& config);

// Time-to-learn scaling on the descend-right grid. Per (agent, size):
// mean first episode whose expected regret drops below gap_fraction of the
// uninformed gap, with unlearned runs counted at the episode cap, plus the
// fraction of seeds that learned at all.
struct DeepSeaSweepConfig {
  std::vector<int> sizes{4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
  // <= 0 means the per-size default min(10 * 2^N, 50000).
  int episode_cap = 0;
  int seeds = 5;
  std::uint64_t master_seed = 12345;
  std::vector<std::string> agents{"thompson", "k-learning", "soft-q"};
  double soft_q_beta = 100.0;
  double k_beta = 1.0;
  double sigma = 1.0;
  double pseudo_count = 1.0;
  double gap_fraction = 0.5;
  bool randomize_action_map = false;
  // Stop each run at its first threshold crossing (sound for time-to-learn).
  bool early_stop = true;
  int parallelism = 1;
  std::string out_dir = ".";
  bool write_curves = false;
};
SweepOutput deepsea_sweep(const DeepSeaSweepConfig& config);
int deepsea_episode_cap(int size);

// Analytic one-step table over arm counts: optimal inverse temperature for
// the prior belief, the resulting probability on the informative arm, and
// the objective value at the optimum.
struct BanditTableConfig {
  std::vector<int> arm_counts{3, 5, 10, 20, 50, 100, 200, 500, 1000};
  double epsilon = 1e-3;
  double p_plus = 0.5;
  BetaSearchParams search;
  std::string out_dir = ".";
};
struct BanditTableRow {
  int num_arms = 0;
  double beta_star = 0.0;
  double informative_prob = 0.0;
  double objective = 0.0;
};
struct BanditTableOutput {
  std::vector<BanditTableRow> rows;
  std::vector<SummaryRow> summary;
  std::string summary_path;
};
BanditTableOutput bandit_table(const BanditTableConfig& config);

// Battery of value_bound_check + optimism_check over random layered
// lightly-visited beliefs and a small temperature grid. Beliefs are layered
// (states partitioned into per-timestep blocks) because the count-bonus
// guarantees require per-timestep independence; the bonus scale passed to the
// planner is computed per (belief, beta) as the smallest constant whose bonus
// provably dominates the belief's reward and transition uncertainty, floored
// at `sigma`.
struct BoundBatteryConfig {
  int trials = 100;
  std::vector<double> betas{0.1, 1.0, 10.0};
  int mc_samples = 10000;
  int max_states = 3;
  int max_actions = 3;
  int max_horizon = 2;
  double sigma = 1.0;
  double pseudo_count = 1.0;
  std::uint64_t master_seed = 12345;
  int parallelism = 1;
  std::string out_dir = ".";
};
struct BoundBatteryResult {
  int checks_run = 0;
  int failures = 0;
  double min_slack = 0.0;
  std::string worst_case;
  std::vector<SummaryRow> summary;
  std::string summary_path;
  bool all_passed() const { return failures == 0; }
};
BoundBatteryResult check_bounds(const BoundBatteryConfig& config);

// CLI entry point (the binary's main delegates here so tests can drive it).
// Returns 0 on success, 1 on usage errors, 2 on runtime errors or failed
// bound checks.
int run_cli(const std::vector<std::string>& args);

}  // namespace bayesrl

#endif  // BAYESRL_HARNESS_HPP_
