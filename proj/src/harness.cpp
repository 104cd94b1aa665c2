#include "bayesrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bayesrl/csv.hpp"
#include "bayesrl/numeric.hpp"
#include "bayesrl/planning.hpp"

namespace bayesrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Arbitrary distinct labels separating the RNG streams of the different
// experiment drivers (and of independent phases within one driver).
constexpr std::uint64_t kStreamProblem1 = 0x501;
constexpr std::uint64_t kStreamWorstCase = 0x502;
constexpr std::uint64_t kStreamDeepSea = 0x503;
constexpr std::uint64_t kStreamBeliefGen = 0x504;
constexpr std::uint64_t kStreamValueBound = 0x505;
constexpr std::uint64_t kStreamOptimism = 0x506;

const std::vector<std::string> kCurveHeader = {
    "experiment", "agent", "env",        "param_n", "epsilon", "beta",
    "sigma",      "prior_draw", "seed",  "episode", "regret",  "cum_regret"};
const std::vector<std::string> kSummaryHeader = {
    "experiment", "agent", "env", "param_n", "metric", "value", "stderr",
    "samples"};

struct MeanStderr {
  double mean = 0.0;
  double se = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr out;
  if (xs.empty()) return out;
  double total = std::accumulate(xs.begin(), xs.end(), 0.0);
  out.mean = total / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    double var = ss / static_cast<double>(xs.size() - 1);
    out.se = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return out;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

double expected_initial_value(const std::vector<double>& initial_dist,
                              const ValueTable& values) {
  double total = 0.0;
  for (int s = 0; s < values.num_states; ++s) {
    total += initial_dist[s] * values.at(0, s);
  }
  return total;
}

void write_summary_file(CsvWriter& writer, const std::vector<SummaryRow>& rows) {
  for (const SummaryRow& row : rows) {
    writer.write_row({row.experiment, row.agent, row.env,
                      std::to_string(row.param_n), row.metric,
                      format_double(row.value), format_double(row.std_error),
                      std::to_string(row.samples)});
  }
  writer.commit();
}

void write_curve_rows(CsvWriter& writer, const std::string& experiment,
                      const RegretCurve& curve) {
  double cum = 0.0;
  for (std::size_t i = 0; i < curve.per_episode.size(); ++i) {
    cum += curve.per_episode[i];
    writer.write_row({experiment, curve.agent, curve.env,
                      std::to_string(curve.param_n),
                      format_double(curve.epsilon), format_double(curve.beta),
                      format_double(curve.sigma),
                      std::to_string(curve.prior_draw),
                      std::to_string(curve.seed),
                      std::to_string(static_cast<int>(i) + 1),
                      format_double(curve.per_episode[i]),
                      format_double(cum)});
  }
}

void ensure_out_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

// Updates the running worst cell of a report: tracks the minimum slack and
// the raw margin at that cell.
void fold_cell(BoundCheckReport& report, double margin, double slack, int h,
               int s, int a) {
  ++report.cells_checked;
  if (slack < report.min_slack) {
    report.min_slack = slack;
    report.worst_h = h;
    report.worst_s = s;
    report.worst_a = a;
  }
  report.min_margin = std::min(report.min_margin, margin);
  if (slack < 0.0) report.pass = false;
}

}  // namespace

double RegretCurve::cumulative() const {
  return std::accumulate(per_episode.begin(), per_episode.end(), 0.0);
}

std::vector<double> RegretCurve::cumulative_curve() const {
  std::vector<double> out(per_episode.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < per_episode.size(); ++i) {
    cum += per_episode[i];
    out[i] = cum;
  }
  return out;
}

RegretCurve run_episode_loop(Agent& agent, const TabularMdp& env, int episodes,
                             Rng& rng, const EpisodeLoopOptions& options) {
  if (episodes < 1) {
    throw std::invalid_argument("run_episode_loop: episodes must be >= 1");
  }
  const auto solved = optimal_values(env);
  const ValueTable& v_star = solved.second;
  RegretCurve curve;
  curve.per_episode.reserve(static_cast<std::size_t>(std::min(episodes, 4096)));
  for (int episode = 1; episode <= episodes; ++episode) {
    Policy policy = agent.act(episode, episodes, rng);
    double regret = per_episode_regret(env, v_star, policy);
    curve.per_episode.push_back(regret);
    if (options.stop_below && regret < *options.stop_below) break;
    std::vector<Transition> transitions =
        sample_episode(env, policy, episode, rng);
    for (const Transition& t : transitions) agent.observe(t);
  }
  return curve;
}

std::optional<int> time_to_learn(const RegretCurve& curve, double gap_fraction) {
  if (!(gap_fraction > 0.0) || !(gap_fraction < 1.0)) {
    throw std::invalid_argument("time_to_learn: gap_fraction must be in (0, 1)");
  }
  const double threshold = gap_fraction * curve.uninformed_gap;
  for (std::size_t i = 0; i < curve.per_episode.size(); ++i) {
    double regret = curve.per_episode[i];
    if (regret < threshold || regret <= 1e-12) {
      return static_cast<int>(i) + 1;
    }
  }
  return std::nullopt;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) {
    throw std::invalid_argument("kl_divergence: size mismatch");
  }
  auto check_simplex = [](std::span<const double> v, const char* name) {
    double total = 0.0;
    for (double x : v) {
      if (!std::isfinite(x) || x < -1e-12) {
        throw std::invalid_argument(std::string("kl_divergence: ") + name +
                                    " has a negative or non-finite entry");
      }
      total += x;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument(std::string("kl_divergence: ") + name +
                                  " does not sum to 1");
    }
  };
  check_simplex(p, "p");
  check_simplex(q, "q");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double pi = std::max(p[i], 0.0);
    if (pi == 0.0) continue;
    double qi = std::max(q[i], 0.0);
    if (qi == 0.0) return kInf;
    acc += pi * std::log(pi / qi);
  }
  return std::max(acc, 0.0);
}

BoundCheckReport value_bound_check(const Belief& belief,
                                   const KLearningParams& params,
                                   int mc_samples, Rng& rng) {
  params.validate();
  if (mc_samples < 1000) {
    throw std::invalid_argument("value_bound_check: mc_samples must be >= 1000");
  }
  const OptimalityEstimate est = estimate_optimality(belief, mc_samples, rng);
  const KPlan plan = k_plan(belief, 1, params);
  const double beta = plan.beta_episode;
  const int num_states = belief.num_states();
  const int num_actions = belief.num_actions();
  const int horizon = belief.horizon();

  BoundCheckReport report;
  report.min_slack = kInf;
  report.min_margin = kInf;
  std::vector<double> p_row(static_cast<std::size_t>(num_actions));
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < num_actions; ++a) p_row[a] = est.prob(h, s, a);
      const double* q_row = plan.policy.row(h, s);
      double kl = kl_divergence(p_row, std::span<const double>(q_row, p_row.size()));
      if (!std::isfinite(kl)) {
        // The plan's policy is strictly positive by construction, so a zero
        // probability opposite observed optimality means catastrophic
        // underflow; report it as a hard failure.
        fold_cell(report, -kInf, -kInf, h, s, -1);
        report.note += "infinite divergence at h=" + std::to_string(h) +
                       " s=" + std::to_string(s) + "; ";
        continue;
      }
      // Delta-method variance of the estimated divergence: with c_a =
      // log(p_a/q_a) + 1, Var ~ (E_p[c^2] - E_p[c]^2) / n.
      double mean_c = 0.0;
      double mean_c2 = 0.0;
      for (int a = 0; a < num_actions; ++a) {
        if (p_row[a] <= 0.0) continue;
        double c = std::log(p_row[a] / q_row[a]) + 1.0;
        mean_c += p_row[a] * c;
        mean_c2 += p_row[a] * c * c;
      }
      double kl_var =
          std::max(0.0, mean_c2 - mean_c * mean_c) / static_cast<double>(mc_samples);
      double se = std::sqrt(est.variance(h, s) / static_cast<double>(mc_samples) +
                            kl_var / (beta * beta));
      double lhs = plan.v.at(h, s);
      double rhs = est.mean(h, s) + kl / beta;
      double margin = lhs - rhs;
      fold_cell(report, margin, margin + 3.0 * se, h, s, -1);
    }
  }
  return report;
}

BoundCheckReport optimism_check(const Belief& belief, int episode,
                                const KLearningParams& params, int mc_samples,
                                Rng& rng) {
  params.validate();
  if (episode < 1) {
    throw std::invalid_argument("optimism_check: episode must be >= 1");
  }
  if (mc_samples < 1000) {
    throw std::invalid_argument("optimism_check: mc_samples must be >= 1000");
  }
  const int num_states = belief.num_states();
  const int num_actions = belief.num_actions();
  const int horizon = belief.horizon();
  const std::size_t cells = static_cast<std::size_t>(horizon) * num_states *
                            num_actions;
  if (cells * static_cast<std::size_t>(mc_samples) > 40'000'000) {
    throw std::invalid_argument(
        "optimism_check: belief too large for the requested sample count");
  }
  const KPlan plan = k_plan(belief, episode, params);
  const double beta = plan.beta_episode;

  // One posterior draw fills one column of every cell's sample buffer.
  std::vector<double> samples(cells * static_cast<std::size_t>(mc_samples));
  for (int n = 0; n < mc_samples; ++n) {
    TabularMdp model = belief.sample_mdp(rng);
    const auto solved = optimal_values(model);
    const QTable& q_star = solved.first;
    for (std::size_t cell = 0; cell < cells; ++cell) {
      samples[cell * mc_samples + n] = q_star.values[cell];
    }
  }

  BoundCheckReport report;
  report.min_slack = kInf;
  report.min_margin = kInf;
  bool warned_range = false;
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < num_actions; ++a) {
        const std::size_t cell =
            (static_cast<std::size_t>(h) * num_states + s) * num_actions + a;
        const double* x = samples.data() + cell * mc_samples;
        double mx = -kInf;
        double mn = kInf;
        double mean = 0.0;
        for (int n = 0; n < mc_samples; ++n) {
          mx = std::max(mx, x[n]);
          mn = std::min(mn, x[n]);
          mean += x[n];
        }
        mean /= static_cast<double>(mc_samples);
        double sum_w = 0.0;
        double sum_w2 = 0.0;
        for (int n = 0; n < mc_samples; ++n) {
          double w = std::exp(beta * (x[n] - mx));
          sum_w += w;
          sum_w2 += w * w;
        }
        double mean_w = sum_w / static_cast<double>(mc_samples);
        double mid = (std::log(mean_w) + beta * mx) / beta;
        double var_w = std::max(0.0, sum_w2 / mc_samples - mean_w * mean_w) *
                       static_cast<double>(mc_samples) /
                       static_cast<double>(mc_samples - 1);
        double se_mid =
            std::sqrt(var_w / static_cast<double>(mc_samples)) / (mean_w * beta);

        // Left link: the bonus-augmented value dominates the sampled
        // exponential-moment value, within Monte-Carlo error.
        double margin_left = plan.k.at(h, s, a) - mid;
        fold_cell(report, margin_left, margin_left + 3.0 * se_mid, h, s, a);
        // Right link: log-mean-exp of the same samples dominates their mean
        // exactly (convexity), so only roundoff slack is allowed.
        double margin_right = mid - mean;
        double roundoff = 1e-12 * std::max(1.0, std::abs(mean));
        fold_cell(report, margin_right, margin_right + roundoff, h, s, a);

        if (!warned_range && beta * (mx - mn) > 20.0) {
          warned_range = true;
          report.note += "temperature times sampled value range exceeds 20 "
                         "(log-mean-exp estimate may be max-dominated); ";
        }
      }
    }
  }
  return report;
}

void parallel_for(int count, int parallelism,
                  const std::function<void(int)>& body) {
  if (count <= 0) return;
  int workers = std::max(1, std::min(parallelism, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) break;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Sweep drivers.

std::vector<double> default_soft_q_beta_grid() {
  // Half-decade log grid from 1e-3 to 1e2.
  std::vector<double> grid;
  for (int k = -6; k <= 4; ++k) {
    grid.push_back(std::pow(10.0, 0.5 * static_cast<double>(k)));
  }
  return grid;
}

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

void validate_agent_names(const std::vector<std::string>& agents) {
  require(!agents.empty(), "sweep: agent list must not be empty");
  for (const std::string& name : agents) {
    bool known = false;
    for (const char* candidate : kAgentNames) {
      if (name == candidate) known = true;
    }
    if (!known) {
      throw std::invalid_argument("sweep: unknown agent name: " + name);
    }
  }
}

}  // namespace

SweepOutput problem1_sweep(const Problem1SweepConfig& config) {
  require(config.episodes >= 1, "problem1_sweep: episodes must be >= 1");
  require(config.prior_draws >= 1, "problem1_sweep: prior_draws must be >= 1");
  require(config.seeds_per_draw >= 1,
          "problem1_sweep: seeds_per_draw must be >= 1");
  require(!config.arm_counts.empty(), "problem1_sweep: empty arm count grid");
  require(config.parallelism >= 1, "problem1_sweep: parallelism must be >= 1");
  validate_agent_names(config.agents);

  const std::vector<double> beta_grid =
      config.beta_grid.empty() ? default_soft_q_beta_grid() : config.beta_grid;

  struct Point {
    std::string agent;
    int arms = 0;
    double beta = 0.0;
  };
  std::vector<Point> points;
  for (const std::string& agent : config.agents) {
    for (int arms : config.arm_counts) {
      require(arms >= 3, "problem1_sweep: arm counts must be >= 3");
      if (agent == "soft-q") {
        for (double beta : beta_grid) points.push_back({agent, arms, beta});
      } else {
        points.push_back({agent, arms, 0.0});
      }
    }
  }

  ensure_out_dir(config.out_dir);
  SweepOutput out;
  out.summary_path = join_path(config.out_dir, "problem1_summary.csv");
  std::unique_ptr<CsvWriter> curves;
  if (config.write_curves) {
    out.curves_path = join_path(config.out_dir, "problem1_curves.csv");
    curves = std::make_unique<CsvWriter>(out.curves_path, kCurveHeader);
  }

  const int cells = config.prior_draws * config.seeds_per_draw;
  // Per arm count: best soft backup row seen so far (value, se, beta).
  struct Best {
    double value = kInf;
    double se = 0.0;
    double beta = 0.0;
  };
  std::map<int, Best> best_soft_q;

  for (std::size_t p = 0; p < points.size(); ++p) {
    const Point& point = points[p];
    Problem1Spec spec{point.arms, config.epsilon};
    const TabularMdp env_plus = make_problem1(spec, true);
    const TabularMdp env_minus = make_problem1(spec, false);
    const TwoPointBelief prior = make_problem1_prior(spec, 0.5);
    AgentConfig agent_config;
    if (point.beta > 0.0) agent_config.beta = point.beta;

    std::vector<double> cum(static_cast<std::size_t>(cells), 0.0);
    RegretCurve first_cell_curve;
    parallel_for(cells, config.parallelism, [&](int cell) {
      const int draw = cell / config.seeds_per_draw;
      const int seed = cell % config.seeds_per_draw;
      // Environment draws are stratified over the two-atom uniform prior
      // (even draws plus, odd draws minus): the estimator stays unbiased and
      // the draw-imbalance variance term vanishes.
      const bool plus = draw % 2 == 0;
      const TabularMdp& env = plus ? env_plus : env_minus;
      Rng rng = Rng::derive(config.master_seed, kStreamProblem1, p, cell);
      auto agent = make_agent(point.agent, prior, agent_config);
      RegretCurve curve = run_episode_loop(*agent, env, config.episodes, rng);
      cum[cell] = curve.cumulative();
      if (cell == 0 && curves) {
        curve.agent = point.agent;
        curve.env = plus ? "problem1-plus" : "problem1-minus";
        curve.param_n = point.arms;
        curve.epsilon = config.epsilon;
        curve.beta = point.beta;
        curve.prior_draw = draw;
        curve.seed = seed;
        first_cell_curve = std::move(curve);
      }
    });

    MeanStderr ms = mean_stderr(cum);
    SummaryRow row;
    row.experiment = "problem1-sweep";
    row.agent = point.agent;
    row.env = "problem1";
    row.param_n = point.arms;
    row.metric = point.agent == "soft-q"
                     ? "bayes_regret[beta=" + format_double(point.beta) + "]"
                     : "bayes_regret";
    row.value = ms.mean;
    row.std_error = ms.se;
    row.samples = cells;
    out.summary.push_back(row);
    if (curves) write_curve_rows(*curves, "problem1-sweep", first_cell_curve);

    if (point.agent == "soft-q") {
      Best& best = best_soft_q[point.arms];
      if (ms.mean < best.value) {
        best.value = ms.mean;
        best.se = ms.se;
        best.beta = point.beta;
      }
    }
  }

  if (!best_soft_q.empty()) {
    for (int arms : config.arm_counts) {
      const Best& best = best_soft_q.at(arms);
      SummaryRow value_row;
      value_row.experiment = "problem1-sweep";
      value_row.agent = "soft-q";
      value_row.env = "problem1";
      value_row.param_n = arms;
      value_row.metric = "bayes_regret_best";
      value_row.value = best.value;
      value_row.std_error = best.se;
      value_row.samples = cells;
      out.summary.push_back(value_row);
      SummaryRow beta_row = value_row;
      beta_row.metric = "best_beta";
      beta_row.value = best.beta;
      beta_row.std_error = 0.0;
      out.summary.push_back(beta_row);
    }
  }

  CsvWriter summary_writer(out.summary_path, kSummaryHeader);
  write_summary_file(summary_writer, out.summary);
  if (curves) curves->commit();
  return out;
}

SweepOutput worst_case_problem1(const WorstCaseConfig& config) {
  require(config.episodes >= 1, "worst_case_problem1: episodes must be >= 1");
  require(config.seeds >= 1, "worst_case_problem1: seeds must be >= 1");
  require(config.num_arms >= 3, "worst_case_problem1: num_arms must be >= 3");
  require(config.parallelism >= 1,
          "worst_case_problem1: parallelism must be >= 1");
  validate_agent_names({config.agent});

  Problem1Spec spec{config.num_arms, config.epsilon};
  const TwoPointBelief prior = make_problem1_prior(spec, 0.5);
  const std::pair<std::string, TabularMdp> variants[] = {
      {"problem1-plus", make_problem1(spec, true)},
      {"problem1-minus", make_problem1(spec, false)},
  };

  ensure_out_dir(config.out_dir);
  SweepOutput out;
  out.summary_path = join_path(config.out_dir, "worst_case_summary.csv");
  std::unique_ptr<CsvWriter> curves;
  if (config.write_curves) {
    out.curves_path = join_path(config.out_dir, "worst_case_curves.csv");
    curves = std::make_unique<CsvWriter>(out.curves_path, kCurveHeader);
  }

  double worst = -kInf;
  for (std::size_t v = 0; v < 2; ++v) {
    const std::string& env_name = variants[v].first;
    const TabularMdp& env = variants[v].second;
    std::vector<double> cum(static_cast<std::size_t>(config.seeds), 0.0);
    RegretCurve first_curve;
    parallel_for(config.seeds, config.parallelism, [&](int seed) {
      Rng rng = Rng::derive(config.master_seed, kStreamWorstCase, v, seed);
      auto agent = make_agent(config.agent, prior, {});
      RegretCurve curve = run_episode_loop(*agent, env, config.episodes, rng);
      cum[seed] = curve.cumulative();
      if (seed == 0 && curves) {
        curve.agent = config.agent;
        curve.env = env_name;
        curve.param_n = config.num_arms;
        curve.epsilon = config.epsilon;
        curve.seed = seed;
        first_curve = std::move(curve);
      }
    });
    MeanStderr ms = mean_stderr(cum);
    worst = std::max(worst, ms.mean);
    SummaryRow row;
    row.experiment = "worst-case";
    row.agent = config.agent;
    row.env = env_name;
    row.param_n = config.num_arms;
    row.metric = "mean_regret";
    row.value = ms.mean;
    row.std_error = ms.se;
    row.samples = config.seeds;
    out.summary.push_back(row);
    if (curves) write_curve_rows(*curves, "worst-case", first_curve);
  }

  SummaryRow max_row;
  max_row.experiment = "worst-case";
  max_row.agent = config.agent;
  max_row.env = "problem1";
  max_row.param_n = config.num_arms;
  max_row.metric = "worst_case_regret";
  max_row.value = worst;
  max_row.std_error = 0.0;
  max_row.samples = config.seeds;
  out.summary.push_back(max_row);

  CsvWriter summary_writer(out.summary_path, kSummaryHeader);
  write_summary_file(summary_writer, out.summary);
  if (curves) curves->commit();
  return out;
}

int deepsea_episode_cap(int size) {
  if (size >= 13) return 50000;
  return static_cast<int>(std::min<long long>(10LL << size, 50000LL));
}

SweepOutput deepsea_sweep(const DeepSeaSweepConfig& config) {
  require(!config.sizes.empty(), "deepsea_sweep: empty size grid");
  require(config.seeds >= 1, "deepsea_sweep: seeds must be >= 1");
  require(config.parallelism >= 1, "deepsea_sweep: parallelism must be >= 1");
  require(config.gap_fraction > 0.0 && config.gap_fraction < 1.0,
          "deepsea_sweep: gap_fraction must be in (0, 1)");
  validate_agent_names(config.agents);

  struct Point {
    std::string agent;
    int size = 0;
  };
  std::vector<Point> points;
  for (const std::string& agent : config.agents) {
    for (int size : config.sizes) {
      require(size >= 2, "deepsea_sweep: sizes must be >= 2");
      points.push_back({agent, size});
    }
  }

  ensure_out_dir(config.out_dir);
  SweepOutput out;
  out.summary_path = join_path(config.out_dir, "deepsea_summary.csv");
  std::unique_ptr<CsvWriter> curves;
  if (config.write_curves) {
    out.curves_path = join_path(config.out_dir, "deepsea_curves.csv");
    curves = std::make_unique<CsvWriter>(out.curves_path, kCurveHeader);
  }

  for (std::size_t p = 0; p < points.size(); ++p) {
    const Point& point = points[p];
    DeepSeaSpec spec;
    spec.size = point.size;
    spec.randomize_action_map = config.randomize_action_map;
    spec.map_seed = config.master_seed;
    const TabularMdp env = make_deep_sea(spec);
    const ConjugateBelief prior = make_fresh_belief(env);

    // Uninformed gap: optimal return minus the return of acting greedily on
    // the prior-mean model, both on the true environment.
    const auto solved = optimal_values(env);
    const TabularMdp prior_mean = prior.mean_mdp();
    const auto mean_solved = optimal_values(prior_mean);
    const Policy uninformed = greedy_policy(mean_solved.first);
    const ValueTable uninformed_values = evaluate_policy(env, uninformed);
    const double gap = expected_initial_value(env.initial_dist(), solved.second) -
                       expected_initial_value(env.initial_dist(), uninformed_values);

    const int cap = config.episode_cap > 0 ? config.episode_cap
                                           : deepsea_episode_cap(point.size);
    AgentConfig agent_config;
    agent_config.beta =
        point.agent == "soft-q" ? config.soft_q_beta : config.k_beta;
    agent_config.sigma = config.sigma;
    agent_config.pseudo_count = config.pseudo_count;

    std::vector<double> times(static_cast<std::size_t>(config.seeds), 0.0);
    std::vector<double> learned(static_cast<std::size_t>(config.seeds), 0.0);
    RegretCurve first_curve;
    parallel_for(config.seeds, config.parallelism, [&](int seed) {
      Rng rng = Rng::derive(config.master_seed, kStreamDeepSea, p, seed);
      auto agent = make_agent(point.agent, prior, agent_config);
      EpisodeLoopOptions options;
      if (config.early_stop) {
        options.stop_below = config.gap_fraction * gap;
      }
      RegretCurve curve = run_episode_loop(*agent, env, cap, rng, options);
      curve.uninformed_gap = gap;
      std::optional<int> t = time_to_learn(curve, config.gap_fraction);
      times[seed] = t ? static_cast<double>(*t) : static_cast<double>(cap);
      learned[seed] = t ? 1.0 : 0.0;
      if (seed == 0 && curves) {
        curve.agent = point.agent;
        curve.env = "deepsea";
        curve.param_n = point.size;
        curve.beta = agent_config.beta;
        curve.sigma = point.agent == "k-learning" ? config.sigma : 0.0;
        curve.seed = seed;
        first_curve = std::move(curve);
      }
    });

    MeanStderr time_ms = mean_stderr(times);
    MeanStderr learned_ms = mean_stderr(learned);
    SummaryRow base;
    base.experiment = "deepsea-sweep";
    base.agent = point.agent;
    base.env = "deepsea";
    base.param_n = point.size;
    base.samples = config.seeds;

    SummaryRow time_row = base;
    time_row.metric = "time_to_learn";
    time_row.value = time_ms.mean;
    time_row.std_error = time_ms.se;
    out.summary.push_back(time_row);

    SummaryRow learned_row = base;
    learned_row.metric = "learned_fraction";
    learned_row.value = learned_ms.mean;
    learned_row.std_error = learned_ms.se;
    out.summary.push_back(learned_row);

    SummaryRow cap_row = base;
    cap_row.metric = "episode_cap";
    cap_row.value = static_cast<double>(cap);
    out.summary.push_back(cap_row);

    SummaryRow gap_row = base;
    gap_row.metric = "uninformed_gap";
    gap_row.value = gap;
    out.summary.push_back(gap_row);

    if (curves) write_curve_rows(*curves, "deepsea-sweep", first_curve);
  }

  CsvWriter summary_writer(out.summary_path, kSummaryHeader);
  write_summary_file(summary_writer, out.summary);
  if (curves) curves->commit();
  return out;
}

BanditTableOutput bandit_table(const BanditTableConfig& config) {
  require(!config.arm_counts.empty(), "bandit_table: empty arm count grid");
  require(config.p_plus >= 0.0 && config.p_plus <= 1.0,
          "bandit_table: p_plus must be in [0, 1]");
  config.search.validate();

  ensure_out_dir(config.out_dir);
  BanditTableOutput out;
  out.summary_path = join_path(config.out_dir, "bandit_table.csv");

  for (int arms : config.arm_counts) {
    require(arms >= 3, "bandit_table: arm counts must be >= 3");
    Problem1Spec spec{arms, config.epsilon};
    const TwoPointBelief prior = make_problem1_prior(spec, config.p_plus);
    BanditKPlan plan = bandit_k_plan(prior, config.search);

    BanditTableRow row;
    row.num_arms = arms;
    row.beta_star = plan.beta_star;
    row.informative_prob = plan.policy.at(0, 0, 1);
    row.objective = log_sum_exp(plan.arm_values) / plan.beta_star;
    out.rows.push_back(row);

    SummaryRow base;
    base.experiment = "bandit-table";
    base.agent = "k-bandit";
    base.env = "problem1-prior";
    base.param_n = arms;
    base.samples = 1;

    SummaryRow beta_row = base;
    beta_row.metric = "beta_star";
    beta_row.value = row.beta_star;
    out.summary.push_back(beta_row);

    SummaryRow prob_row = base;
    prob_row.metric = "informative_arm_prob";
    prob_row.value = row.informative_prob;
    out.summary.push_back(prob_row);

    SummaryRow objective_row = base;
    objective_row.metric = "objective";
    objective_row.value = row.objective;
    out.summary.push_back(objective_row);
  }

  CsvWriter summary_writer(out.summary_path, kSummaryHeader);
  write_summary_file(summary_writer, out.summary);
  return out;
}

namespace {

// Smallest uncertainty constant whose count bonus provably dominates both the
// reward and transition-value uncertainty of `belief` at inverse temperature
// `beta`, assuming levels below the first are terminal (horizon <= 2) and
// each (s, a) is informative about one timestep (layered beliefs). Per (s, a)
// with n visits, pseudo-count floor m = max(n, n0), Gaussian posterior
// variance v_n, and Dirichlet concentration alpha0:
//   reward:      sigma^2 >= m * v_n            (exact Gaussian moment bound)
//   transition:  sigma^2 >= m * span_c^2 / (4 (alpha0 + 1) beta^2)
// where span_c bounds the range over reachable successors of the next-level
// value log-moment function, via either the union bound (log A term) or the
// Gaussian-maximum mean bound (sqrt(2 v log A) term), whichever is smaller.
double dominating_sigma(const Belief& belief, double beta, double floor_sigma,
                        double pseudo_count) {
  const int num_states = belief.num_states();
  const int num_actions = belief.num_actions();
  if (belief.horizon() > 2) {
    throw std::invalid_argument(
        "dominating_sigma: derivation covers terminal-next-level beliefs only");
  }
  auto posterior_variance = [&](int s, int a) {
    return 2.0 * (belief.reward_cgf(s, a, 1.0) - belief.mean_reward(s, a));
  };
  const double log_a = std::log(static_cast<double>(num_actions));
  std::vector<double> c_hi(static_cast<std::size_t>(num_states));
  std::vector<double> c_lo(static_cast<std::size_t>(num_states));
  for (int s = 0; s < num_states; ++s) {
    double chi = -kInf;
    double v_hi = 0.0;
    for (int a = 0; a < num_actions; ++a) {
      chi = std::max(chi, belief.mean_reward(s, a));
      v_hi = std::max(v_hi, posterior_variance(s, a));
    }
    double union_bound = beta * chi + 0.5 * beta * beta * v_hi + log_a;
    double max_bound = beta * (chi + std::sqrt(2.0 * v_hi * log_a)) +
                       0.5 * beta * beta * v_hi;
    c_hi[s] = std::min(union_bound, max_bound);
    c_lo[s] = beta * chi;
  }
  double needed = 0.0;
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      double m = std::max(belief.visit_count(s, a), pseudo_count);
      double cell = m * posterior_variance(s, a);
      if (belief.horizon() >= 2) {
        MeanRowView row = belief.mean_transition(s, a);
        double hi = -kInf;
        double lo = kInf;
        if (row.dense != nullptr || row.uniform_mass > 0.0) {
          for (int s2 = 0; s2 < num_states; ++s2) {
            if (row.dense != nullptr && row.dense[s2] == 0.0) continue;
            hi = std::max(hi, c_hi[s2]);
            lo = std::min(lo, c_lo[s2]);
          }
        } else {
          for (const auto& [s2, mass] : row.extras) {
            if (mass <= 0.0) continue;
            hi = std::max(hi, c_hi[s2]);
            lo = std::min(lo, c_lo[s2]);
          }
        }
        if (hi > lo) {
          double span = hi - lo;
          double alpha0 =
              row.extras_scale > 0.0 ? 1.0 / row.extras_scale : 1.0;
          cell += m * span * span / (4.0 * (alpha0 + 1.0) * beta * beta);
        }
      }
      needed = std::max(needed, cell);
    }
  }
  return std::max(floor_sigma, std::sqrt(needed));
}

}  // namespace

BoundBatteryResult check_bounds(const BoundBatteryConfig& config) {
  require(config.trials >= 1, "check_bounds: trials must be >= 1");
  require(!config.betas.empty(), "check_bounds: empty temperature grid");
  for (double beta : config.betas) {
    require(beta > 0.0, "check_bounds: temperatures must be positive");
  }
  require(config.mc_samples >= 1000, "check_bounds: mc_samples must be >= 1000");
  require(config.max_states >= 1 && config.max_actions >= 1 &&
              config.max_horizon >= 1,
          "check_bounds: shape bounds must be >= 1");
  require(config.max_horizon <= 2,
          "check_bounds: the dominating-uncertainty derivation covers "
          "two-level beliefs only");
  require(config.max_states >= config.max_horizon,
          "check_bounds: need at least one state per level");
  require(config.parallelism >= 1, "check_bounds: parallelism must be >= 1");

  struct TrialResult {
    int value_reports = 0;
    int value_cells = 0;
    int value_failures = 0;
    double value_min_slack = kInf;
    int optimism_reports = 0;
    int optimism_cells = 0;
    int optimism_failures = 0;
    double optimism_min_slack = kInf;
    double min_slack = kInf;
    std::string worst;
  };
  std::vector<TrialResult> trials(static_cast<std::size_t>(config.trials));

  parallel_for(config.trials, config.parallelism, [&](int trial) {
    TrialResult& result = trials[trial];
    Rng gen = Rng::derive(config.master_seed, kStreamBeliefGen, trial, 0);
    const int horizon = 1 + gen.uniform_int(config.max_horizon);
    const int num_states =
        horizon + gen.uniform_int(config.max_states - horizon + 1);
    const int num_actions = 1 + gen.uniform_int(config.max_actions);
    const ConjugateBelief belief =
        make_layered_random_belief(num_states, num_actions, horizon, gen);

    for (std::size_t b = 0; b < config.betas.size(); ++b) {
      KLearningParams params;
      params.beta = config.betas[b];
      params.pseudo_count = config.pseudo_count;
      params.sigma = dominating_sigma(belief, params.beta, config.sigma,
                                      params.pseudo_count);

      Rng value_rng = Rng::derive(config.master_seed, kStreamValueBound, trial, b);
      BoundCheckReport value_report =
          value_bound_check(belief, params, config.mc_samples, value_rng);
      ++result.value_reports;
      result.value_cells += value_report.cells_checked;
      if (!value_report.pass) ++result.value_failures;
      result.value_min_slack =
          std::min(result.value_min_slack, value_report.min_slack);
      if (value_report.min_slack < result.min_slack) {
        result.min_slack = value_report.min_slack;
        result.worst = "trial " + std::to_string(trial) + " beta " +
                       format_double(params.beta) + " value bound h=" +
                       std::to_string(value_report.worst_h) + " s=" +
                       std::to_string(value_report.worst_s);
      }

      Rng optimism_rng = Rng::derive(config.master_seed, kStreamOptimism, trial, b);
      BoundCheckReport optimism_report =
          optimism_check(belief, 1, params, config.mc_samples, optimism_rng);
      ++result.optimism_reports;
      result.optimism_cells += optimism_report.cells_checked;
      if (!optimism_report.pass) ++result.optimism_failures;
      result.optimism_min_slack =
          std::min(result.optimism_min_slack, optimism_report.min_slack);
      if (optimism_report.min_slack < result.min_slack) {
        result.min_slack = optimism_report.min_slack;
        result.worst = "trial " + std::to_string(trial) + " beta " +
                       format_double(params.beta) + " optimism h=" +
                       std::to_string(optimism_report.worst_h) + " s=" +
                       std::to_string(optimism_report.worst_s) + " a=" +
                       std::to_string(optimism_report.worst_a);
      }
    }
  });

  BoundBatteryResult out;
  out.min_slack = kInf;
  int value_reports = 0;
  int value_cells = 0;
  int value_failures = 0;
  double value_min_slack = kInf;
  int optimism_reports = 0;
  int optimism_cells = 0;
  int optimism_failures = 0;
  double optimism_min_slack = kInf;
  for (const TrialResult& result : trials) {
    value_reports += result.value_reports;
    value_cells += result.value_cells;
    value_failures += result.value_failures;
    value_min_slack = std::min(value_min_slack, result.value_min_slack);
    optimism_reports += result.optimism_reports;
    optimism_cells += result.optimism_cells;
    optimism_failures += result.optimism_failures;
    optimism_min_slack = std::min(optimism_min_slack, result.optimism_min_slack);
    if (result.min_slack < out.min_slack) {
      out.min_slack = result.min_slack;
      out.worst_case = result.worst;
    }
  }
  out.checks_run = value_reports + optimism_reports;
  out.failures = value_failures + optimism_failures;

  ensure_out_dir(config.out_dir);
  out.summary_path = join_path(config.out_dir, "check_bounds_summary.csv");
  auto add_row = [&](const std::string& metric, double value) {
    SummaryRow row;
    row.experiment = "check-bounds";
    row.agent = "k-learning";
    row.env = "random-belief";
    row.param_n = config.trials;
    row.metric = metric;
    row.value = value;
    row.samples = config.mc_samples;
    out.summary.push_back(row);
  };
  add_row("value_bound_checks", static_cast<double>(value_reports));
  add_row("value_bound_cells", static_cast<double>(value_cells));
  add_row("value_bound_failures", static_cast<double>(value_failures));
  add_row("value_bound_min_slack", value_min_slack);
  add_row("optimism_checks", static_cast<double>(optimism_reports));
  add_row("optimism_cells", static_cast<double>(optimism_cells));
  add_row("optimism_failures", static_cast<double>(optimism_failures));
  add_row("optimism_min_slack", optimism_min_slack);

  CsvWriter summary_writer(out.summary_path, kSummaryHeader);
  write_summary_file(summary_writer, out.summary);
  return out;
}

}  // namespace bayesrl
