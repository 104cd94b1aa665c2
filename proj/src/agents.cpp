#include "bayesrl/agents.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bayesrl/numeric.hpp"

namespace bayesrl {

void SoftQParams::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("SoftQParams: beta must be positive");
}

void KLearningParams::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("KLearningParams: beta must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("KLearningParams: sigma must be positive");
  if (!(pseudo_count > 0.0)) {
    throw std::invalid_argument("KLearningParams: pseudo_count must be positive");
  }
}

void BetaSearchParams::validate() const {
  if (!(beta_min > 0.0) || !(beta_max > beta_min)) {
    throw std::invalid_argument("BetaSearchParams: need 0 < beta_min < beta_max");
  }
  if (!(rel_tol > 0.0)) throw std::invalid_argument("BetaSearchParams: rel_tol must be positive");
}

Policy thompson_policy(const Belief& belief, Rng& rng) {
  TabularMdp draw = belief.sample_mdp(rng);
  auto [q, v] = optimal_values(draw);
  (void)v;
  return greedy_policy(q);
}

namespace {

// Expected next-step value under one posterior-mean row. `level_sum` is
// sum_s' next[s'], precomputed once per stage.
double mean_row_expectation(const MeanRowView& row, const double* next, int S,
                            double level_sum) {
  if (row.dense != nullptr) {
    double acc = 0.0;
    for (int i = 0; i < S; ++i) {
      if (row.dense[i] != 0.0) acc += row.dense[i] * next[i];
    }
    return acc;
  }
  double acc = row.uniform_mass * level_sum / S;
  for (const auto& [state, count] : row.extras) {
    acc += row.extras_scale * count * next[state];
  }
  return acc;
}

// Shared backward pass for the soft and count-bonus planners. `bonus` is
// evaluated once per (s, a); the policy row is the Boltzmann distribution of
// the row values at inverse temperature `beta`.
template <typename BonusFn>
void soft_backward_pass(const Belief& belief, double beta, BonusFn&& bonus,
                        QTable& q, ValueTable& v, Policy& policy) {
  const int S = belief.num_states();
  const int A = belief.num_actions();
  const int H = belief.horizon();
  for (int h = H - 1; h >= 0; --h) {
    const double* next = &v.values[static_cast<std::size_t>(h + 1) * S];
    double level_sum = 0.0;
    for (int s = 0; s < S; ++s) level_sum += next[s];
    for (int s = 0; s < S; ++s) {
      double* q_row =
          &q.values[(static_cast<std::size_t>(h) * S + s) * A];
      for (int a = 0; a < A; ++a) {
        q_row[a] = belief.mean_reward(s, a) + bonus(s, a) +
                   mean_row_expectation(belief.mean_transition(s, a), next, S,
                                        level_sum);
      }
      std::span<const double> row_span(q_row, static_cast<std::size_t>(A));
      boltzmann_weights(row_span, beta,
                        {policy.row(h, s), static_cast<std::size_t>(A)});
      double m = q_row[0];
      for (int a = 1; a < A; ++a) m = std::max(m, q_row[a]);
      double z = 0.0;
      for (int a = 0; a < A; ++a) z += std::exp(beta * (q_row[a] - m));
      v.at(h, s) = m + std::log(z) / beta;
    }
  }
}

}  // namespace

SoftQPlan soft_q_plan(const Belief& belief, const SoftQParams& params) {
  params.validate();
  SoftQPlan plan;
  const int S = belief.num_states();
  const int A = belief.num_actions();
  const int H = belief.horizon();
  plan.q = QTable(H, S, A);
  plan.v = ValueTable(H, S);
  plan.policy = Policy(H, S, A);
  soft_backward_pass(belief, params.beta, [](int, int) { return 0.0; }, plan.q,
                     plan.v, plan.policy);
  return plan;
}

Policy soft_q_policy(const Belief& belief, const SoftQParams& params) {
  return soft_q_plan(belief, params).policy;
}

KPlan k_plan(const Belief& belief, int episode, const KLearningParams& params) {
  params.validate();
  if (episode < 1) throw std::invalid_argument("k_plan: episode index starts at 1");
  KPlan plan;
  const int S = belief.num_states();
  const int A = belief.num_actions();
  const int H = belief.horizon();
  plan.k = QTable(H, S, A);
  plan.v = ValueTable(H, S);
  plan.policy = Policy(H, S, A);
  plan.beta_episode = params.beta * std::sqrt(static_cast<double>(episode));
  const double bonus_scale = params.sigma * params.sigma * plan.beta_episode / 2.0;
  soft_backward_pass(
      belief, plan.beta_episode,
      [&](int s, int a) {
        double n = std::max(belief.visit_count(s, a), params.pseudo_count);
        return bonus_scale / n;
      },
      plan.k, plan.v, plan.policy);
  return plan;
}

Policy k_policy(const Belief& belief, int episode, const KLearningParams& params) {
  return k_plan(belief, episode, params).policy;
}

double bandit_optimal_beta(
    const std::vector<std::function<double(double)>>& arm_cgfs,
    const BetaSearchParams& search) {
  search.validate();
  if (arm_cgfs.empty()) {
    throw std::invalid_argument("bandit_optimal_beta: need at least one arm");
  }
  std::vector<double> terms(arm_cgfs.size());
  auto objective = [&](double log_beta) {
    double beta = std::exp(log_beta);
    for (std::size_t a = 0; a < arm_cgfs.size(); ++a) {
      terms[a] = arm_cgfs[a](beta);
    }
    double value = log_sum_exp(terms) / beta;
    if (!std::isfinite(value)) {
      throw std::domain_error("bandit_optimal_beta: objective not finite");
    }
    return value;
  };
  const double lo = std::log(search.beta_min);
  const double hi = std::log(search.beta_max);
  double log_best = golden_section_minimize(objective, lo, hi, search.rel_tol);
  // Converging onto the upper bracket edge means f keeps decreasing in beta;
  // the minimizer is unbounded and the policy limit is greedy.
  if (hi - log_best < 1e-5) return search.unbounded_sentinel;
  return std::exp(log_best);
}

BanditKPlan bandit_k_plan(const Belief& belief, const BetaSearchParams& search) {
  if (belief.horizon() != 1 || belief.num_states() != 1) {
    throw std::invalid_argument("bandit_k_plan: belief must be one-step, one-state");
  }
  const int A = belief.num_actions();
  std::vector<std::function<double(double)>> cgfs;
  cgfs.reserve(A);
  for (int a = 0; a < A; ++a) {
    cgfs.push_back([&belief, a](double beta) { return belief.reward_cgf(0, a, beta); });
  }
  BanditKPlan plan;
  plan.beta_star = bandit_optimal_beta(cgfs, search);
  plan.arm_values.resize(A);
  for (int a = 0; a < A; ++a) plan.arm_values[a] = cgfs[a](plan.beta_star);
  plan.policy = Policy(1, 1, A);
  boltzmann_weights(plan.arm_values, 1.0,
                    {plan.policy.row(0, 0), static_cast<std::size_t>(A)});
  return plan;
}

Policy bandit_k_policy(const Belief& belief, const BetaSearchParams& search) {
  return bandit_k_plan(belief, search).policy;
}

Policy bayes_optimal_problem1(const TwoPointBelief& belief, int episodes_remaining) {
  if (belief.horizon() != 1 || belief.num_states() != 1) {
    throw std::invalid_argument("bayes_optimal_problem1: belief must be one-step, one-state");
  }
  if (episodes_remaining < 1) {
    throw std::invalid_argument("bayes_optimal_problem1: episodes_remaining must be >= 1");
  }
  const int A = belief.num_actions();
  int informative = -1;
  for (int a = 0; a < A; ++a) {
    if (belief.informative(0, a)) {
      if (informative >= 0) {
        throw std::invalid_argument(
            "bayes_optimal_problem1: belief must have exactly one informative arm");
      }
      informative = a;
    }
  }
  if (informative < 0) {
    throw std::invalid_argument("bayes_optimal_problem1: no informative arm");
  }

  int choice;
  if (belief.resolved()) {
    // Greedy on the known variant.
    const TabularMdp& truth = belief.p_plus() == 1.0 ? belief.plus() : belief.minus();
    std::vector<double> means(A);
    for (int a = 0; a < A; ++a) means[a] = truth.reward(0, a).mean;
    choice = greedy_action(means.data(), A);
  } else {
    double p = belief.p_plus();
    if (p * episodes_remaining > 3.0 * (1.0 - p)) {
      choice = informative;
    } else {
      // Best arm whose reward is certain.
      choice = -1;
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        if (a == informative) continue;
        double value = belief.plus().reward(0, a).mean;
        if (value > best + kGreedyTieTolerance ||
            (choice < 0 && value > best)) {
          best = value;
          choice = a;
        }
      }
    }
  }
  Policy policy(1, 1, A);
  policy.at(0, 0, choice) = 1.0;
  return policy;
}

OptimalityEstimate estimate_optimality(const Belief& belief, int samples, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("estimate_optimality: samples must be >= 1");
  const int S = belief.num_states();
  const int A = belief.num_actions();
  const int H = belief.horizon();
  OptimalityEstimate est;
  est.horizon = H;
  est.num_states = S;
  est.num_actions = A;
  est.samples = samples;
  est.action_probs.assign(static_cast<std::size_t>(H) * S * A, 0.0);
  est.value_mean.assign(static_cast<std::size_t>(H) * S, 0.0);
  est.value_variance.assign(static_cast<std::size_t>(H) * S, 0.0);

  // Welford accumulation of V* moments alongside argmax counts.
  std::vector<double> m2(static_cast<std::size_t>(H) * S, 0.0);
  for (int i = 0; i < samples; ++i) {
    TabularMdp draw = belief.sample_mdp(rng);
    auto [q, v] = optimal_values(draw);
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < S; ++s) {
        const double* row =
            &q.values[(static_cast<std::size_t>(h) * S + s) * A];
        int best = greedy_action(row, A);
        est.action_probs[(static_cast<std::size_t>(h) * S + s) * A + best] += 1.0;
        std::size_t hs = static_cast<std::size_t>(h) * S + s;
        double value = v.at(h, s);
        double delta = value - est.value_mean[hs];
        est.value_mean[hs] += delta / (i + 1);
        m2[hs] += delta * (value - est.value_mean[hs]);
      }
    }
  }
  for (auto& p : est.action_probs) p /= samples;
  if (samples > 1) {
    for (std::size_t i = 0; i < m2.size(); ++i) {
      est.value_variance[i] = m2[i] / (samples - 1);
    }
  }
  return est;
}

namespace {

class ThompsonAgent : public Agent {
 public:
  explicit ThompsonAgent(const Belief& prior) : belief_(prior.clone()) {}
  Policy act(int, int, Rng& rng) override { return thompson_policy(*belief_, rng); }
  void observe(const Transition& t) override { belief_->observe(t); }

 private:
  std::unique_ptr<Belief> belief_;
};

// Caches the planned policy while the posterior is unchanged (version()).
class SoftQAgent : public Agent {
 public:
  SoftQAgent(const Belief& prior, SoftQParams params)
      : belief_(prior.clone()), params_(params) {
    params_.validate();
  }
  Policy act(int, int, Rng&) override {
    if (!have_cache_ || cached_version_ != belief_->version()) {
      cache_ = soft_q_policy(*belief_, params_);
      cached_version_ = belief_->version();
      have_cache_ = true;
    }
    return cache_;
  }
  void observe(const Transition& t) override { belief_->observe(t); }

 private:
  std::unique_ptr<Belief> belief_;
  SoftQParams params_;
  Policy cache_;
  std::uint64_t cached_version_ = 0;
  bool have_cache_ = false;
};

class KLearningAgent : public Agent {
 public:
  KLearningAgent(const Belief& prior, KLearningParams params)
      : belief_(prior.clone()), params_(params) {
    params_.validate();
  }
  Policy act(int episode, int, Rng&) override {
    // beta_ep moves every episode, so there is nothing to cache.
    return k_policy(*belief_, episode, params_);
  }
  void observe(const Transition& t) override { belief_->observe(t); }

 private:
  std::unique_ptr<Belief> belief_;
  KLearningParams params_;
};

class KBanditAgent : public Agent {
 public:
  KBanditAgent(const Belief& prior, BetaSearchParams search)
      : belief_(prior.clone()), search_(search) {
    if (belief_->horizon() != 1 || belief_->num_states() != 1) {
      throw std::invalid_argument("k-bandit agent needs a one-step, one-state belief");
    }
  }
  Policy act(int, int, Rng&) override {
    if (!have_cache_ || cached_version_ != belief_->version()) {
      cache_ = bandit_k_policy(*belief_, search_);
      cached_version_ = belief_->version();
      have_cache_ = true;
    }
    return cache_;
  }
  void observe(const Transition& t) override { belief_->observe(t); }

 private:
  std::unique_ptr<Belief> belief_;
  BetaSearchParams search_;
  Policy cache_;
  std::uint64_t cached_version_ = 0;
  bool have_cache_ = false;
};

class BayesOptimalAgent : public Agent {
 public:
  explicit BayesOptimalAgent(const TwoPointBelief& prior)
      : belief_(std::make_unique<TwoPointBelief>(prior)) {}
  Policy act(int episode, int episodes_total, Rng&) override {
    return bayes_optimal_problem1(*belief_, episodes_total - episode + 1);
  }
  void observe(const Transition& t) override { belief_->observe(t); }

 private:
  std::unique_ptr<TwoPointBelief> belief_;
};

// Certainty-equivalent baseline: greedy on the posterior-mean MDP.
class GreedyAgent : public Agent {
 public:
  explicit GreedyAgent(const Belief& prior) : belief_(prior.clone()) {}
  Policy act(int, int, Rng&) override {
    if (!have_cache_ || cached_version_ != belief_->version()) {
      auto [q, v] = optimal_values(belief_->mean_mdp());
      (void)v;
      cache_ = greedy_policy(q);
      cached_version_ = belief_->version();
      have_cache_ = true;
    }
    return cache_;
  }
  void observe(const Transition& t) override { belief_->observe(t); }

 private:
  std::unique_ptr<Belief> belief_;
  Policy cache_;
  std::uint64_t cached_version_ = 0;
  bool have_cache_ = false;
};

}  // namespace

std::unique_ptr<Agent> make_agent(const std::string& name, const Belief& prior,
                                  const AgentConfig& config) {
  if (name == "thompson") return std::make_unique<ThompsonAgent>(prior);
  if (name == "soft-q") {
    return std::make_unique<SoftQAgent>(prior, SoftQParams{config.beta});
  }
  if (name == "k-learning") {
    return std::make_unique<KLearningAgent>(
        prior, KLearningParams{config.beta, config.sigma, config.pseudo_count});
  }
  if (name == "k-bandit") return std::make_unique<KBanditAgent>(prior, config.search);
  if (name == "greedy") return std::make_unique<GreedyAgent>(prior);
  if (name == "bayes-optimal") {
    const auto* two_point = dynamic_cast<const TwoPointBelief*>(&prior);
    if (two_point == nullptr) {
      throw std::invalid_argument("bayes-optimal agent needs a two-point belief");
    }
    return std::make_unique<BayesOptimalAgent>(*two_point);
  }
  throw std::invalid_argument("unknown agent name: " + name);
}

}  // namespace bayesrl
