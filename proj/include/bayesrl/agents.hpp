#ifndef BAYESRL_AGENTS_HPP_
#define BAYESRL_AGENTS_HPP_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bayesrl/mdp.hpp"
#include "bayesrl/planning.hpp"
#include "bayesrl/posterior.hpp"
#include "bayesrl/rng.hpp"

// Exploration policies computed from a belief, and the per-run Agent objects
// the experiment loop drives. Three families are compared throughout:
//
//   posterior sampling   draw one MDP from the belief, act greedily in it;
//   soft value backup    plan on the certainty-equivalent (posterior mean)
//                        MDP with a log-sum-exp maximum and a Boltzmann
//                        policy at inverse temperature beta;
//   count-bonus backup   like the soft backup but on values augmented with
//                        an uncertainty bonus sigma^2 * beta_ep / (2 n(s,a)),
//                        at an inverse temperature beta_ep = beta * sqrt(ep)
//                        that sharpens as episodes accumulate.
//
// For one-step problems the count-bonus family has an exact analytic form
// driven by per-arm cumulant generating functions; see bandit_optimal_beta
// and bandit_k_plan.

namespace bayesrl {

struct SoftQParams {
  double beta = 1.0;  // inverse temperature, > 0
  void validate() const;
};

struct KLearningParams {
  double beta = 1.0;          // base inverse temperature, > 0
  double sigma = 1.0;         // bonus scale, > 0
  double pseudo_count = 1.0;  // floor for the bonus denominator, > 0
  void validate() const;
};

// Draw an MDP from the belief and return the greedy policy of its optimal
// Q-values (lowest-index tie-break).
Policy thompson_policy(const Belief& belief, Rng& rng);

// Soft backward induction on the posterior-mean MDP:
//   Q[h] = r_mean + P_mean V[h+1],   V[h] = (1/beta) log sum_a exp(beta Q[h]),
// with policy rows proportional to exp(beta Q[h]).
struct SoftQPlan {
  QTable q;
  ValueTable v;
  Policy policy;
};
SoftQPlan soft_q_plan(const Belief& belief, const SoftQParams& params);
Policy soft_q_policy(const Belief& belief, const SoftQParams& params);

// Count-bonus backward induction at episode `episode` (1-based):
//   beta_ep = beta * sqrt(episode)
//   K[h]    = r_mean + sigma^2 beta_ep / (2 max(n, pseudo_count)) + P_mean V[h+1]
//   V[h]    = (1/beta_ep) log sum_a exp(beta_ep K[h])
// with policy rows proportional to exp(beta_ep K[h]).
struct KPlan {
  QTable k;
  ValueTable v;
  Policy policy;
  double beta_episode = 0.0;
};
KPlan k_plan(const Belief& belief, int episode, const KLearningParams& params);
Policy k_policy(const Belief& belief, int episode, const KLearningParams& params);

// One-step analytic form. Given per-arm CGFs G_a(beta), minimizes
//   f(beta) = (1/beta) log sum_a exp(G_a(beta))
// over log-spaced beta in [beta_min, beta_max] by golden section. If the
// minimum sits on the upper bracket edge the objective is treated as
// unbounded below in beta and `unbounded_sentinel` is returned (the policy
// limit is then greedy). Throws std::domain_error if the objective is not
// finite somewhere in the bracket.
struct BetaSearchParams {
  double beta_min = 1e-4;
  double beta_max = 1e4;
  double rel_tol = 1e-8;
  double unbounded_sentinel = 1e6;
  void validate() const;
};
double bandit_optimal_beta(
    const std::vector<std::function<double(double)>>& arm_cgfs,
    const BetaSearchParams& search = {});

// Policy over arms proportional to exp(G_a(beta_star)) for a one-step,
// one-state belief.
struct BanditKPlan {
  double beta_star = 0.0;
  std::vector<double> arm_values;  // G_a(beta_star)
  Policy policy;
};
BanditKPlan bandit_k_plan(const Belief& belief, const BetaSearchParams& search = {});
Policy bandit_k_policy(const Belief& belief, const BetaSearchParams& search = {});

// Exact Bayes-optimal play for the two-point bandit: while unresolved,
// play the informative arm iff p_plus * episodes_remaining > 3 * (1-p_plus)
// (the expected value of resolving now beats the expected cost); otherwise
// play the best known safe arm. Once resolved, play greedily.
Policy bayes_optimal_problem1(const TwoPointBelief& belief, int episodes_remaining);

// Monte-Carlo estimate, over `samples` posterior draws, of the probability
// that each action is optimal at each (h, s), along with per-(h, s) sample
// moments of the drawn optimal values.
struct OptimalityEstimate {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  int samples = 0;
  std::vector<double> action_probs;     // [h][s][a]
  std::vector<double> value_mean;       // [h][s]
  std::vector<double> value_variance;   // [h][s], unbiased sample variance

  double prob(int h, int s, int a) const {
    return action_probs[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
  }
  double mean(int h, int s) const {
    return value_mean[static_cast<std::size_t>(h) * num_states + s];
  }
  double variance(int h, int s) const {
    return value_variance[static_cast<std::size_t>(h) * num_states + s];
  }
};
OptimalityEstimate estimate_optimality(const Belief& belief, int samples, Rng& rng);

// A stateful agent: one per experiment run. act() may be stochastic;
// observe() feeds back every transition of the episode just played.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual Policy act(int episode, int episodes_total, Rng& rng) = 0;
  virtual void observe(const Transition& t) = 0;
};

// Plays a fixed policy forever and learns nothing.
class FixedPolicyAgent : public Agent {
 public:
  explicit FixedPolicyAgent(Policy policy) : policy_(std::move(policy)) {}
  Policy act(int, int, Rng&) override { return policy_; }
  void observe(const Transition&) override {}

 private:
  Policy policy_;
};

// Agent names accepted by make_agent and the CLI.
inline constexpr const char* kAgentNames[] = {
    "bayes-optimal", "thompson", "soft-q", "k-learning", "k-bandit", "greedy"};

struct AgentConfig {
  double beta = 1.0;
  double sigma = 1.0;
  double pseudo_count = 1.0;
  BetaSearchParams search;
};

// Builds a fresh agent owning a clone of `prior`. Throws
// std::invalid_argument for unknown names or a belief the agent cannot use
// (bayes-optimal needs a two-point belief; k-bandit needs a one-step,
// one-state belief).
std::unique_ptr<Agent> make_agent(const std::string& name, const Belief& prior,
                                  const AgentConfig& config = {});

}  // namespace bayesrl

#endif  // BAYESRL_AGENTS_HPP_
