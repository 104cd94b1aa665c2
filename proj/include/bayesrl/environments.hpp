#ifndef BAYESRL_ENVIRONMENTS_HPP_
#define BAYESRL_ENVIRONMENTS_HPP_

#include <memory>

#include "bayesrl/mdp.hpp"
#include "bayesrl/posterior.hpp"
#include "bayesrl/rng.hpp"

// Benchmark environment constructors.

namespace bayesrl {

// One-state, one-step bandit with a single informative arm. Arms (0-based):
//   arm 0: deterministic reward 1 in both variants,
//   arm 1: +2 in the "plus" variant, -2 in the "minus" variant,
//   arms 2..N-1: deterministic 1 - epsilon in both variants.
// Only arm 1 distinguishes the variants, so it is the only informative play.
struct Problem1Spec {
  int num_arms = 3;       // N >= 3
  double epsilon = 1e-3;  // distractor shortfall, in (0, 1)
};

// The environment variant: plus == true gives arm 1 reward +2.
TabularMdp make_problem1(const Problem1Spec& spec, bool plus);

// Two-point prior over the variants with P(plus) = p_plus.
TwoPointBelief make_problem1_prior(const Problem1Spec& spec, double p_plus = 0.5);

// N x N grid, horizon N, one episode = one top-to-bottom sweep. The agent
// starts top-left; "descend right" moves down-right at a small per-move cost
// and "descend left" moves down-left for free (columns clamp at the edges).
// Taking the rightmost cell's right move on the final row pays goal_reward,
// so the optimal return is goal_reward - size * move_cost and the best
// reward-free return (always left) is 0.
//
// State index = row * size + col; the agent is on row h at step h. When
// randomize_action_map is set, which of the two action indices means "right"
// is an independent coin flip per state drawn from map_seed.
struct DeepSeaSpec {
  int size = 10;                      // N >= 2
  double move_cost = -1.0;            // cost of one right move; < 0 -> 0.01/N
  double goal_reward = 1.0;
  bool randomize_action_map = false;
  std::uint64_t map_seed = 0;
};

TabularMdp make_deep_sea(const DeepSeaSpec& spec);

// Action meaning "descend right" in state s (identity unless
// randomize_action_map is set).
int deep_sea_right_action(const DeepSeaSpec& spec, int state);

// Fresh conjugate belief matching an environment's shape: N(0,1) reward
// priors with unit observation noise and symmetric Dirichlet(1/S) rows.
ConjugateBelief make_fresh_belief(const TabularMdp& env);

// Uniformly random dense MDP: transition rows and the initial distribution
// are Dirichlet(1) draws, reward means uniform on [-1, 1] with unit
// observation noise. Identical (shape, rng state) gives an identical MDP.
TabularMdp make_random_mdp(int num_states, int num_actions, int horizon, Rng& rng,
                           double reward_noise_variance = 1.0);

// Random belief whose states are partitioned into `horizon` blocks with every
// transition row supported on the next block (cyclically). Each (s, a) pair is
// then visited at most once per episode regardless of the start level, so the
// per-(s, a) posteriors behave as independent per-timestep unknowns — the
// setting in which the count-bonus planner's optimism guarantees hold.
// Requires num_states >= horizon.
ConjugateBelief make_layered_random_belief(int num_states, int num_actions,
                                           int horizon, Rng& rng,
                                           int min_visits = 1,
                                           int max_visits = 3);

// Random lightly-visited belief: a fresh conjugate belief over a random MDP
// that has then observed `min_visits..max_visits` draws (uniform) from the
// true model at every (s, a). Counts stay small so posterior uncertainty
// remains on the scale the exploration bonuses are built for. Unlike the
// layered variant, a state can recur across timesteps, which correlates the
// per-timestep values through the shared posterior.
ConjugateBelief make_random_belief(int num_states, int num_actions, int horizon,
                                   Rng& rng, int min_visits = 1, int max_visits = 3);

}  // namespace bayesrl

#endif  // BAYESRL_ENVIRONMENTS_HPP_
