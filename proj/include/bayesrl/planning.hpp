#ifndef BAYESRL_PLANNING_HPP_
#define BAYESRL_PLANNING_HPP_

#include <utility>
#include <vector>

#include "bayesrl/mdp.hpp"
#include "bayesrl/rng.hpp"

// Exact planning and evaluation on a known tabular MDP via backward
// induction. Conventions shared by everything downstream:
//   - terminal values are zero: V[H][s] == 0,
//   - Q[h][s][a] = mean reward(s,a) + sum_s' P(s'|s,a) V[h+1][s'],
//   - V[h][s]    = max_a Q[h][s][a],
//   - argmax ties break to the lowest action index, where "tie" means within
//     tie_tolerance of the row maximum.

namespace bayesrl {

inline constexpr double kGreedyTieTolerance = 1e-9;

// Optimal Q and V for every stage; validates the model first.
std::pair<QTable, ValueTable> optimal_values(const TabularMdp& mdp);

// Value of a fixed stochastic stage policy (backward induction under pi).
ValueTable evaluate_policy(const TabularMdp& mdp, const Policy& policy);

// Deterministic greedy policy extracted from a Q table (probability one on
// the lowest-index action within tie_tolerance of each row max).
Policy greedy_policy(const QTable& q, double tie_tolerance = kGreedyTieTolerance);

// Lowest-index argmax of `row` under the same tie rule.
int greedy_action(const double* row, int n, double tie_tolerance = kGreedyTieTolerance);

// Roll out one episode: sample the start state from rho, then H steps of
// (action ~ pi, next state ~ P, reward ~ reward model). `episode` is stamped
// into each transition record.
std::vector<Transition> sample_episode(const TabularMdp& mdp, const Policy& policy,
                                       int episode, Rng& rng);

// Expected regret of running `policy` for one episode:
//   sum_s rho(s) * (V*[0][s] - V_pi[0][s]).
// Nonnegative up to roundoff; tiny negative roundoff is clamped to zero.
double per_episode_regret(const TabularMdp& mdp, const Policy& policy);

// Same, with the optimal values precomputed (the sweep loop reuses them).
double per_episode_regret(const TabularMdp& mdp, const ValueTable& optimal,
                          const Policy& policy);

}  // namespace bayesrl

#endif  // BAYESRL_PLANNING_HPP_
