#include "bayesrl/environments.hpp"

#include <algorithm>
#include <stdexcept>

namespace bayesrl {

TabularMdp make_problem1(const Problem1Spec& spec, bool plus) {
  if (spec.num_arms < 3) {
    throw std::invalid_argument("make_problem1: need at least three arms");
  }
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0)) {
    throw std::invalid_argument("make_problem1: epsilon must lie in (0, 1)");
  }
  TabularMdp mdp(1, spec.num_arms, 1);
  mdp.initial_dist()[0] = 1.0;
  mdp.reward(0, 0) = RewardModel::deterministic(1.0);
  mdp.reward(0, 1) = RewardModel::deterministic(plus ? 2.0 : -2.0);
  for (int a = 2; a < spec.num_arms; ++a) {
    mdp.reward(0, a) = RewardModel::deterministic(1.0 - spec.epsilon);
  }
  for (int a = 0; a < spec.num_arms; ++a) mdp.transition(0, a, 0) = 1.0;
  return mdp;
}

TwoPointBelief make_problem1_prior(const Problem1Spec& spec, double p_plus) {
  return TwoPointBelief(make_problem1(spec, true), make_problem1(spec, false),
                        p_plus);
}

int deep_sea_right_action(const DeepSeaSpec& spec, int state) {
  if (!spec.randomize_action_map) return 1;
  Rng rng = Rng::derive(spec.map_seed, 0x5EA, static_cast<std::uint64_t>(state));
  return static_cast<int>(rng.next_u32() & 1u);
}

TabularMdp make_deep_sea(const DeepSeaSpec& spec) {
  const int n = spec.size;
  if (n < 2) throw std::invalid_argument("make_deep_sea: size must be at least 2");
  const double cost = spec.move_cost < 0.0 ? 0.01 / n : spec.move_cost;
  TabularMdp mdp(n * n, 2, n);
  mdp.initial_dist()[0] = 1.0;

  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      int s = row * n + col;
      int next_row = std::min(row + 1, n - 1);
      int right = deep_sea_right_action(spec, s);
      for (int a = 0; a < 2; ++a) {
        bool moves_right = (a == right);
        int next_col = moves_right ? std::min(col + 1, n - 1) : std::max(col - 1, 0);
        mdp.transition(s, a, next_row * n + next_col) = 1.0;
        double reward = moves_right ? -cost : 0.0;
        if (moves_right && row == n - 1 && col == n - 1) {
          reward += spec.goal_reward;
        }
        mdp.reward(s, a) = RewardModel::deterministic(reward);
      }
    }
  }
  return mdp;
}

ConjugateBelief make_fresh_belief(const TabularMdp& env) {
  return ConjugateBelief(env.num_states(), env.num_actions(), env.horizon(),
                         env.initial_dist());
}

TabularMdp make_random_mdp(int num_states, int num_actions, int horizon, Rng& rng,
                           double reward_noise_variance) {
  TabularMdp mdp(num_states, num_actions, horizon);
  std::vector<double> ones(num_states, 1.0);
  rng.dirichlet(ones, mdp.initial_dist());
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      mdp.reward(s, a) = RewardModel::gaussian(2.0 * rng.uniform() - 1.0,
                                               reward_noise_variance);
      rng.dirichlet(ones, {mdp.transition_row(s, a),
                           static_cast<std::size_t>(num_states)});
    }
  }
  return mdp;
}

ConjugateBelief make_layered_random_belief(int num_states, int num_actions,
                                           int horizon, Rng& rng,
                                           int min_visits, int max_visits) {
  if (min_visits < 0 || max_visits < min_visits) {
    throw std::invalid_argument("make_layered_random_belief: bad visit bounds");
  }
  if (num_states < horizon) {
    throw std::invalid_argument(
        "make_layered_random_belief: need at least one state per level");
  }
  // Random composition of the states into `horizon` contiguous blocks: pick
  // horizon-1 distinct cut points among the num_states-1 interior gaps.
  std::vector<int> gaps(static_cast<std::size_t>(num_states - 1));
  for (std::size_t i = 0; i < gaps.size(); ++i) gaps[i] = static_cast<int>(i) + 1;
  for (std::size_t i = gaps.size(); i > 1; --i) {
    std::swap(gaps[i - 1], gaps[rng.uniform_int(static_cast<int>(i))]);
  }
  std::vector<int> starts(static_cast<std::size_t>(horizon) + 1);
  starts.front() = 0;
  starts.back() = num_states;
  for (int b = 1; b < horizon; ++b) starts[b] = gaps[b - 1];
  std::sort(starts.begin(), starts.end());
  std::vector<int> block_of(static_cast<std::size_t>(num_states));
  std::vector<std::vector<int>> blocks(static_cast<std::size_t>(horizon));
  for (int b = 0; b < horizon; ++b) {
    for (int s = starts[b]; s < starts[b + 1]; ++s) {
      block_of[s] = b;
      blocks[b].push_back(s);
    }
  }

  TabularMdp truth(num_states, num_actions, horizon);
  for (int s = starts[0]; s < starts[1]; ++s) {
    truth.initial_dist()[s] = 1.0 / static_cast<double>(starts[1] - starts[0]);
  }
  for (int s = 0; s < num_states; ++s) {
    const std::vector<int>& next_block = blocks[(block_of[s] + 1) % horizon];
    std::vector<double> ones(next_block.size(), 1.0);
    std::vector<double> mass(next_block.size());
    for (int a = 0; a < num_actions; ++a) {
      truth.reward(s, a) = RewardModel::gaussian(2.0 * rng.uniform() - 1.0, 1.0);
      rng.dirichlet(ones, mass);
      double* row = truth.transition_row(s, a);
      for (int i = 0; i < num_states; ++i) row[i] = 0.0;
      for (std::size_t i = 0; i < next_block.size(); ++i) {
        row[next_block[i]] = mass[i];
      }
    }
  }
  truth.validate();

  ConjugateBelief belief = make_fresh_belief(truth);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      belief.restrict_successors(s, a, blocks[(block_of[s] + 1) % horizon]);
    }
  }
  const int spread = max_visits - min_visits + 1;
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      int visits = min_visits + rng.uniform_int(spread);
      for (int k = 0; k < visits; ++k) {
        const double* row = truth.transition_row(s, a);
        double u = rng.uniform();
        double acc = 0.0;
        int next = blocks[(block_of[s] + 1) % horizon].back();
        for (int s2 = 0; s2 < num_states; ++s2) {
          acc += row[s2];
          if (u < acc) {
            next = s2;
            break;
          }
        }
        Transition t{0, 0, s, a, next, truth.reward(s, a).sample(rng)};
        belief.observe(t);
      }
    }
  }
  return belief;
}

ConjugateBelief make_random_belief(int num_states, int num_actions, int horizon,
                                   Rng& rng, int min_visits, int max_visits) {
  if (min_visits < 0 || max_visits < min_visits) {
    throw std::invalid_argument("make_random_belief: bad visit bounds");
  }
  TabularMdp truth = make_random_mdp(num_states, num_actions, horizon, rng);
  ConjugateBelief belief = make_fresh_belief(truth);
  const int spread = max_visits - min_visits + 1;
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      int visits = min_visits + rng.uniform_int(spread);
      for (int k = 0; k < visits; ++k) {
        const double* row = truth.transition_row(s, a);
        double u = rng.uniform();
        double acc = 0.0;
        int next = num_states - 1;
        for (int s2 = 0; s2 < num_states; ++s2) {
          acc += row[s2];
          if (u < acc) {
            next = s2;
            break;
          }
        }
        Transition t{0, 0, s, a, next, truth.reward(s, a).sample(rng)};
        belief.observe(t);
      }
    }
  }
  return belief;
}

}  // namespace bayesrl
