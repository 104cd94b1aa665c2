#ifndef BAYESRL_MDP_HPP_
#define BAYESRL_MDP_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "bayesrl/rng.hpp"

// Finite-horizon tabular Markov decision processes and the dense tables used
// by the planners. All tables are flat row-major vectors; horizons are short
// (H <= ~20) and state counts small (S <= ~400), so no sparse or external
// linear-algebra machinery is warranted.

namespace bayesrl {

// Per-(state, action) reward distribution: mean plus Gaussian observation
// noise. noise_variance == 0 means the reward is deterministic.
struct RewardModel {
  double mean = 0.0;
  double noise_variance = 0.0;

  static RewardModel deterministic(double value) { return {value, 0.0}; }
  static RewardModel gaussian(double mean, double noise_variance) {
    return {mean, noise_variance};
  }
  double sample(Rng& rng) const {
    return noise_variance == 0.0 ? mean : rng.normal(mean, noise_variance);
  }
};

// M = (S, A, R, P, H, rho). Transition rows live in `transitions` as
// [state][action][next_state]; `initial_dist` is rho.
class TabularMdp {
 public:
  TabularMdp() = default;
  TabularMdp(int num_states, int num_actions, int horizon);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int horizon() const { return horizon_; }

  RewardModel& reward(int s, int a) { return rewards_[idx(s, a)]; }
  const RewardModel& reward(int s, int a) const { return rewards_[idx(s, a)]; }

  double& transition(int s, int a, int next) {
    return transitions_[idx(s, a) * num_states_ + next];
  }
  double transition(int s, int a, int next) const {
    return transitions_[idx(s, a) * num_states_ + next];
  }
  // Whole row P(.|s, a), length num_states.
  const double* transition_row(int s, int a) const {
    return transitions_.data() + idx(s, a) * num_states_;
  }
  double* transition_row(int s, int a) {
    return transitions_.data() + idx(s, a) * num_states_;
  }

  std::vector<double>& initial_dist() { return initial_dist_; }
  const std::vector<double>& initial_dist() const { return initial_dist_; }

  // Throws std::invalid_argument when shapes are inconsistent, a transition
  // row or the initial distribution is off the simplex by more than 1e-9,
  // or any reward mean / noise variance is invalid.
  void validate() const;

 private:
  int idx(int s, int a) const { return s * num_actions_ + a; }

  int num_states_ = 0;
  int num_actions_ = 0;
  int horizon_ = 0;
  std::vector<RewardModel> rewards_;
  std::vector<double> transitions_;
  std::vector<double> initial_dist_;
};

// Stage-indexed action-value table Q[h][s][a], h in [0, H).
struct QTable {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> values;

  QTable() = default;
  QTable(int h, int s, int a)
      : horizon(h), num_states(s), num_actions(a),
        values(static_cast<std::size_t>(h) * s * a, 0.0) {}
  double& at(int h, int s, int a) {
    return values[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
  }
  double at(int h, int s, int a) const {
    return values[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
  }
};

// State-value table V[h][s] for h in [0, H]; the slice at h == H is the
// terminal boundary and is identically zero.
struct ValueTable {
  int horizon = 0;
  int num_states = 0;
  std::vector<double> values;

  ValueTable() = default;
  ValueTable(int h, int s)
      : horizon(h), num_states(s),
        values(static_cast<std::size_t>(h + 1) * s, 0.0) {}
  double& at(int h, int s) {
    return values[static_cast<std::size_t>(h) * num_states + s];
  }
  double at(int h, int s) const {
    return values[static_cast<std::size_t>(h) * num_states + s];
  }
};

// Stochastic stage policy pi[h][s][a]; every (h, s) row is a distribution
// over actions.
struct Policy {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> probs;

  Policy() = default;
  Policy(int h, int s, int a)
      : horizon(h), num_states(s), num_actions(a),
        probs(static_cast<std::size_t>(h) * s * a, 0.0) {}
  double& at(int h, int s, int a) {
    return probs[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
  }
  double at(int h, int s, int a) const {
    return probs[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
  }
  const double* row(int h, int s) const {
    return probs.data() + (static_cast<std::size_t>(h) * num_states + s) * num_actions;
  }
  double* row(int h, int s) {
    return probs.data() + (static_cast<std::size_t>(h) * num_states + s) * num_actions;
  }

  // Throws std::invalid_argument if any row is off the simplex by > 1e-9.
  void validate() const;
  // Draw an action from pi[h][s].
  int sample_action(int h, int s, Rng& rng) const;
};

// One observed step of experience, as consumed by belief updates.
struct Transition {
  int episode = 0;  // 1-based episode index
  int step = 0;     // 0-based stage h
  int state = 0;
  int action = 0;
  int next_state = 0;
  double reward = 0.0;
};

}  // namespace bayesrl

#endif  // BAYESRL_MDP_HPP_
