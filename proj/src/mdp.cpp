#include "bayesrl/mdp.hpp"

#include <cmath>
#include <stdexcept>

namespace bayesrl {

namespace {
constexpr double kSimplexTolerance = 1e-9;

void check_simplex(const double* row, int n, const std::string& what) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(row[i] >= 0.0)) {
      throw std::invalid_argument(what + ": negative probability");
    }
    total += row[i];
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw std::invalid_argument(what + ": probabilities sum to " +
                                std::to_string(total));
  }
}
}  // namespace

TabularMdp::TabularMdp(int num_states, int num_actions, int horizon)
    : num_states_(num_states), num_actions_(num_actions), horizon_(horizon) {
  if (num_states < 1 || num_actions < 1 || horizon < 1) {
    throw std::invalid_argument("TabularMdp: S, A, H must all be positive");
  }
  rewards_.resize(static_cast<std::size_t>(num_states) * num_actions);
  transitions_.assign(
      static_cast<std::size_t>(num_states) * num_actions * num_states, 0.0);
  initial_dist_.assign(num_states, 0.0);
}

void TabularMdp::validate() const {
  if (num_states_ < 1 || num_actions_ < 1 || horizon_ < 1) {
    throw std::invalid_argument("TabularMdp: empty model");
  }
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) {
      const RewardModel& r = reward(s, a);
      if (!std::isfinite(r.mean)) {
        throw std::invalid_argument("TabularMdp: non-finite reward mean");
      }
      if (!(r.noise_variance >= 0.0)) {
        throw std::invalid_argument("TabularMdp: negative reward noise variance");
      }
      check_simplex(transition_row(s, a), num_states_, "TabularMdp transition row");
    }
  }
  check_simplex(initial_dist_.data(), num_states_, "TabularMdp initial distribution");
}

void Policy::validate() const {
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < num_states; ++s) {
      double total = 0.0;
      const double* r = row(h, s);
      for (int a = 0; a < num_actions; ++a) {
        if (!(r[a] >= 0.0)) {
          throw std::invalid_argument("Policy: negative action probability");
        }
        total += r[a];
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("Policy: action probabilities sum to " +
                                    std::to_string(total));
      }
    }
  }
}

int Policy::sample_action(int h, int s, Rng& rng) const {
  const double* r = row(h, s);
  double u = rng.uniform();
  double acc = 0.0;
  int last_positive = 0;
  for (int a = 0; a < num_actions; ++a) {
    if (r[a] > 0.0) last_positive = a;
    acc += r[a];
    if (u < acc) return a;
  }
  // Rounding left acc slightly below 1; attribute the sliver to the last
  // action with positive probability.
  return last_positive;
}

}  // namespace bayesrl
