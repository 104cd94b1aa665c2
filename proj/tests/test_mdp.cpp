#include <cmath>
#include <stdexcept>
#include <vector>

#include "bayesrl/mdp.hpp"
#include "bayesrl/rng.hpp"
#include "doctest.h"

using bayesrl::Policy;
using bayesrl::QTable;
using bayesrl::RewardModel;
using bayesrl::Rng;
using bayesrl::TabularMdp;
using bayesrl::ValueTable;

namespace {

TabularMdp two_state_chain() {
  TabularMdp mdp(2, 2, 3);
  mdp.initial_dist() = {1.0, 0.0};
  for (int s = 0; s < 2; ++s) {
    for (int a = 0; a < 2; ++a) {
      mdp.reward(s, a) = RewardModel::deterministic(s + 0.1 * a);
      mdp.transition(s, a, a) = 1.0;  // action a jumps to state a
    }
  }
  return mdp;
}

}  // namespace

TEST_CASE("reward models sample exactly when deterministic, noisily otherwise") {
  Rng rng(11);
  RewardModel det = RewardModel::deterministic(2.5);
  for (int i = 0; i < 5; ++i) CHECK(det.sample(rng) == 2.5);

  RewardModel noisy = RewardModel::gaussian(1.0, 4.0);
  const int n = 100000;
  double total = 0.0, total_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = noisy.sample(rng);
    total += r;
    total_sq += r * r;
  }
  double mean = total / n;
  double var = total_sq / n - mean * mean;
  CHECK(std::abs(mean - 1.0) < 4.0 * std::sqrt(4.0 / n));
  CHECK(var == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("validate accepts a well-formed model and names what is broken") {
  TabularMdp good = two_state_chain();
  CHECK_NOTHROW(good.validate());

  TabularMdp off_row = two_state_chain();
  off_row.transition(1, 0, 0) = 0.6;  // row now sums to 1.6
  CHECK_THROWS_AS(off_row.validate(), std::invalid_argument);

  TabularMdp neg_prob = two_state_chain();
  neg_prob.transition(0, 1, 0) = -0.25;
  neg_prob.transition(0, 1, 1) = 1.25;
  CHECK_THROWS_AS(neg_prob.validate(), std::invalid_argument);

  TabularMdp bad_init = two_state_chain();
  bad_init.initial_dist() = {0.5, 0.2};
  CHECK_THROWS_AS(bad_init.validate(), std::invalid_argument);

  TabularMdp bad_reward = two_state_chain();
  bad_reward.reward(0, 0).mean = std::nan("");
  CHECK_THROWS_AS(bad_reward.validate(), std::invalid_argument);

  TabularMdp bad_noise = two_state_chain();
  bad_noise.reward(0, 0).noise_variance = -1.0;
  CHECK_THROWS_AS(bad_noise.validate(), std::invalid_argument);

  CHECK_THROWS_AS(TabularMdp(0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(TabularMdp(1, 1, 0), std::invalid_argument);
}

TEST_CASE("table indexing round-trips distinct cell values") {
  QTable q(2, 3, 4);
  ValueTable v(2, 3);
  Policy pi(2, 3, 4);
  for (int h = 0; h < 2; ++h) {
    for (int s = 0; s < 3; ++s) {
      v.at(h, s) = 100 * h + s;
      for (int a = 0; a < 4; ++a) {
        q.at(h, s, a) = 100 * h + 10 * s + a;
        pi.at(h, s, a) = 0.25;
      }
    }
  }
  CHECK(q.at(1, 2, 3) == 123);
  CHECK(q.at(0, 0, 1) == 1);
  CHECK(q.values.size() == 2u * 3u * 4u);
  CHECK(v.at(1, 2) == 102);
  // The value table carries one extra terminal slice, identically zero.
  CHECK(v.values.size() == 3u * 3u);
  for (int s = 0; s < 3; ++s) CHECK(v.at(2, s) == 0.0);
  CHECK_NOTHROW(pi.validate());
  CHECK(pi.row(1, 2) == pi.probs.data() + (1 * 3 + 2) * 4);
}

TEST_CASE("policy validation and sampling follow the row distributions") {
  Policy pi(1, 1, 3);
  pi.at(0, 0, 0) = 0.2;
  pi.at(0, 0, 1) = 0.5;
  pi.at(0, 0, 2) = 0.3;
  CHECK_NOTHROW(pi.validate());

  Rng rng(13);
  int counts[3] = {0};
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[pi.sample_action(0, 0, rng)];
  CHECK(std::abs(counts[0] / static_cast<double>(n) - 0.2) < 0.01);
  CHECK(std::abs(counts[1] / static_cast<double>(n) - 0.5) < 0.01);
  CHECK(std::abs(counts[2] / static_cast<double>(n) - 0.3) < 0.01);

  Policy onehot(1, 1, 3);
  onehot.at(0, 0, 2) = 1.0;
  for (int i = 0; i < 10; ++i) CHECK(onehot.sample_action(0, 0, rng) == 2);

  Policy bad(1, 1, 2);
  bad.at(0, 0, 0) = 0.7;
  bad.at(0, 0, 1) = 0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
