#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "bayesrl/environments.hpp"
#include "bayesrl/planning.hpp"
#include "bayesrl/rng.hpp"
#include "doctest.h"

using bayesrl::ConjugateBelief;
using bayesrl::DeepSeaSpec;
using bayesrl::deep_sea_right_action;
using bayesrl::make_deep_sea;
using bayesrl::make_fresh_belief;
using bayesrl::make_layered_random_belief;
using bayesrl::make_problem1;
using bayesrl::make_random_belief;
using bayesrl::make_random_mdp;
using bayesrl::optimal_values;
using bayesrl::Policy;
using bayesrl::Problem1Spec;
using bayesrl::Rng;
using bayesrl::TabularMdp;

TEST_CASE("the one-informative-arm bandit has the documented payoffs") {
  Problem1Spec spec;
  spec.num_arms = 5;
  spec.epsilon = 1e-3;
  TabularMdp plus = make_problem1(spec, true);
  TabularMdp minus = make_problem1(spec, false);
  CHECK_NOTHROW(plus.validate());
  CHECK_NOTHROW(minus.validate());
  CHECK(plus.num_states() == 1);
  CHECK(plus.num_actions() == 5);
  CHECK(plus.horizon() == 1);

  CHECK(plus.reward(0, 0).mean == 1.0);
  CHECK(plus.reward(0, 1).mean == 2.0);
  CHECK(minus.reward(0, 1).mean == -2.0);
  for (int a = 2; a < 5; ++a) {
    CHECK(plus.reward(0, a).mean == doctest::Approx(1.0 - 1e-3));
    CHECK(minus.reward(0, a).mean == plus.reward(0, a).mean);
  }
  CHECK(minus.reward(0, 0).mean == 1.0);

  // Rewards are noiseless and the single state self-loops.
  for (int a = 0; a < 5; ++a) {
    CHECK(plus.reward(0, a).noise_variance == 0.0);
    CHECK(plus.transition(0, a, 0) == 1.0);
  }

  // The optimal values of the two variants: 2 with the bonus, 1 without.
  auto [qp, vp] = optimal_values(plus);
  auto [qm, vm] = optimal_values(minus);
  CHECK(vp.at(0, 0) == doctest::Approx(2.0));
  CHECK(vm.at(0, 0) == doctest::Approx(1.0));

  Problem1Spec bad = spec;
  bad.num_arms = 2;
  CHECK_THROWS_AS(make_problem1(bad, true), std::invalid_argument);
  bad = spec;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(make_problem1(bad, true), std::invalid_argument);
}

TEST_CASE("descend-right grid pays only along the full right diagonal") {
  for (int n : {4, 7}) {
    DeepSeaSpec spec;
    spec.size = n;
    TabularMdp mdp = make_deep_sea(spec);
    CHECK_NOTHROW(mdp.validate());
    CHECK(mdp.num_states() == n * n);
    CHECK(mdp.num_actions() == 2);
    CHECK(mdp.horizon() == n);

    // Always descending right: optimal return goal - N * (0.01 / N) = 0.99.
    auto [q, v] = optimal_values(mdp);
    CHECK(v.at(0, 0) == doctest::Approx(0.99).epsilon(1e-12));

    // Always descending left costs and earns nothing.
    Policy left(n, n * n, 2);
    for (int h = 0; h < n; ++h) {
      for (int s = 0; s < n * n; ++s) {
        int right = deep_sea_right_action(spec, s);
        left.at(h, s, 1 - right) = 1.0;
      }
    }
    CHECK(evaluate_policy(mdp, left).at(0, 0) == doctest::Approx(0.0));

    // The right action is strictly better exactly on the reachable diagonal
    // (elsewhere descending left is free and right costs).
    for (int h = 0; h < n; ++h) {
      int diag = h * n + h;
      int right = deep_sea_right_action(spec, diag);
      CHECK(q.at(h, diag, right) > q.at(h, diag, 1 - right));
    }
  }
}

TEST_CASE("the action map scrambles labels without changing the values") {
  DeepSeaSpec plain;
  plain.size = 6;
  DeepSeaSpec scrambled = plain;
  scrambled.randomize_action_map = true;
  scrambled.map_seed = 99;

  auto [qa, va] = optimal_values(make_deep_sea(plain));
  auto [qb, vb] = optimal_values(make_deep_sea(scrambled));
  CHECK(va.at(0, 0) == doctest::Approx(vb.at(0, 0)).epsilon(1e-12));

  // The map is a deterministic function of (seed, state) and not constant.
  std::set<int> seen;
  for (int s = 0; s < 36; ++s) {
    int r1 = deep_sea_right_action(scrambled, s);
    int r2 = deep_sea_right_action(scrambled, s);
    CHECK(r1 == r2);
    seen.insert(r1);
  }
  CHECK(seen.size() == 2);
  CHECK(deep_sea_right_action(plain, 17) == 1);

  DeepSeaSpec bad;
  bad.size = 1;
  CHECK_THROWS_AS(make_deep_sea(bad), std::invalid_argument);
}

TEST_CASE("random models validate and are a pure function of the stream") {
  Rng a(31), b(31);
  TabularMdp m1 = make_random_mdp(4, 3, 2, a);
  TabularMdp m2 = make_random_mdp(4, 3, 2, b);
  CHECK_NOTHROW(m1.validate());
  for (int s = 0; s < 4; ++s) {
    for (int act = 0; act < 3; ++act) {
      CHECK(m1.reward(s, act).mean == m2.reward(s, act).mean);
      for (int s2 = 0; s2 < 4; ++s2) {
        CHECK(m1.transition(s, act, s2) == m2.transition(s, act, s2));
      }
    }
  }
}

TEST_CASE("fresh beliefs match the environment shape with zero counts") {
  TabularMdp env = make_deep_sea(DeepSeaSpec{.size = 3});
  ConjugateBelief belief = make_fresh_belief(env);
  CHECK(belief.num_states() == 9);
  CHECK(belief.num_actions() == 2);
  CHECK(belief.horizon() == 3);
  CHECK(belief.initial_dist() == env.initial_dist());
  for (int s = 0; s < 9; ++s) {
    for (int a = 0; a < 2; ++a) {
      CHECK(belief.visit_count(s, a) == 0.0);
      CHECK(belief.mean_reward(s, a) == 0.0);
    }
  }
}

TEST_CASE("random lightly-visited beliefs carry 1..3 visits per pair") {
  Rng rng(32);
  ConjugateBelief belief = make_random_belief(3, 2, 2, rng);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) {
      CHECK(belief.visit_count(s, a) >= 1.0);
      CHECK(belief.visit_count(s, a) <= 3.0);
    }
  }
  CHECK_NOTHROW(belief.mean_mdp().validate());
}

TEST_CASE("layered beliefs route every row into the next state block") {
  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    int horizon = 1 + rng.uniform_int(2);
    int num_states = horizon + rng.uniform_int(3 - horizon + 1);
    int num_actions = 1 + rng.uniform_int(3);
    ConjugateBelief belief =
        make_layered_random_belief(num_states, num_actions, horizon, rng);
    CHECK(belief.horizon() == horizon);
    TabularMdp mean = belief.mean_mdp();
    CHECK_NOTHROW(mean.validate());

    // Recover each state's block as the support of its outgoing rows, then
    // check the supports form a partition routed block -> next block.
    std::vector<std::set<int>> supports(num_states);
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < num_actions; ++a) {
        CHECK(belief.transition_posterior(s, a).restricted());
        CHECK(belief.visit_count(s, a) >= 1.0);
        CHECK(belief.visit_count(s, a) <= 3.0);
        for (int s2 = 0; s2 < num_states; ++s2) {
          if (mean.transition(s, a, s2) > 0.0) supports[s].insert(s2);
        }
      }
      CHECK_FALSE(supports[s].empty());
    }
    // All actions of a state share one support, and with two levels a state
    // never appears in its own support (rows always switch block).
    if (horizon == 2) {
      for (int s = 0; s < num_states; ++s) {
        CHECK(supports[s].count(s) == 0);
      }
    }
  }
  Rng r2(34);
  CHECK_THROWS_AS(make_layered_random_belief(1, 2, 2, r2), std::invalid_argument);
  CHECK_THROWS_AS(make_layered_random_belief(3, 2, 2, r2, 2, 1),
                  std::invalid_argument);
}
