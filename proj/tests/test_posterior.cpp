#include <cmath>
#include <stdexcept>
#include <vector>

#include "bayesrl/environments.hpp"
#include "bayesrl/numeric.hpp"
#include "bayesrl/posterior.hpp"
#include "bayesrl/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using bayesrl::ConjugateBelief;
using bayesrl::DirichletTransitionPosterior;
using bayesrl::GaussianRewardPosterior;
using bayesrl::MeanRowView;
using bayesrl::Rng;
using bayesrl::TabularMdp;
using bayesrl::Transition;
using bayesrl::TwoPointBelief;

TEST_CASE("Gaussian posterior follows the precision-weighted update") {
  GaussianRewardPosterior post(0.0, 1.0, 1.0);
  CHECK(post.mean() == 0.0);
  CHECK(post.variance() == 1.0);
  CHECK(post.count() == 0);

  // One unit-noise observation of 1.0: precision 1 + 1, mean pulled halfway.
  post.observe(1.0);
  CHECK(post.mean() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(post.variance() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(post.count() == 1);

  // A second observation of 2.0: posterior mean (0 + 1 + 2) / 3.
  post.observe(2.0);
  CHECK(post.mean() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(post.variance() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(post.count() == 2);
}

TEST_CASE("Gaussian posterior CGF matches draws of the latent mean") {
  GaussianRewardPosterior post(0.0, 1.0, 1.0);
  post.observe(1.5);
  post.observe(0.5);

  Rng rng(21);
  const int n = 200000;
  for (double beta : {0.5, 1.0, 2.0}) {
    std::vector<double> scaled(n);
    std::vector<double> weights(n);
    for (int i = 0; i < n; ++i) {
      double x = post.sample_mean(rng);
      scaled[i] = beta * x;
    }
    double mc = bayesrl::log_mean_exp(scaled);
    // Delta-method error of log-mean-exp: sd(exp(beta X)) / (mean * sqrt(n)).
    for (int i = 0; i < n; ++i) weights[i] = std::exp(scaled[i] - mc);
    auto moments = bayesrl::oracles::sample_moments(weights);
    double se = moments.std_error / moments.mean;
    CHECK(std::abs(mc - post.cgf(beta)) < 4.0 * se);
  }
  // And the closed form itself: mean * beta + variance * beta^2 / 2.
  CHECK(post.cgf(2.0) ==
        doctest::Approx(post.mean() * 2.0 + 0.5 * post.variance() * 4.0));
  CHECK(post.cgf(0.0) == 0.0);
}

TEST_CASE("Dirichlet posterior tracks counts above a symmetric base") {
  DirichletTransitionPosterior post(4, 0.25);
  CHECK(post.total_concentration() == doctest::Approx(1.0));
  CHECK(post.count() == 0);
  CHECK_FALSE(post.restricted());

  post.observe(2);
  post.observe(2);
  post.observe(0);
  CHECK(post.count() == 3);
  CHECK(post.total_concentration() == doctest::Approx(4.0));
  CHECK(post.concentration(2) == doctest::Approx(2.25));
  CHECK(post.concentration(1) == doctest::Approx(0.25));

  std::vector<double> mean(4);
  post.mean_row(mean.data());
  CHECK(mean[0] == doctest::Approx(1.25 / 4.0));
  CHECK(mean[1] == doctest::Approx(0.25 / 4.0));
  CHECK(mean[2] == doctest::Approx(2.25 / 4.0));
  CHECK(mean[3] == doctest::Approx(0.25 / 4.0));
  CHECK(mean[0] + mean[1] + mean[2] + mean[3] == doctest::Approx(1.0));

  // Sampled rows live on the simplex and average to the posterior mean.
  Rng rng(22);
  std::vector<double> draw(4), avg(4, 0.0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    post.sample_row(rng, draw.data());
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      REQUIRE(draw[k] >= 0.0);
      total += draw[k];
      avg[k] += draw[k];
    }
    REQUIRE(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(avg[k] / n - mean[k]) < 5.0 * 0.5 / std::sqrt(n));
  }
}

TEST_CASE("restricting a Dirichlet prior pins mass to the support") {
  DirichletTransitionPosterior post(5, 0.2);
  post.restrict_support({1, 3}, 0.5);
  CHECK(post.restricted());
  CHECK(post.total_concentration() == doctest::Approx(1.0));
  CHECK(post.uniform_mean_mass() == 0.0);
  CHECK(post.concentration(1) == doctest::Approx(0.5));
  CHECK(post.concentration(0) == 0.0);

  std::vector<double> mean(5);
  post.mean_row(mean.data());
  CHECK(mean[1] == doctest::Approx(0.5));
  CHECK(mean[3] == doctest::Approx(0.5));
  CHECK(mean[0] + mean[2] + mean[4] == 0.0);

  // Observations off the support are a model violation and must be rejected.
  CHECK_THROWS_AS(post.observe(2), std::invalid_argument);
  post.observe(3);
  post.mean_row(mean.data());
  CHECK(mean[3] == doctest::Approx(1.5 / 2.0));
  CHECK(mean[1] == doctest::Approx(0.5 / 2.0));

  // Sampled rows never leak off the support.
  Rng rng(23);
  std::vector<double> draw(5);
  for (int i = 0; i < 200; ++i) {
    post.sample_row(rng, draw.data());
    CHECK(draw[0] == 0.0);
    CHECK(draw[2] == 0.0);
    CHECK(draw[4] == 0.0);
    CHECK(draw[1] + draw[3] == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Restricting twice, or after data arrived, is a usage error.
  CHECK_THROWS_AS(post.restrict_support({1}, 1.0), std::logic_error);
  DirichletTransitionPosterior late(3, 1.0);
  late.observe(0);
  CHECK_THROWS_AS(late.restrict_support({0, 1}, 0.5), std::logic_error);
  DirichletTransitionPosterior bad(3, 1.0);
  CHECK_THROWS_AS(bad.restrict_support({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bad.restrict_support({0, 0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bad.restrict_support({3}, 0.5), std::invalid_argument);
}

TEST_CASE("conjugate belief updates exactly the observed cell") {
  ConjugateBelief belief(3, 2, 2, {1.0, 0.0, 0.0});
  std::uint64_t v0 = belief.version();
  Transition t{1, 0, 1, 1, 2, 0.8};
  belief.observe(t);
  CHECK(belief.version() != v0);
  CHECK(belief.visit_count(1, 1) == 1.0);
  CHECK(belief.visit_count(0, 0) == 0.0);
  CHECK(belief.mean_reward(1, 1) == doctest::Approx(0.4));
  CHECK(belief.mean_reward(0, 1) == 0.0);

  // The mean-row view reconstructs the full posterior-mean row.
  MeanRowView view = belief.mean_transition(1, 1);
  std::vector<double> dense(3, view.uniform_mass / 3.0);
  for (const auto& [s2, c] : view.extras) dense[s2] += view.extras_scale * c;
  TabularMdp mean = belief.mean_mdp();
  for (int s2 = 0; s2 < 3; ++s2) {
    CHECK(dense[s2] == doctest::Approx(mean.transition(1, 1, s2)).epsilon(1e-12));
  }
  CHECK(dense[2] > dense[0]);  // the observed successor gained mass

  // Clones snapshot: mutating the copy leaves the original untouched.
  auto copy = belief.clone();
  copy->observe(Transition{2, 0, 0, 0, 1, 5.0});
  CHECK(belief.visit_count(0, 0) == 0.0);
  CHECK(copy->visit_count(0, 0) == 1.0);

  // Sampled and mean models are valid MDPs of the right shape.
  Rng rng(24);
  TabularMdp draw = belief.sample_mdp(rng);
  CHECK_NOTHROW(draw.validate());
  CHECK_NOTHROW(mean.validate());
  CHECK(draw.horizon() == 2);
}

TEST_CASE("two-point belief mixes, resolves, and exposes its CGF") {
  bayesrl::Problem1Spec spec;
  spec.num_arms = 3;
  TwoPointBelief belief = make_problem1_prior(spec, 0.5);
  CHECK(belief.p_plus() == 0.5);
  CHECK_FALSE(belief.resolved());
  CHECK(belief.informative(0, 1));
  CHECK_FALSE(belief.informative(0, 0));

  // Mixture mean of the informative arm: 0.5 * 2 + 0.5 * (-2) = 0.
  CHECK(belief.mean_reward(0, 1) == doctest::Approx(0.0));
  CHECK(belief.mean_reward(0, 0) == doctest::Approx(1.0));

  // CGF of a two-point posterior: log(p e^{2b} + (1-p) e^{-2b}).
  for (double beta : {0.3, 1.0, 2.5}) {
    double direct = std::log(0.5 * std::exp(2.0 * beta) +
                             0.5 * std::exp(-2.0 * beta));
    CHECK(belief.reward_cgf(0, 1, beta) ==
          doctest::Approx(direct).epsilon(1e-12));
    // Uninformative arms are deterministic: CGF is linear in beta.
    CHECK(belief.reward_cgf(0, 0, beta) == doctest::Approx(beta));
  }

  // Observing the informative arm resolves to the matching candidate.
  TwoPointBelief resolved_plus = belief;
  resolved_plus.observe(Transition{1, 0, 0, 1, 0, 2.0});
  CHECK(resolved_plus.p_plus() == 1.0);
  CHECK(resolved_plus.resolved());
  TwoPointBelief resolved_minus = belief;
  resolved_minus.observe(Transition{1, 0, 0, 1, 0, -2.0});
  CHECK(resolved_minus.p_plus() == 0.0);

  // Observing a safe arm only counts the visit.
  TwoPointBelief still = belief;
  still.observe(Transition{1, 0, 0, 0, 0, 1.0});
  CHECK_FALSE(still.resolved());
  CHECK(still.visit_count(0, 0) == 1.0);

  // Posterior draws pick each candidate with its probability.
  Rng rng(25);
  int plus_draws = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    TabularMdp m = belief.sample_mdp(rng);
    if (m.reward(0, 1).mean == 2.0) ++plus_draws;
  }
  CHECK(std::abs(plus_draws / static_cast<double>(n) - 0.5) < 0.015);
}
