#ifndef BAYESRL_POSTERIOR_HPP_
#define BAYESRL_POSTERIOR_HPP_

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "bayesrl/mdp.hpp"
#include "bayesrl/rng.hpp"

// Beliefs over unknown tabular MDPs.
//
// Two concrete families:
//   - ConjugateBelief: independent Gaussian posteriors over mean rewards
//     (known observation noise) and Dirichlet posteriors over transition
//     rows, one per (state, action).
//   - TwoPointBelief: exactly two candidate MDPs sharing dynamics and
//     differing in rewards; a Bernoulli posterior over which one is real.
//
// Beliefs are value-semantic (clone() snapshots); each experiment run owns
// and mutates exactly one instance.

namespace bayesrl {

// Posterior over the mean reward of one (s, a) under Gaussian observations
// with known noise variance. Standard precision-weighted update.
class GaussianRewardPosterior {
 public:
  GaussianRewardPosterior() = default;
  GaussianRewardPosterior(double prior_mean, double prior_variance,
                          double obs_noise_variance);

  void observe(double reward);

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double obs_noise_variance() const { return obs_noise_variance_; }
  int count() const { return count_; }

  // Cumulant generating function of the posterior over the mean reward:
  // mean*beta + variance*beta^2/2.
  double cgf(double beta) const {
    return mean_ * beta + 0.5 * variance_ * beta * beta;
  }

  // Draw one value of the latent mean.
  double sample_mean(Rng& rng) const { return rng.normal(mean_, variance_); }

 private:
  double mean_ = 0.0;
  double variance_ = 1.0;
  double obs_noise_variance_ = 1.0;
  int count_ = 0;
};

// Dirichlet posterior over one transition row, stored as a symmetric base
// concentration plus sparse per-successor increments (observations only ever
// add 1 to a single successor, and rows are wide, so this keeps both updates
// and posterior-mean queries O(#observed successors)).
class DirichletTransitionPosterior {
 public:
  DirichletTransitionPosterior() = default;
  DirichletTransitionPosterior(int num_states, double symmetric_concentration);

  void observe(int next_state);

  // Limits the prior to the given successor set: `per_entry_concentration`
  // on each listed state, zero concentration (hence zero posterior mass)
  // everywhere else. Observations outside the support are rejected. Only
  // valid before the first observation.
  void restrict_support(const std::vector<int>& support,
                        double per_entry_concentration);

  int num_states() const { return num_states_; }
  int count() const { return count_; }
  bool restricted() const { return restricted_; }
  double concentration(int next_state) const;
  double total_concentration() const {
    return base_ * prior_entries_ + static_cast<double>(count_);
  }
  // Probability mass of the posterior mean that is spread uniformly over all
  // successors (the base concentration's share); zero once the support is
  // restricted, because the prior mass then lives on the listed entries.
  double uniform_mean_mass() const {
    return restricted_ ? 0.0 : base_ * num_states_ / total_concentration();
  }
  // Sparse per-successor concentration above the uniform floor, sorted by
  // state index: observation counts in the unrestricted case, prior mass
  // plus counts once restricted. Scaled by 1/total_concentration() these are
  // the posterior-mean shares beyond uniform_mean_mass().
  const std::vector<std::pair<int, double>>& observed_counts() const {
    return observed_;
  }

  void mean_row(double* out) const;
  void sample_row(Rng& rng, double* out) const;

 private:
  int num_states_ = 0;
  double base_ = 0.0;
  int prior_entries_ = 0;  // states carrying prior mass (S, or |support|)
  bool restricted_ = false;
  int count_ = 0;
  std::vector<std::pair<int, double>> observed_;  // (state, mass above floor)
};

// One posterior-mean transition row as seen by planners. When `dense` is
// set it points at the full row and the other fields are ignored; otherwise
//   P(s'|s,a) = uniform_mass / S + extras_scale * count(s')
// where `extras` lists the (successor, count) pairs with nonzero count.
struct MeanRowView {
  double uniform_mass = 0.0;
  double extras_scale = 0.0;
  std::span<const std::pair<int, double>> extras;
  const double* dense = nullptr;
};

// Interface shared by every belief family.
class Belief {
 public:
  virtual ~Belief() = default;

  virtual int num_states() const = 0;
  virtual int num_actions() const = 0;
  virtual int horizon() const = 0;
  virtual const std::vector<double>& initial_dist() const = 0;

  // One plausible MDP drawn from the posterior.
  virtual TabularMdp sample_mdp(Rng& rng) const = 0;
  // The certainty-equivalent MDP (posterior means everywhere).
  virtual TabularMdp mean_mdp() const = 0;

  virtual double mean_reward(int s, int a) const = 0;
  virtual MeanRowView mean_transition(int s, int a) const = 0;
  virtual double visit_count(int s, int a) const = 0;
  // CGF of the posterior over the mean reward at (s, a).
  virtual double reward_cgf(int s, int a, double beta) const = 0;

  virtual void observe(const Transition& t) = 0;

  // Monotone counter that changes whenever the posterior distribution
  // changes. Policies that are pure functions of the posterior may cache on
  // it; visit counts alone do not bump it.
  virtual std::uint64_t version() const = 0;

  virtual std::unique_ptr<Belief> clone() const = 0;
};

// Prior hyperparameters for ConjugateBelief. A negative
// transition_concentration means "1 / num_states per successor".
struct ConjugatePrior {
  double reward_mean = 0.0;
  double reward_variance = 1.0;
  double obs_noise_variance = 1.0;
  double transition_concentration = -1.0;
};

class ConjugateBelief : public Belief {
 public:
  ConjugateBelief(int num_states, int num_actions, int horizon,
                  std::vector<double> initial_dist, ConjugatePrior prior = {});

  int num_states() const override { return num_states_; }
  int num_actions() const override { return num_actions_; }
  int horizon() const override { return horizon_; }
  const std::vector<double>& initial_dist() const override { return initial_dist_; }

  TabularMdp sample_mdp(Rng& rng) const override;
  TabularMdp mean_mdp() const override;
  double mean_reward(int s, int a) const override {
    return rewards_[idx(s, a)].mean();
  }
  MeanRowView mean_transition(int s, int a) const override;
  double visit_count(int s, int a) const override {
    return static_cast<double>(rewards_[idx(s, a)].count());
  }
  double reward_cgf(int s, int a, double beta) const override {
    return rewards_[idx(s, a)].cgf(beta);
  }
  void observe(const Transition& t) override;
  std::uint64_t version() const override { return version_; }
  std::unique_ptr<Belief> clone() const override {
    return std::make_unique<ConjugateBelief>(*this);
  }

  const GaussianRewardPosterior& reward_posterior(int s, int a) const {
    return rewards_[idx(s, a)];
  }
  const DirichletTransitionPosterior& transition_posterior(int s, int a) const {
    return transitions_[idx(s, a)];
  }

  // Limits the transition prior of (s, a) to the given successor set, with
  // total prior mass 1 split evenly over it. Only valid before (s, a) has
  // been observed; later observations outside the set are rejected.
  void restrict_successors(int s, int a, const std::vector<int>& support);

 private:
  int idx(int s, int a) const { return s * num_actions_ + a; }

  int num_states_;
  int num_actions_;
  int horizon_;
  std::vector<double> initial_dist_;
  std::vector<GaussianRewardPosterior> rewards_;
  std::vector<DirichletTransitionPosterior> transitions_;
  std::uint64_t version_ = 0;
};

// Belief over exactly two candidate MDPs ("plus" holds with probability
// p_plus). The candidates must share shape, dynamics, and initial
// distribution; rewards must be deterministic. Observing a reward at any
// (s, a) where the candidates disagree resolves the belief to whichever
// candidate predicted the nearer value; observations elsewhere change
// nothing but the visit counts.
class TwoPointBelief : public Belief {
 public:
  TwoPointBelief(TabularMdp plus, TabularMdp minus, double p_plus);

  double p_plus() const { return p_plus_; }
  bool resolved() const { return p_plus_ == 0.0 || p_plus_ == 1.0; }
  const TabularMdp& plus() const { return plus_; }
  const TabularMdp& minus() const { return minus_; }
  // True at the (s, a) pairs where observing the reward is informative.
  bool informative(int s, int a) const {
    return plus_.reward(s, a).mean != minus_.reward(s, a).mean;
  }

  int num_states() const override { return plus_.num_states(); }
  int num_actions() const override { return plus_.num_actions(); }
  int horizon() const override { return plus_.horizon(); }
  const std::vector<double>& initial_dist() const override {
    return plus_.initial_dist();
  }

  TabularMdp sample_mdp(Rng& rng) const override;
  TabularMdp mean_mdp() const override;
  double mean_reward(int s, int a) const override {
    return p_plus_ * plus_.reward(s, a).mean +
           (1.0 - p_plus_) * minus_.reward(s, a).mean;
  }
  MeanRowView mean_transition(int s, int a) const override {
    MeanRowView view;
    view.dense = plus_.transition_row(s, a);
    return view;
  }
  double visit_count(int s, int a) const override {
    return counts_[s * plus_.num_actions() + a];
  }
  double reward_cgf(int s, int a, double beta) const override;
  void observe(const Transition& t) override;
  std::uint64_t version() const override { return version_; }
  std::unique_ptr<Belief> clone() const override {
    return std::make_unique<TwoPointBelief>(*this);
  }

 private:
  TabularMdp plus_;
  TabularMdp minus_;
  double p_plus_;
  std::vector<double> counts_;
  std::uint64_t version_ = 0;
};

}  // namespace bayesrl

#endif  // BAYESRL_POSTERIOR_HPP_
