#include "bayesrl/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bayesrl/numeric.hpp"

namespace bayesrl {

GaussianRewardPosterior::GaussianRewardPosterior(double prior_mean,
                                                 double prior_variance,
                                                 double obs_noise_variance)
    : mean_(prior_mean),
      variance_(prior_variance),
      obs_noise_variance_(obs_noise_variance) {
  if (!(prior_variance > 0.0)) {
    throw std::invalid_argument("GaussianRewardPosterior: prior variance must be positive");
  }
  if (!(obs_noise_variance > 0.0)) {
    throw std::invalid_argument("GaussianRewardPosterior: noise variance must be positive");
  }
}

void GaussianRewardPosterior::observe(double reward) {
  double prior_precision = 1.0 / variance_;
  double posterior_precision = prior_precision + 1.0 / obs_noise_variance_;
  mean_ = (mean_ * prior_precision + reward / obs_noise_variance_) /
          posterior_precision;
  variance_ = 1.0 / posterior_precision;
  ++count_;
}

DirichletTransitionPosterior::DirichletTransitionPosterior(
    int num_states, double symmetric_concentration)
    : num_states_(num_states),
      base_(symmetric_concentration),
      prior_entries_(num_states) {
  if (num_states < 1) {
    throw std::invalid_argument("DirichletTransitionPosterior: need at least one state");
  }
  if (!(symmetric_concentration > 0.0)) {
    throw std::invalid_argument("DirichletTransitionPosterior: concentration must be positive");
  }
}

void DirichletTransitionPosterior::restrict_support(
    const std::vector<int>& support, double per_entry_concentration) {
  if (count_ > 0 || restricted_) {
    throw std::logic_error(
        "DirichletTransitionPosterior: support can only be restricted once, "
        "before any observation");
  }
  if (support.empty()) {
    throw std::invalid_argument("DirichletTransitionPosterior: empty support");
  }
  if (!(per_entry_concentration > 0.0)) {
    throw std::invalid_argument("DirichletTransitionPosterior: concentration must be positive");
  }
  std::vector<int> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= num_states_) {
      throw std::invalid_argument("DirichletTransitionPosterior: support state out of range");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw std::invalid_argument("DirichletTransitionPosterior: duplicate support state");
    }
  }
  restricted_ = true;
  base_ = per_entry_concentration;
  prior_entries_ = static_cast<int>(sorted.size());
  observed_.clear();
  observed_.reserve(sorted.size());
  for (int s : sorted) observed_.push_back({s, per_entry_concentration});
}

void DirichletTransitionPosterior::observe(int next_state) {
  if (next_state < 0 || next_state >= num_states_) {
    throw std::invalid_argument("DirichletTransitionPosterior: successor out of range");
  }
  auto it = std::lower_bound(
      observed_.begin(), observed_.end(), next_state,
      [](const std::pair<int, double>& e, int s) { return e.first < s; });
  if (it != observed_.end() && it->first == next_state) {
    it->second += 1.0;
  } else if (restricted_) {
    throw std::invalid_argument(
        "DirichletTransitionPosterior: successor outside the restricted support");
  } else {
    observed_.insert(it, {next_state, 1.0});
  }
  ++count_;
}

double DirichletTransitionPosterior::concentration(int next_state) const {
  for (const auto& [s, c] : observed_) {
    if (s == next_state) return restricted_ ? c : base_ + c;
  }
  return restricted_ ? 0.0 : base_;
}

void DirichletTransitionPosterior::mean_row(double* out) const {
  double total = total_concentration();
  double floor = restricted_ ? 0.0 : base_ / total;
  for (int i = 0; i < num_states_; ++i) out[i] = floor;
  for (const auto& [s, c] : observed_) out[s] += c / total;
}

void DirichletTransitionPosterior::sample_row(Rng& rng, double* out) const {
  double total = 0.0;
  if (restricted_) {
    for (int i = 0; i < num_states_; ++i) out[i] = 0.0;
    for (const auto& [s, c] : observed_) {
      out[s] = rng.gamma(c);
      total += out[s];
    }
    if (total <= 0.0) {
      double u = 1.0 / static_cast<double>(observed_.size());
      for (const auto& [s, c] : observed_) out[s] = u;
      return;
    }
    for (const auto& [s, c] : observed_) out[s] /= total;
    return;
  }
  std::size_t e = 0;
  for (int i = 0; i < num_states_; ++i) {
    double alpha = base_;
    if (e < observed_.size() && observed_[e].first == i) {
      alpha += observed_[e].second;
      ++e;
    }
    out[i] = rng.gamma(alpha);
    total += out[i];
  }
  if (total <= 0.0) {
    double u = 1.0 / num_states_;
    for (int i = 0; i < num_states_; ++i) out[i] = u;
    return;
  }
  for (int i = 0; i < num_states_; ++i) out[i] /= total;
}

ConjugateBelief::ConjugateBelief(int num_states, int num_actions, int horizon,
                                 std::vector<double> initial_dist,
                                 ConjugatePrior prior)
    : num_states_(num_states),
      num_actions_(num_actions),
      horizon_(horizon),
      initial_dist_(std::move(initial_dist)) {
  if (num_states < 1 || num_actions < 1 || horizon < 1) {
    throw std::invalid_argument("ConjugateBelief: S, A, H must all be positive");
  }
  if (static_cast<int>(initial_dist_.size()) != num_states) {
    throw std::invalid_argument("ConjugateBelief: initial distribution size mismatch");
  }
  double concentration = prior.transition_concentration > 0.0
                             ? prior.transition_concentration
                             : 1.0 / num_states;
  int pairs = num_states * num_actions;
  rewards_.assign(pairs, GaussianRewardPosterior(prior.reward_mean,
                                                 prior.reward_variance,
                                                 prior.obs_noise_variance));
  transitions_.assign(pairs,
                      DirichletTransitionPosterior(num_states, concentration));
}

TabularMdp ConjugateBelief::sample_mdp(Rng& rng) const {
  TabularMdp mdp(num_states_, num_actions_, horizon_);
  mdp.initial_dist() = initial_dist_;
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) {
      const auto& reward = rewards_[idx(s, a)];
      mdp.reward(s, a) = RewardModel::gaussian(reward.sample_mean(rng),
                                               reward.obs_noise_variance());
      transitions_[idx(s, a)].sample_row(rng, mdp.transition_row(s, a));
    }
  }
  return mdp;
}

TabularMdp ConjugateBelief::mean_mdp() const {
  TabularMdp mdp(num_states_, num_actions_, horizon_);
  mdp.initial_dist() = initial_dist_;
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) {
      mdp.reward(s, a) = RewardModel::deterministic(rewards_[idx(s, a)].mean());
      transitions_[idx(s, a)].mean_row(mdp.transition_row(s, a));
    }
  }
  return mdp;
}

MeanRowView ConjugateBelief::mean_transition(int s, int a) const {
  const auto& post = transitions_[idx(s, a)];
  MeanRowView view;
  view.uniform_mass = post.uniform_mean_mass();
  view.extras_scale = 1.0 / post.total_concentration();
  view.extras = post.observed_counts();
  return view;
}

void ConjugateBelief::restrict_successors(int s, int a,
                                          const std::vector<int>& support) {
  if (s < 0 || s >= num_states_ || a < 0 || a >= num_actions_) {
    throw std::invalid_argument("ConjugateBelief: state-action out of range");
  }
  transitions_[idx(s, a)].restrict_support(
      support, 1.0 / static_cast<double>(support.size()));
}

void ConjugateBelief::observe(const Transition& t) {
  if (t.state < 0 || t.state >= num_states_ || t.action < 0 ||
      t.action >= num_actions_) {
    throw std::invalid_argument("ConjugateBelief: transition out of range");
  }
  rewards_[idx(t.state, t.action)].observe(t.reward);
  transitions_[idx(t.state, t.action)].observe(t.next_state);
  ++version_;
}

TwoPointBelief::TwoPointBelief(TabularMdp plus, TabularMdp minus, double p_plus)
    : plus_(std::move(plus)), minus_(std::move(minus)), p_plus_(p_plus) {
  plus_.validate();
  minus_.validate();
  if (plus_.num_states() != minus_.num_states() ||
      plus_.num_actions() != minus_.num_actions() ||
      plus_.horizon() != minus_.horizon()) {
    throw std::invalid_argument("TwoPointBelief: candidate shapes differ");
  }
  if (!(p_plus >= 0.0 && p_plus <= 1.0)) {
    throw std::invalid_argument("TwoPointBelief: p_plus outside [0, 1]");
  }
  for (int s = 0; s < plus_.num_states(); ++s) {
    if (std::abs(plus_.initial_dist()[s] - minus_.initial_dist()[s]) > 1e-12) {
      throw std::invalid_argument("TwoPointBelief: initial distributions differ");
    }
    for (int a = 0; a < plus_.num_actions(); ++a) {
      if (plus_.reward(s, a).noise_variance != 0.0 ||
          minus_.reward(s, a).noise_variance != 0.0) {
        throw std::invalid_argument("TwoPointBelief: rewards must be deterministic");
      }
      for (int s2 = 0; s2 < plus_.num_states(); ++s2) {
        if (std::abs(plus_.transition(s, a, s2) - minus_.transition(s, a, s2)) >
            1e-12) {
          throw std::invalid_argument("TwoPointBelief: dynamics differ");
        }
      }
    }
  }
  counts_.assign(
      static_cast<std::size_t>(plus_.num_states()) * plus_.num_actions(), 0.0);
}

TabularMdp TwoPointBelief::sample_mdp(Rng& rng) const {
  return rng.uniform() < p_plus_ ? plus_ : minus_;
}

TabularMdp TwoPointBelief::mean_mdp() const {
  TabularMdp mdp = plus_;
  for (int s = 0; s < mdp.num_states(); ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      mdp.reward(s, a) = RewardModel::deterministic(mean_reward(s, a));
    }
  }
  return mdp;
}

double TwoPointBelief::reward_cgf(int s, int a, double beta) const {
  double rp = plus_.reward(s, a).mean;
  double rm = minus_.reward(s, a).mean;
  if (rp == rm || resolved()) {
    return mean_reward(s, a) * beta;
  }
  double terms[2] = {std::log(p_plus_) + beta * rp,
                     std::log(1.0 - p_plus_) + beta * rm};
  return log_sum_exp(terms);
}

void TwoPointBelief::observe(const Transition& t) {
  int s = t.state, a = t.action;
  if (s < 0 || s >= plus_.num_states() || a < 0 || a >= plus_.num_actions()) {
    throw std::invalid_argument("TwoPointBelief: transition out of range");
  }
  counts_[s * plus_.num_actions() + a] += 1.0;
  if (!informative(s, a)) return;
  double d_plus = std::abs(t.reward - plus_.reward(s, a).mean);
  double d_minus = std::abs(t.reward - minus_.reward(s, a).mean);
  double resolved_p = d_plus <= d_minus ? 1.0 : 0.0;
  if (p_plus_ != resolved_p) {
    p_plus_ = resolved_p;
    ++version_;
  }
}

}  // namespace bayesrl
