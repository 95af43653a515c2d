#pragma once

// Learners for COAML actors: structured RL (critic-guided Fenchel-Young
// updates), structured imitation and a PPO baseline over Gaussian score
// perturbations.

#include "srl/critics.hpp"
#include "srl/env.hpp"
#include "srl/models.hpp"
#include "srl/perturb.hpp"

#include <algorithm>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace srl {

struct UpdateStats {
  double loss = 0.0;
  int samples = 0;
};

/// Batch-mean loss and its gradient with respect to the actor parameters.
struct ActorGradient {
  double loss = 0.0;
  Vector params;
};

/// Values of the SRL perturbation parameters for one update.
struct SrlStepParams {
  int candidates = 40;  // m
  double sigma_b = 1.0;
  double tau = 1.0;
  double eps = 1.0;
  int loss_samples = 20;  // M
  double lr = 1e-3;

  void validate() const;
};

struct SilStepParams {
  double eps = 1.0;
  int loss_samples = 20;
  double lr = 1e-3;

  void validate() const;
};

/// Per-sample PPO quantities for a given ratio and advantage.
struct PpoTerms {
  double unclipped = 0.0;
  double clipped = 0.0;
  double surrogate = 0.0;  // min of the two
  /// d surrogate / d ratio: advantage when the unclipped branch is active, else 0.
  double ratio_gradient = 0.0;
};

PpoTerms ppo_terms(double ratio, double advantage, double clip_eps);

/// sum_i [-log(sigma sqrt(2 pi)) - (eta_i - theta_i)^2 / (2 sigma^2)].
double gaussian_log_density(const Vector& eta, const Vector& theta, double sigma);

template <CombinatorialEnv E>
Vector actor_scores(const E& env, const Model& actor, const typename E::State& s) {
  return score_rows(actor, env.actor_features(s));
}

struct Exploration {
  Vector action;
  Vector theta;
  Vector eta;
};

/// One perturbed score eta ~ N(theta, sigma_f^2 I) and its action f(eta, s).
/// sigma_f = 0 is the deterministic policy f(theta, s).
template <CombinatorialEnv E>
Exploration act_explore(const E& env, const Model& actor, const typename E::State& s, double sigma_f, Rng& rng) {
  if (!(sigma_f >= 0.0)) throw std::invalid_argument("sigma_f must be >= 0");
  Exploration out;
  out.theta = actor_scores(env, actor, s);
  out.eta = sigma_f > 0.0 ? gaussian_perturb(out.theta, {sigma_f, 1}, rng).front() : out.theta;
  out.action = env.maximize(out.eta, s);
  return out;
}

template <CombinatorialEnv E>
Vector policy_action(const E& env, const Model& actor, const typename E::State& s) {
  return env.maximize(actor_scores(env, actor, s), s);
}

/// Critic-guided target action for one state: m candidates f(theta + sigma_b Z),
/// deduplicated, scored by the critic and mixed with softmax(q / tau).
struct SrlTarget {
  std::vector<Vector> candidates;  // unique
  std::vector<int> counts;
  std::vector<double> q;
  TargetAction target;
};

template <CombinatorialEnv E>
SrlTarget srl_target(const E& env, const Critic<typename E::State>& critic, const typename E::State& s,
                     const Vector& theta, int m, double sigma_b, double tau, Rng& rng) {
  SrlTarget out;
  std::map<std::vector<double>, std::size_t> seen;
  for (const Vector& eta : gaussian_perturb(theta, {sigma_b, m}, rng)) {
    Vector a = env.maximize(eta, s);
    std::vector<double> key(a.data(), a.data() + a.size());
    auto [it, inserted] = seen.emplace(std::move(key), out.candidates.size());
    if (inserted) {
      out.q.push_back(critic.q(s, a));
      out.candidates.push_back(std::move(a));
      out.counts.push_back(1);
    } else {
      ++out.counts[it->second];
    }
  }
  out.target = softmax_target_counted(out.candidates, out.counts, out.q, tau);
  return out;
}

/// Batch-mean Fenchel-Young loss toward critic-guided targets.
template <CombinatorialEnv E>
ActorGradient srl_actor_gradient(const E& env, const Model& actor, const Critic<typename E::State>& critic,
                                 const TransitionBatch<typename E::State>& batch, const SrlStepParams& p, Rng& rng) {
  p.validate();
  if (batch.empty()) throw std::invalid_argument("srl_actor_update: empty batch");
  ActorGradient out{0.0, Vector::Zero(actor.params.values.size())};
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (const auto* t : batch) {
    const Matrix x = env.actor_features(t->state);
    const Vector theta = score_rows(actor, x);
    const SrlTarget target = srl_target(env, critic, t->state, theta, p.candidates, p.sigma_b, p.tau, rng);
    const auto fy = fy_loss_and_grad(
        theta, target.target.values, [&](const Vector& v) { return env.maximize(v, t->state); }, p.eps,
        p.loss_samples, rng);
    out.loss += fy.value * scale;
    out.params += score_rows_backward(actor, x, fy.gradient * scale);
  }
  return out;
}

/// One Adam step on srl_actor_gradient. Returns the mean loss.
template <CombinatorialEnv E>
UpdateStats srl_actor_update(const E& env, Model& actor, const Critic<typename E::State>& critic,
                             const TransitionBatch<typename E::State>& batch, const SrlStepParams& p, Rng& rng) {
  const ActorGradient g = srl_actor_gradient(env, actor, critic, batch, p, rng);
  adam_step(actor.params, g.params, p.lr);
  return {g.loss, static_cast<int>(batch.size())};
}

/// Imitation sample: a state and the expert's action in it.
template <class State>
struct Demonstration {
  State state;
  Vector action;
};

/// Batch-mean Fenchel-Young loss toward expert actions.
template <CombinatorialEnv E>
ActorGradient sil_gradient(const E& env, const Model& actor,
                           std::span<const Demonstration<typename E::State>* const> batch, const SilStepParams& p,
                           Rng& rng) {
  p.validate();
  if (batch.empty()) throw std::invalid_argument("sil_update: empty batch");
  ActorGradient out{0.0, Vector::Zero(actor.params.values.size())};
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (const auto* d : batch) {
    const Matrix x = env.actor_features(d->state);
    const Vector theta = score_rows(actor, x);
    const auto fy = fy_loss_and_grad(
        theta, d->action, [&](const Vector& v) { return env.maximize(v, d->state); }, p.eps, p.loss_samples, rng);
    out.loss += fy.value * scale;
    out.params += score_rows_backward(actor, x, fy.gradient * scale);
  }
  return out;
}

template <CombinatorialEnv E>
UpdateStats sil_update(const E& env, Model& actor, std::span<const Demonstration<typename E::State>* const> batch,
                       const SilStepParams& p, Rng& rng) {
  const ActorGradient g = sil_gradient(env, actor, batch, p, rng);
  adam_step(actor.params, g.params, p.lr);
  return {g.loss, static_cast<int>(batch.size())};
}

template <class State>
double mean_sigma_f(const TransitionBatch<State>& batch) {
  double s = 0.0;
  for (const auto* t : batch) s += t->sigma_f_used;
  return batch.empty() ? 0.0 : s / static_cast<double>(batch.size());
}

/// Negative mean clipped surrogate and its gradient. Transitions must carry
/// the collected eta and the old scores theta_old; the advantage is
/// Q(s, f(eta)) - Q(s, f(theta_old)).
template <CombinatorialEnv E>
ActorGradient ppo_gradient(const E& env, const Model& actor, const Critic<typename E::State>& critic,
                           const TransitionBatch<typename E::State>& batch, double clip_eps, double sigma_f_avg) {
  if (batch.empty()) throw std::invalid_argument("ppo_update: empty batch");
  if (!(sigma_f_avg > 0.0)) throw std::invalid_argument("ppo_update: average sigma_f must be positive");
  if (!(clip_eps >= 0.0)) throw std::invalid_argument("ppo_update: clip_eps must be >= 0");
  ActorGradient out{0.0, Vector::Zero(actor.params.values.size())};
  const double scale = 1.0 / static_cast<double>(batch.size());
  const double var = sigma_f_avg * sigma_f_avg;
  for (const auto* t : batch) {
    if (t->eta.size() == 0 || t->theta_old.size() == 0)
      throw std::invalid_argument("ppo_update: transition lacks eta or theta_old");
    const Matrix x = env.actor_features(t->state);
    const Vector theta = score_rows(actor, x);
    const double log_ratio = gaussian_log_density(t->eta, theta, sigma_f_avg) -
                             gaussian_log_density(t->eta, t->theta_old, sigma_f_avg);
    const double ratio = std::exp(log_ratio);
    const double advantage = critic.q(t->state, t->action) - critic.q(t->state, env.maximize(t->theta_old, t->state));
    const PpoTerms terms = ppo_terms(ratio, advantage, clip_eps);
    out.loss -= terms.surrogate * scale;
    if (terms.ratio_gradient != 0.0) {
      // d ratio / d theta = ratio * (eta - theta) / sigma^2; descend on -surrogate.
      const Vector upstream = -terms.ratio_gradient * ratio * (t->eta - theta) / var;
      out.params += score_rows_backward(actor, x, upstream * scale);
    }
  }
  return out;
}

template <CombinatorialEnv E>
UpdateStats ppo_update(const E& env, Model& actor, const Critic<typename E::State>& critic,
                       const TransitionBatch<typename E::State>& batch, double clip_eps, double sigma_f_avg,
                       double lr) {
  const ActorGradient g = ppo_gradient(env, actor, critic, batch, clip_eps, sigma_f_avg);
  adam_step(actor.params, g.params, lr);
  return {g.loss, static_cast<int>(batch.size())};
}

/// Each critic ensemble member regresses on its own target copy.
template <class State>
CriticStats critic_td_update(Critic<State>& critic, const TransitionBatch<State>& batch,
                             const NextActionFn<State>& next_action, double gamma, double lr, Rng& rng) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  return critic.update(batch, next_action, gamma, lr, rng);
}

template <class State>
void target_sync(Critic<State>& critic) {
  critic.sync_targets();
}

}  // namespace srl
