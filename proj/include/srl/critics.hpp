#pragma once

// Q-value estimators used by SRL and PPO: the exact black-box reward for
// static problems, a TD-trained ensemble of set models with target copies,
// and the two-part assortment critic.

#include "srl/dap.hpp"
#include "srl/env.hpp"
#include "srl/models.hpp"

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace srl {

template <class State>
using NextActionFn = std::function<Vector(const State&)>;

template <class State>
using TransitionBatch = std::vector<const Transition<State>*>;

struct CriticStats {
  double loss = 0.0;
  int samples = 0;
};

template <class State>
class Critic {
 public:
  virtual ~Critic() = default;
  /// Q(s, a); the average over members for ensembles.
  virtual double q(const State& s, const Vector& a) const = 0;
  virtual bool trainable() const { return true; }
  virtual CriticStats update(const TransitionBatch<State>& batch, const NextActionFn<State>& next_action, double gamma,
                             double lr, Rng& rng) = 0;
  /// Called with each finished episode, in order, with return_to_go filled.
  virtual void observe_episode(std::span<const Transition<State>>) {}
  virtual void sync_targets() {}
  virtual std::unique_ptr<Critic> clone() const = 0;
};

/// Static problems: Q is the known reward of the action.
template <class Env>
class ExactCritic final : public Critic<typename Env::State> {
 public:
  using State = typename Env::State;
  explicit ExactCritic(Env env) : env_(std::move(env)) {}
  double q(const State& s, const Vector& a) const override { return env_.reward(s, a); }
  bool trainable() const override { return false; }
  CriticStats update(const TransitionBatch<State>&, const NextActionFn<State>&, double, double, Rng&) override {
    return {};
  }
  std::unique_ptr<Critic<State>> clone() const override { return std::make_unique<ExactCritic>(*this); }

 private:
  Env env_;
};

/// Ensemble of set models over per-element rows. Each member regresses on
/// y = r + gamma * Q_target_k(s', a') with its own target copy.
template <class State>
class TdCritic final : public Critic<State> {
 public:
  using Features = std::function<Matrix(const State&, const Vector&)>;

  TdCritic(Features features, std::vector<SetModel> members, double huber_delta)
      : features_(std::move(features)), online_(std::move(members)), huber_delta_(huber_delta) {
    if (online_.empty()) throw std::invalid_argument("critic ensemble needs at least one member");
    targets_ = online_;
  }

  double q(const State& s, const Vector& a) const override {
    const Matrix rows = features_(s, a);
    double sum = 0.0;
    for (const auto& m : online_) sum += m.forward(rows);
    return sum / static_cast<double>(online_.size());
  }

  double q_member(std::size_t k, const State& s, const Vector& a) const { return online_.at(k).forward(features_(s, a)); }
  double q_target(std::size_t k, const State& s, const Vector& a) const {
    return targets_.at(k).forward(features_(s, a));
  }

  CriticStats update(const TransitionBatch<State>& batch, const NextActionFn<State>& next_action, double gamma,
                     double lr, Rng&) override {
    if (batch.empty()) return {};
    std::vector<Matrix> rows;
    std::vector<Matrix> next_rows;
    rows.reserve(batch.size());
    next_rows.reserve(batch.size());
    for (const auto* t : batch) {
      rows.push_back(features_(t->state, t->action));
      next_rows.push_back(t->terminal || gamma == 0.0 ? Matrix() : features_(t->next_state, next_action(t->next_state)));
    }
    CriticStats stats{0.0, static_cast<int>(batch.size())};
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (std::size_t k = 0; k < online_.size(); ++k) {
      SetModel::Gradients total;
      for (std::size_t j = 0; j < batch.size(); ++j) {
        const auto* t = batch[j];
        double y = t->reward;
        if (next_rows[j].size() > 0) y += gamma * targets_[k].forward(next_rows[j]);
        const auto h = huber_loss(online_[k].forward(rows[j]), y, huber_delta_);
        stats.loss += h.value * scale / static_cast<double>(online_.size());
        accumulate(total, online_[k].backward(rows[j], h.gradient * scale));
      }
      online_[k].adam_step(total, lr);
    }
    return stats;
  }

  void sync_targets() override { targets_ = online_; }
  std::unique_ptr<Critic<State>> clone() const override { return std::make_unique<TdCritic>(*this); }

  const std::vector<SetModel>& members() const { return online_; }
  const std::vector<SetModel>& targets() const { return targets_; }
  std::vector<SetModel>& mutable_members() { return online_; }

 private:
  static void accumulate(SetModel::Gradients& into, const SetModel::Gradients& g) {
    if (into.encoder.size() == 0) {
      into = g;
      return;
    }
    into.encoder += g.encoder;
    if (g.head.size() > 0) into.head += g.head;
  }

  Features features_;
  std::vector<SetModel> online_;
  std::vector<SetModel> targets_;
  double huber_delta_;
};

/// Assortment critic Q = C1 + C2. C1 regresses the immediate reward from the
/// offered items; C2 regresses the discounted return after this step and is
/// fitted on shuffled transitions of the most recent episode only.
class DapCritic final : public Critic<dap::State> {
 public:
  DapCritic(dap::Env env, SetModel immediate, std::optional<SetModel> future, double huber_delta);

  double q(const dap::State& s, const Vector& a) const override;
  double q_immediate(const dap::State& s, const Vector& a) const;
  double q_future(const dap::State& s, const Vector& a) const;
  CriticStats update(const TransitionBatch<dap::State>& batch, const NextActionFn<dap::State>& next_action,
                     double gamma, double lr, Rng& rng) override;
  void observe_episode(std::span<const Transition<dap::State>> episode) override;
  std::unique_ptr<Critic<dap::State>> clone() const override { return std::make_unique<DapCritic>(*this); }

  const SetModel& immediate() const { return immediate_; }
  const std::optional<SetModel>& future() const { return future_; }

 private:
  dap::Env env_;
  SetModel immediate_;
  std::optional<SetModel> future_;
  double huber_delta_;
  std::vector<Transition<dap::State>> last_episode_;
};

}  // namespace srl
