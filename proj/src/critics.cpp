#include "srl/critics.hpp"

#include <algorithm>
#include <numeric>

namespace srl {

DapCritic::DapCritic(dap::Env env, SetModel immediate, std::optional<SetModel> future, double huber_delta)
    : env_(std::move(env)), immediate_(std::move(immediate)), future_(std::move(future)), huber_delta_(huber_delta) {}

double DapCritic::q_immediate(const dap::State& s, const Vector& a) const {
  return immediate_.forward(env_.immediate_critic_rows(s, a));
}

double DapCritic::q_future(const dap::State& s, const Vector& a) const {
  return future_ ? future_->forward(env_.return_critic_rows(s, a)) : 0.0;
}

double DapCritic::q(const dap::State& s, const Vector& a) const { return q_immediate(s, a) + q_future(s, a); }

namespace {

void add_into(SetModel::Gradients& into, const SetModel::Gradients& g) {
  if (into.encoder.size() == 0) {
    into = g;
    return;
  }
  into.encoder += g.encoder;
  if (g.head.size() > 0) into.head += g.head;
}

}  // namespace

CriticStats DapCritic::update(const TransitionBatch<dap::State>& batch, const NextActionFn<dap::State>&, double,
                              double lr, Rng& rng) {
  if (batch.empty()) return {};
  CriticStats stats{0.0, static_cast<int>(batch.size())};
  const double scale = 1.0 / static_cast<double>(batch.size());
  SetModel::Gradients g1;
  for (const auto* t : batch) {
    const Matrix rows = env_.immediate_critic_rows(t->state, t->action);
    const auto h = huber_loss(immediate_.forward(rows), t->reward, huber_delta_);
    stats.loss += h.value * scale;
    add_into(g1, immediate_.backward(rows, h.gradient * scale));
  }
  immediate_.adam_step(g1, lr);

  if (future_ && !last_episode_.empty()) {
    const std::size_t n = std::min(batch.size(), last_episode_.size());
    std::vector<std::size_t> idx(last_episode_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    SetModel::Gradients g2;
    const double s2 = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
      std::swap(idx[i], idx[pick(rng)]);
      const auto& t = last_episode_[idx[i]];
      const Matrix rows = env_.return_critic_rows(t.state, t.action);
      const auto h = huber_loss(future_->forward(rows), t.return_to_go - t.reward, huber_delta_);
      stats.loss += h.value * s2;
      add_into(g2, future_->backward(rows, h.gradient * s2));
    }
    future_->adam_step(g2, lr);
  }
  return stats;
}

void DapCritic::observe_episode(std::span<const Transition<dap::State>> episode) {
  last_episode_.assign(episode.begin(), episode.end());
}

}  // namespace srl
