#pragma once

// The experiment loop shared by all environments: collect trajectories,
// replay updates, per-episode validation with best-model checkpointing, and
// final train/test evaluation of the restored best actor.

#include "srl/agents.hpp"
#include "srl/config.hpp"
#include "srl/dataset.hpp"
#include "srl/evaluation.hpp"
#include "srl/replay.hpp"
#include "srl/results.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>

namespace srl {

/// Run-seed streams; data streams use StreamTag.
enum class RunStream : std::uint64_t { init = 100, explore = 101, update = 102, order = 103 };

template <CombinatorialEnv E>
struct LearnerSetup {
  ModelSpec actor_spec;
  /// Builds a fresh critic for the algorithm; initial weights from rng.
  std::function<std::unique_ptr<Critic<typename E::State>>(Rng&)> make_critic;
};

/// Called with every new best actor (episode index, model).
using CheckpointFn = std::function<void(int, const Model&)>;

template <CombinatorialEnv E>
class Trainer {
 public:
  using State = typename E::State;
  using Data = typename E::InstanceData;

  Trainer(E env, const Dataset<Data>& data, ExperimentConfig config, std::uint64_t seed, LearnerSetup<E> setup)
      : env_(std::move(env)), data_(data), c_(std::move(config)), seed_(seed), setup_(std::move(setup)) {}

  void on_checkpoint(CheckpointFn fn) { checkpoint_ = std::move(fn); }

  /// Partial reports are returned with status "failed" when a module throws.
  RunReport run() {
    const auto start = std::chrono::steady_clock::now();
    report_ = {};
    report_.environment = E::name();
    report_.algorithm = to_string(c_.algorithm);
    report_.seed = seed_;
    report_.config_hash = hex_hash(config_hash(c_));
    report_.effective_config = emit_config(c_);
    try {
      execute();
    } catch (const std::exception& e) {
      report_.status = "failed";
      report_.error = e.what();
    }
    report_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report_;
  }

 private:
  void execute() {
    if (data_.train.empty() || data_.test.empty()) throw std::invalid_argument("train and test splits must be nonempty");
    explore_rng_ = derived_rng(seed_, static_cast<std::uint64_t>(RunStream::explore));
    update_rng_ = derived_rng(seed_, static_cast<std::uint64_t>(RunStream::update));
    order_rng_ = derived_rng(seed_, static_cast<std::uint64_t>(RunStream::order));
    Rng init_rng = derived_rng(seed_, static_cast<std::uint64_t>(RunStream::init));
    actor_ = init_model(setup_.actor_spec, init_rng);

    const bool fixed = c_.algorithm == Algorithm::greedy || c_.algorithm == Algorithm::expert;
    if (!fixed && c_.algorithm != Algorithm::sil) critic_ = setup_.make_critic(init_rng);

    record_validation(0);
    if (!fixed) {
      if (c_.algorithm == Algorithm::sil) build_demonstrations();
      for (int ep = 0; ep < c_.episodes; ++ep) {
        train_episode(ep);
        record_validation(ep + 1);
      }
      actor_ = best_actor_.value_or(actor_);
      report_.best_actor = actor_;
    }
    final_evaluation();
  }

  Policy<State> current_policy() const {
    switch (c_.algorithm) {
      case Algorithm::greedy:
        return [this](const State& s) { return env_.greedy_action(s); };
      case Algorithm::expert:
        return [this](const State& s) { return env_.expert_action(s); };
      default:
        return [this](const State& s) { return policy_action(env_, actor_, s); };
    }
  }

  void record_validation(int episode) {
    const Split<Data>& split = data_.val.empty() ? data_.train : data_.val;
    const double mean = evaluate_policy(env_, current_policy(), split, c_.val_eval_size).mean;
    const bool improved = !best_value_ || mean > *best_value_;
    if (improved) {
      best_value_ = mean;
      report_.best_episode = episode;
      if (c_.algorithm != Algorithm::greedy && c_.algorithm != Algorithm::expert) {
        best_actor_ = actor_;
        if (checkpoint_) checkpoint_(episode, actor_);
      }
    }
    report_.curve.push_back({episode, "val", mean, *best_value_});
  }

  void final_evaluation() {
    const Policy<State> policy = current_policy();
    const Policy<State> greedy = [this](const State& s) { return env_.greedy_action(s); };
    auto add = [&](const char* name, const Split<Data>& split) {
      const EvalResult r = evaluate_policy(env_, policy, split);
      const EvalResult g = c_.algorithm == Algorithm::greedy ? r : evaluate_policy(env_, greedy, split);
      for (std::size_t i = 0; i < split.size(); ++i)
        report_.final_rows.push_back({split[i].id, name, report_.algorithm, seed_, r.values[i],
                                      delta_vs_greedy(r.values[i], g.values[i])});
      return r;
    };
    report_.train_mean = add("train", data_.train).mean;
    const EvalResult test = add("test", data_.test);
    report_.test_mean = test.mean;
    report_.test_std = test.std;
  }

  double gamma() const { return c_.algorithm == Algorithm::ppo ? c_.ppo.gamma : c_.srl.gamma; }
  int batch_size() const { return c_.algorithm == Algorithm::ppo ? c_.ppo.batch_size : c_.srl.batch_size; }
  int warmup() const {
    return c_.algorithm == Algorithm::ppo ? c_.ppo.critic_warmup_episodes : c_.srl.critic_warmup_episodes;
  }

  const DatasetItem<Data>& next_instance() {
    if (cursor_ >= order_.size()) {
      order_.resize(data_.train.size());
      std::iota(order_.begin(), order_.end(), std::size_t{0});
      std::shuffle(order_.begin(), order_.end(), order_rng_);
      cursor_ = 0;
    }
    return data_.train[order_[cursor_++]];
  }

  void collect(double sigma_f) {
    const double g = gamma();
    for (int r = 0; r < c_.rollouts_per_episode; ++r) {
      std::vector<Transition<State>> trajectory;
      State s = env_.initial_state(next_instance().data);
      for (;;) {
        Exploration x = act_explore(env_, actor_, s, sigma_f, explore_rng_);
        auto step = env_.step(s, x.action, explore_rng_);
        Transition<State> t{s, std::move(x.action), step.reward, step.next, step.terminal, sigma_f,
                            std::move(x.eta), std::move(x.theta), 0.0};
        trajectory.push_back(std::move(t));
        if (step.terminal) break;
        s = std::move(step.next);
      }
      double ret = 0.0;
      for (auto it = trajectory.rbegin(); it != trajectory.rend(); ++it) {
        ret = it->reward + g * ret;
        it->return_to_go = ret;
      }
      critic_->observe_episode(trajectory);
      for (auto& t : trajectory) replay_->push(std::move(t));
    }
  }

  void train_episode(int ep) {
    if (c_.algorithm == Algorithm::sil) {
      sil_episode(ep);
      return;
    }
    const bool ppo = c_.algorithm == Algorithm::ppo;
    if (!replay_) replay_.emplace(ppo ? c_.ppo.replay_capacity : c_.srl.replay_capacity);
    const double sigma_f = schedule_at(ppo ? c_.ppo.sigma_f : c_.srl.sigma_f, ep);
    collect(sigma_f);

    const bool actor_trains = ep >= warmup();
    const double lr_actor = schedule_at(ppo ? c_.ppo.lr_actor : c_.srl.lr_actor, ep);
    const double lr_critic = schedule_at(ppo ? c_.ppo.lr_critic : c_.srl.lr_critic, ep);
    SrlStepParams sp;
    if (!ppo) {
      sp.candidates = c_.srl.candidates;
      sp.sigma_b = schedule_at(c_.srl.sigma_b, ep);
      sp.tau = schedule_at(c_.srl.tau, ep);
      sp.eps = schedule_at(c_.srl.eps, ep);
      sp.loss_samples = c_.srl.loss_samples;
      sp.lr = lr_actor;
    }
    const NextActionFn<State> next = [this](const State& s) { return policy_action(env_, actor_, s); };
    const int batch = std::min<int>(batch_size(), static_cast<int>(replay_->size()));
    for (int it = 0; it < c_.iterations; ++it) {
      const TransitionBatch<State> b = replay_->sample(static_cast<std::size_t>(batch), update_rng_);
      if (actor_trains) {
        if (ppo) {
          const double sigma_avg = mean_sigma_f(b);
          if (sigma_avg > 0.0) ppo_update(env_, actor_, *critic_, b, c_.ppo.clip_eps, sigma_avg, lr_actor);
        } else {
          srl_actor_update(env_, actor_, *critic_, b, sp, update_rng_);
        }
      }
      if (critic_->trainable()) critic_td_update(*critic_, b, next, gamma(), lr_critic, update_rng_);
    }
    target_sync(*critic_);
  }

  void build_demonstrations() {
    demos_.clear();
    for (const auto& item : data_.train) {
      Rng rng(item.episode_seed);
      State s = env_.initial_state(item.data);
      for (;;) {
        Vector a = env_.expert_action(s);
        auto step = env_.step(s, a, rng);
        demos_.push_back({s, std::move(a)});
        if (step.terminal) break;
        s = std::move(step.next);
      }
    }
    if (demos_.empty()) throw std::runtime_error("no demonstrations");
  }

  const Demonstration<State>* next_demo() {
    if (demo_cursor_ >= demo_order_.size()) {
      demo_order_.resize(demos_.size());
      std::iota(demo_order_.begin(), demo_order_.end(), std::size_t{0});
      std::shuffle(demo_order_.begin(), demo_order_.end(), order_rng_);
      demo_cursor_ = 0;
    }
    return &demos_[demo_order_[demo_cursor_++]];
  }

  void sil_episode(int ep) {
    SilStepParams p{c_.sil.eps, c_.sil.loss_samples, schedule_at(c_.sil.lr_actor, ep)};
    std::vector<const Demonstration<State>*> batch(static_cast<std::size_t>(c_.sil.batch_size));
    for (int it = 0; it < c_.iterations; ++it) {
      for (auto& d : batch) d = next_demo();
      sil_update(env_, actor_, std::span<const Demonstration<State>* const>(batch), p, update_rng_);
    }
  }

  E env_;
  const Dataset<Data>& data_;
  ExperimentConfig c_;
  std::uint64_t seed_;
  LearnerSetup<E> setup_;
  CheckpointFn checkpoint_;

  RunReport report_;
  Model actor_;
  std::optional<Model> best_actor_;
  std::optional<double> best_value_;
  std::unique_ptr<Critic<State>> critic_;
  std::optional<ReplayBuffer<Transition<State>>> replay_;
  std::vector<Demonstration<State>> demos_;
  std::vector<std::size_t> order_, demo_order_;
  std::size_t cursor_ = 0, demo_cursor_ = 0;
  Rng explore_rng_, update_rng_, order_rng_;
};

}  // namespace srl
