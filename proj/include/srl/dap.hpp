#pragma once

// Dynamic assortment problem: each step offer K of n items to a customer who
// buys at most one according to a multinomial logit model. Purchases create
// temporary hype and permanent satisfaction on the bought item.

#include "srl/co_layers.hpp"
#include "srl/env.hpp"

#include <span>
#include <string>
#include <vector>

namespace srl::dap {

inline constexpr int kTraitCount = 4;
inline constexpr int kHypeTrait = 2;
inline constexpr int kSatisfactionTrait = 3;
inline constexpr int kActorInputs = 10;
inline constexpr int kImmediateCriticInputs = 6;
inline constexpr int kReturnCriticInputs = kActorInputs + 1;

struct Params {
  int items = 20;
  int assortment = 4;
  int horizon = 80;
  double hype = 0.5;
  int hype_steps = 4;
  double satisfaction = 0.1;
  double price_min = 1.0;
  double price_max = 10.0;
  /// Prices enter the utility divided by this so traits and price share a scale.
  double price_scale = 10.0;

  void validate() const;
  friend bool operator==(const Params&, const Params&) = default;
};

/// Hidden customer weights over the four traits and the scaled price.
Vector draw_customer(Rng& rng);

struct InstanceData {
  Matrix traits;  // items x 4
  Vector prices;
  friend bool operator==(const InstanceData&, const InstanceData&) = default;
};

struct HypeEntry {
  int item = 0;
  double decrement = 0.0;
  int steps_left = 0;
};

struct State {
  Matrix traits;
  Matrix previous_traits;
  Matrix initial_traits;
  Vector prices;
  std::vector<HypeEntry> hype_ledger;
  int t = 0;
};

/// P(i|S) = exp(Theta_i) / (1 + sum_j exp(Theta_j)) for the K offered items,
/// followed by the no-purchase probability. Stable for large |Theta|.
Vector mnl_probs(std::span<const double> theta);

class Env {
 public:
  using State = dap::State;
  using InstanceData = dap::InstanceData;

  Env(Params params, Vector customer);

  static std::string name() { return "dap"; }
  const Params& params() const { return params_; }
  const Vector& customer() const { return customer_; }
  TopKSpace space() const { return {params_.items, params_.assortment}; }
  int actor_input_dim() const { return kActorInputs; }

  InstanceData generate(Rng& rng) const;
  State initial_state(const InstanceData& d) const;

  /// Per-item actor rows: traits, scaled price, relative time, one-step and
  /// since-start deltas of the hype and satisfaction traits.
  Matrix actor_features(const State& s) const;
  Vector maximize(const Vector& theta, const State& s) const;
  StepResult<State> step(const State& s, const Vector& action, Rng& rng) const;
  Vector expert_action(const State& s) const;
  Vector greedy_action(const State& s) const;

  /// True customer utilities of every item.
  Vector utilities(const State& s) const;
  std::vector<int> offered(const Vector& action) const;
  /// Expected one-step revenue sum_i r(i) P(i|S) under the true model.
  double expected_revenue(const State& s, const Vector& action) const;

  /// Rows (traits, scaled price, relative time) for the offered items.
  Matrix immediate_critic_rows(const State& s, const Vector& action) const;
  /// Actor rows of every item plus an offered indicator.
  Matrix return_critic_rows(const State& s, const Vector& action) const;

 private:
  Params params_;
  Vector customer_;
};

}  // namespace srl::dap
