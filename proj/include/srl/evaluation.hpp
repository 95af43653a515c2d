#pragma once

// Deterministic policy evaluation over dataset splits.

#include "srl/env.hpp"
#include "srl/dataset.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace srl {

template <class State>
using Policy = std::function<Vector(const State&)>;

struct EvalResult {
  std::vector<double> values;  // total reward per instance, in split order
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

EvalResult summarize(std::vector<double> values);

/// Total undiscounted reward of one episode. All exogenous noise comes from
/// the instance's episode seed.
template <CombinatorialEnv E>
double rollout_return(const E& env, const Policy<typename E::State>& policy,
                      const DatasetItem<typename E::InstanceData>& item) {
  Rng rng(item.episode_seed);
  auto s = env.initial_state(item.data);
  double total = 0.0;
  for (;;) {
    auto r = env.step(s, policy(s), rng);
    total += r.reward;
    if (r.terminal) break;
    s = std::move(r.next);
  }
  return total;
}

template <CombinatorialEnv E>
EvalResult evaluate_policy(const E& env, const Policy<typename E::State>& policy,
                           const Split<typename E::InstanceData>& split, int limit = 0) {
  if (split.empty()) throw std::invalid_argument("evaluate_policy: empty dataset");
  const std::size_t n = limit > 0 ? std::min(split.size(), static_cast<std::size_t>(limit)) : split.size();
  std::vector<double> values;
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) values.push_back(rollout_return(env, policy, split[i]));
  return summarize(std::move(values));
}

}  // namespace srl
