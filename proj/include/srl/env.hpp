#pragma once

// Shared vocabulary for combinatorial MDPs: the environment concept the
// learners are written against, step results and replay transitions.

#include "srl/types.hpp"

#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

namespace srl {

template <class State>
struct StepResult {
  State next;
  double reward = 0.0;
  bool terminal = false;
};

/// One environment interaction. eta and theta_old are filled by learners that
/// need them (PPO); return_to_go is filled once the episode has finished.
template <class State>
struct Transition {
  State state;
  Vector action;
  double reward = 0.0;
  State next_state;
  bool terminal = false;
  double sigma_f_used = 0.0;
  Vector eta;
  Vector theta_old;
  double return_to_go = 0.0;
};

/// Dataset entry. The episode seed drives every random event inside one
/// evaluation rollout so that policies compared on the same instance see the
/// same exogenous noise.
template <class Data>
struct DatasetItem {
  int id = 0;
  std::uint64_t episode_seed = 0;
  Data data;
};

template <class E>
concept CombinatorialEnv = requires(const E& env, const typename E::State& s, const typename E::InstanceData& d,
                                    const Vector& v, Rng& rng) {
  typename E::State;
  typename E::InstanceData;
  { E::name() } -> std::convertible_to<std::string>;
  { env.initial_state(d) } -> std::same_as<typename E::State>;
  { env.actor_features(s) } -> std::same_as<Matrix>;
  { env.maximize(v, s) } -> std::same_as<Vector>;
  { env.step(s, v, rng) } -> std::same_as<StepResult<typename E::State>>;
  { env.expert_action(s) } -> std::same_as<Vector>;
  { env.greedy_action(s) } -> std::same_as<Vector>;
  { env.actor_input_dim() } -> std::convertible_to<int>;
};

}  // namespace srl
