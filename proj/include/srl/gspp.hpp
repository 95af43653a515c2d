#pragma once

// Dynamic grid shortest path: each step the robot travels a simple path to a
// target, paying rho times the sum of traversed cell costs. The traversed
// cells rescale rho for all later steps.

#include "srl/co_layers.hpp"
#include "srl/env.hpp"

#include <memory>
#include <string>

namespace srl::gspp {

inline constexpr int kCellFeatures = 6;
inline constexpr int kActorInputs = kCellFeatures + 1;
inline constexpr int kCriticInputs = kCellFeatures + 2;

struct Params {
  int rows = 20;
  int cols = 20;
  int horizon = 100;
  double rho0 = 1.0;
  /// Lower bound on the per-step multiplier 1 + sum(delta rho).
  double rho_clamp = 0.1;
  double cost_weight_min = 0.1;
  double cost_weight_max = 1.0;
  double rho_weight_scale = 0.005;

  void validate() const;
  friend bool operator==(const Params&, const Params&) = default;
};

/// Global weights: the first three cell features drive cost, the last three
/// drive the change of rho.
struct Hidden {
  Vector cost_weights;
  Vector rho_weights;
};

Hidden draw_hidden(const Params& params, Rng& rng);

struct InstanceData {
  Matrix features;  // cells x 6, row-major cell order
  Cell robot;
  Cell target;
  friend bool operator==(const InstanceData&, const InstanceData&) = default;
};

/// Static per-episode quantities shared by every state of one episode.
struct Episode {
  Matrix features;
  Vector cost;       // c = v^c . Phi^c > 0
  Vector rho_delta;  // v^rho . Phi^rho
};

struct State {
  std::shared_ptr<const Episode> episode;
  double rho = 1.0;
  Cell robot;
  Cell target;
  int t = 0;
};

class Env {
 public:
  using State = gspp::State;
  using InstanceData = gspp::InstanceData;

  Env(Params params, Hidden hidden);

  static std::string name() { return "gspp"; }
  const Params& params() const { return params_; }
  const Hidden& hidden() const { return hidden_; }
  int cells() const { return params_.rows * params_.cols; }
  GridPathSpace space(const State& s) const { return {params_.rows, params_.cols, s.robot, s.target}; }
  int actor_input_dim() const { return kActorInputs; }

  InstanceData generate(Rng& rng) const;
  std::shared_ptr<const Episode> make_episode(const Matrix& features) const;
  State initial_state(const InstanceData& d) const;

  /// Per-cell rows: the six features and relative time.
  Matrix actor_features(const State& s) const;
  /// Path solver on scores clamped to be nonpositive.
  Vector maximize(const Vector& theta, const State& s) const;
  StepResult<State> step(const State& s, const Vector& action, Rng& rng) const;
  /// Dijkstra on the true costs, ignoring the effect on rho.
  Vector expert_action(const State& s) const;
  /// Diagonal toward the target while both coordinates differ, then straight.
  Vector greedy_action(const State& s) const;

  /// Immediate cost sum(c) over the path cells, before multiplying by rho.
  double path_cost(const State& s, const Vector& action) const;
  /// Per-cell rows (features, relative time, rho) on the path, zeros elsewhere.
  Matrix critic_features(const State& s, const Vector& action) const;

 private:
  Params params_;
  Hidden hidden_;
};

}  // namespace srl::gspp
