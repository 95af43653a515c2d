#pragma once

// Single machine scheduling with release dates, minimizing total completion
// time. Static: one decision per instance.

#include "srl/co_layers.hpp"
#include "srl/env.hpp"

#include <span>
#include <string>
#include <vector>

namespace srl::smsp {

inline constexpr int kFeatureCount = 10;
inline constexpr int kMaxExhaustiveJobs = 8;

struct Instance {
  std::vector<double> release;
  std::vector<double> processing;

  int size() const { return static_cast<int>(release.size()); }
  friend bool operator==(const Instance&, const Instance&) = default;
};

/// p_j ~ U{1..100}, r_j ~ U[0, 0.4 * sum p].
Instance generate(int n, Rng& rng);

/// One row of kFeatureCount features per job, each in [-1, 1]:
/// release, processing and release+processing (normalized by the latest
/// possible unobstructed completion), normalized ranks of release and
/// processing time, two pairwise slack aggregates, position and relative
/// completion time in the earliest-completion dispatch schedule, and a constant.
Matrix observe(const Instance& inst);

/// Dispatch rule: repeatedly start the job that would finish first (ties by
/// release time).
std::vector<int> earliest_completion(const Instance& inst);

/// Sum of completion times for a job sequence (0-based job ids).
double total_completion(const Instance& inst, std::span<const int> sequence);

/// Jobs ordered by ascending rank: rank 1 is processed first.
std::vector<int> sequence_from_ranking(const Vector& ranking);
Vector ranking_from_sequence(std::span<const int> sequence);

/// Minimum total completion over all n! orders. Requires n <= 8.
std::vector<int> expert_exhaustive(const Instance& inst);

/// Sort by (release, processing, index).
std::vector<int> greedy(const Instance& inst);

/// Static single-step environment over SMSP instances.
class Env {
 public:
  using State = Instance;
  using InstanceData = Instance;

  explicit Env(int jobs = 8) : jobs_(jobs) {}

  static std::string name() { return "smsp"; }
  int jobs() const { return jobs_; }
  int actor_input_dim() const { return kFeatureCount; }

  InstanceData generate(Rng& rng) const { return smsp::generate(jobs_, rng); }
  State initial_state(const InstanceData& d) const { return d; }
  Matrix actor_features(const State& s) const { return observe(s); }
  Vector maximize(const Vector& theta, const State& s) const { return ranking_argmax(theta, {s.size()}); }
  StepResult<State> step(const State& s, const Vector& action, Rng& rng) const;
  Vector expert_action(const State& s) const { return ranking_from_sequence(expert_exhaustive(s)); }
  Vector greedy_action(const State& s) const { return ranking_from_sequence(greedy(s)); }

  /// Reward of a ranking without stepping: the black-box critic.
  double reward(const State& s, const Vector& action) const;

 private:
  int jobs_;
};

}  // namespace srl::smsp
