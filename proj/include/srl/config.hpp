#pragma once

// Experiment configuration: a flat "key = value" text format with dotted
// keys. Schedules are written "start -> end" and run linearly over the
// configured number of episodes.

#include "srl/dap.hpp"
#include "srl/gspp.hpp"
#include "srl/models.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace srl {

enum class EnvKind { smsp, dap, gspp };
enum class Algorithm { srl, sil, ppo, greedy, expert };

std::string to_string(EnvKind e);
std::string to_string(Algorithm a);
EnvKind parse_env_kind(const std::string& s);
Algorithm parse_algorithm(const std::string& s);

struct SrlConfig {
  int batch_size = 4;
  ScheduleSpec lr_actor = ScheduleSpec::constant(1e-3);
  ScheduleSpec lr_critic = ScheduleSpec::constant(1e-3);
  ScheduleSpec sigma_f = ScheduleSpec::constant(1.0);
  int candidates = 40;
  ScheduleSpec sigma_b = ScheduleSpec::constant(1.0);
  ScheduleSpec tau = ScheduleSpec::constant(1.0);
  ScheduleSpec eps = ScheduleSpec::constant(1.0);
  int loss_samples = 20;
  double gamma = 0.9;
  int replay_capacity = 8000;
  int critic_warmup_episodes = 0;
  bool double_q = false;
  friend bool operator==(const SrlConfig&, const SrlConfig&) = default;
};

struct PpoConfig {
  int batch_size = 4;
  ScheduleSpec lr_actor = ScheduleSpec::constant(5e-4);
  ScheduleSpec lr_critic = ScheduleSpec::constant(1e-3);
  ScheduleSpec sigma_f = ScheduleSpec::constant(0.1);
  double clip_eps = 0.2;
  double gamma = 0.9;
  int replay_capacity = 1600;
  int critic_warmup_episodes = 0;
  bool double_q = false;
  /// The assortment return critic C2; off by default for PPO.
  bool dap_future_critic = false;
  friend bool operator==(const PpoConfig&, const PpoConfig&) = default;
};

struct SilConfig {
  int batch_size = 1;
  ScheduleSpec lr_actor = ScheduleSpec::constant(1e-4);
  double eps = 1.0;
  int loss_samples = 20;
  friend bool operator==(const SilConfig&, const SilConfig&) = default;
};

struct ExperimentConfig {
  EnvKind environment = EnvKind::smsp;
  Algorithm algorithm = Algorithm::srl;
  std::vector<std::uint64_t> seeds{0};
  std::uint64_t data_seed = 1;

  int episodes = 100;
  int iterations = 100;
  int rollouts_per_episode = 1;

  int train_size = 100;
  int val_size = 100;
  int test_size = 100;
  /// Validation instances evaluated after each episode; 0 means all.
  int val_eval_size = 0;

  int smsp_jobs = 8;
  dap::Params dap;
  gspp::Params gspp;

  int actor_hidden = 5;
  double critic_huber_delta = 1.0;
  bool dap_future_critic = true;
  int dap_critic_hidden = 8;

  SrlConfig srl;
  PpoConfig ppo;
  SilConfig sil;

  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);

/// Every key with its effective value, one per line, in a fixed order.
/// parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& c);

/// FNV-1a over the effective config with the seed list left out, so runs
/// of one study share a hash.
std::uint64_t config_hash(const ExperimentConfig& c);
std::string hex_hash(std::uint64_t h);

/// Schedules take their horizon from the episode count.
void bind_schedules(ExperimentConfig& c);

}  // namespace srl
