#pragma once

// Run reports, their CSV emission, and model checkpoints.

#include "srl/models.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace srl {

struct CurvePoint {
  int episode = 0;
  std::string split;
  double mean_reward = 0.0;
  double best_so_far = 0.0;
};

struct FinalRecord {
  int instance_id = 0;
  std::string split;
  std::string algorithm;
  std::uint64_t seed = 0;
  double reward = 0.0;
  double delta_vs_greedy = 0.0;
};

struct RunReport {
  std::string environment;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string effective_config;
  std::vector<CurvePoint> curve;
  std::vector<FinalRecord> final_rows;
  int best_episode = 0;
  double train_mean = 0.0;
  double test_mean = 0.0;
  double test_std = 0.0;
  double wall_seconds = 0.0;
  std::string status = "ok";
  std::string error;
  std::vector<std::string> warnings;
  std::optional<Model> best_actor;
};

/// (reward - greedy) / |greedy|; the plain difference when greedy is zero.
double delta_vs_greedy(double reward, double greedy);

/// Shortest decimal that reads back to the same double.
std::string format_number(double v);

std::string curve_csv(const std::vector<CurvePoint>& curve);
/// Rows sorted by split (train before test), then instance_id, then seed.
std::string final_csv(std::vector<FinalRecord> rows);

/// Writes <dir>/<prefix>_curve.csv and <dir>/<prefix>_final.csv.
void emit_results(const RunReport& report, const std::string& dir, const std::string& prefix);
/// Summary fields (no per-instance data), including wall-clock time.
nlohmann::json report_json(const RunReport& report);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

struct CheckpointMeta {
  std::string environment;
  std::string algorithm;
  std::string config_hash;
  int episode = 0;
  std::uint64_t seed = 0;
};

struct LoadedCheckpoint {
  Model model;
  CheckpointMeta meta;
  std::vector<std::string> warnings;
};

void checkpoint_save(const Model& model, const CheckpointMeta& meta, const std::string& path);
/// Throws when the stored model spec differs from the expected one; a config
/// hash mismatch only adds a warning.
LoadedCheckpoint checkpoint_load(const std::string& path, const ModelSpec& expected,
                                 const std::string& expected_config_hash);

std::string describe(const ModelSpec& spec);

}  // namespace srl
