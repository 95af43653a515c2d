#pragma once

// Experiment orchestration behind the command line: dataset export, seeded
// training runs, checkpoint evaluation and result aggregation.

#include "srl/config.hpp"
#include "srl/results.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace srl {

/// The actor used by every algorithm on an environment.
ModelSpec actor_spec(const ExperimentConfig& c);

/// "<env>_<algo>_seed<N>"
std::string run_prefix(const ExperimentConfig& c, std::uint64_t seed);

struct RunOptions {
  std::string out_dir;    // empty: nothing written
  std::string data_path;  // empty: generate from data_seed
};

/// One seeded run. With an output directory, writes curve/final CSVs, a
/// report JSON and the best-actor checkpoint; failed runs still write their
/// partial report.
RunReport run_training(const ExperimentConfig& c, std::uint64_t seed, const RunOptions& opts = {});

/// run_training for every configured seed, plus a study-level final CSV.
std::vector<RunReport> run_study(const ExperimentConfig& c, const RunOptions& opts = {});

/// Writes the dataset for the configured environment and data seed.
void gen_data(const ExperimentConfig& c, const std::string& path);

/// Final train/test evaluation of a saved actor.
RunReport evaluate_checkpoint(const ExperimentConfig& c, std::uint64_t seed, const std::string& checkpoint_path,
                              const RunOptions& opts = {});

/// Aggregates every *_report.json and *_final.csv in a directory into one
/// row per (environment, algorithm). Returns the summary CSV text.
std::string summarize_directory(const std::string& dir);

}  // namespace srl
