// srl: dataset generation, training, checkpoint evaluation and reporting.

#include "srl/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = "results";
  std::string env;
  std::string algo;
  std::string data;
};

void add_common(CLI::App* cmd, Common& o, bool needs_config) {
  auto* c = cmd->add_option("--config", o.config_path, "Experiment config file");
  if (needs_config) c->required();
  cmd->add_option("--seed", o.seed, "Run a single seed instead of the configured list");
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--env", o.env, "Override the environment (smsp, dap, gspp)");
  cmd->add_option("--algo", o.algo, "Override the algorithm (srl, sil, ppo, greedy, expert)");
  cmd->add_option("--data", o.data, "Read the dataset from this file instead of generating it");
}

srl::ExperimentConfig resolve(const Common& o) {
  srl::ExperimentConfig c = srl::load_config(o.config_path);
  if (!o.env.empty()) c.environment = srl::parse_env_kind(o.env);
  if (!o.algo.empty()) c.algorithm = srl::parse_algorithm(o.algo);
  if (o.seed) c.seeds = {*o.seed};
  c.validate();
  return c;
}

void print_run(const srl::RunReport& r) {
  std::cout << r.environment << " " << r.algorithm << " seed " << r.seed << ": " << r.status;
  if (r.status == "ok")
    std::cout << "  train " << r.train_mean << "  test " << r.test_mean << "  best episode " << r.best_episode << "  ("
              << r.wall_seconds << " s)";
  else
    std::cout << "  " << r.error;
  std::cout << "\n";
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured reinforcement learning experiments"};
  app.require_subcommand(1);

  Common gen, train, eval;
  std::string report_dir = "results";
  std::string checkpoint;

  auto* gen_cmd = app.add_subcommand("gen-data", "Write the train/val/test dataset as JSON lines");
  add_common(gen_cmd, gen, true);
  auto* train_cmd = app.add_subcommand("train", "Train and evaluate every configured seed");
  add_common(train_cmd, train, true);
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a saved actor on the train and test splits");
  add_common(eval_cmd, eval, true);
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file (default: <out>/<env>_<algo>_seed<N>_best.json)");
  auto* report_cmd = app.add_subcommand("report", "Summarize the run reports in a directory");
  report_cmd->add_option("--out", report_dir, "Directory holding run outputs")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) {
      const auto c = resolve(gen);
      std::filesystem::create_directories(gen.out);
      const std::string path = gen.out + "/" + srl::to_string(c.environment) + "_data.jsonl";
      srl::gen_data(c, path);
      std::cout << "wrote " << path << "\n";
    } else if (*train_cmd) {
      const auto c = resolve(train);
      bool ok = true;
      for (const auto& r : srl::run_study(c, {train.out, train.data})) {
        print_run(r);
        ok = ok && r.status == "ok";
      }
      if (!ok) {
        std::cerr << "error: at least one run failed\n";
        return 1;
      }
    } else if (*eval_cmd) {
      const auto c = resolve(eval);
      for (std::uint64_t seed : c.seeds) {
        const std::string path =
            checkpoint.empty() ? eval.out + "/" + srl::run_prefix(c, seed) + "_best.json" : checkpoint;
        print_run(srl::evaluate_checkpoint(c, seed, path, {eval.out, eval.data}));
      }
    } else if (*report_cmd) {
      const std::string summary = srl::summarize_directory(report_dir);
      srl::write_text(report_dir + "/summary.csv", summary);
      std::cout << summary;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
