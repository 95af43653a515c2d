#include "srl/harness.hpp"

#include "srl/critics.hpp"
#include "srl/dataset.hpp"
#include "srl/trainer.hpp"

#include <filesystem>
#include <map>
#include <sstream>

namespace srl {

namespace fs = std::filesystem;
using nlohmann::json;

ModelSpec actor_spec(const ExperimentConfig& c) {
  switch (c.environment) {
    case EnvKind::smsp:
      return {ModelKind::linear, smsp::kFeatureCount, 0, 1, OutputActivation::identity};
    case EnvKind::dap:
      return {ModelKind::mlp2, dap::kActorInputs, c.actor_hidden, 1, OutputActivation::identity};
    case EnvKind::gspp:
      return {ModelKind::linear, gspp::kActorInputs, 0, 1, OutputActivation::negative_absolute};
  }
  throw std::logic_error("unknown environment");
}

std::string run_prefix(const ExperimentConfig& c, std::uint64_t seed) {
  return to_string(c.environment) + "_" + to_string(c.algorithm) + "_seed" + std::to_string(seed);
}

namespace {

ModelSpec mlp(int in, int hidden, int out) { return {ModelKind::mlp2, in, hidden, out, OutputActivation::identity}; }
ModelSpec linear(int in, int out) { return {ModelKind::linear, in, 0, out, OutputActivation::identity}; }

bool double_q(const ExperimentConfig& c) {
  return c.algorithm == Algorithm::ppo ? c.ppo.double_q : c.srl.double_q;
}

LearnerSetup<smsp::Env> setup_for(const smsp::Env& env, const ExperimentConfig& c) {
  return {actor_spec(c), [env](Rng&) { return std::make_unique<ExactCritic<smsp::Env>>(env); }};
}

LearnerSetup<dap::Env> setup_for(const dap::Env& env, const ExperimentConfig& c) {
  const bool future = c.algorithm == Algorithm::ppo ? c.ppo.dap_future_critic : c.dap_future_critic;
  const int h = c.dap_critic_hidden;
  const double delta = c.critic_huber_delta;
  return {actor_spec(c), [env, future, h, delta](Rng& rng) -> std::unique_ptr<Critic<dap::State>> {
            SetModel immediate{init_model(mlp(dap::kImmediateCriticInputs, h, 3), rng),
                               init_model(mlp(3, h, 1), rng)};
            std::optional<SetModel> ahead;
            if (future)
              ahead = SetModel{init_model(linear(dap::kReturnCriticInputs, 5), rng), init_model(mlp(5, 10, 1), rng)};
            return std::make_unique<DapCritic>(env, std::move(immediate), std::move(ahead), delta);
          }};
}

LearnerSetup<gspp::Env> setup_for(const gspp::Env& env, const ExperimentConfig& c) {
  const int members = double_q(c) ? 2 : 1;
  const double delta = c.critic_huber_delta;
  return {actor_spec(c), [env, members, delta](Rng& rng) -> std::unique_ptr<Critic<gspp::State>> {
            std::vector<SetModel> ms;
            for (int k = 0; k < members; ++k) ms.push_back({init_model(linear(gspp::kCriticInputs, 1), rng), std::nullopt});
            return std::make_unique<TdCritic<gspp::State>>(
                [env](const gspp::State& s, const Vector& a) { return env.critic_features(s, a); }, std::move(ms),
                delta);
          }};
}

template <class Env>
Dataset<typename Env::InstanceData> load_or_generate(const Env& env, const ExperimentConfig& c,
                                                     const std::string& path) {
  if (path.empty()) return generate_dataset(env, c);
  return dataset_from_lines<typename Env::InstanceData>(read_jsonl(path), Env::name());
}

/// Calls fn(env) with the configured environment.
template <class Fn>
auto with_env(const ExperimentConfig& c, Fn&& fn) {
  switch (c.environment) {
    case EnvKind::smsp:
      return fn(make_smsp_env(c));
    case EnvKind::dap:
      return fn(make_dap_env(c));
    case EnvKind::gspp:
      return fn(make_gspp_env(c));
  }
  throw std::logic_error("unknown environment");
}

void write_report(const RunReport& r, const std::string& dir, const std::string& prefix) {
  emit_results(r, dir, prefix);
  write_text(dir + "/" + prefix + "_report.json", report_json(r).dump(2) + "\n");
}

}  // namespace

RunReport run_training(const ExperimentConfig& config, std::uint64_t seed, const RunOptions& opts) {
  ExperimentConfig c = config;
  c.validate();
  const std::string prefix = run_prefix(c, seed);
  if (!opts.out_dir.empty()) fs::create_directories(opts.out_dir);
  RunReport r = with_env(c, [&](auto env) {
    using Env = decltype(env);
    const auto data = load_or_generate(env, c, opts.data_path);
    Trainer<Env> trainer(env, data, c, seed, setup_for(env, c));
    if (!opts.out_dir.empty()) {
      const CheckpointMeta meta{to_string(c.environment), to_string(c.algorithm), hex_hash(config_hash(c)), 0, seed};
      const std::string path = opts.out_dir + "/" + prefix + "_best.json";
      trainer.on_checkpoint([meta, path](int episode, const Model& m) {
        CheckpointMeta at = meta;
        at.episode = episode;
        checkpoint_save(m, at, path);
      });
    }
    return trainer.run();
  });
  if (!opts.out_dir.empty()) write_report(r, opts.out_dir, prefix);
  return r;
}

std::vector<RunReport> run_study(const ExperimentConfig& c, const RunOptions& opts) {
  std::vector<RunReport> out;
  std::vector<FinalRecord> rows;
  for (std::uint64_t seed : c.seeds) {
    out.push_back(run_training(c, seed, opts));
    rows.insert(rows.end(), out.back().final_rows.begin(), out.back().final_rows.end());
  }
  if (!opts.out_dir.empty())
    write_text(opts.out_dir + "/" + to_string(c.environment) + "_" + to_string(c.algorithm) + "_study_final.csv",
               final_csv(rows));
  return out;
}

void gen_data(const ExperimentConfig& config, const std::string& path) {
  ExperimentConfig c = config;
  c.validate();
  with_env(c, [&](auto env) {
    write_jsonl(path, dataset_lines(env, c.data_seed, generate_dataset(env, c)));
    return 0;
  });
}

RunReport evaluate_checkpoint(const ExperimentConfig& config, std::uint64_t seed, const std::string& checkpoint_path,
                              const RunOptions& opts) {
  ExperimentConfig c = config;
  c.validate();
  const std::string hash = hex_hash(config_hash(c));
  const LoadedCheckpoint ck = checkpoint_load(checkpoint_path, actor_spec(c), hash);
  RunReport r = with_env(c, [&](auto env) {
    using Env = decltype(env);
    using State = typename Env::State;
    const auto data = load_or_generate(env, c, opts.data_path);
    RunReport rep;
    rep.environment = Env::name();
    rep.algorithm = ck.meta.algorithm;
    rep.seed = seed;
    rep.config_hash = hash;
    rep.effective_config = emit_config(c);
    rep.best_episode = ck.meta.episode;
    rep.warnings = ck.warnings;
    const Policy<State> policy = [&](const State& s) { return policy_action(env, ck.model, s); };
    const Policy<State> greedy = [&](const State& s) { return env.greedy_action(s); };
    auto add = [&](const char* name, const auto& split) {
      const EvalResult v = evaluate_policy(env, policy, split);
      const EvalResult g = evaluate_policy(env, greedy, split);
      for (std::size_t i = 0; i < split.size(); ++i)
        rep.final_rows.push_back({split[i].id, name, rep.algorithm, seed, v.values[i],
                                  delta_vs_greedy(v.values[i], g.values[i])});
      return v;
    };
    rep.train_mean = add("train", data.train).mean;
    const EvalResult test = add("test", data.test);
    rep.test_mean = test.mean;
    rep.test_std = test.std;
    rep.best_actor = ck.model;
    return rep;
  });
  if (!opts.out_dir.empty()) {
    fs::create_directories(opts.out_dir);
    write_report(r, opts.out_dir, run_prefix(c, seed) + "_eval");
  }
  return r;
}

std::string summarize_directory(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: '" + dir + "'");
  struct Group {
    std::vector<double> test_means;
    std::vector<double> train_means;
    std::vector<double> test_deltas;
    int failed = 0;
  };
  std::map<std::pair<std::string, std::string>, Group> groups;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    const std::string name = p.filename().string();
    const std::string suffix = "_report.json";
    if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
      continue;
    json j;
    try {
      j = json::parse(read_text(p.string()));
    } catch (const json::exception& e) {
      throw std::runtime_error("cannot parse '" + p.string() + "': " + e.what());
    }
    Group& g = groups[{j.at("environment").get<std::string>(), j.at("algorithm").get<std::string>()}];
    if (j.at("status").get<std::string>() != "ok") {
      ++g.failed;
      continue;
    }
    g.test_means.push_back(j.at("test_mean").get<double>());
    g.train_means.push_back(j.at("train_mean").get<double>());

    const std::string final_path = dir + "/" + name.substr(0, name.size() - suffix.size()) + "_final.csv";
    if (!fs::exists(final_path)) continue;
    std::istringstream lines(read_text(final_path));
    std::string line;
    std::getline(lines, line);  // header
    double sum = 0.0;
    int n = 0;
    while (std::getline(lines, line)) {
      std::vector<std::string> cols;
      std::stringstream ls(line);
      std::string col;
      while (std::getline(ls, col, ',')) cols.push_back(col);
      if (cols.size() == 6 && cols[1] == "test") {
        sum += std::stod(cols[5]);
        ++n;
      }
    }
    if (n > 0) g.test_deltas.push_back(sum / n);
  }
  std::string out = "environment,algorithm,runs,failed,train_mean,test_mean,test_std_over_seeds,test_delta_vs_greedy\n";
  for (const auto& [key, g] : groups) {
    const EvalResult test = summarize(g.test_means);
    out += key.first + "," + key.second + "," + std::to_string(g.test_means.size()) + "," + std::to_string(g.failed) +
           "," + format_number(summarize(g.train_means).mean) + "," + format_number(test.mean) + "," +
           format_number(test.std) + "," + format_number(summarize(g.test_deltas).mean) + "\n";
  }
  return out;
}

}  // namespace srl
