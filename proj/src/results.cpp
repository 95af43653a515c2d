#include "srl/results.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace srl {

using nlohmann::json;

double delta_vs_greedy(double reward, double greedy) {
  const double diff = reward - greedy;
  return std::abs(greedy) > 0.0 ? diff / std::abs(greedy) : diff;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, ptr);
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::vector<CurvePoint> rows = curve;
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.episode < b.episode; });
  std::string out = "episode,split,mean_reward,best_so_far\n";
  for (const auto& r : rows)
    out += std::to_string(r.episode) + "," + r.split + "," + format_number(r.mean_reward) + "," +
           format_number(r.best_so_far) + "\n";
  return out;
}

namespace {

int split_rank(const std::string& s) {
  if (s == "train") return 0;
  if (s == "val") return 1;
  if (s == "test") return 2;
  return 3;
}

}  // namespace

std::string final_csv(std::vector<FinalRecord> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tuple(split_rank(a.split), a.instance_id, a.seed) < std::tuple(split_rank(b.split), b.instance_id, b.seed);
  });
  std::string out = "instance_id,split,algorithm,seed,reward,delta_vs_greedy\n";
  for (const auto& r : rows)
    out += std::to_string(r.instance_id) + "," + r.split + "," + r.algorithm + "," + std::to_string(r.seed) + "," +
           format_number(r.reward) + "," + format_number(r.delta_vs_greedy) + "\n";
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void emit_results(const RunReport& report, const std::string& dir, const std::string& prefix) {
  write_text(dir + "/" + prefix + "_curve.csv", curve_csv(report.curve));
  write_text(dir + "/" + prefix + "_final.csv", final_csv(report.final_rows));
}

json report_json(const RunReport& r) {
  json curve = json::array();
  for (const auto& p : r.curve) curve.push_back({{"episode", p.episode}, {"mean_reward", p.mean_reward}});
  return {{"environment", r.environment},
          {"algorithm", r.algorithm},
          {"seed", r.seed},
          {"config_hash", r.config_hash},
          {"status", r.status},
          {"error", r.error},
          {"warnings", r.warnings},
          {"best_episode", r.best_episode},
          {"train_mean", r.train_mean},
          {"test_mean", r.test_mean},
          {"test_std", r.test_std},
          {"wall_seconds", r.wall_seconds},
          {"config", r.effective_config}};
}

std::string describe(const ModelSpec& s) {
  std::string out = to_string(s.kind) + " " + std::to_string(s.input_dim) + "->";
  if (s.kind == ModelKind::mlp2) out += std::to_string(s.hidden_dim) + "->";
  return out + std::to_string(s.output_dim) + " (" + to_string(s.output_activation) + ")";
}

namespace {

ModelKind parse_kind(const std::string& s) {
  for (auto k : {ModelKind::linear, ModelKind::mlp2})
    if (to_string(k) == s) return k;
  throw std::runtime_error("checkpoint: unknown model kind '" + s + "'");
}

OutputActivation parse_activation(const std::string& s) {
  for (auto a : {OutputActivation::identity, OutputActivation::negative_absolute})
    if (to_string(a) == s) return a;
  throw std::runtime_error("checkpoint: unknown output activation '" + s + "'");
}

}  // namespace

void checkpoint_save(const Model& model, const CheckpointMeta& meta, const std::string& path) {
  const auto& s = model.spec;
  const json j = {{"format", "srl-checkpoint"},
                  {"version", 1},
                  {"environment", meta.environment},
                  {"algorithm", meta.algorithm},
                  {"config_hash", meta.config_hash},
                  {"episode", meta.episode},
                  {"seed", meta.seed},
                  {"model",
                   {{"kind", to_string(s.kind)},
                    {"input_dim", s.input_dim},
                    {"hidden_dim", s.hidden_dim},
                    {"output_dim", s.output_dim},
                    {"output_activation", to_string(s.output_activation)}}},
                  {"params", std::vector<double>(model.params.values.data(),
                                                 model.params.values.data() + model.params.values.size())}};
  write_text(path, j.dump(1) + "\n");
}

LoadedCheckpoint checkpoint_load(const std::string& path, const ModelSpec& expected,
                                 const std::string& expected_config_hash) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw std::runtime_error("corrupt checkpoint '" + path + "': " + e.what());
  }
  try {
    if (j.value("format", "") != "srl-checkpoint") throw std::runtime_error("not an srl checkpoint");
    const auto& m = j.at("model");
    ModelSpec spec{parse_kind(m.at("kind").get<std::string>()), m.at("input_dim").get<int>(),
                   m.at("hidden_dim").get<int>(), m.at("output_dim").get<int>(),
                   parse_activation(m.at("output_activation").get<std::string>())};
    if (!(spec == expected))
      throw std::runtime_error("model spec mismatch: checkpoint has " + describe(spec) + ", expected " +
                               describe(expected));
    const auto params = j.at("params").get<std::vector<double>>();
    if (static_cast<int>(params.size()) != spec.parameter_count())
      throw std::runtime_error("parameter count " + std::to_string(params.size()) + " does not match " +
                               describe(spec) + " (" + std::to_string(spec.parameter_count()) + ")");
    LoadedCheckpoint out;
    out.model.spec = spec;
    out.model.params = ParamSet::zeros(spec.parameter_count());
    for (std::size_t i = 0; i < params.size(); ++i) out.model.params.values[static_cast<Eigen::Index>(i)] = params[i];
    out.meta = {j.at("environment").get<std::string>(), j.at("algorithm").get<std::string>(),
                j.at("config_hash").get<std::string>(), j.at("episode").get<int>(), j.at("seed").get<std::uint64_t>()};
    if (out.meta.config_hash != expected_config_hash)
      out.warnings.push_back("checkpoint config hash " + out.meta.config_hash + " differs from current config " +
                             expected_config_hash);
    return out;
  } catch (const json::exception& e) {
    throw std::runtime_error("corrupt checkpoint '" + path + "': " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("checkpoint '" + path + "': " + e.what());
  }
}

}  // namespace srl
