#pragma once

// Train/validation/test splits generated from the data seed, and their
// line-delimited JSON file format.
//
// File layout, one JSON object per line:
//   {"format":"srl-dataset","version":1,"environment":...,"data_seed":...,"hidden":{...}}
//   {"split":"train","id":0,"episode_seed":...,"data":{...}}
//   ...

#include "srl/config.hpp"
#include "srl/dap.hpp"
#include "srl/env.hpp"
#include "srl/gspp.hpp"
#include "srl/smsp.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace srl {

inline constexpr int kDatasetVersion = 1;

template <class Data>
using Split = std::vector<DatasetItem<Data>>;

template <class Data>
struct Dataset {
  Split<Data> train;
  Split<Data> val;
  Split<Data> test;
};

/// Independent stream for (seed, tag): the same seed with different tags
/// never shares draws.
Rng derived_rng(std::uint64_t seed, std::uint64_t tag);

enum class StreamTag : std::uint64_t { hidden = 1, train = 2, val = 3, test = 4 };

template <class Env>
Split<typename Env::InstanceData> generate_split(const Env& env, std::uint64_t data_seed, StreamTag tag, int size) {
  Rng rng = derived_rng(data_seed, static_cast<std::uint64_t>(tag));
  Split<typename Env::InstanceData> out;
  out.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) {
    const std::uint64_t episode_seed = rng();
    out.push_back({i, episode_seed, env.generate(rng)});
  }
  return out;
}

template <class Env>
Dataset<typename Env::InstanceData> generate_dataset(const Env& env, const ExperimentConfig& c) {
  return {generate_split(env, c.data_seed, StreamTag::train, c.train_size),
          generate_split(env, c.data_seed, StreamTag::val, c.val_size),
          generate_split(env, c.data_seed, StreamTag::test, c.test_size)};
}

/// Environments built from the config; hidden models come from the data seed.
smsp::Env make_smsp_env(const ExperimentConfig& c);
dap::Env make_dap_env(const ExperimentConfig& c);
gspp::Env make_gspp_env(const ExperimentConfig& c);

nlohmann::json to_json(const smsp::Instance& d);
nlohmann::json to_json(const dap::InstanceData& d);
nlohmann::json to_json(const gspp::InstanceData& d);
void from_json(const nlohmann::json& j, smsp::Instance& d);
void from_json(const nlohmann::json& j, dap::InstanceData& d);
void from_json(const nlohmann::json& j, gspp::InstanceData& d);

nlohmann::json hidden_json(const smsp::Env& env);
nlohmann::json hidden_json(const dap::Env& env);
nlohmann::json hidden_json(const gspp::Env& env);

void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& lines);
std::vector<nlohmann::json> read_jsonl(const std::string& path);

template <class Env>
std::vector<nlohmann::json> dataset_lines(const Env& env, std::uint64_t data_seed,
                                          const Dataset<typename Env::InstanceData>& d) {
  std::vector<nlohmann::json> lines;
  lines.push_back({{"format", "srl-dataset"},
                   {"version", kDatasetVersion},
                   {"environment", Env::name()},
                   {"data_seed", data_seed},
                   {"hidden", hidden_json(env)}});
  auto add = [&](const char* split, const auto& items) {
    for (const auto& it : items)
      lines.push_back({{"split", split}, {"id", it.id}, {"episode_seed", it.episode_seed}, {"data", to_json(it.data)}});
  };
  add("train", d.train);
  add("val", d.val);
  add("test", d.test);
  return lines;
}

/// Parses dataset lines written by dataset_lines; checks format, version and
/// environment.
template <class Data>
Dataset<Data> dataset_from_lines(const std::vector<nlohmann::json>& lines, const std::string& environment) {
  if (lines.empty()) throw std::runtime_error("dataset file is empty");
  const auto& h = lines.front();
  if (h.value("format", "") != "srl-dataset") throw std::runtime_error("not an srl dataset file");
  if (h.value("version", 0) != kDatasetVersion)
    throw std::runtime_error("unsupported dataset version " + std::to_string(h.value("version", 0)));
  if (h.value("environment", "") != environment)
    throw std::runtime_error("dataset is for environment '" + h.value("environment", "") + "', expected '" +
                             environment + "'");
  Dataset<Data> d;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    DatasetItem<Data> item;
    item.id = l.at("id").get<int>();
    item.episode_seed = l.at("episode_seed").get<std::uint64_t>();
    from_json(l.at("data"), item.data);
    const std::string split = l.at("split").get<std::string>();
    if (split == "train")
      d.train.push_back(std::move(item));
    else if (split == "val")
      d.val.push_back(std::move(item));
    else if (split == "test")
      d.test.push_back(std::move(item));
    else
      throw std::runtime_error("dataset line " + std::to_string(i + 1) + ": unknown split '" + split + "'");
  }
  return d;
}

}  // namespace srl
