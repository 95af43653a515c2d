#include "srl/dataset.hpp"

#include <fstream>
#include <random>

namespace srl {

using nlohmann::json;

Rng derived_rng(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return Rng(seq);
}

smsp::Env make_smsp_env(const ExperimentConfig& c) { return smsp::Env(c.smsp_jobs); }

dap::Env make_dap_env(const ExperimentConfig& c) {
  Rng rng = derived_rng(c.data_seed, static_cast<std::uint64_t>(StreamTag::hidden));
  return dap::Env(c.dap, dap::draw_customer(rng));
}

gspp::Env make_gspp_env(const ExperimentConfig& c) {
  Rng rng = derived_rng(c.data_seed, static_cast<std::uint64_t>(StreamTag::hidden));
  return gspp::Env(c.gspp, gspp::draw_hidden(c.gspp, rng));
}

namespace {

json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector to_vector(const json& j) {
  const auto xs = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

json mat(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec(m.row(r).transpose()));
  return rows;
}

Matrix to_matrix(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return {};
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw std::runtime_error("ragged matrix in dataset");
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

json cell(Cell c) { return json::array({c.row, c.col}); }
Cell to_cell(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

}  // namespace

json to_json(const smsp::Instance& d) { return {{"release", d.release}, {"processing", d.processing}}; }
json to_json(const dap::InstanceData& d) { return {{"traits", mat(d.traits)}, {"prices", vec(d.prices)}}; }
json to_json(const gspp::InstanceData& d) {
  return {{"features", mat(d.features)}, {"robot", cell(d.robot)}, {"target", cell(d.target)}};
}

void from_json(const json& j, smsp::Instance& d) {
  d.release = j.at("release").get<std::vector<double>>();
  d.processing = j.at("processing").get<std::vector<double>>();
}
void from_json(const json& j, dap::InstanceData& d) {
  d.traits = to_matrix(j.at("traits"));
  d.prices = to_vector(j.at("prices"));
}
void from_json(const json& j, gspp::InstanceData& d) {
  d.features = to_matrix(j.at("features"));
  d.robot = to_cell(j.at("robot"));
  d.target = to_cell(j.at("target"));
}

json hidden_json(const smsp::Env&) { return json::object(); }
json hidden_json(const dap::Env& env) { return {{"customer", vec(env.customer())}}; }
json hidden_json(const gspp::Env& env) {
  return {{"cost_weights", vec(env.hidden().cost_weights)}, {"rho_weights", vec(env.hidden().rho_weights)}};
}

void write_jsonl(const std::string& path, const std::vector<json>& lines) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  for (const auto& l : lines) f << l.dump() << '\n';
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<json> read_jsonl(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<json> out;
  std::string line;
  int n = 0;
  while (std::getline(f, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace srl
