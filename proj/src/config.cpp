#include "srl/config.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace srl {

std::string to_string(EnvKind e) {
  switch (e) {
    case EnvKind::smsp: return "smsp";
    case EnvKind::dap: return "dap";
    case EnvKind::gspp: return "gspp";
  }
  return "?";
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::srl: return "srl";
    case Algorithm::sil: return "sil";
    case Algorithm::ppo: return "ppo";
    case Algorithm::greedy: return "greedy";
    case Algorithm::expert: return "expert";
  }
  return "?";
}

EnvKind parse_env_kind(const std::string& s) {
  for (auto e : {EnvKind::smsp, EnvKind::dap, EnvKind::gspp})
    if (to_string(e) == s) return e;
  throw std::invalid_argument("unknown environment '" + s + "' (expected smsp, dap or gspp)");
}

Algorithm parse_algorithm(const std::string& s) {
  for (auto a : {Algorithm::srl, Algorithm::sil, Algorithm::ppo, Algorithm::greedy, Algorithm::expert})
    if (to_string(a) == s) return a;
  throw std::invalid_argument("unknown algorithm '" + s + "' (expected srl, sil, ppo, greedy or expert)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, ptr);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& what) {
  throw std::invalid_argument("config key '" + key + "': cannot parse '" + value + "' as " + what);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v, "a finite number");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a nonnegative integer");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad_value(key, v, "a boolean (true or false)");
}

ScheduleSpec parse_schedule(const std::string& key, const std::string& v) {
  const auto arrow = v.find("->");
  if (arrow == std::string::npos) return ScheduleSpec::constant(parse_double(key, v));
  return {parse_double(key, trim(v.substr(0, arrow))), parse_double(key, trim(v.substr(arrow + 2))), 1};
}

std::string fmt_schedule(const ScheduleSpec& s) {
  return s.is_constant() ? fmt_double(s.start) : fmt_double(s.start) + " -> " + fmt_double(s.end);
}

std::vector<std::uint64_t> parse_seeds(const std::string& key, const std::string& v) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto dots = item.find("..");
    if (dots != std::string::npos) {
      const auto lo = parse_u64(key, trim(item.substr(0, dots)));
      const auto hi = parse_u64(key, trim(item.substr(dots + 2)));
      if (hi < lo) bad_value(key, v, "a seed range lo..hi with lo <= hi");
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      out.push_back(parse_u64(key, item));
    }
  }
  return out;
}

std::string fmt_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) out += (i ? "," : "") + std::to_string(seeds[i]);
  return out;
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

// Fields reached through an accessor to a nested struct member.
template <class Access>
Field nested_int(std::string key, Access access) {
  return {key,
          [key, access](ExperimentConfig& c, const std::string& v) {
            access(c) = static_cast<std::remove_reference_t<decltype(access(c))>>(parse_int(key, v));
          },
          [access](const ExperimentConfig& c) { return std::to_string(access(const_cast<ExperimentConfig&>(c))); }};
}

template <class Access>
Field nested_double(std::string key, Access access) {
  return {key, [key, access](ExperimentConfig& c, const std::string& v) { access(c) = parse_double(key, v); },
          [access](const ExperimentConfig& c) { return fmt_double(access(const_cast<ExperimentConfig&>(c))); }};
}

template <class Access>
Field nested_bool(std::string key, Access access) {
  return {key, [key, access](ExperimentConfig& c, const std::string& v) { access(c) = parse_bool(key, v); },
          [access](const ExperimentConfig& c) {
            return std::string(access(const_cast<ExperimentConfig&>(c)) ? "true" : "false");
          }};
}

template <class Access>
Field nested_schedule(std::string key, Access access) {
  return {key, [key, access](ExperimentConfig& c, const std::string& v) { access(c) = parse_schedule(key, v); },
          [access](const ExperimentConfig& c) { return fmt_schedule(access(const_cast<ExperimentConfig&>(c))); }};
}

#define SRL_AT(expr) [](ExperimentConfig& c) -> auto& { return c.expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"environment", [](ExperimentConfig& c, const std::string& v) { c.environment = parse_env_kind(v); },
       [](const ExperimentConfig& c) { return to_string(c.environment); }},
      {"algorithm", [](ExperimentConfig& c, const std::string& v) { c.algorithm = parse_algorithm(v); },
       [](const ExperimentConfig& c) { return to_string(c.algorithm); }},
      {"seeds", [](ExperimentConfig& c, const std::string& v) { c.seeds = parse_seeds("seeds", v); },
       [](const ExperimentConfig& c) { return fmt_seeds(c.seeds); }},
      {"data_seed", [](ExperimentConfig& c, const std::string& v) { c.data_seed = parse_u64("data_seed", v); },
       [](const ExperimentConfig& c) { return std::to_string(c.data_seed); }},
      nested_int("episodes", SRL_AT(episodes)),
      nested_int("iterations", SRL_AT(iterations)),
      nested_int("rollouts_per_episode", SRL_AT(rollouts_per_episode)),
      nested_int("dataset.train", SRL_AT(train_size)),
      nested_int("dataset.val", SRL_AT(val_size)),
      nested_int("dataset.test", SRL_AT(test_size)),
      nested_int("eval.val_instances", SRL_AT(val_eval_size)),
      nested_int("env.smsp.jobs", SRL_AT(smsp_jobs)),
      nested_int("env.dap.items", SRL_AT(dap.items)),
      nested_int("env.dap.assortment", SRL_AT(dap.assortment)),
      nested_int("env.dap.horizon", SRL_AT(dap.horizon)),
      nested_double("env.dap.hype", SRL_AT(dap.hype)),
      nested_int("env.dap.hype_steps", SRL_AT(dap.hype_steps)),
      nested_double("env.dap.satisfaction", SRL_AT(dap.satisfaction)),
      nested_double("env.dap.price_min", SRL_AT(dap.price_min)),
      nested_double("env.dap.price_max", SRL_AT(dap.price_max)),
      nested_double("env.dap.price_scale", SRL_AT(dap.price_scale)),
      nested_int("env.gspp.rows", SRL_AT(gspp.rows)),
      nested_int("env.gspp.cols", SRL_AT(gspp.cols)),
      nested_int("env.gspp.horizon", SRL_AT(gspp.horizon)),
      nested_double("env.gspp.rho0", SRL_AT(gspp.rho0)),
      nested_double("env.gspp.rho_clamp", SRL_AT(gspp.rho_clamp)),
      nested_double("env.gspp.cost_weight_min", SRL_AT(gspp.cost_weight_min)),
      nested_double("env.gspp.cost_weight_max", SRL_AT(gspp.cost_weight_max)),
      nested_double("env.gspp.rho_weight_scale", SRL_AT(gspp.rho_weight_scale)),
      nested_int("actor.hidden", SRL_AT(actor_hidden)),
      nested_double("critic.huber_delta", SRL_AT(critic_huber_delta)),
      nested_bool("critic.dap_future", SRL_AT(dap_future_critic)),
      nested_int("critic.dap_hidden", SRL_AT(dap_critic_hidden)),
      nested_int("srl.batch_size", SRL_AT(srl.batch_size)),
      nested_schedule("srl.lr_actor", SRL_AT(srl.lr_actor)),
      nested_schedule("srl.lr_critic", SRL_AT(srl.lr_critic)),
      nested_schedule("srl.sigma_f", SRL_AT(srl.sigma_f)),
      nested_int("srl.candidates", SRL_AT(srl.candidates)),
      nested_schedule("srl.sigma_b", SRL_AT(srl.sigma_b)),
      nested_schedule("srl.tau", SRL_AT(srl.tau)),
      nested_schedule("srl.eps", SRL_AT(srl.eps)),
      nested_int("srl.loss_samples", SRL_AT(srl.loss_samples)),
      nested_double("srl.gamma", SRL_AT(srl.gamma)),
      nested_int("srl.replay_capacity", SRL_AT(srl.replay_capacity)),
      nested_int("srl.critic_warmup_episodes", SRL_AT(srl.critic_warmup_episodes)),
      nested_bool("srl.double_q", SRL_AT(srl.double_q)),
      nested_int("ppo.batch_size", SRL_AT(ppo.batch_size)),
      nested_schedule("ppo.lr_actor", SRL_AT(ppo.lr_actor)),
      nested_schedule("ppo.lr_critic", SRL_AT(ppo.lr_critic)),
      nested_schedule("ppo.sigma_f", SRL_AT(ppo.sigma_f)),
      nested_double("ppo.clip_eps", SRL_AT(ppo.clip_eps)),
      nested_double("ppo.gamma", SRL_AT(ppo.gamma)),
      nested_int("ppo.replay_capacity", SRL_AT(ppo.replay_capacity)),
      nested_int("ppo.critic_warmup_episodes", SRL_AT(ppo.critic_warmup_episodes)),
      nested_bool("ppo.double_q", SRL_AT(ppo.double_q)),
      nested_bool("ppo.dap_future", SRL_AT(ppo.dap_future_critic)),
      nested_int("sil.batch_size", SRL_AT(sil.batch_size)),
      nested_schedule("sil.lr_actor", SRL_AT(sil.lr_actor)),
      nested_double("sil.eps", SRL_AT(sil.eps)),
      nested_int("sil.loss_samples", SRL_AT(sil.loss_samples)),
  };
  return table;
}

#undef SRL_AT

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw std::invalid_argument("config key '" + key + "': " + what);
}

void check_schedule(const ScheduleSpec& s, const std::string& key, bool positive) {
  if (positive)
    require(s.start > 0.0 && s.end > 0.0, key, "schedule values must be > 0");
  else
    require(s.start >= 0.0 && s.end >= 0.0, key, "schedule values must be >= 0");
}

}  // namespace

void bind_schedules(ExperimentConfig& c) {
  const int h = std::max(1, c.episodes);
  for (ScheduleSpec* s : {&c.srl.lr_actor, &c.srl.lr_critic, &c.srl.sigma_f, &c.srl.sigma_b, &c.srl.tau, &c.srl.eps,
                          &c.ppo.lr_actor, &c.ppo.lr_critic, &c.ppo.sigma_f, &c.sil.lr_actor})
    s->horizon = h;
}

void ExperimentConfig::validate() const {
  require(!seeds.empty(), "seeds", "at least one seed is required");
  require(episodes >= 0, "episodes", "must be >= 0");
  require(iterations >= 0, "iterations", "must be >= 0");
  require(rollouts_per_episode >= 1, "rollouts_per_episode", "must be >= 1");
  require(train_size >= 1, "dataset.train", "must be >= 1");
  require(val_size >= 1, "dataset.val", "must be >= 1");
  require(test_size >= 1, "dataset.test", "must be >= 1");
  require(val_eval_size >= 0, "eval.val_instances", "must be >= 0");
  require(smsp_jobs >= 1, "env.smsp.jobs", "must be >= 1");
  require(actor_hidden >= 1, "actor.hidden", "must be >= 1");
  require(critic_huber_delta > 0.0, "critic.huber_delta", "must be > 0");
  require(dap_critic_hidden >= 1, "critic.dap_hidden", "must be >= 1");
  dap.validate();
  gspp.validate();

  require(srl.batch_size >= 1, "srl.batch_size", "must be >= 1");
  check_schedule(srl.lr_actor, "srl.lr_actor", false);
  check_schedule(srl.lr_critic, "srl.lr_critic", false);
  check_schedule(srl.sigma_f, "srl.sigma_f", false);
  check_schedule(srl.sigma_b, "srl.sigma_b", false);
  check_schedule(srl.tau, "srl.tau", true);
  check_schedule(srl.eps, "srl.eps", false);
  require(srl.candidates >= 1, "srl.candidates", "m must be >= 1");
  require(srl.loss_samples >= 1, "srl.loss_samples", "M must be >= 1");
  require(srl.gamma >= 0.0 && srl.gamma <= 1.0, "srl.gamma", "must lie in [0, 1]");
  require(srl.replay_capacity >= srl.batch_size, "srl.replay_capacity", "must hold at least one batch");
  require(srl.critic_warmup_episodes >= 0, "srl.critic_warmup_episodes", "must be >= 0");

  require(ppo.batch_size >= 1, "ppo.batch_size", "must be >= 1");
  check_schedule(ppo.lr_actor, "ppo.lr_actor", false);
  check_schedule(ppo.lr_critic, "ppo.lr_critic", false);
  check_schedule(ppo.sigma_f, "ppo.sigma_f", true);
  require(ppo.clip_eps >= 0.0, "ppo.clip_eps", "must be >= 0");
  require(ppo.gamma >= 0.0 && ppo.gamma <= 1.0, "ppo.gamma", "must lie in [0, 1]");
  require(ppo.replay_capacity >= ppo.batch_size, "ppo.replay_capacity", "must hold at least one batch");
  require(ppo.critic_warmup_episodes >= 0, "ppo.critic_warmup_episodes", "must be >= 0");

  require(sil.batch_size >= 1, "sil.batch_size", "must be >= 1");
  check_schedule(sil.lr_actor, "sil.lr_actor", false);
  require(sil.eps >= 0.0, "sil.eps", "must be >= 0");
  require(sil.loss_samples >= 1, "sil.loss_samples", "M must be >= 1");
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  std::map<std::string, const Field*> by_key;
  for (const auto& f : fields()) by_key[f.key] = &f;

  ExperimentConfig c;
  bool have_env = false;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw std::invalid_argument(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = by_key.find(key);
    if (it == by_key.end()) throw std::invalid_argument(where + ": unknown config key '" + key + "'");
    if (seen.count(key)) throw std::invalid_argument(where + ": duplicate config key '" + key + "'");
    seen[key] = line_no;
    try {
      it->second->set(c, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + ": " + e.what());
    }
    have_env = have_env || key == "environment";
  }
  if (!have_env) throw std::invalid_argument(origin + ": missing required config key 'environment'");
  bind_schedules(c);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

std::string emit_config(const ExperimentConfig& c) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(c) + "\n";
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& f : fields()) {
    if (f.key == "seeds") continue;
    for (unsigned char ch : f.key + "=" + f.get(c) + "\n") {
      h ^= ch;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::string hex_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace srl
