#include "srl/dap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace srl::dap {

void Params::validate() const {
  if (items < 1 || assortment < 1 || assortment > items)
    throw std::invalid_argument("dap: need 1 <= assortment <= items");
  if (horizon < 1) throw std::invalid_argument("dap: horizon must be positive");
  if (hype_steps < 1) throw std::invalid_argument("dap: hype_steps must be positive");
  if (!(price_min > 0.0) || price_max < price_min) throw std::invalid_argument("dap: need 0 < price_min <= price_max");
  if (!(price_scale > 0.0)) throw std::invalid_argument("dap: price_scale must be positive");
}

Vector draw_customer(Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vector phi(kTraitCount + 1);
  for (auto& v : phi) v = n01(rng);
  return phi;
}

Vector mnl_probs(std::span<const double> theta) {
  // Divide through by exp(max(0, max theta)) so nothing overflows.
  double shift = 0.0;
  for (double t : theta) shift = std::max(shift, t);
  Vector p(static_cast<Eigen::Index>(theta.size()) + 1);
  double z = std::exp(-shift);
  p[p.size() - 1] = z;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    p[static_cast<Eigen::Index>(i)] = std::exp(theta[i] - shift);
    z += p[static_cast<Eigen::Index>(i)];
  }
  p /= z;
  return p;
}

Env::Env(Params params, Vector customer) : params_(params), customer_(std::move(customer)) {
  params_.validate();
  if (customer_.size() != kTraitCount + 1)
    throw std::invalid_argument("dap: customer weights must have " + std::to_string(kTraitCount + 1) + " entries");
}

InstanceData Env::generate(Rng& rng) const {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> price(params_.price_min, params_.price_max);
  InstanceData d{Matrix(params_.items, kTraitCount), Vector(params_.items)};
  for (int i = 0; i < params_.items; ++i)
    for (int f = 0; f < kTraitCount; ++f) d.traits(i, f) = u01(rng);
  for (int i = 0; i < params_.items; ++i) d.prices[i] = price(rng);
  return d;
}

State Env::initial_state(const InstanceData& d) const {
  if (d.traits.rows() != params_.items || d.traits.cols() != kTraitCount || d.prices.size() != params_.items)
    throw std::invalid_argument("dap: instance does not match the configured item count");
  return {d.traits, d.traits, d.traits, d.prices, {}, 0};
}

Matrix Env::actor_features(const State& s) const {
  Matrix x(params_.items, kActorInputs);
  const double t_rel = static_cast<double>(s.t) / params_.horizon;
  for (int i = 0; i < params_.items; ++i) {
    x.block(i, 0, 1, kTraitCount) = s.traits.row(i);
    x(i, 4) = s.prices[i] / params_.price_scale;
    x(i, 5) = t_rel;
    x(i, 6) = s.traits(i, kHypeTrait) - s.previous_traits(i, kHypeTrait);
    x(i, 7) = s.traits(i, kSatisfactionTrait) - s.previous_traits(i, kSatisfactionTrait);
    x(i, 8) = s.traits(i, kHypeTrait) - s.initial_traits(i, kHypeTrait);
    x(i, 9) = s.traits(i, kSatisfactionTrait) - s.initial_traits(i, kSatisfactionTrait);
  }
  return x;
}

Vector Env::maximize(const Vector& theta, const State&) const { return topk_argmax(theta, space()); }

Vector Env::utilities(const State& s) const {
  return s.traits * customer_.head(kTraitCount) + (s.prices / params_.price_scale) * customer_[kTraitCount];
}

std::vector<int> Env::offered(const Vector& action) const {
  if (!is_valid_action(action, space()))
    throw std::invalid_argument("dap: assortment must select exactly " + std::to_string(params_.assortment) + " of " +
                                std::to_string(params_.items) + " items");
  std::vector<int> items;
  for (int i = 0; i < params_.items; ++i)
    if (action[i] == 1.0) items.push_back(i);
  return items;
}

double Env::expected_revenue(const State& s, const Vector& action) const {
  const auto items = offered(action);
  const Vector u = utilities(s);
  std::vector<double> theta;
  for (int i : items) theta.push_back(u[i]);
  const Vector p = mnl_probs(theta);
  double r = 0.0;
  for (std::size_t k = 0; k < items.size(); ++k) r += s.prices[items[k]] * p[static_cast<Eigen::Index>(k)];
  return r;
}

StepResult<State> Env::step(const State& s, const Vector& action, Rng& rng) const {
  const auto items = offered(action);
  if (s.t >= params_.horizon) throw std::invalid_argument("dap: episode already finished");
  const Vector u = utilities(s);
  std::vector<double> theta;
  for (int i : items) theta.push_back(u[i]);
  const Vector p = mnl_probs(theta);

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double draw = u01(rng);
  int bought = -1;
  double acc = 0.0;
  for (std::size_t k = 0; k < items.size(); ++k) {
    acc += p[static_cast<Eigen::Index>(k)];
    if (draw < acc) {
      bought = items[k];
      break;
    }
  }

  StepResult<State> out{s, 0.0, false};
  State& n = out.next;
  n.previous_traits = s.traits;
  for (auto& e : n.hype_ledger) {
    n.traits(e.item, kHypeTrait) -= e.decrement;
    --e.steps_left;
  }
  std::erase_if(n.hype_ledger, [](const HypeEntry& e) { return e.steps_left == 0; });
  if (bought >= 0) {
    out.reward = s.prices[bought];
    n.traits(bought, kHypeTrait) += params_.hype;
    n.hype_ledger.push_back({bought, params_.hype / params_.hype_steps, params_.hype_steps});
    n.traits(bought, kSatisfactionTrait) += params_.satisfaction;
  }
  ++n.t;
  out.terminal = n.t >= params_.horizon;
  return out;
}

Vector Env::expert_action(const State& s) const {
  const Vector u = utilities(s);
  const int n = params_.items, k = params_.assortment;
  // Lexicographic combinations; the first maximizer wins.
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::vector<int> best = idx;
  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<double> theta(static_cast<std::size_t>(k));
  while (true) {
    for (int i = 0; i < k; ++i) theta[static_cast<std::size_t>(i)] = u[idx[static_cast<std::size_t>(i)]];
    const Vector p = mnl_probs(theta);
    double r = 0.0;
    for (int i = 0; i < k; ++i) r += s.prices[idx[static_cast<std::size_t>(i)]] * p[i];
    if (r > best_value) {
      best_value = r;
      best = idx;
    }
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  Vector a = Vector::Zero(n);
  for (int i : best) a[i] = 1.0;
  return a;
}

Vector Env::greedy_action(const State& s) const { return topk_argmax(s.prices, space()); }

Matrix Env::immediate_critic_rows(const State& s, const Vector& action) const {
  const auto items = offered(action);
  Matrix x(static_cast<Eigen::Index>(items.size()), kImmediateCriticInputs);
  const double t_rel = static_cast<double>(s.t) / params_.horizon;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    x.block(r, 0, 1, kTraitCount) = s.traits.row(items[k]);
    x(r, 4) = s.prices[items[k]] / params_.price_scale;
    x(r, 5) = t_rel;
  }
  return x;
}

Matrix Env::return_critic_rows(const State& s, const Vector& action) const {
  if (action.size() != params_.items) throw std::invalid_argument("dap: action length does not match item count");
  Matrix x(params_.items, kReturnCriticInputs);
  x.leftCols(kActorInputs) = actor_features(s);
  x.col(kActorInputs) = action;
  return x;
}

}  // namespace srl::dap
