#include "srl/gspp.hpp"

#include <algorithm>
#include <stdexcept>

namespace srl::gspp {

void Params::validate() const {
  if (rows < 1 || cols < 1 || rows * cols < 2) throw std::invalid_argument("gspp: grid needs at least two cells");
  if (horizon < 1) throw std::invalid_argument("gspp: horizon must be positive");
  if (!(rho0 > 0.0)) throw std::invalid_argument("gspp: rho0 must be positive");
  if (!(rho_clamp > 0.0)) throw std::invalid_argument("gspp: rho_clamp must be positive");
  if (!(cost_weight_min > 0.0) || cost_weight_max < cost_weight_min)
    throw std::invalid_argument("gspp: need 0 < cost_weight_min <= cost_weight_max");
  if (rho_weight_scale < 0.0) throw std::invalid_argument("gspp: rho_weight_scale must be nonnegative");
}

Hidden draw_hidden(const Params& params, Rng& rng) {
  std::uniform_real_distribution<double> cw(params.cost_weight_min, params.cost_weight_max);
  std::uniform_real_distribution<double> rw(-params.rho_weight_scale, params.rho_weight_scale);
  Hidden h{Vector(3), Vector(3)};
  for (auto& v : h.cost_weights) v = cw(rng);
  for (auto& v : h.rho_weights) v = rw(rng);
  return h;
}

Env::Env(Params params, Hidden hidden) : params_(params), hidden_(std::move(hidden)) {
  params_.validate();
  if (hidden_.cost_weights.size() != 3 || hidden_.rho_weights.size() != 3)
    throw std::invalid_argument("gspp: hidden weights must have 3 entries each");
}

namespace {

Cell random_cell(int rows, int cols, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, rows * cols - 1);
  const int idx = pick(rng);
  return {idx / cols, idx % cols};
}

Cell random_other_cell(int rows, int cols, Cell avoid, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, rows * cols - 2);
  int idx = pick(rng);
  if (idx >= avoid.row * cols + avoid.col) ++idx;
  return {idx / cols, idx % cols};
}

}  // namespace

InstanceData Env::generate(Rng& rng) const {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  InstanceData d{Matrix(cells(), kCellFeatures), {}, {}};
  for (int c = 0; c < cells(); ++c)
    for (int f = 0; f < kCellFeatures; ++f) d.features(c, f) = u01(rng);
  d.robot = random_cell(params_.rows, params_.cols, rng);
  d.target = random_other_cell(params_.rows, params_.cols, d.robot, rng);
  return d;
}

std::shared_ptr<const Episode> Env::make_episode(const Matrix& features) const {
  if (features.rows() != cells() || features.cols() != kCellFeatures)
    throw std::invalid_argument("gspp: feature matrix must be " + std::to_string(cells()) + " x " +
                                std::to_string(kCellFeatures));
  auto ep = std::make_shared<Episode>();
  ep->features = features;
  ep->cost = features.leftCols(3) * hidden_.cost_weights;
  ep->rho_delta = features.rightCols(3) * hidden_.rho_weights;
  return ep;
}

State Env::initial_state(const InstanceData& d) const {
  const GridPathSpace grid{params_.rows, params_.cols, d.robot, d.target};
  if (!grid.contains(d.robot) || !grid.contains(d.target) || d.robot == d.target)
    throw std::invalid_argument("gspp: robot and target must be distinct cells on the grid");
  return {make_episode(d.features), params_.rho0, d.robot, d.target, 0};
}

Matrix Env::actor_features(const State& s) const {
  Matrix x(cells(), kActorInputs);
  x.leftCols(kCellFeatures) = s.episode->features;
  x.col(kCellFeatures).setConstant(static_cast<double>(s.t) / params_.horizon);
  return x;
}

Vector Env::maximize(const Vector& theta, const State& s) const { return grid_path_argmax_clamped(theta, space(s)); }

double Env::path_cost(const State& s, const Vector& action) const {
  if (!is_valid_action(action, space(s))) throw std::invalid_argument("gspp: action is not a simple robot->target path");
  return action.dot(s.episode->cost);
}

StepResult<State> Env::step(const State& s, const Vector& action, Rng& rng) const {
  if (s.t >= params_.horizon) throw std::invalid_argument("gspp: episode already finished");
  const double cost = path_cost(s, action);
  StepResult<State> out{s, -s.rho * cost, false};
  State& n = out.next;
  n.rho = s.rho * std::max(params_.rho_clamp, 1.0 + action.dot(s.episode->rho_delta));
  n.robot = s.target;
  n.target = random_other_cell(params_.rows, params_.cols, n.robot, rng);
  ++n.t;
  out.terminal = n.t >= params_.horizon;
  return out;
}

Vector Env::expert_action(const State& s) const { return grid_path_argmax(-s.episode->cost, space(s)); }

Vector Env::greedy_action(const State& s) const {
  const GridPathSpace grid = space(s);
  Vector a = Vector::Zero(cells());
  Cell at = s.robot;
  a[grid.index(at)] = 1.0;
  while (!(at == s.target)) {
    if (at.row != s.target.row) at.row += s.target.row > at.row ? 1 : -1;
    if (at.col != s.target.col) at.col += s.target.col > at.col ? 1 : -1;
    a[grid.index(at)] = 1.0;
  }
  return a;
}

Matrix Env::critic_features(const State& s, const Vector& action) const {
  if (action.size() != cells()) throw std::invalid_argument("gspp: action length does not match cell count");
  Matrix x = Matrix::Zero(cells(), kCriticInputs);
  const double t_rel = static_cast<double>(s.t) / params_.horizon;
  for (int c = 0; c < cells(); ++c) {
    if (action[c] == 0.0) continue;
    x.block(c, 0, 1, kCellFeatures) = s.episode->features.row(c);
    x(c, kCellFeatures) = t_rel;
    x(c, kCellFeatures + 1) = s.rho;
  }
  return x;
}

}  // namespace srl::gspp
