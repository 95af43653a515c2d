#include "srl/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace srl {

void PerturbationSpec::validate() const {
  if (!(sigma >= 0.0)) throw std::invalid_argument("perturbation sigma must be >= 0");
  if (count < 1) throw std::invalid_argument("perturbation count must be >= 1");
}

namespace {

Vector standard_normal(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(dim);
  for (Eigen::Index i = 0; i < dim; ++i) z[i] = normal(rng);
  return z;
}

void check_finite(const Vector& theta) {
  if (!theta.allFinite()) throw std::invalid_argument("score vector has non-finite entries");
}

}  // namespace

std::vector<Vector> gaussian_perturb(const Vector& theta, const PerturbationSpec& spec, Rng& rng) {
  spec.validate();
  check_finite(theta);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  for (int k = 0; k < spec.count; ++k) out.push_back(theta + spec.sigma * standard_normal(theta.size(), rng));
  return out;
}

std::vector<double> softmax_weights(std::span<const double> q, double tau) {
  if (q.empty()) throw std::invalid_argument("no candidates");
  if (!(tau > 0.0)) throw std::invalid_argument("softmax temperature must be > 0");
  double top = -std::numeric_limits<double>::infinity();
  for (double v : q) top = std::max(top, v / tau);
  std::vector<double> w(q.size());
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    w[i] = std::exp(q[i] / tau - top);
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

TargetAction softmax_target(std::span<const Vector> candidates, std::span<const double> q, double tau) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  if (candidates.size() != q.size())
    throw std::invalid_argument("softmax_target: " + std::to_string(candidates.size()) + " candidates but " +
                                std::to_string(q.size()) + " q-values");
  TargetAction out;
  out.weights = softmax_weights(q, tau);
  out.values = Vector::Zero(candidates.front().size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].size() != out.values.size())
      throw std::invalid_argument("softmax_target: candidate dimensions differ");
    out.values += out.weights[i] * candidates[i];
  }
  return out;
}

TargetAction softmax_target_counted(std::span<const Vector> unique_candidates, std::span<const int> counts,
                                    std::span<const double> q, double tau) {
  if (unique_candidates.empty()) throw std::invalid_argument("no candidates");
  if (unique_candidates.size() != counts.size() || counts.size() != q.size())
    throw std::invalid_argument("softmax_target_counted: length mismatch");
  if (!(tau > 0.0)) throw std::invalid_argument("softmax temperature must be > 0");
  // log(k) + q / tau keeps the count inside the stabilized exponent.
  std::vector<double> logits(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (counts[i] < 1) throw std::invalid_argument("candidate counts must be >= 1");
    logits[i] = tau * std::log(static_cast<double>(counts[i])) + q[i];
  }
  return softmax_target(unique_candidates, logits, tau);
}

double smoothed_max_estimate(const Vector& theta, const Maximizer& maximizer, double eps, int samples,
                             Rng& rng) {
  const auto etas = gaussian_perturb(theta, {eps, samples}, rng);
  double total = 0.0;
  for (const auto& eta : etas) total += eta.dot(maximizer(eta));
  return total / static_cast<double>(samples);
}

FYLossResult fy_loss_and_grad(const Vector& theta, const Vector& target, const Maximizer& maximizer,
                              double eps, int samples, Rng& rng) {
  if (target.size() != theta.size())
    throw std::invalid_argument("fy_loss_and_grad: target has dimension " + std::to_string(target.size()) +
                                ", scores have " + std::to_string(theta.size()));
  const auto etas = gaussian_perturb(theta, {eps, samples}, rng);
  FYLossResult out;
  out.gradient = Vector::Zero(theta.size());
  for (const auto& eta : etas) {
    const Vector a = maximizer(eta);
    // max_a <eta|a> - <eta|target> is >= 0 for every draw when the target is
    // in the convex hull; its expectation equals the smoothed loss.
    out.value += eta.dot(a) - eta.dot(target);
    out.gradient += a;
  }
  const double inv = 1.0 / static_cast<double>(samples);
  out.value *= inv;
  out.gradient = out.gradient * inv - target;
  return out;
}

}  // namespace srl
