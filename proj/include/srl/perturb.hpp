#pragma once

// Gaussian perturbations, the perturbed Fenchel-Young loss and the
// softmax-weighted target action.

#include "srl/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace srl {

/// A linear maximizer bound to one state: returns argmax_{a in A(s)} <theta|a>.
using Maximizer = std::function<Vector(const Vector&)>;

struct PerturbationSpec {
  double sigma = 0.0;
  int count = 1;

  void validate() const;
};

struct TargetAction {
  Vector values;
  std::vector<double> weights;  // one per candidate, sums to one
};

struct FYLossResult {
  double value = 0.0;
  Vector gradient;
};

/// Draws spec.count vectors theta + sigma * Z with Z i.i.d. standard normal.
std::vector<Vector> gaussian_perturb(const Vector& theta, const PerturbationSpec& spec, Rng& rng);

/// Softmax of q / tau, stabilized by subtracting the maximum.
std::vector<double> softmax_weights(std::span<const double> q, double tau);

/// Convex combination of the candidates weighted by softmax(q / tau).
/// Duplicate candidates contribute additively.
TargetAction softmax_target(std::span<const Vector> candidates, std::span<const double> q, double tau);

/// Same target computed over unique candidates with multiplicities:
/// weights proportional to count_a * exp(q_a / tau).
TargetAction softmax_target_counted(std::span<const Vector> unique_candidates,
                                    std::span<const int> counts, std::span<const double> q, double tau);

/// (1/M) sum_k max_a (theta + eps Z_k)^T a.
double smoothed_max_estimate(const Vector& theta, const Maximizer& maximizer, double eps, int samples,
                             Rng& rng);

/// Perturbed Fenchel-Young loss between theta and target, with its gradient
/// (mean of the perturbed argmax vectors minus the target). Value and
/// gradient share the same noise draws.
FYLossResult fy_loss_and_grad(const Vector& theta, const Vector& target, const Maximizer& maximizer,
                              double eps, int samples, Rng& rng);

}  // namespace srl
