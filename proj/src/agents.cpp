#include "srl/agents.hpp"

#include <cmath>
#include <numbers>

namespace srl {

void SrlStepParams::validate() const {
  if (candidates < 1) throw std::invalid_argument("srl: candidate count m must be >= 1");
  if (loss_samples < 1) throw std::invalid_argument("srl: loss sample count M must be >= 1");
  if (!(sigma_b >= 0.0)) throw std::invalid_argument("srl: sigma_b must be >= 0");
  if (!(tau > 0.0)) throw std::invalid_argument("srl: tau must be > 0");
  if (!(eps >= 0.0)) throw std::invalid_argument("srl: eps must be >= 0");
  if (!(lr >= 0.0)) throw std::invalid_argument("srl: learning rate must be >= 0");
}

void SilStepParams::validate() const {
  if (loss_samples < 1) throw std::invalid_argument("sil: loss sample count M must be >= 1");
  if (!(eps >= 0.0)) throw std::invalid_argument("sil: eps must be >= 0");
  if (!(lr >= 0.0)) throw std::invalid_argument("sil: learning rate must be >= 0");
}

PpoTerms ppo_terms(double ratio, double advantage, double clip_eps) {
  PpoTerms t;
  t.unclipped = ratio * advantage;
  t.clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps) * advantage;
  t.surrogate = std::min(t.unclipped, t.clipped);
  t.ratio_gradient = t.unclipped <= t.clipped ? advantage : 0.0;
  return t;
}

double gaussian_log_density(const Vector& eta, const Vector& theta, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_log_density: sigma must be > 0");
  if (eta.size() != theta.size()) throw std::invalid_argument("gaussian_log_density: dimension mismatch");
  const double norm = std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
  return -static_cast<double>(eta.size()) * norm - (eta - theta).squaredNorm() / (2.0 * sigma * sigma);
}

}  // namespace srl
