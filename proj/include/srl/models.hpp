#pragma once

// Small differentiable score models with hand-written backprop, the Adam
// optimizer, linear schedules and the Huber loss.

#include "srl/types.hpp"

#include <optional>
#include <string>

namespace srl {

enum class ModelKind { linear, mlp2 };
enum class OutputActivation { identity, negative_absolute };

std::string to_string(ModelKind kind);
std::string to_string(OutputActivation act);

/// linear: act(W x + b).  mlp2: act(W2 tanh(W1 x + b1) + b2).
struct ModelSpec {
  ModelKind kind = ModelKind::linear;
  int input_dim = 1;
  int hidden_dim = 0;  // mlp2 only
  int output_dim = 1;
  OutputActivation output_activation = OutputActivation::identity;

  void validate() const;
  int parameter_count() const;
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Flat parameters plus Adam moments. Layout: linear [W (row-major), b];
/// mlp2 [W1, b1, W2, b2].
struct ParamSet {
  Vector values;
  Vector first_moment;
  Vector second_moment;
  long step = 0;

  static ParamSet zeros(int count);
};

struct Model {
  ModelSpec spec;
  ParamSet params;
};

struct ModelGradients {
  Vector params;  // d(upstream . output) / d params
  Vector input;   // d(upstream . output) / d x
};

/// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer.
Model init_model(const ModelSpec& spec, Rng& rng);

Vector model_forward(const ParamSet& params, const ModelSpec& spec, const Vector& x);
ModelGradients model_backward(const ParamSet& params, const ModelSpec& spec, const Vector& x,
                              const Vector& upstream);

/// Batched versions: one sample per row of xs. Outputs are rows as well.
Matrix model_forward_rows(const ParamSet& params, const ModelSpec& spec, const Matrix& xs);
/// Parameter gradient summed over rows, plus the per-row input gradients.
struct BatchGradients {
  Vector params;
  Matrix inputs;
};
BatchGradients model_backward_rows(const ParamSet& params, const ModelSpec& spec, const Matrix& xs,
                                   const Matrix& upstream);

/// Scalar-output model applied independently to each row: one score per row.
Vector score_rows(const Model& model, const Matrix& xs);
/// Parameter gradient of upstream . score_rows(model, xs).
Vector score_rows_backward(const Model& model, const Matrix& xs, const Vector& upstream);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

void adam_step(ParamSet& params, const Vector& grads, double lr, const AdamConfig& cfg = {});

struct ScheduleSpec {
  double start = 0.0;
  double end = 0.0;
  int horizon = 1;

  static ScheduleSpec constant(double v) { return {v, v, 1}; }
  bool is_constant() const { return start == end; }
  friend bool operator==(const ScheduleSpec&, const ScheduleSpec&) = default;
};

/// Linear from start (episode 0) to end (episode horizon-1), clamped after.
double schedule_at(const ScheduleSpec& spec, long episode);

struct HuberResult {
  double value = 0.0;
  double gradient = 0.0;  // with respect to pred
};

HuberResult huber_loss(double pred, double target, double delta);

/// Permutation-invariant set function: head(sum_rows encoder(row)), with an
/// identity head when none is given. Scalar output.
struct SetModel {
  Model encoder;
  std::optional<Model> head;

  double forward(const Matrix& rows) const;

  struct Gradients {
    Vector encoder;
    Vector head;  // empty without a head
  };
  Gradients backward(const Matrix& rows, double upstream) const;
  void adam_step(const Gradients& grads, double lr);
};

}  // namespace srl
