#include "srl/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srl {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using ConstVecMap = Eigen::Map<const Vector>;

struct Layers {
  // linear: only layer 1 is used.
  ConstMap w1;
  ConstVecMap b1;
  ConstMap w2;
  ConstVecMap b2;
};

Layers view(const ParamSet& p, const ModelSpec& s) {
  const double* d = p.values.data();
  if (s.kind == ModelKind::linear) {
    return {ConstMap(d, s.output_dim, s.input_dim), ConstVecMap(d + s.output_dim * s.input_dim, s.output_dim),
            ConstMap(nullptr, 0, 0), ConstVecMap(nullptr, 0)};
  }
  const int h = s.hidden_dim;
  const double* w2 = d + h * s.input_dim + h;
  return {ConstMap(d, h, s.input_dim), ConstVecMap(d + h * s.input_dim, h), ConstMap(w2, s.output_dim, h),
          ConstVecMap(w2 + s.output_dim * h, s.output_dim)};
}

void check_params(const ParamSet& p, const ModelSpec& s) {
  s.validate();
  if (p.values.size() != s.parameter_count())
    throw std::invalid_argument("parameter count " + std::to_string(p.values.size()) + " does not match model (" +
                                std::to_string(s.parameter_count()) + ")");
}

void apply_output(Matrix& z, OutputActivation act) {
  if (act == OutputActivation::negative_absolute) z = -z.cwiseAbs();
}

// Derivative of the output activation at pre-activation z; sign(0) = +1.
Matrix output_derivative(const Matrix& pre, OutputActivation act) {
  if (act == OutputActivation::identity) return Matrix::Ones(pre.rows(), pre.cols());
  return pre.unaryExpr([](double v) { return v >= 0.0 ? -1.0 : 1.0; });
}

}  // namespace

std::string to_string(ModelKind kind) { return kind == ModelKind::linear ? "linear" : "mlp2"; }

std::string to_string(OutputActivation act) {
  return act == OutputActivation::identity ? "identity" : "negative_absolute";
}

void ModelSpec::validate() const {
  if (input_dim < 1 || output_dim < 1) throw std::invalid_argument("model dimensions must be >= 1");
  if (kind == ModelKind::mlp2 && hidden_dim < 1) throw std::invalid_argument("mlp2 requires hidden_dim >= 1");
}

int ModelSpec::parameter_count() const {
  if (kind == ModelKind::linear) return output_dim * input_dim + output_dim;
  return hidden_dim * input_dim + hidden_dim + output_dim * hidden_dim + output_dim;
}

ParamSet ParamSet::zeros(int count) {
  return {Vector::Zero(count), Vector::Zero(count), Vector::Zero(count), 0};
}

Model init_model(const ModelSpec& spec, Rng& rng) {
  spec.validate();
  Model m{spec, ParamSet::zeros(spec.parameter_count())};
  auto fill = [&](int offset, int count, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (int i = 0; i < count; ++i) m.params.values[offset + i] = u(rng);
  };
  if (spec.kind == ModelKind::linear) {
    fill(0, spec.parameter_count(), spec.input_dim);
  } else {
    const int first = spec.hidden_dim * spec.input_dim + spec.hidden_dim;
    fill(0, first, spec.input_dim);
    fill(first, spec.parameter_count() - first, spec.hidden_dim);
  }
  return m;
}

Matrix model_forward_rows(const ParamSet& params, const ModelSpec& spec, const Matrix& xs) {
  check_params(params, spec);
  if (xs.cols() != spec.input_dim)
    throw std::invalid_argument("input has " + std::to_string(xs.cols()) + " features, model expects " +
                                std::to_string(spec.input_dim));
  const Layers l = view(params, spec);
  Matrix z;
  if (spec.kind == ModelKind::linear) {
    z = xs * l.w1.transpose();
    z.rowwise() += l.b1.transpose();
  } else {
    Matrix h = xs * l.w1.transpose();
    h.rowwise() += l.b1.transpose();
    h = h.array().tanh().matrix();
    z = h * l.w2.transpose();
    z.rowwise() += l.b2.transpose();
  }
  apply_output(z, spec.output_activation);
  return z;
}

BatchGradients model_backward_rows(const ParamSet& params, const ModelSpec& spec, const Matrix& xs,
                                   const Matrix& upstream) {
  check_params(params, spec);
  if (xs.cols() != spec.input_dim || upstream.cols() != spec.output_dim || upstream.rows() != xs.rows())
    throw std::invalid_argument("model_backward: shape mismatch");
  const Layers l = view(params, spec);
  BatchGradients g{Vector::Zero(spec.parameter_count()), Matrix()};
  double* out = g.params.data();
  if (spec.kind == ModelKind::linear) {
    Matrix pre = xs * l.w1.transpose();
    pre.rowwise() += l.b1.transpose();
    const Matrix dz = upstream.cwiseProduct(output_derivative(pre, spec.output_activation));
    Eigen::Map<RowMajor>(out, spec.output_dim, spec.input_dim) = dz.transpose() * xs;
    Eigen::Map<Vector>(out + spec.output_dim * spec.input_dim, spec.output_dim) = dz.colwise().sum().transpose();
    g.inputs = dz * l.w1;
    return g;
  }
  const int h = spec.hidden_dim;
  Matrix hidden = xs * l.w1.transpose();
  hidden.rowwise() += l.b1.transpose();
  hidden = hidden.array().tanh().matrix();
  Matrix pre = hidden * l.w2.transpose();
  pre.rowwise() += l.b2.transpose();
  const Matrix dz = upstream.cwiseProduct(output_derivative(pre, spec.output_activation));
  const Matrix dh = (dz * l.w2).cwiseProduct((1.0 - hidden.array().square()).matrix());
  Eigen::Map<RowMajor>(out, h, spec.input_dim) = dh.transpose() * xs;
  Eigen::Map<Vector>(out + h * spec.input_dim, h) = dh.colwise().sum().transpose();
  double* w2 = out + h * spec.input_dim + h;
  Eigen::Map<RowMajor>(w2, spec.output_dim, h) = dz.transpose() * hidden;
  Eigen::Map<Vector>(w2 + spec.output_dim * h, spec.output_dim) = dz.colwise().sum().transpose();
  g.inputs = dh * l.w1;
  return g;
}

Vector model_forward(const ParamSet& params, const ModelSpec& spec, const Vector& x) {
  if (x.size() != spec.input_dim)
    throw std::invalid_argument("input has dimension " + std::to_string(x.size()) + ", model expects " +
                                std::to_string(spec.input_dim));
  return model_forward_rows(params, spec, x.transpose()).row(0).transpose();
}

ModelGradients model_backward(const ParamSet& params, const ModelSpec& spec, const Vector& x,
                              const Vector& upstream) {
  if (x.size() != spec.input_dim || upstream.size() != spec.output_dim)
    throw std::invalid_argument("model_backward: dimension mismatch");
  auto g = model_backward_rows(params, spec, x.transpose(), upstream.transpose());
  return {std::move(g.params), g.inputs.row(0).transpose()};
}

Vector score_rows(const Model& model, const Matrix& xs) {
  if (model.spec.output_dim != 1) throw std::invalid_argument("score model must have a scalar output");
  return model_forward_rows(model.params, model.spec, xs).col(0);
}

Vector score_rows_backward(const Model& model, const Matrix& xs, const Vector& upstream) {
  if (upstream.size() != xs.rows()) throw std::invalid_argument("one upstream value per row expected");
  return model_backward_rows(model.params, model.spec, xs, upstream).params;
}

void adam_step(ParamSet& p, const Vector& grads, double lr, const AdamConfig& cfg) {
  if (grads.size() != p.values.size()) throw std::invalid_argument("adam_step: gradient size mismatch");
  p.step += 1;
  p.first_moment = cfg.beta1 * p.first_moment + (1.0 - cfg.beta1) * grads;
  p.second_moment = cfg.beta2 * p.second_moment + (1.0 - cfg.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p.step));
  p.values.array() -=
      lr * (p.first_moment.array() / c1) / ((p.second_moment.array() / c2).sqrt() + cfg.epsilon);
}

double schedule_at(const ScheduleSpec& spec, long episode) {
  if (spec.horizon < 1) throw std::invalid_argument("schedule horizon must be >= 1");
  if (episode >= spec.horizon - 1) return spec.end;
  if (episode <= 0) return spec.start;
  const double frac = static_cast<double>(episode) / static_cast<double>(spec.horizon - 1);
  return spec.start + (spec.end - spec.start) * frac;
}

HuberResult huber_loss(double pred, double target, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("huber delta must be > 0");
  const double e = pred - target;
  if (std::abs(e) <= delta) return {0.5 * e * e, e};
  return {delta * (std::abs(e) - 0.5 * delta), e > 0.0 ? delta : -delta};
}

double SetModel::forward(const Matrix& rows) const {
  const Matrix enc = model_forward_rows(encoder.params, encoder.spec, rows);
  const Vector pooled = enc.colwise().sum().transpose();
  if (!head) {
    if (pooled.size() != 1) throw std::invalid_argument("set model without head needs a scalar encoder");
    return pooled[0];
  }
  return model_forward(head->params, head->spec, pooled)[0];
}

SetModel::Gradients SetModel::backward(const Matrix& rows, double upstream) const {
  const Matrix enc = model_forward_rows(encoder.params, encoder.spec, rows);
  Gradients g;
  Vector d_pooled;
  if (head) {
    const Vector pooled = enc.colwise().sum().transpose();
    auto hg = model_backward(head->params, head->spec, pooled, Vector::Constant(1, upstream));
    g.head = std::move(hg.params);
    d_pooled = std::move(hg.input);
  } else {
    d_pooled = Vector::Constant(1, upstream);
  }
  const Matrix up = Matrix::Ones(rows.rows(), 1) * d_pooled.transpose();
  g.encoder = model_backward_rows(encoder.params, encoder.spec, rows, up).params;
  return g;
}

void SetModel::adam_step(const Gradients& grads, double lr) {
  srl::adam_step(encoder.params, grads.encoder, lr);
  if (head) srl::adam_step(head->params, grads.head, lr);
}

}  // namespace srl
