#include "srl/models.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace srl;
using srl::testing::random_vector;

namespace {

// Central finite differences of upstream . forward(params) with respect to
// the parameters.
Vector fd_param_gradient(const Model& m, const Vector& x, const Vector& up, double h = 1e-6) {
  Vector g(m.params.values.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    ParamSet p = m.params, q = m.params;
    p.values[i] += h;
    q.values[i] -= h;
    g[i] = (up.dot(model_forward(p, m.spec, x)) - up.dot(model_forward(q, m.spec, x))) / (2 * h);
  }
  return g;
}

Vector fd_input_gradient(const Model& m, const Vector& x, const Vector& up, double h = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (up.dot(model_forward(m.params, m.spec, a)) - up.dot(model_forward(m.params, m.spec, b))) / (2 * h);
  }
  return g;
}

double rel_err(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(1e-8, b.norm()); }

const ModelSpec kSpecs[] = {
    {ModelKind::linear, 7, 0, 1, OutputActivation::identity},
    {ModelKind::mlp2, 10, 5, 1, OutputActivation::identity},
    {ModelKind::linear, 7, 0, 1, OutputActivation::negative_absolute},
    {ModelKind::linear, 8, 0, 1, OutputActivation::identity},
    {ModelKind::mlp2, 6, 4, 3, OutputActivation::negative_absolute},
    {ModelKind::linear, 4, 0, 3, OutputActivation::identity},
};

}  // namespace

TEST_CASE("model_forward examples") {
  SUBCASE("identity linear") {
    ModelSpec spec{ModelKind::linear, 3, 0, 3, OutputActivation::identity};
    ParamSet p = ParamSet::zeros(spec.parameter_count());
    for (int i = 0; i < 3; ++i) p.values[i * 3 + i] = 1.0;
    Vector x(3);
    x << 0.2, -1.5, 4.0;
    CHECK(model_forward(p, spec, x) == x);
  }
  SUBCASE("negative absolute activation") {
    ModelSpec spec{ModelKind::linear, 1, 0, 1, OutputActivation::negative_absolute};
    ParamSet p = ParamSet::zeros(2);
    p.values << 1.0, 0.0;
    CHECK(model_forward(p, spec, Vector::Constant(1, 2.0))[0] == -2.0);
    CHECK(model_forward(p, spec, Vector::Constant(1, -2.0))[0] == -2.0);
  }
  SUBCASE("hand-set 1x1 mlp2") {
    ModelSpec spec{ModelKind::mlp2, 1, 1, 1, OutputActivation::identity};
    ParamSet p = ParamSet::zeros(4);
    p.values << 1.0, 0.0, 2.0, 0.0;  // W1, b1, W2, b2
    CHECK(model_forward(p, spec, Vector::Constant(1, 0.5))[0] == doctest::Approx(0.92423).epsilon(1e-5));
  }
  SUBCASE("dimension mismatch") {
    Rng rng(0);
    const Model m = init_model(kSpecs[0], rng);
    CHECK_THROWS(model_forward(m.params, m.spec, Vector::Zero(3)));
  }
}

TEST_CASE("model_backward analytic identities") {
  Rng rng(1);
  SUBCASE("zero upstream") {
    const Model m = init_model(kSpecs[1], rng);
    const auto g = model_backward(m.params, m.spec, random_vector(10, rng), Vector::Zero(1));
    CHECK(g.params.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.input.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("linear weight gradient is upstream outer x") {
    const Model m = init_model(kSpecs[5], rng);
    const Vector x = random_vector(4, rng);
    const Vector up = random_vector(3, rng);
    const auto g = model_backward(m.params, m.spec, x, up);
    for (int o = 0; o < 3; ++o)
      for (int i = 0; i < 4; ++i) CHECK(g.params[o * 4 + i] == doctest::Approx(up[o] * x[i]));
    for (int o = 0; o < 3; ++o) CHECK(g.params[12 + o] == doctest::Approx(up[o]));
  }
  SUBCASE("negative absolute uses sign(0) = +1") {
    ModelSpec spec{ModelKind::linear, 1, 0, 1, OutputActivation::negative_absolute};
    ParamSet p = ParamSet::zeros(2);
    const auto g = model_backward(p, spec, Vector::Constant(1, 3.0), Vector::Constant(1, 1.0));
    CHECK(g.params[0] == -3.0);
    CHECK(g.params[1] == -1.0);
  }
}

TEST_CASE("model_backward matches finite differences for every spec") {
  Rng rng(2);
  for (const auto& spec : kSpecs) {
    for (int t = 0; t < 20; ++t) {
      const Model m = init_model(spec, rng);
      const Vector x = random_vector(spec.input_dim, rng, -2, 2);
      const Vector up = random_vector(spec.output_dim, rng);
      const auto g = model_backward(m.params, m.spec, x, up);
      CHECK(rel_err(g.params, fd_param_gradient(m, x, up)) <= 1e-6);
      CHECK(rel_err(g.input, fd_input_gradient(m, x, up)) <= 1e-6);
    }
  }
}

TEST_CASE("batched forward/backward equal the per-row versions") {
  Rng rng(3);
  const Model m = init_model(kSpecs[1], rng);
  Matrix xs(5, 10);
  for (int r = 0; r < 5; ++r) xs.row(r) = random_vector(10, rng).transpose();
  const Vector up = random_vector(5, rng);
  const Vector scores = score_rows(m, xs);
  Vector sum = Vector::Zero(m.params.values.size());
  for (int r = 0; r < 5; ++r) {
    CHECK(scores[r] == doctest::Approx(model_forward(m.params, m.spec, xs.row(r).transpose())[0]));
    sum += model_backward(m.params, m.spec, xs.row(r).transpose(), Vector::Constant(1, up[r])).params;
  }
  CHECK(rel_err(score_rows_backward(m, xs, up), sum) <= 1e-12);
}

TEST_CASE("negative absolute outputs are never positive") {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const Model m = init_model(kSpecs[2], rng);
    CHECK(model_forward(m.params, m.spec, random_vector(7, rng, -5, 5))[0] <= 0.0);
  }
}

TEST_CASE("adam_step") {
  SUBCASE("zero gradient leaves parameters unchanged") {
    ParamSet p = ParamSet::zeros(3);
    p.values << 1, 2, 3;
    const Vector before = p.values;
    adam_step(p, Vector::Zero(3), 0.1);
    CHECK(p.values == before);
    CHECK(p.step == 1);
  }
  SUBCASE("first step moves by lr against the gradient sign") {
    // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + 1e-8).
    for (double g : {0.3, -2.0, 0.05}) {
      ParamSet p = ParamSet::zeros(1);
      adam_step(p, Vector::Constant(1, g), 0.01);
      CHECK(std::abs(p.values[0] + 0.01 * (g > 0 ? 1.0 : -1.0)) <= 1e-6 * 0.01);
    }
  }
  SUBCASE("deterministic") {
    ParamSet a = ParamSet::zeros(2), b = ParamSet::zeros(2);
    Vector g(2);
    g << 0.5, -0.25;
    adam_step(a, g, 0.1);
    adam_step(b, g, 0.1);
    CHECK(a.values == b.values);
    CHECK(a.first_moment == b.first_moment);
    CHECK(a.second_moment == b.second_moment);
  }
}

TEST_CASE("schedule_at") {
  const ScheduleSpec s{1e-3, 5e-4, 401};
  CHECK(schedule_at(s, 0) == 1e-3);
  CHECK(schedule_at(s, 400) == 5e-4);
  CHECK(schedule_at(s, 10000) == 5e-4);
  CHECK(schedule_at(s, 200) == doctest::Approx(7.5e-4).epsilon(1e-12));
  double prev = schedule_at(s, 0);
  for (long e = 1; e < 500; ++e) {
    const double v = schedule_at(s, e);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("huber_loss") {
  CHECK(huber_loss(0.0, 0.0, 1.0).value == 0.0);
  CHECK(huber_loss(0.0, 0.0, 1.0).gradient == 0.0);
  CHECK(huber_loss(2.0, 0.0, 1.0).value == 1.5);
  CHECK(huber_loss(2.0, 0.0, 1.0).gradient == 1.0);
  const double d = 0.7;
  CHECK(huber_loss(d - 1e-12, 0.0, d).gradient == doctest::Approx(d));
  CHECK(huber_loss(d + 1e-12, 0.0, d).gradient == doctest::Approx(d));
  CHECK(huber_loss(-3.0, 0.0, 1.0).gradient == -1.0);
  CHECK_THROWS(huber_loss(0.0, 0.0, 0.0));
}

TEST_CASE("set model gradient matches finite differences") {
  Rng rng(5);
  SetModel sm{init_model({ModelKind::mlp2, 6, 4, 3, OutputActivation::identity}, rng),
              init_model({ModelKind::mlp2, 3, 5, 1, OutputActivation::identity}, rng)};
  Matrix rows(4, 6);
  for (int r = 0; r < 4; ++r) rows.row(r) = random_vector(6, rng).transpose();
  const auto g = sm.backward(rows, 1.0);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < g.encoder.size(); ++i) {
    SetModel p = sm, q = sm;
    p.encoder.params.values[i] += h;
    q.encoder.params.values[i] -= h;
    CHECK(g.encoder[i] == doctest::Approx((p.forward(rows) - q.forward(rows)) / (2 * h)).epsilon(1e-6));
  }
  for (Eigen::Index i = 0; i < g.head.size(); ++i) {
    SetModel p = sm, q = sm;
    p.head->params.values[i] += h;
    q.head->params.values[i] -= h;
    CHECK(g.head[i] == doctest::Approx((p.forward(rows) - q.forward(rows)) / (2 * h)).epsilon(1e-6));
  }
}
