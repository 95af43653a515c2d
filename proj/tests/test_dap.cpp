#include "srl/dap.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace srl;
using namespace srl::dap;

namespace {

Vector weights(double t0, double t1, double t2, double t3, double price) {
  Vector w(5);
  w << t0, t1, t2, t3, price;
  return w;
}

Vector random_assortment(const Env& env, Rng& rng) {
  return topk_argmax(srl::testing::random_vector(env.params().items, rng), env.space());
}

}  // namespace

TEST_CASE("mnl examples") {
  const Vector one = mnl_probs(std::vector<double>{0.0});
  CHECK(one[0] == doctest::Approx(0.5));
  CHECK(one[1] == doctest::Approx(0.5));
  const Vector two = mnl_probs(std::vector<double>{0.0, 0.0});
  for (int i = 0; i < 3; ++i) CHECK(two[i] == doctest::Approx(1.0 / 3.0));
  const Vector big = mnl_probs(std::vector<double>{50.0, 0.0});
  CHECK(std::abs(big[0] - 1.0) <= 1e-9);
  const Vector huge = mnl_probs(std::vector<double>{1e4, -1e4});
  CHECK(huge.allFinite());
  CHECK(huge[0] == 1.0);
  const Vector tiny = mnl_probs(std::vector<double>{-1e4});
  CHECK(tiny[1] == 1.0);
}

TEST_CASE("mnl probabilities sum to one on random states") {
  Rng rng(21);
  const Env env({}, draw_customer(rng));
  auto s = env.initial_state(env.generate(rng));
  for (int t = 0; t < 1000; ++t) {
    const Vector a = random_assortment(env, rng);
    const Vector u = env.utilities(s);
    std::vector<double> theta;
    for (int i : env.offered(a)) theta.push_back(u[i]);
    const Vector p = mnl_probs(theta);
    CHECK(p.size() == 5);
    CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
    CHECK(p.minCoeff() >= 0.0);
    auto res = env.step(s, a, rng);
    s = res.terminal ? env.initial_state(env.generate(rng)) : res.next;
  }
}

TEST_CASE("generator contract") {
  Rng a(22), b(22);
  const Env env({}, draw_customer(a));
  const Env env2({}, draw_customer(b));
  CHECK(env.customer() == env2.customer());
  const auto d = env.generate(a), e = env2.generate(b);
  CHECK(d == e);
  CHECK(d.traits.rows() == 20);
  CHECK(env.params().assortment == 4);
  CHECK(d.prices.minCoeff() >= 1.0);
  CHECK(d.prices.maxCoeff() <= 10.0);
  CHECK(d.traits.minCoeff() >= 0.0);
  CHECK(d.traits.maxCoeff() <= 1.0);
}

TEST_CASE("step dynamics") {
  Rng rng(23);
  const Env never({}, weights(0, 0, 0, 0, -1e3));
  const Env always({}, weights(0, 0, 0, 0, 1e3));
  const auto s0 = never.initial_state(never.generate(rng));
  const Vector a = never.greedy_action(s0);

  SUBCASE("no purchase changes nothing") {
    const auto res = never.step(s0, a, rng);
    CHECK(res.reward == 0.0);
    CHECK(res.next.traits == s0.traits);
    CHECK(res.next.t == 1);
  }
  SUBCASE("hype rises by h and decays back in four steps") {
    const auto res = always.step(s0, a, rng);
    CHECK(res.reward > 0.0);
    int bought = -1;
    for (int i = 0; i < 20; ++i)
      if (res.next.traits(i, kHypeTrait) != s0.traits(i, kHypeTrait)) bought = i;
    REQUIRE(bought >= 0);
    CHECK(res.reward == s0.prices[bought]);
    CHECK(res.next.traits(bought, kHypeTrait) - s0.traits(bought, kHypeTrait) == doctest::Approx(0.5));
    CHECK(res.next.traits(bought, kSatisfactionTrait) - s0.traits(bought, kSatisfactionTrait) ==
          doctest::Approx(0.1));
    auto s = res.next;
    for (int k = 1; k <= 4; ++k) {
      s = never.step(s, a, rng).next;
      const double expected = s0.traits(bought, kHypeTrait) + 0.5 - 0.125 * k;
      CHECK(std::abs(s.traits(bought, kHypeTrait) - expected) <= 1e-12);
    }
    CHECK(std::abs(s.traits(bought, kHypeTrait) - s0.traits(bought, kHypeTrait)) <= 1e-12);
    CHECK(s.hype_ledger.empty());
    CHECK(s.traits(bought, kSatisfactionTrait) - s0.traits(bought, kSatisfactionTrait) == doctest::Approx(0.1));
  }
  SUBCASE("wrong cardinality") {
    Vector bad = a;
    bad[bad.size() - 1] = 1.0 - bad[bad.size() - 1];
    CHECK_THROWS_AS(never.step(s0, bad, rng), std::invalid_argument);
  }
  SUBCASE("episode ends after the horizon") {
    auto s = s0;
    int steps = 0;
    bool done = false;
    while (!done) {
      auto res = never.step(s, a, rng);
      s = res.next;
      done = res.terminal;
      ++steps;
    }
    CHECK(steps == 80);
    CHECK_THROWS(never.step(s, a, rng));
  }
}

TEST_CASE("ledger oracle replays hype over random episodes") {
  // Hype of a purchase made on step tau contributes h - h/4 * (t - tau - 1)
  // at state t for the four steps after it; repurchases stack.
  Rng rng(24);
  const Env env({}, weights(0.5, -0.5, 1.0, 1.0, 2.0));
  const auto d = env.generate(rng);
  auto s = env.initial_state(d);
  std::vector<std::pair<int, int>> purchases;  // (step, item)
  for (int t = 0; t < 80; ++t) {
    const Vector a = random_assortment(env, rng);
    const auto res = env.step(s, a, rng);
    for (int i = 0; i < 20; ++i)
      if (res.next.traits(i, kSatisfactionTrait) > s.traits(i, kSatisfactionTrait)) purchases.emplace_back(t, i);
    for (int i = 0; i < 20; ++i) CHECK(res.next.traits(i, kSatisfactionTrait) >= s.traits(i, kSatisfactionTrait));
    s = res.next;
    Vector hype = d.traits.col(kHypeTrait);
    for (auto [tau, item] : purchases) {
      const int age = s.t - tau - 1;
      if (age < 4) hype[item] += 0.5 - 0.125 * age;
    }
    CHECK((s.traits.col(kHypeTrait) - hype).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK(!purchases.empty());
}

TEST_CASE("expert and greedy") {
  SUBCASE("K = n has one assortment") {
    Params p;
    p.items = 4;
    Rng rng(25);
    const Env env(p, draw_customer(rng));
    const auto s = env.initial_state(env.generate(rng));
    CHECK(env.expert_action(s).isOnes());
    CHECK(env.greedy_action(s).isOnes());
  }
  SUBCASE("equal utilities: the pricier item wins") {
    Params p;
    p.items = 2;
    p.assortment = 1;
    const Env env(p, weights(0, 0, 0, 0, 0));
    InstanceData d{Matrix::Constant(2, 4, 0.5), Vector(2)};
    d.prices << 1.0, 2.0;
    const Vector a = env.expert_action(env.initial_state(d));
    CHECK(a[0] == 0.0);
    CHECK(a[1] == 1.0);
  }
  SUBCASE("expert is the enumeration optimum and bounds greedy") {
    Params p;
    p.items = 8;
    p.assortment = 3;
    Rng rng(26);
    const Env env(p, draw_customer(rng));
    const auto all = enumerate_actions(env.space());
    for (int t = 0; t < 30; ++t) {
      const auto s = env.initial_state(env.generate(rng));
      double best = -1.0;
      for (const auto& a : all) best = std::max(best, env.expected_revenue(s, a));
      CHECK(env.expected_revenue(s, env.expert_action(s)) == doctest::Approx(best).epsilon(1e-12));
      CHECK(env.expected_revenue(s, env.expert_action(s)) >= env.expected_revenue(s, env.greedy_action(s)));
    }
  }
  SUBCASE("full size expert bounds greedy along a trajectory") {
    Rng rng(27);
    const Env env({}, draw_customer(rng));
    auto s = env.initial_state(env.generate(rng));
    for (int t = 0; t < 80; ++t) {
      const Vector e = env.expert_action(s);
      CHECK(e.sum() == 4.0);
      CHECK(env.expected_revenue(s, e) >= env.expected_revenue(s, env.greedy_action(s)));
      s = env.step(s, e, rng).next;
    }
  }
}

TEST_CASE("feature extraction") {
  Rng rng(28);
  const Env env({}, weights(0, 0, 0, 0, 1e3));
  const auto s0 = env.initial_state(env.generate(rng));
  const Matrix x0 = env.actor_features(s0);
  CHECK(x0.rows() == 20);
  CHECK(x0.cols() == 10);
  CHECK(x0.rightCols(4).isZero());
  CHECK(x0.col(5).isZero());
  const Vector a = env.greedy_action(s0);
  const auto s1 = env.step(s0, a, rng).next;
  const Matrix x1 = env.actor_features(s1);
  CHECK(x1(0, 5) == doctest::Approx(1.0 / 80));
  CHECK(x1.col(6).sum() == doctest::Approx(0.5));
  CHECK(x1.col(7).sum() == doctest::Approx(0.1));
  CHECK(x1.col(8).sum() == doctest::Approx(0.5));
  const auto s2 = env.step(s1, Vector(a), rng).next;
  const Matrix x2 = env.actor_features(s2);
  CHECK(x2.col(8).sum() == doctest::Approx(0.5 + 0.5 - 0.125));

  const Matrix c1 = env.immediate_critic_rows(s0, a);
  CHECK(c1.rows() == 4);
  CHECK(c1.cols() == kImmediateCriticInputs);
  const Matrix c2 = env.return_critic_rows(s0, a);
  CHECK(c2.rows() == 20);
  CHECK(c2.cols() == kReturnCriticInputs);
  CHECK(c2.col(10).sum() == 4.0);
}
