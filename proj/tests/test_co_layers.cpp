#include "srl/co_layers.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace srl;
using srl::testing::max_objective;
using srl::testing::random_vector;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("topk_argmax examples") {
  CHECK(topk_argmax(vec({3, 1, 2}), {3, 2}) == vec({1, 0, 1}));
  CHECK(topk_argmax(vec({1, 1}), {2, 1}) == vec({1, 0}));
  CHECK_THROWS(topk_argmax(vec({1, 2}), {2, 3}));
  CHECK_THROWS(topk_argmax(vec({1, 2, 3}), {2, 1}));
}

TEST_CASE("ranking_argmax examples") {
  CHECK(ranking_argmax(vec({0.1, 0.5, 0.3}), {3}) == vec({1, 3, 2}));
  CHECK(ranking_argmax(vec({-2, 0, 1, 7}), {4}) == vec({1, 2, 3, 4}));
  // Equal scores: lower index gets the lower rank.
  CHECK(ranking_argmax(vec({0.5, 0.5}), {2}) == vec({1, 2}));
}

TEST_CASE("ranking example agrees with exhaustive search over all six permutations") {
  const Vector theta = vec({0.1, 0.5, 0.3});
  const auto perms = enumerate_actions(RankingSpace{3});
  CHECK(theta.dot(ranking_argmax(theta, {3})) == max_objective(theta, perms));
}

TEST_CASE("grid_path_argmax on a 2x2 grid") {
  const GridPathSpace space{2, 2, {0, 0}, {1, 1}};
  const Vector theta = Vector::Constant(4, -1.0);
  const Vector a = grid_path_argmax(theta, space);
  CHECK(a == vec({1, 0, 0, 1}));
  CHECK(theta.dot(a) == -2.0);
}

TEST_CASE("grid_path_argmax rejects positive scores") {
  const GridPathSpace space{2, 2, {0, 0}, {1, 1}};
  CHECK_THROWS_WITH(grid_path_argmax(vec({-1, 0.5, -1, -1}), space),
                    "positive score violates Dijkstra precondition");
  CHECK(grid_path_argmax_clamped(vec({-1, 0.5, -1, -1}), space).sum() >= 2.0);
}

TEST_CASE("2x2 grid path counts") {
  const GridPathSpace space{2, 2, {0, 0}, {1, 1}};
  CHECK(count_simple_paths(space) == 5);
  // {all four cells} is reached by two different walks.
  CHECK(enumerate_actions(space).size() == 4);
}

TEST_CASE("3x3 grid with a cheap corridor matches the exhaustive optimum") {
  const GridPathSpace space{3, 3, {0, 0}, {2, 2}};
  Vector theta = Vector::Constant(9, -10.0);
  // corridor along the top row and the right column
  for (int idx : {0, 1, 2, 5, 8}) theta[idx] = -0.1;
  const Vector a = grid_path_argmax(theta, space);
  const auto all = enumerate_actions(space);
  CHECK(theta.dot(a) == doctest::Approx(max_objective(theta, all)));
  CHECK(a == vec({1, 1, 0, 0, 0, 1, 0, 0, 1}));
}

TEST_CASE("enumerate_actions sizes and guard") {
  CHECK(enumerate_actions(TopKSpace{4, 2}).size() == 6);
  CHECK(enumerate_actions(RankingSpace{3}).size() == 6);
  CHECK_THROWS_WITH(enumerate_actions(RankingSpace{11}), "enumeration too large");
  CHECK_THROWS_WITH(enumerate_actions(TopKSpace{40, 20}), "enumeration too large");
}

TEST_CASE("brute_force_argmax") {
  CHECK(brute_force_argmax(Vector::Zero(4), TopKSpace{4, 2}) == enumerate_actions(TopKSpace{4, 2}).front());
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const Vector theta = random_vector(4, rng);
    CHECK(theta.dot(brute_force_argmax(theta, TopKSpace{4, 2})) == theta.dot(topk_argmax(theta, {4, 2})));
    CHECK(theta.dot(brute_force_argmax(theta, RankingSpace{4})) == theta.dot(ranking_argmax(theta, {4})));
  }
}

TEST_CASE("oracle equivalence on random instances") {
  Rng rng(99);
  const TopKSpace topk{8, 3};
  const RankingSpace rank{5};
  const auto topk_all = enumerate_actions(topk);
  const auto rank_all = enumerate_actions(rank);
  for (int t = 0; t < 100; ++t) {
    const Vector a = random_vector(8, rng);
    const Vector out = topk_argmax(a, topk);
    CHECK(is_valid_action(out, topk));
    CHECK(a.dot(out) == max_objective(a, topk_all));

    const Vector b = random_vector(5, rng);
    const Vector y = ranking_argmax(b, rank);
    CHECK(is_valid_action(y, rank));
    CHECK(b.dot(y) == max_objective(b, rank_all));
  }
  std::uniform_int_distribution<int> cell(0, 2);
  for (int t = 0; t < 30; ++t) {
    GridPathSpace g{3, 3, {cell(rng), cell(rng)}, {cell(rng), cell(rng)}};
    const Vector theta = random_vector(9, rng, -1, 0);
    const Vector path = grid_path_argmax(theta, g);
    CHECK(is_valid_action(path, g));
    CHECK(theta.dot(path) == doctest::Approx(max_objective(theta, enumerate_actions(g))).epsilon(1e-12));
  }
}

TEST_CASE("positive scale invariance and determinism") {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const double c = random_vector(1, rng, 0.1, 10)[0];
    const Vector a = random_vector(6, rng);
    CHECK(a.dot(topk_argmax(c * a, {6, 2})) == doctest::Approx(a.dot(topk_argmax(a, {6, 2}))));
    CHECK(a.dot(ranking_argmax(c * a, {6})) == doctest::Approx(a.dot(ranking_argmax(a, {6}))));
    const Vector g = random_vector(16, rng, -1, 0);
    const GridPathSpace space{4, 4, {0, 1}, {3, 2}};
    const Vector p1 = grid_path_argmax(g, space);
    CHECK(g.dot(grid_path_argmax(c * g, space)) == doctest::Approx(g.dot(p1)));
    CHECK(grid_path_argmax(g, space) == p1);
  }
}

TEST_CASE("path_cells orders a path and rejects non-paths") {
  const GridPathSpace space{3, 3, {0, 0}, {2, 2}};
  const auto cells = path_cells(vec({1, 1, 0, 0, 0, 1, 0, 0, 1}), space);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0] == Cell{0, 0});
  CHECK(cells[3] == Cell{2, 2});
  CHECK_FALSE(is_valid_action(vec({1, 0, 0, 0, 0, 0, 0, 0, 1}), space));
  CHECK_FALSE(is_valid_action(vec({1, 0, 0, 0, 1, 0, 0, 0, 0}), space));
  CHECK(is_valid_action(vec({1, 0, 0, 0, 1, 0, 0, 0, 1}), space));
}
