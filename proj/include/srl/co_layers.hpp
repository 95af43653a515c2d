#pragma once

// Linear maximizers f(theta, s) = argmax_{a in A(s)} <theta|a> over three
// action families, and exhaustive enumeration oracles for small instances.

#include "srl/types.hpp"

#include <cstddef>
#include <vector>

namespace srl {

/// Select exactly k of n items. Actions are 0/1 vectors with k ones.
struct TopKSpace {
  int n = 1;
  int k = 1;
};

/// Rank n jobs. Actions are permutation vectors with entries 1..n.
struct RankingSpace {
  int n = 1;
};

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Simple source -> destination paths on an 8-connected grid. Actions are 0/1
/// cell-membership vectors of length rows * cols (row-major), both endpoints
/// included.
struct GridPathSpace {
  int rows = 1;
  int cols = 1;
  Cell source;
  Cell destination;

  int index(Cell c) const { return c.row * cols + c.col; }
  Cell cell(int idx) const { return {idx / cols, idx % cols}; }
  bool contains(Cell c) const { return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols; }
  int size() const { return rows * cols; }
};

/// Neighbor visiting order used by Dijkstra and path enumeration: the four
/// axis moves (up, left, right, down) followed by the four diagonals
/// (up-left, up-right, down-left, down-right).
inline constexpr int kNeighborOffsets[8][2] = {{-1, 0}, {0, -1}, {0, 1},  {1, 0},
                                               {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};

inline constexpr std::size_t kEnumerationGuard = 1'000'000;

/// Ones at the k largest scores; ties go to the lowest index.
Vector topk_argmax(const Vector& theta, const TopKSpace& space);

/// Rank n for the largest score, rank 1 for the smallest; among equal scores
/// the lower index receives the lower rank.
Vector ranking_argmax(const Vector& theta, const RankingSpace& space);

/// Maximizes the sum of cell scores along a path (source and destination
/// counted). Requires theta <= 0 so that -theta are valid Dijkstra weights.
Vector grid_path_argmax(const Vector& theta, const GridPathSpace& space);

/// Same path solver with positive entries clamped to zero first. Used on
/// perturbed scores, which can leave the nonpositive orthant.
Vector grid_path_argmax_clamped(const Vector& theta, const GridPathSpace& space);

/// Ordered cell list of a path membership vector, walking from the source.
/// Throws if the vector is not a simple 8-connected source->destination path.
std::vector<Cell> path_cells(const Vector& membership, const GridPathSpace& space);

bool is_valid_action(const Vector& a, const TopKSpace& space);
bool is_valid_action(const Vector& a, const RankingSpace& space);
bool is_valid_action(const Vector& a, const GridPathSpace& space);

std::vector<Vector> enumerate_actions(const TopKSpace& space);
std::vector<Vector> enumerate_actions(const RankingSpace& space);
/// Duplicate-free membership vectors. Two walks over the same cell set give
/// one encoding, so this can be shorter than count_simple_paths().
std::vector<Vector> enumerate_actions(const GridPathSpace& space);

/// Number of distinct simple source->destination walks (orderings counted).
std::size_t count_simple_paths(const GridPathSpace& space);

/// Maximum of <theta|a> over the enumerated set; ties keep the first action.
template <class Space>
Vector brute_force_argmax(const Vector& theta, const Space& space) {
  const auto actions = enumerate_actions(space);
  std::size_t best = 0;
  double best_value = theta.dot(actions[0]);
  for (std::size_t i = 1; i < actions.size(); ++i) {
    const double v = theta.dot(actions[i]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return actions[best];
}

}  // namespace srl
