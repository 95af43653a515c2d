#include "srl/co_layers.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace srl {

namespace {

void check_dim(const Vector& theta, int expected, const char* what) {
  if (theta.size() != expected)
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) +
                                " scores, got " + std::to_string(theta.size()));
}

void check_space(const TopKSpace& s) {
  if (s.n < 1 || s.k < 1 || s.k > s.n)
    throw std::invalid_argument("top-k space requires 1 <= k <= n (n=" + std::to_string(s.n) +
                                ", k=" + std::to_string(s.k) + ")");
}

void check_space(const GridPathSpace& s) {
  if (s.rows < 1 || s.cols < 1) throw std::invalid_argument("grid must have at least one cell");
  if (!s.contains(s.source) || !s.contains(s.destination))
    throw std::invalid_argument("grid path endpoints lie outside the grid");
}

template <class Fn>
void for_each_neighbor(const GridPathSpace& s, int idx, Fn&& fn) {
  const Cell c = s.cell(idx);
  for (const auto& off : kNeighborOffsets) {
    const Cell n{c.row + off[0], c.col + off[1]};
    if (s.contains(n)) fn(s.index(n));
  }
}

bool adjacent(Cell a, Cell b) {
  const int dr = std::abs(a.row - b.row);
  const int dc = std::abs(a.col - b.col);
  return std::max(dr, dc) == 1;
}

}  // namespace

Vector topk_argmax(const Vector& theta, const TopKSpace& space) {
  check_space(space);
  check_dim(theta, space.n, "topk_argmax");
  std::vector<int> order(static_cast<std::size_t>(space.n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return theta[a] > theta[b]; });
  Vector a = Vector::Zero(space.n);
  for (int i = 0; i < space.k; ++i) a[order[static_cast<std::size_t>(i)]] = 1.0;
  return a;
}

Vector ranking_argmax(const Vector& theta, const RankingSpace& space) {
  if (space.n < 1) throw std::invalid_argument("ranking space requires n >= 1");
  check_dim(theta, space.n, "ranking_argmax");
  std::vector<int> order(static_cast<std::size_t>(space.n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return theta[a] < theta[b]; });
  Vector y(space.n);
  for (int r = 0; r < space.n; ++r) y[order[static_cast<std::size_t>(r)]] = static_cast<double>(r + 1);
  return y;
}

Vector grid_path_argmax(const Vector& theta, const GridPathSpace& space) {
  check_space(space);
  check_dim(theta, space.size(), "grid_path_argmax");
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    if (theta[i] > 0.0) throw std::invalid_argument("positive score violates Dijkstra precondition");

  const int n = space.size();
  const int src = space.index(space.source);
  const int dst = space.index(space.destination);
  std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<int> pred(static_cast<std::size_t>(n), -1);
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[static_cast<std::size_t>(src)] = -theta[src];
  heap.emplace(dist[static_cast<std::size_t>(src)], src);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = 1;
    if (u == dst) break;
    for_each_neighbor(space, u, [&](int v) {
      if (done[static_cast<std::size_t>(v)]) return;
      const double nd = d - theta[v];
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        pred[static_cast<std::size_t>(v)] = u;
        heap.emplace(nd, v);
      }
    });
  }
  Vector a = Vector::Zero(n);
  for (int v = dst; v != -1; v = pred[static_cast<std::size_t>(v)]) a[v] = 1.0;
  return a;
}

Vector grid_path_argmax_clamped(const Vector& theta, const GridPathSpace& space) {
  return grid_path_argmax(theta.cwiseMin(0.0), space);
}

std::vector<Cell> path_cells(const Vector& membership, const GridPathSpace& space) {
  check_space(space);
  if (membership.size() != space.size())
    throw std::invalid_argument("path vector has length " + std::to_string(membership.size()) + ", grid has " +
                                std::to_string(space.size()) + " cells");
  std::vector<int> members;
  for (int i = 0; i < space.size(); ++i) {
    const double v = membership[i];
    if (v == 1.0)
      members.push_back(i);
    else if (v != 0.0)
      throw std::invalid_argument("path vector entries must be 0 or 1");
  }
  const int src = space.index(space.source);
  const int dst = space.index(space.destination);
  if (membership[src] != 1.0 || membership[dst] != 1.0)
    throw std::invalid_argument("path does not contain both endpoints");
  if (src == dst) {
    if (members.size() != 1) throw std::invalid_argument("path with equal endpoints must be a single cell");
    return {space.source};
  }

  // Order the member cells as a simple source->destination walk. Sets produced
  // by shortest paths are thin, so backtracking terminates quickly.
  const std::size_t total = members.size();
  std::vector<int> walk{src};
  std::vector<char> used(static_cast<std::size_t>(space.size()), 0);
  used[static_cast<std::size_t>(src)] = 1;
  std::size_t budget = kEnumerationGuard;
  auto extend = [&](auto&& self) -> bool {
    if (budget-- == 0) return false;
    const int u = walk.back();
    if (walk.size() == total) return u == dst;
    if (u == dst) return false;
    bool found = false;
    for_each_neighbor(space, u, [&](int v) {
      if (found || used[static_cast<std::size_t>(v)] || membership[v] != 1.0) return;
      used[static_cast<std::size_t>(v)] = 1;
      walk.push_back(v);
      if (self(self)) {
        found = true;
        return;
      }
      walk.pop_back();
      used[static_cast<std::size_t>(v)] = 0;
    });
    return found;
  };
  if (!extend(extend)) throw std::invalid_argument("cells do not form a simple 8-connected path");
  std::vector<Cell> out;
  out.reserve(walk.size());
  for (int i : walk) out.push_back(space.cell(i));
  return out;
}

bool is_valid_action(const Vector& a, const TopKSpace& space) {
  if (a.size() != space.n) return false;
  int ones = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] == 1.0)
      ++ones;
    else if (a[i] != 0.0)
      return false;
  }
  return ones == space.k;
}

bool is_valid_action(const Vector& a, const RankingSpace& space) {
  if (a.size() != space.n) return false;
  std::vector<char> seen(static_cast<std::size_t>(space.n) + 1, 0);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double v = a[i];
    const int r = static_cast<int>(v);
    if (static_cast<double>(r) != v || r < 1 || r > space.n || seen[static_cast<std::size_t>(r)]) return false;
    seen[static_cast<std::size_t>(r)] = 1;
  }
  return true;
}

bool is_valid_action(const Vector& a, const GridPathSpace& space) {
  try {
    const auto cells = path_cells(a, space);
    for (std::size_t i = 1; i < cells.size(); ++i)
      if (!adjacent(cells[i - 1], cells[i])) return false;
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

std::vector<Vector> enumerate_actions(const TopKSpace& space) {
  check_space(space);
  double count = 1.0;
  for (int i = 0; i < space.k; ++i) count = count * (space.n - i) / (i + 1);
  if (count > static_cast<double>(kEnumerationGuard)) throw std::invalid_argument("enumeration too large");
  std::vector<Vector> out;
  std::vector<int> chosen;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(chosen.size()) == space.k) {
      Vector a = Vector::Zero(space.n);
      for (int i : chosen) a[i] = 1.0;
      out.push_back(std::move(a));
      return;
    }
    for (int i = start; i <= space.n - (space.k - static_cast<int>(chosen.size())); ++i) {
      chosen.push_back(i);
      self(self, i + 1);
      chosen.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<Vector> enumerate_actions(const RankingSpace& space) {
  if (space.n < 1) throw std::invalid_argument("ranking space requires n >= 1");
  double count = 1.0;
  for (int i = 2; i <= space.n; ++i) count *= i;
  if (count > static_cast<double>(kEnumerationGuard)) throw std::invalid_argument("enumeration too large");
  std::vector<int> perm(static_cast<std::size_t>(space.n));
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<Vector> out;
  do {
    Vector y(space.n);
    for (int i = 0; i < space.n; ++i) y[i] = perm[static_cast<std::size_t>(i)];
    out.push_back(std::move(y));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

namespace {

/// Depth-first walk over all simple source->destination paths, in neighbor
/// order. The callback receives the current walk.
template <class Fn>
void for_each_simple_path(const GridPathSpace& space, Fn&& fn) {
  check_space(space);
  const int src = space.index(space.source);
  const int dst = space.index(space.destination);
  std::vector<int> walk{src};
  std::vector<char> used(static_cast<std::size_t>(space.size()), 0);
  used[static_cast<std::size_t>(src)] = 1;
  std::size_t visited = 0;
  auto rec = [&](auto&& self) -> void {
    if (++visited > 50 * kEnumerationGuard) throw std::invalid_argument("enumeration too large");
    const int u = walk.back();
    if (u == dst) {
      fn(walk);
      return;
    }
    for_each_neighbor(space, u, [&](int v) {
      if (used[static_cast<std::size_t>(v)]) return;
      used[static_cast<std::size_t>(v)] = 1;
      walk.push_back(v);
      self(self);
      walk.pop_back();
      used[static_cast<std::size_t>(v)] = 0;
    });
  };
  rec(rec);
}

}  // namespace

std::size_t count_simple_paths(const GridPathSpace& space) {
  std::size_t count = 0;
  for_each_simple_path(space, [&](const std::vector<int>&) {
    if (++count > kEnumerationGuard) throw std::invalid_argument("enumeration too large");
  });
  return count;
}

std::vector<Vector> enumerate_actions(const GridPathSpace& space) {
  std::vector<Vector> out;
  std::set<std::vector<int>> seen;
  for_each_simple_path(space, [&](const std::vector<int>& walk) {
    std::vector<int> key = walk;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) return;
    if (out.size() >= kEnumerationGuard) throw std::invalid_argument("enumeration too large");
    Vector a = Vector::Zero(space.size());
    for (int i : walk) a[i] = 1.0;
    out.push_back(std::move(a));
  });
  return out;
}

}  // namespace srl
