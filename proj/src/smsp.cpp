#include "srl/smsp.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace srl::smsp {

Instance generate(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("smsp instance needs at least one job");
  Instance inst;
  std::uniform_int_distribution<int> proc(1, 100);
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    inst.processing.push_back(proc(rng));
    total += inst.processing.back();
  }
  std::uniform_real_distribution<double> rel(0.0, 0.4 * total);
  for (int j = 0; j < n; ++j) inst.release.push_back(rel(rng));
  return inst;
}

std::vector<int> earliest_completion(const Instance& inst) {
  const int n = inst.size();
  std::vector<int> seq;
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  double clock = 0.0;
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    double best = 0.0;
    for (int j = 0; j < n; ++j) {
      if (done[static_cast<std::size_t>(j)]) continue;
      const double c = std::max(clock, inst.release[static_cast<std::size_t>(j)]) + inst.processing[static_cast<std::size_t>(j)];
      if (pick < 0 || c < best || (c == best && inst.release[static_cast<std::size_t>(j)] < inst.release[static_cast<std::size_t>(pick)])) {
        pick = j;
        best = c;
      }
    }
    done[static_cast<std::size_t>(pick)] = 1;
    clock = best;
    seq.push_back(pick);
  }
  return seq;
}

Matrix observe(const Instance& inst) {
  const int n = inst.size();
  std::vector<double> ect_position(static_cast<std::size_t>(n)), ect_completion(static_cast<std::size_t>(n));
  {
    const auto seq = earliest_completion(inst);
    double clock = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto j = static_cast<std::size_t>(seq[static_cast<std::size_t>(i)]);
      clock = std::max(clock, inst.release[j]) + inst.processing[j];
      ect_position[j] = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
      ect_completion[j] = clock;
    }
    for (auto& c : ect_completion) c /= clock;
  }
  Matrix x(n, kFeatureCount);
  double horizon = 0.0, max_p = 0.0;
  for (int j = 0; j < n; ++j) {
    horizon = std::max(horizon, inst.release[j] + inst.processing[j]);
    max_p = std::max(max_p, inst.processing[j]);
  }
  const double rank_scale = n > 1 ? 1.0 / (n - 1) : 0.0;
  const double pair_scale = n > 1 ? 1.0 / (n - 1) : 0.0;
  for (int j = 0; j < n; ++j) {
    const double r = inst.release[j], p = inst.processing[j];
    int r_rank = 0, p_rank = 0;
    double slack_after = 0.0, idle_before = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      if (inst.release[k] < r) ++r_rank;
      if (inst.processing[k] < p) ++p_rank;
      slack_after += std::clamp((inst.release[k] - (r + p)) / horizon, -1.0, 1.0);
      idle_before += std::clamp((r - (inst.release[k] + inst.processing[k])) / horizon, -1.0, 1.0);
    }
    x(j, 0) = r / horizon;
    x(j, 1) = p / max_p;
    x(j, 2) = (r + p) / horizon;
    x(j, 3) = r_rank * rank_scale;
    x(j, 4) = p_rank * rank_scale;
    x(j, 5) = slack_after * pair_scale;
    x(j, 6) = idle_before * pair_scale;
    x(j, 7) = ect_position[static_cast<std::size_t>(j)];
    x(j, 8) = ect_completion[static_cast<std::size_t>(j)];
    x(j, 9) = 1.0;
  }
  return x;
}

double total_completion(const Instance& inst, std::span<const int> sequence) {
  const int n = inst.size();
  if (static_cast<int>(sequence.size()) != n) throw std::invalid_argument("sequence is not a permutation of the jobs");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  double clock = 0.0, total = 0.0;
  for (int j : sequence) {
    if (j < 0 || j >= n || seen[static_cast<std::size_t>(j)])
      throw std::invalid_argument("sequence is not a permutation of the jobs");
    seen[static_cast<std::size_t>(j)] = 1;
    clock = std::max(clock, inst.release[static_cast<std::size_t>(j)]) + inst.processing[static_cast<std::size_t>(j)];
    total += clock;
  }
  return total;
}

std::vector<int> sequence_from_ranking(const Vector& ranking) {
  const auto n = static_cast<int>(ranking.size());
  std::vector<int> seq(static_cast<std::size_t>(n), -1);
  for (int j = 0; j < n; ++j) {
    const int r = static_cast<int>(ranking[j]);
    if (r < 1 || r > n || static_cast<double>(r) != ranking[j] || seq[static_cast<std::size_t>(r - 1)] != -1)
      throw std::invalid_argument("ranking is not a permutation vector");
    seq[static_cast<std::size_t>(r - 1)] = j;
  }
  return seq;
}

Vector ranking_from_sequence(std::span<const int> sequence) {
  Vector y(static_cast<Eigen::Index>(sequence.size()));
  for (std::size_t pos = 0; pos < sequence.size(); ++pos) y[sequence[pos]] = static_cast<double>(pos + 1);
  return y;
}

std::vector<int> expert_exhaustive(const Instance& inst) {
  const int n = inst.size();
  if (n > kMaxExhaustiveJobs)
    throw std::invalid_argument("exhaustive expert supports at most " + std::to_string(kMaxExhaustiveJobs) +
                                " jobs, got " + std::to_string(n));
  std::vector<int> seq(static_cast<std::size_t>(n));
  std::iota(seq.begin(), seq.end(), 0);
  std::vector<int> best = seq;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    const double c = total_completion(inst, seq);
    if (c < best_cost) {
      best_cost = c;
      best = seq;
    }
  } while (std::next_permutation(seq.begin(), seq.end()));
  return best;
}

std::vector<int> greedy(const Instance& inst) {
  std::vector<int> seq(static_cast<std::size_t>(inst.size()));
  std::iota(seq.begin(), seq.end(), 0);
  std::stable_sort(seq.begin(), seq.end(), [&](int a, int b) {
    if (inst.release[a] != inst.release[b]) return inst.release[a] < inst.release[b];
    return inst.processing[a] < inst.processing[b];
  });
  return seq;
}

double Env::reward(const State& s, const Vector& action) const {
  return -total_completion(s, sequence_from_ranking(action));
}

StepResult<Env::State> Env::step(const State& s, const Vector& action, Rng&) const {
  return {s, reward(s, action), true};
}

}  // namespace srl::smsp
