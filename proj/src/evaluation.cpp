#include "srl/evaluation.hpp"

#include <numeric>

namespace srl {

EvalResult summarize(std::vector<double> values) {
  EvalResult out;
  out.values = std::move(values);
  if (out.values.empty()) return out;
  const double n = static_cast<double>(out.values.size());
  out.mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : out.values) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / n);
  return out;
}

}  // namespace srl
