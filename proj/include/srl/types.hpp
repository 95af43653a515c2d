#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace srl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// All stochastic operations take an explicit stream; nothing in the library
/// owns a global generator.
using Rng = std::mt19937_64;

inline double dot(const Vector& a, const Vector& b) { return a.dot(b); }

}  // namespace srl
