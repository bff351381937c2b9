#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sideinfo/prob.hpp"

namespace sideinfo::oracles {

/// Stand-in for ln 0 in subgradients of sum q ln q. Pairings against a zero
/// coordinate treat 0 * kLogZeroSentinel as 0.
inline constexpr double kLogZeroSentinel = -1e18;

/// G(Q) = sum q ln q, subgradient ln q + 1.
ConvexOracle neg_entropy();

/// G(Q) = sum q^2.
ConvexOracle sum_squares();

/// G(Q) = <c, Q>.
ConvexOracle linear(std::vector<double> c);

/// Binary only: G(Q) = |q_1 - 1/2|^k, k >= 1.
ConvexOracle binary_abs_power(int k);

/// Binary only: G(Q) = exp(s * q_1). Convex and not permutation symmetric.
ConvexOracle exp_first(double s);

/// Nonnegative combination sum_k w_k G_k; symmetric when every term is.
ConvexOracle combine(std::vector<std::pair<double, ConvexOracle>> terms);

/// Looks up one of the named oracles above: neg_entropy, sum_squares,
/// abs_power2, abs_power3, abs_power4, exp_first. Throws InvalidArgument.
ConvexOracle by_name(const std::string& name);

}  // namespace sideinfo::oracles
