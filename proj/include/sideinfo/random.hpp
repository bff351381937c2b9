#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sideinfo/prob.hpp"

namespace sideinfo {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from (seed, index); used so that candidate
/// k of a scan is generated identically no matter which worker evaluates it.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

double uniform01(Rng& rng);

/// Flat Dirichlet draw (uniform on the simplex).
Dist random_dist(std::size_t n, Rng& rng);

/// Dirichlet draw with a random sprinkling of exact zeros (keeps at least one
/// positive entry). Useful for exercising boundary conventions.
Dist random_sparse_dist(std::size_t n, Rng& rng, double zero_prob);

Joint random_joint(std::size_t rows, std::size_t cols, Rng& rng);
Joint3 random_joint3(std::size_t nx, std::size_t ny, std::size_t nw, Rng& rng);

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

}  // namespace sideinfo
