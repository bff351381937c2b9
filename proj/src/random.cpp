#include "sideinfo/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sideinfo {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over a combined key
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(Rng& rng) {
  // 53 random mantissa bits; avoids implementation-defined std distributions
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

std::vector<double> exponential_draws(std::size_t n, Rng& rng) {
  std::vector<double> e(n);
  for (auto& v : e) v = -std::log1p(-uniform01(rng));
  return e;
}

std::vector<double> normalized(std::vector<double> v) {
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace

Dist random_dist(std::size_t n, Rng& rng) {
  auto e = exponential_draws(n, rng);
  double s = std::accumulate(e.begin(), e.end(), 0.0);
  if (s <= 0.0) {
    e.assign(n, 1.0);
  }
  return Dist::validate(normalized(std::move(e)));
}

Dist random_sparse_dist(std::size_t n, Rng& rng, double zero_prob) {
  auto e = exponential_draws(n, rng);
  const std::size_t keep = static_cast<std::size_t>(rng() % n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i != keep && uniform01(rng) < zero_prob) e[i] = 0.0;
  }
  if (e[keep] <= 0.0) e[keep] = 1.0;
  return Dist::validate(normalized(std::move(e)));
}

Joint random_joint(std::size_t rows, std::size_t cols, Rng& rng) {
  auto e = normalized(exponential_draws(rows * cols, rng));
  return Joint::validate(rows, cols, e);
}

Joint3 random_joint3(std::size_t nx, std::size_t ny, std::size_t nw, Rng& rng) {
  auto e = normalized(exponential_draws(nx * ny * nw, rng));
  return Joint3::validate(nx, ny, nw, e);
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  // Fisher-Yates with explicit draws, so the result does not depend on the
  // standard library's shuffle implementation.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace sideinfo
