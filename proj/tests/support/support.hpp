#pragma once

// Independent reference computations and generators shared by the tests.
// Nothing here calls into the library's numeric kernels.

#include <gtest/gtest.h>

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "sideinfo/causality.hpp"
#include "sideinfo/prob.hpp"
#include "sideinfo/var.hpp"

namespace support {

using Rng = std::mt19937_64;

// ------------------------------------------------------------ generators

/// Runs `prop` on `cases` values drawn from `gen`; a failure names the case.
template <class Gen, class Prop>
void for_all(std::uint64_t seed, std::size_t cases, Gen gen, Prop prop) {
  Rng rng(seed);
  for (std::size_t i = 0; i < cases; ++i) {
    auto value = gen(rng);
    SCOPED_TRACE("case " + std::to_string(i) + " seed " + std::to_string(seed));
    prop(value);
    if (::testing::Test::HasFatalFailure()) return;
  }
}

double unit(Rng& rng);
std::size_t below(Rng& rng, std::size_t n);
/// Dirichlet(1) point; with probability `zero_prob` each coordinate is zeroed
/// (at least one survives).
std::vector<double> simplex_point(Rng& rng, std::size_t n, double zero_prob = 0.0);
sideinfo::Dist gen_dist(Rng& rng, std::size_t n, double zero_prob = 0.0);
sideinfo::Joint gen_joint(Rng& rng, std::size_t rows, std::size_t cols, double zero_prob = 0.0);
sideinfo::Joint3 gen_joint3(Rng& rng, std::size_t nx, std::size_t ny, std::size_t nw);

/// Random pair-alphabet kernel; rows may be sparse.
std::vector<double> gen_kernel(Rng& rng, std::size_t states, double zero_prob = 0.0);
sideinfo::ProcessModel gen_markov(Rng& rng, std::size_t nx, std::size_t ny, double zero_prob = 0.0);
/// Starts in the stationary law, found by power iteration (not the library's solver).
sideinfo::ProcessModel gen_stationary_markov(Rng& rng, std::size_t nx, std::size_t ny);
std::vector<double> power_stationary(const std::vector<double>& kernel, std::size_t states);

// ------------------------------------------------------------ example processes

/// X_i iid uniform binary, Y_i = X_i.
sideinfo::ProcessModel copy_process();
/// Y_i = X_{i-1}, X iid uniform, Y_1 uniform and independent.
sideinfo::ProcessModel delayed_copy_process();
/// X_i = Y_{i-1}, Y iid uniform, X_1 uniform and independent.
sideinfo::ProcessModel lagged_follower_process();
/// X and Y iid uniform binary and mutually independent.
sideinfo::ProcessModel independent_process();

// ------------------------------------------------------------ reference values

double ref_entropy(const std::vector<double>& p);
/// H(X) + H(Y) - H(X,Y) summed in long double.
double ref_mutual_information(const sideinfo::Joint& j);
/// sum_w P(w) I(X;Y|W=w) via entropies.
double ref_conditional_mi(const sideinfo::Joint3& j);

/// Sequences of (x_i, y_i) with their probabilities, built by recursion over
/// time instead of index arithmetic.
struct PathTable {
  std::size_t nx = 0, ny = 0, n = 0;
  std::vector<std::vector<std::pair<int, int>>> paths;
  std::vector<double> probs;
};
PathTable ref_paths(const sideinfo::MarkovJoint& m, std::size_t n);

/// H of the law of (x_1..x_a, y_1..y_b), marginalized through std::map.
double ref_prefix_entropy(const PathTable& t, std::size_t a, std::size_t b);

/// Causality measures as sums of prefix-entropy differences.
double ref_directed_info(const PathTable& t);
double ref_reverse_delayed_di(const PathTable& t);
double ref_total_mi(const PathTable& t);

/// Least-squares residual variances from a simulated VAR path.
struct SimulatedGeweke {
  double full = 0.0;
  double restricted = 0.0;
  double f() const;
};
SimulatedGeweke simulate_geweke(const sideinfo::VarModel& v, std::size_t steps, std::size_t restricted_lags,
                                std::uint64_t seed);

}  // namespace support
