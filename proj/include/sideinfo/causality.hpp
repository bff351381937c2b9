#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "sideinfo/prob.hpp"

namespace sideinfo {

/// Explicit distribution over sequence pairs (x^n, y^n). The pair at time i is
/// z_i = x_i * ny + y_i and the sequence index is sum_i z_i K^(n-i) with
/// K = nx * ny, so time 1 is the most significant digit.
struct ExplicitProcess {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t horizon = 0;
  std::vector<double> probs;

  friend bool operator==(const ExplicitProcess&, const ExplicitProcess&) = default;
};

/// First-order Markov chain on the pair alphabet: initial law of (X_1, Y_1)
/// and kernel K(z, z') = P((X_i, Y_i) = z' | (X_{i-1}, Y_{i-1}) = z).
struct MarkovJoint {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> initial;  // length K
  std::vector<double> kernel;   // K x K row-major

  double operator()(std::size_t from, std::size_t to) const { return kernel[from * nx * ny + to]; }

  friend bool operator==(const MarkovJoint&, const MarkovJoint&) = default;
};

class ProcessModel {
 public:
  using Variant = std::variant<ExplicitProcess, MarkovJoint>;

  static ProcessModel explicit_table(std::size_t nx, std::size_t ny, std::size_t horizon,
                                     std::vector<double> probs);
  /// Validates each kernel row as a distribution.
  static ProcessModel markov(std::size_t nx, std::size_t ny, std::vector<double> initial,
                             std::vector<double> kernel);
  /// Markov model started from its stationary law.
  static ProcessModel stationary_markov(std::size_t nx, std::size_t ny, std::vector<double> kernel);

  const Variant& variant() const noexcept { return v_; }
  std::size_t nx() const noexcept;
  std::size_t ny() const noexcept;
  const MarkovJoint* markov_joint() const noexcept { return std::get_if<MarkovJoint>(&v_); }

  friend bool operator==(const ProcessModel& a, const ProcessModel& b) { return a.v_ == b.v_; }

 private:
  explicit ProcessModel(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Exchanges the roles of X and Y.
ProcessModel swap_roles(const ProcessModel& m);

/// Stationary law of a pair-alphabet kernel (left null vector of K - I).
Dist stationary_distribution(std::size_t states, const std::vector<double>& kernel);

/// Largest enumerable |X|^n |Y|^n.
inline constexpr std::size_t kMaxSequenceOutcomes = 10'000'000;

/// Distribution over (x^n, y^n) in ExplicitProcess index order.
struct SequenceTable {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t horizon = 0;
  std::vector<double> probs;
};

/// Throws HorizonTooLarge past kMaxSequenceOutcomes; explicit models are cut to
/// their first n steps.
SequenceTable unroll(const ProcessModel& m, std::size_t n);
SequenceTable unroll_serial(const ProcessModel& m, std::size_t n);

/// Marginal law of (X^a, Y^b). Key layout: kx * ny^b + ky with the X digits of
/// x_1..x_a (x_1 most significant) in kx and likewise for ky.
struct PrefixMarginal {
  std::size_t a = 0;
  std::size_t b = 0;
  std::vector<double> probs;
};

/// Parallel gather kernel: each output cell sums its preimage in a fixed order,
/// so results do not depend on the worker count.
PrefixMarginal prefix_marginal(const SequenceTable& s, std::size_t a, std::size_t b);
/// Reference scatter over the full table in index order.
PrefixMarginal prefix_marginal_serial(const SequenceTable& s, std::size_t a, std::size_t b);

/// Memoized marginals and information terms of one unrolled model.
class SequenceAnalysis {
 public:
  SequenceAnalysis(const ProcessModel& m, std::size_t n);

  std::size_t horizon() const noexcept { return table_.horizon; }
  const SequenceTable& table() const noexcept { return table_; }

  const PrefixMarginal& marginal(std::size_t a, std::size_t b);
  /// H(X^a, Y^b) in nats.
  double entropy(std::size_t a, std::size_t b);

  /// I(A; B | C) where the four prefix blocks (A,B,C), (A,C), (B,C) and C are
  /// given as (a, b) pairs of nested prefixes.
  double cond_mi(std::pair<std::size_t, std::size_t> abc, std::pair<std::size_t, std::size_t> ac,
                 std::pair<std::size_t, std::size_t> bc, std::pair<std::size_t, std::size_t> c);

  /// I(X^i; Y_i | Y^{i-1})
  double forward_term(std::size_t i);
  /// I(X^{i-1}; Y_i | Y^{i-1})
  double forward_lagged_term(std::size_t i);
  /// I(Y^{i-1}; X_i | X^{i-1})
  double reverse_term(std::size_t i);
  /// I(X_i; Y_i | X^{i-1}, Y^{i-1})
  double instantaneous_term(std::size_t i);
  /// I(X^n; Y^n) summed directly as E ln p(x^n,y^n) / (p(x^n) p(y^n)).
  double total_mi();

  /// Law of (X_i, Y^{i-1}, X^{i-1}) as a Joint3 with W = X^{i-1}: the
  /// prediction problem for X_i with and without the Y past.
  Joint3 causal_prediction_joint(std::size_t i);

 private:
  SequenceTable table_;
  std::vector<std::vector<PrefixMarginal>> cache_;
  std::vector<std::vector<bool>> cached_;
};

double directed_info(const ProcessModel& m, std::size_t n);
/// H(Y^n || X^n) = sum_i H(Y_i | Y^{i-1}, X^i)
double causally_cond_entropy(const ProcessModel& m, std::size_t n);
/// I(Y^{n-1} -> X^n). Markov models too long to enumerate use the structured
/// route through reverse_di_increments_markov.
double reverse_delayed_di(const ProcessModel& m, std::size_t n);

struct DIReport {
  double forward = 0.0;          // I(X^n -> Y^n)
  double reverse_delayed = 0.0;  // I(Y^{n-1} -> X^n)
  double forward_lagged = 0.0;   // I(X^{n-1} -> Y^n)
  double instantaneous = 0.0;    // sum_i I(X_i; Y_i | X^{i-1}, Y^{i-1})
  double total_mi = 0.0;         // I(X^n; Y^n)
  double residual = 0.0;         // |total - forward - reverse|
  double refined_residual = 0.0; // |total - lagged - reverse - instantaneous|
  std::vector<double> forward_terms;
  std::vector<double> reverse_terms;
};

DIReport conservation_check(const ProcessModel& m, std::size_t n);

/// True iff I(Y^{n-1} -> X^n) <= tol.
bool granger_noncausal(const ProcessModel& m, std::size_t n, double tol = 1e-9);

enum class Direction { YtoX, XtoY };

/// Stationary single-step term I(Y_{i-1}; X_i | X_{i-1}) for YtoX (roles
/// swapped for XtoY). Throws NotStationary.
double transfer_entropy(const ProcessModel& m, Direction dir);

/// Increments I(X_i; Y^{i-1} | X^{i-1}) for i = 1..n of a Markov model,
/// computed by a forward pass over X histories instead of full enumeration.
std::vector<double> reverse_di_increments_markov(const MarkovJoint& m, std::size_t n);

struct RateReport {
  double rate = 0.0;  // last increment
  bool converged = false;
  std::size_t horizon = 0;
  std::vector<double> increments;
};

/// Per-step increment of I(Y^{n-1} -> X^n) (YtoX) or I(X^{n-1} -> Y^n) (XtoY),
/// extended until successive increments agree within tol, max_n is reached or
/// the X history table outgrows kMaxSequenceOutcomes.
RateReport di_rate(const ProcessModel& m, Direction dir, std::size_t max_n = 20, double tol = 1e-10);

}  // namespace sideinfo
