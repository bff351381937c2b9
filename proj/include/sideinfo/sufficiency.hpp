#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sideinfo/loss.hpp"
#include "sideinfo/prob.hpp"

namespace sideinfo {

/// Deterministic map from X symbols onto a contiguous T alphabet {0..k-1}.
class Transform {
 public:
  /// Throws InvalidArgument unless the image is exactly {0, ..., max}.
  explicit Transform(std::vector<std::size_t> map);

  static Transform identity(std::size_t n);
  /// Relabels blocks by first occurrence, e.g. {2,2,0} becomes {0,0,1}.
  static Transform canonical(std::span<const std::size_t> block_of);
  static Transform permutation(std::vector<std::size_t> perm);

  std::size_t domain_size() const noexcept { return map_.size(); }
  std::size_t image_size() const noexcept { return image_; }
  std::size_t operator()(std::size_t x) const { return map_[x]; }
  const std::vector<std::size_t>& map() const noexcept { return map_; }

  bool is_bijection() const noexcept { return image_ == map_.size(); }
  bool is_identity() const noexcept;
  Transform inverse() const;

  friend bool operator==(const Transform& a, const Transform& b) { return a.map_ == b.map_; }

 private:
  std::vector<std::size_t> map_;
  std::size_t image_ = 0;
};

inline constexpr double kSufficiencyTol = 1e-9;

struct SufficiencyCert {
  bool is_sufficient = false;
  /// Largest total-variation gap between P_{Y|X=x} rows merged into one class.
  double max_class_tv = 0.0;
  std::vector<std::size_t> zero_mass_symbols;
};

/// X - T - Y holds iff every T-class shares one P_{Y|X=x} among its positive
/// mass symbols (T - X - Y is automatic for deterministic T).
SufficiencyCert check_sufficient(const Transform& t, const Joint& j, double tol = kSufficiencyTol);

struct SufficientSet {
  /// Every merge whose blocks respect the row-equality classes, identity first.
  std::vector<Transform> merges;
  /// All n! permutations when n <= 5, otherwise a seeded sample.
  std::vector<Transform> permutations;
  bool all_permutations = false;
  /// n! (saturating), every one of which is sufficient.
  std::uint64_t permutation_count = 0;
};

inline constexpr std::size_t kMaxEnumerationAlphabet = 12;

/// Throws AlphabetTooLarge when n > 12.
SufficientSet enumerate_sufficient(const Joint& j, double tol = kSufficiencyTol, std::uint64_t seed = 0,
                                   std::size_t sampled_permutations = 64);

/// P_TY(t, y) = sum_{x : T(x) = t} P_XY(x, y).
Joint push_forward(const Joint& j, const Transform& t);

/// T(X) kept inside the X alphabet: each merged block lands on its smallest
/// member and the other rows become zero; bijections relabel. Benefits after a
/// transform are evaluated on this joint so the loss keeps its alphabet.
Joint push_within(const Joint& j, const Transform& t);

/// Applies a bijection to the X labels: result(perm[x], y) = j(x, y).
Joint permute_x(const Joint& j, std::span<const std::size_t> perm);

enum class WitnessKind { DpaViolation, Asymmetry };
std::string to_string(WitnessKind k);

struct ViolationWitness {
  Joint joint;
  Transform transform;
  double c_before = 0.0;
  double c_after = 0.0;
  WitnessKind kind = WitnessKind::DpaViolation;
};

/// Recomputes both benefit values from the stored joint and transform and
/// confirms the kind and values (within 1e-12).
bool reverify(const LossSpec& l, const ViolationWitness& w, double tol = kSufficiencyTol);

struct DpaAudit {
  double c_before = 0.0;
  std::size_t merges_checked = 0;
  std::size_t permutations_checked = 0;
  std::vector<ViolationWitness> witnesses;
  /// Equality reading: largest |C(P_TY) - C(P_XY)| over sufficient merges, and
  /// how many exceeded the tolerance. Reported separately from witnesses.
  double max_equality_deviation = 0.0;
  std::size_t equality_deviations = 0;

  bool clean() const noexcept { return witnesses.empty(); }
};

DpaAudit audit_dpa(const LossSpec& l, const Joint& j, double tol = kSufficiencyTol, std::uint64_t seed = 0);

/// Two-component family on n >= 3 symbols sharing the ratio t : (1 - t) on the
/// first two symbols: P_lambda = (lambda t, lambda (1-t), r - lambda, tail...),
/// P_{X|Y=0} = P_lambda1, P_{X|Y=1} = P_lambda2, P(Y=0) = alpha.
Joint proof_family(std::size_t n, double t, double lambda1, double lambda2, double alpha,
                   std::span<const double> tail = {});

/// Merges the first two symbols, leaving the rest in place.
Transform merge_first_two(std::size_t n);

struct SearchStats {
  std::size_t candidates = 0;
  std::optional<std::size_t> witness_index;
};

/// Deterministic scan over proof-family grid points, random planted-sufficiency
/// joints and random permutations (interleaved round robin); returns the witness
/// with the lowest scan index, or nothing after `budget` candidates.
std::optional<ViolationWitness> find_violation(const LossSpec& l, std::size_t n, std::size_t budget,
                                               std::uint64_t seed, double tol = kSufficiencyTol,
                                               SearchStats* stats = nullptr);
std::optional<ViolationWitness> find_violation_serial(const LossSpec& l, std::size_t n, std::size_t budget,
                                                      std::uint64_t seed, double tol = kSufficiencyTol,
                                                      SearchStats* stats = nullptr);

}  // namespace sideinfo
