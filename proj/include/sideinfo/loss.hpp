#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sideinfo/error.hpp"
#include "sideinfo/prob.hpp"

namespace sideinfo {

/// Finite reconstruction alphabet: entry (x, a) is the loss of action a when the
/// outcome is x. Entries may be +infinity.
struct ActionMatrix {
  std::size_t outcomes = 0;
  std::size_t actions = 0;
  std::vector<double> entries;  // row-major, outcomes x actions

  double operator()(std::size_t x, std::size_t a) const { return entries[x * actions + a]; }
};

/// Simplex-valued actions: eval(x, Q) is the penalty for forecasting Q when x occurs.
struct ScoringRule {
  std::function<double(std::size_t, const Dist&)> eval;
  /// Known to be proper, so the Bayes act under P is P itself.
  bool proper = false;
};

/// Proper scoring rule built from a convex function via supporting hyperplanes.
struct SavageRule {
  ConvexOracle g;
};

class LossSpec {
 public:
  using Variant = std::variant<ActionMatrix, ScoringRule, SavageRule>;

  /// Validates the matrix: no NaN or -inf, every action column has a finite
  /// entry and every outcome has an action with finite loss.
  static LossSpec matrix(std::size_t outcomes, std::size_t actions, std::vector<double> entries,
                         std::string name = "matrix");
  static LossSpec scoring_rule(std::string name, std::function<double(std::size_t, const Dist&)> eval,
                               bool proper, std::size_t alphabet = 0);
  static LossSpec savage(ConvexOracle g);

  const Variant& variant() const noexcept { return v_; }
  const std::string& name() const noexcept { return name_; }
  /// Alphabet size the loss is tied to, or 0 if it applies to any alphabet.
  std::size_t alphabet() const noexcept { return alphabet_; }

  bool is_matrix() const noexcept { return std::holds_alternative<ActionMatrix>(v_); }

 private:
  LossSpec(Variant v, std::string name, std::size_t alphabet)
      : v_(std::move(v)), name_(std::move(name)), alphabet_(alphabet) {}

  Variant v_;
  std::string name_;
  std::size_t alphabet_ = 0;
};

enum class BuiltinLoss { Log, ZeroOne, Brier, Spherical, AbsoluteOrdered };

/// Accepts log, zero_one / zero-one, brier, spherical, absolute_ordered /
/// absolute-ordered. Throws UnknownLoss.
BuiltinLoss parse_builtin_loss(const std::string& name);
std::string to_string(BuiltinLoss loss);

LossSpec builtin_loss(BuiltinLoss which, std::size_t n);
LossSpec builtin_loss(const std::string& name, std::size_t n);

/// a * loss, a > 0.
LossSpec scaled(const LossSpec& l, double a);

enum class BayesMethod { ColumnMin, ProperFixedPoint, NumericSearch };
std::string to_string(BayesMethod m);

using Action = std::variant<std::size_t, Dist>;

struct BayesResult {
  double risk = 0.0;
  Action minimizer = std::size_t{0};
  BayesMethod method = BayesMethod::ColumnMin;
  /// Numeric search only: search value minus the grid validation value (>= 0).
  std::optional<double> optimality_gap;
};

/// E_P[loss(X, action)] with 0 * inf = 0.
double expected_loss(const LossSpec& l, const Dist& p, const Action& action);

/// Pointwise loss for simplex-valued rules. Throws InvalidArgument for matrices.
double rule_loss(const LossSpec& l, std::size_t x, const Dist& q);

/// inf over actions of E_P[loss]. Throws UnboundedBelow when no finite value exists.
BayesResult bayes_risk(const LossSpec& l, const Dist& p, std::uint64_t seed = 0);

/// V(P) = -bayes_risk(l, P).risk.
double v_envelope(const LossSpec& l, const Dist& p);

/// loss_G(x, Q) = <G'(Q), Q> - G(Q) - G'_x(Q).
LossSpec savage_from_G(const ConvexOracle& g);

struct ProprietyReport {
  std::size_t trials = 0;
  std::size_t comparisons = 0;
  /// min over checked (P, Q) of E_P[l(X,Q)] - E_P[l(X,P)]
  double worst_margin = 0.0;
};

class NotProperError : public Error {
 public:
  NotProperError(Dist p, Dist q, double margin);
  const Dist& p() const noexcept { return p_; }
  const Dist& q() const noexcept { return q_; }
  double margin() const noexcept { return margin_; }

 private:
  Dist p_;
  Dist q_;
  double margin_;
};

/// Checks E_P[l(X,P)] <= E_P[l(X,Q)] + 1e-9 on random P against random and grid
/// Q. Throws NotProperError carrying the first failing (P, Q).
ProprietyReport audit_propriety(const LossSpec& l, std::size_t n, std::size_t trials,
                                std::uint64_t seed);

/// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::vector<double> v);

}  // namespace sideinfo
