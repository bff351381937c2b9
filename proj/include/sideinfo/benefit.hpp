#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sideinfo/loss.hpp"
#include "sideinfo/prob.hpp"

namespace sideinfo {

struct BenefitReport {
  /// C(loss, P_XY): optimal risk without side information minus optimal risk
  /// with a predictor that may depend on Y.
  double c_value = 0.0;
  double risk_no_side = 0.0;
  double risk_with_side = 0.0;
  /// Bayes act per Y symbol; empty for symbols with P_Y(y) = 0.
  std::vector<std::optional<Action>> per_y_minimizers;
  /// |direct value - envelope Jensen-gap value|
  double decomposition_residual = 0.0;
  /// Multiplicative normalization of the reported value; c_value itself is unscaled.
  double scale = 1.0;

  double scaled_c_value() const noexcept { return scale * c_value; }
};

BenefitReport benefit(const LossSpec& l, const Joint& j);

/// Sum_y P_Y(y) V(P_{X|Y=y}) - V(P_X), the envelope form of the benefit.
double benefit_via_envelope(const LossSpec& l, const Joint& j);

/// Bayes envelope V of `l` as a convex oracle (numeric subgradient).
ConvexOracle envelope_oracle(const LossSpec& l);

/// G(P) = V(P) - sum_i V(delta_i) p_i, so G vanishes on the vertices. The
/// symmetric flag is set by probing sampled permutations.
ConvexOracle g_normalized(const LossSpec& l, std::size_t n);

struct SubgradientProbe {
  std::vector<double> gradient;  // tangent-space (sums to zero)
  bool nondifferentiable = false;
};

/// Central differences with step 1e-6 along e_i - uniform, one-sided at the
/// boundary. Flags points where one-sided slopes differ by more than 1e-3.
SubgradientProbe numeric_subgradient(const std::function<double(const Dist&)>& f, const Dist& p);

/// Jensen gap of g over the conditionals of X given Y; zero-mass Y skipped.
double benefit_from_G(const ConvexOracle& g, const Joint& j);

/// Benefit of Y for X when W is available to both predictors:
/// sum_w P_W(w) C(loss, P_{XY|W=w}).
double conditional_benefit(const LossSpec& l, const Joint3& j);

/// Batch evaluation, results in input order. The parallel version is
/// bit-identical to the serial one for any worker count.
std::vector<BenefitReport> benefit_batch(const LossSpec& l, std::span<const Joint> joints);
std::vector<BenefitReport> benefit_batch_serial(const LossSpec& l, std::span<const Joint> joints);

}  // namespace sideinfo
