#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace sideinfo {

/// 2x2 matrix, row-major: (0,0) x<-x, (0,1) x<-y, (1,0) y<-x, (1,1) y<-y.
using Mat2 = std::array<double, 4>;

/// Bivariate Gaussian VAR(p): z_t = sum_k A_k z_{t-k} + e_t, z = (x, y),
/// e_t ~ N(0, noise).
class VarModel {
 public:
  /// Throws InvalidArgument for a non-positive-definite noise covariance and
  /// NotStationary when the companion spectral radius is >= 1.
  VarModel(std::vector<Mat2> coefficients, Mat2 noise);

  std::size_t order() const noexcept { return a_.size(); }
  const std::vector<Mat2>& coefficients() const noexcept { return a_; }
  const Mat2& noise() const noexcept { return noise_; }
  double spectral_radius() const noexcept { return radius_; }

  /// True when every A_k(0,1) is exactly zero.
  bool y_to_x_vanishes() const noexcept;

  friend bool operator==(const VarModel& a, const VarModel& b) { return a.a_ == b.a_ && a.noise_ == b.noise_; }

 private:
  std::vector<Mat2> a_;
  Mat2 noise_;
  double radius_ = 0.0;
};

struct GewekeReport {
  double f = 0.0;                    // ln(restricted / full)
  double full_variance = 0.0;        // noise(0,0)
  double restricted_variance = 0.0;  // one-step prediction error of x from its own past
  std::size_t lags = 0;              // Levinson-Durbin depth actually used
  bool converged = false;
};

inline constexpr double kReflectionTol = 1e-10;
inline constexpr std::size_t kMaxPredictorLag = 10'000;

/// Stationary autocovariances gamma_x(0..lags) of the x component.
std::vector<double> x_autocovariance(const VarModel& v, std::size_t lags);

/// F_{Y=>X}. The restricted variance comes from Levinson-Durbin on the exact x
/// autocovariances, stopped once 2p consecutive reflection coefficients are
/// below kReflectionTol. In nats F is twice the Gaussian directed information
/// rate from Y to X.
GewekeReport geweke(const VarModel& v);
double geweke_F(const VarModel& v);

}  // namespace sideinfo
