#include "sideinfo/var.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "sideinfo/error.hpp"

namespace sideinfo {

namespace {

Eigen::MatrixXd companion(const std::vector<Mat2>& a) {
  const auto p = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2 * p, 2 * p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const Mat2& m = a[static_cast<std::size_t>(k)];
    f(0, 2 * k) = m[0];
    f(0, 2 * k + 1) = m[1];
    f(1, 2 * k) = m[2];
    f(1, 2 * k + 1) = m[3];
  }
  for (Eigen::Index i = 2; i < 2 * p; ++i) f(i, i - 2) = 1.0;
  return f;
}

// S = F S F' + Q through vec(S) = (I - F (x) F)^{-1} vec(Q).
Eigen::MatrixXd stationary_covariance(const Eigen::MatrixXd& f, const Mat2& noise) {
  const Eigen::Index d = f.rows();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(d, d);
  q(0, 0) = noise[0];
  q(0, 1) = noise[1];
  q(1, 0) = noise[2];
  q(1, 1) = noise[3];

  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) lhs.block(i * d, j * d, d, d) -= f(i, j) * f;
  const Eigen::VectorXd vq = Eigen::Map<const Eigen::VectorXd>(q.data(), d * d);
  const Eigen::VectorXd vs = lhs.partialPivLu().solve(vq);
  Eigen::MatrixXd s = Eigen::Map<const Eigen::MatrixXd>(vs.data(), d, d);
  return 0.5 * (s + s.transpose());
}

}  // namespace

VarModel::VarModel(std::vector<Mat2> coefficients, Mat2 noise) : a_(std::move(coefficients)), noise_(noise) {
  if (a_.empty()) throw Error(ErrorKind::InvalidArgument, "VAR order must be at least 1");
  for (const auto& m : a_)
    for (double v : m)
      if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite VAR coefficient");
  if (noise_[1] != noise_[2]) throw Error(ErrorKind::InvalidArgument, "noise covariance is not symmetric");
  if (!(noise_[0] > 0.0) || !(noise_[0] * noise_[3] - noise_[1] * noise_[2] > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "noise covariance is not positive definite");
  }
  const Eigen::MatrixXd f = companion(a_);
  radius_ = f.eigenvalues().cwiseAbs().maxCoeff();
  if (!(radius_ < 1.0)) {
    std::ostringstream os;
    os << "companion spectral radius " << radius_ << " >= 1";
    throw Error(ErrorKind::NotStationary, os.str());
  }
}

bool VarModel::y_to_x_vanishes() const noexcept {
  for (const auto& m : a_)
    if (m[1] != 0.0) return false;
  return true;
}

std::vector<double> x_autocovariance(const VarModel& v, std::size_t lags) {
  const Eigen::MatrixXd f = companion(v.coefficients());
  Eigen::MatrixXd m = stationary_covariance(f, v.noise());
  std::vector<double> g{m(0, 0)};
  for (std::size_t k = 1; k <= lags; ++k) {
    m = f * m;
    g.push_back(m(0, 0));
  }
  return g;
}

GewekeReport geweke(const VarModel& v) {
  const Eigen::MatrixXd f = companion(v.coefficients());
  Eigen::MatrixXd cov = stationary_covariance(f, v.noise());

  GewekeReport r;
  r.full_variance = v.noise()[0];
  std::vector<double> gamma{cov(0, 0)};
  std::vector<double> a;  // predictor coefficients a_1..a_m
  double err = gamma[0];
  std::size_t quiet = 0;
  const std::size_t needed = 2 * v.order();
  for (std::size_t m = 1; m <= kMaxPredictorLag; ++m) {
    cov = f * cov;
    gamma.push_back(cov(0, 0));
    double acc = gamma[m];
    for (std::size_t j = 1; j < m; ++j) acc -= a[j - 1] * gamma[m - j];
    const double k = acc / err;
    std::vector<double> next(m);
    for (std::size_t j = 1; j < m; ++j) next[j - 1] = a[j - 1] - k * a[m - j - 1];
    next[m - 1] = k;
    a = std::move(next);
    err *= 1.0 - k * k;
    r.lags = m;
    quiet = std::abs(k) < kReflectionTol ? quiet + 1 : 0;
    if (quiet >= needed) {
      r.converged = true;
      break;
    }
  }
  r.restricted_variance = err;
  r.f = std::log(r.restricted_variance / r.full_variance);
  return r;
}

double geweke_F(const VarModel& v) { return geweke(v).f; }

}  // namespace sideinfo
