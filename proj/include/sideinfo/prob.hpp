#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sideinfo {

/// Tolerance on simplex membership: entries down to -tol are clamped to zero and
/// sums within tol of one are renormalized.
inline constexpr double kSimplexTol = 1e-9;

/// A point on the probability simplex over a finite alphabet {0, ..., n-1}.
class Dist {
 public:
  /// Clamp-and-renormalize validation. Throws NegativeMass / NotNormalized when
  /// the input is further than `tol` from the simplex.
  static Dist validate(std::span<const double> probs, double tol = kSimplexTol);
  static Dist validate(std::initializer_list<double> probs, double tol = kSimplexTol) {
    return validate(std::span<const double>(probs.begin(), probs.size()), tol);
  }
  static Dist point_mass(std::size_t n, std::size_t i);
  static Dist uniform(std::size_t n);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> probs() const noexcept { return p_; }
  const std::vector<double>& values() const noexcept { return p_; }

  /// L1 size of the clamp/renormalize correction applied by validate().
  double correction() const noexcept { return correction_; }

  friend bool operator==(const Dist& a, const Dist& b) { return a.p_ == b.p_; }

 private:
  Dist(std::vector<double> p, double correction) : p_(std::move(p)), correction_(correction) {}

  std::vector<double> p_;
  double correction_ = 0.0;
};

/// Joint probability table P(x, y), rows indexed by x and columns by y.
class Joint {
 public:
  static Joint validate(std::size_t rows, std::size_t cols, std::span<const double> row_major,
                        double tol = kSimplexTol);
  static Joint from_rows(const std::vector<std::vector<double>>& rows, double tol = kSimplexTol);
  static Joint product(const Dist& px, const Dist& py);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t x, std::size_t y) const { return p_[x * cols_ + y]; }
  std::span<const double> data() const noexcept { return p_; }

  friend bool operator==(const Joint& a, const Joint& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.p_ == b.p_;
  }

 private:
  Joint(std::size_t rows, std::size_t cols, std::vector<double> p)
      : rows_(rows), cols_(cols), p_(std::move(p)) {}

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> p_;
};

/// Joint table P(x, y, w) with W acting as common side information.
class Joint3 {
 public:
  static Joint3 validate(std::size_t nx, std::size_t ny, std::size_t nw, std::span<const double> xyw,
                         double tol = kSimplexTol);

  std::size_t nx() const noexcept { return nx_; }
  std::size_t ny() const noexcept { return ny_; }
  std::size_t nw() const noexcept { return nw_; }
  double operator()(std::size_t x, std::size_t y, std::size_t w) const {
    return p_[(x * ny_ + y) * nw_ + w];
  }
  std::span<const double> data() const noexcept { return p_; }

  Dist marginal_w() const;
  Joint marginal_xy() const;
  /// P_{XY | W=w}; throws ZeroConditioningEvent when P_W(w) = 0.
  Joint slice(std::size_t w) const;

  friend bool operator==(const Joint3& a, const Joint3& b) {
    return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.nw_ == b.nw_ && a.p_ == b.p_;
  }

 private:
  Joint3(std::size_t nx, std::size_t ny, std::size_t nw, std::vector<double> p)
      : nx_(nx), ny_(ny), nw_(nw), p_(std::move(p)) {}

  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::size_t nw_ = 0;
  std::vector<double> p_;
};

/// Convex function on the simplex together with a subgradient selection.
struct ConvexOracle {
  std::string name;
  std::function<double(const Dist&)> value;
  std::function<std::vector<double>(const Dist&)> subgradient;
  bool symmetric = false;
};

struct ConvexityReport {
  bool midpoint_ok = true;
  bool hyperplane_ok = true;
  bool symmetry_ok = true;
  double worst_midpoint = 0.0;    // max of g((P+Q)/2) - (g(P)+g(Q))/2
  double worst_hyperplane = 0.0;  // max of g(P) + <g'(P), Q-P> - g(Q)
  double worst_symmetry = 0.0;    // max |g(P) - g(pi P)|, only when flagged symmetric
  std::size_t pairs = 0;

  bool ok() const noexcept { return midpoint_ok && hyperplane_ok && symmetry_ok; }
};

/// Seeded spot check of the ConvexOracle invariants. A guardrail, not a proof.
ConvexityReport check_convexity(const ConvexOracle& g, std::size_t n, std::size_t pairs = 256,
                                std::uint64_t seed = 0);

std::pair<Dist, Dist> marginals(const Joint& j);

/// P_{X|Y=y}. Throws ZeroConditioningEvent when P_Y(y) = 0.
Dist condition_on_y(const Joint& j, std::size_t y);

/// Shannon entropy in nats with 0 ln 0 = 0.
double entropy(const Dist& p);

double mutual_information(const Joint& j);
double conditional_mutual_information(const Joint3& j);

/// sum_y w_y g(P_y) - g(sum_y w_y P_y). Points with zero weight are skipped.
double jensen_gap(const ConvexOracle& g, const Dist& weights, std::span<const Dist> points);

/// Convex combination of points; weights need not be validated beyond length.
Dist mixture(std::span<const double> weights, std::span<const Dist> points);

/// Total-variation distance 0.5 * sum |p_i - q_i|.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace sideinfo
