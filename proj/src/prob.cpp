#include "sideinfo/prob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sideinfo/error.hpp"
#include "sideinfo/random.hpp"

namespace sideinfo {

namespace {

// Clamp entries in [-tol, 0) to zero and renormalize when the sum is off by
// more than rounding noise. Returns the L1 size of the correction.
double clamp_and_normalize(std::vector<double>& p, double tol, const char* what) {
  if (p.empty()) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " is empty");
  }
  double correction = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i])) {
      throw Error(ErrorKind::InvalidArgument, std::string(what) + " has a non-finite entry");
    }
    if (p[i] < -tol) {
      std::ostringstream os;
      os << what << " entry " << i << " = " << p[i] << " is below -" << tol;
      throw Error(ErrorKind::NegativeMass, os.str());
    }
    if (p[i] < 0.0) {
      correction += -p[i];
      p[i] = 0.0;
    }
  }
  const double sum = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os << what << " sums to " << sum;
    throw Error(ErrorKind::NotNormalized, os.str());
  }
  // Leave sums that are one up to accumulated rounding untouched so that
  // decimal inputs load bit-for-bit.
  const double rounding = 4.0 * static_cast<double>(p.size()) * std::numeric_limits<double>::epsilon();
  if (std::abs(sum - 1.0) > rounding) {
    for (auto& v : p) {
      const double nv = v / sum;
      correction += std::abs(nv - v);
      v = nv;
    }
  }
  return correction;
}

}  // namespace

Dist Dist::validate(std::span<const double> probs, double tol) {
  std::vector<double> p(probs.begin(), probs.end());
  const double corr = clamp_and_normalize(p, tol, "distribution");
  return Dist(std::move(p), corr);
}

Dist Dist::point_mass(std::size_t n, std::size_t i) {
  if (i >= n) throw Error(ErrorKind::InvalidArgument, "point mass index out of range");
  std::vector<double> p(n, 0.0);
  p[i] = 1.0;
  return Dist(std::move(p), 0.0);
}

Dist Dist::uniform(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty alphabet");
  return Dist(std::vector<double>(n, 1.0 / static_cast<double>(n)), 0.0);
}

Joint Joint::validate(std::size_t rows, std::size_t cols, std::span<const double> row_major,
                      double tol) {
  if (rows == 0 || cols == 0 || row_major.size() != rows * cols) {
    throw Error(ErrorKind::InvalidArgument, "joint table shape mismatch");
  }
  std::vector<double> p(row_major.begin(), row_major.end());
  clamp_and_normalize(p, tol, "joint table");
  return Joint(rows, cols, std::move(p));
}

Joint Joint::from_rows(const std::vector<std::vector<double>>& rows, double tol) {
  if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "joint table has no rows");
  const std::size_t cols = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw Error(ErrorKind::InvalidArgument, "ragged joint table");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return validate(rows.size(), cols, flat, tol);
}

Joint Joint::product(const Dist& px, const Dist& py) {
  std::vector<double> p(px.size() * py.size());
  for (std::size_t x = 0; x < px.size(); ++x) {
    for (std::size_t y = 0; y < py.size(); ++y) p[x * py.size() + y] = px[x] * py[y];
  }
  return validate(px.size(), py.size(), p);
}

Joint3 Joint3::validate(std::size_t nx, std::size_t ny, std::size_t nw, std::span<const double> xyw,
                        double tol) {
  if (nx == 0 || ny == 0 || nw == 0 || xyw.size() != nx * ny * nw) {
    throw Error(ErrorKind::InvalidArgument, "3-axis joint table shape mismatch");
  }
  std::vector<double> p(xyw.begin(), xyw.end());
  clamp_and_normalize(p, tol, "3-axis joint table");
  return Joint3(nx, ny, nw, std::move(p));
}

Dist Joint3::marginal_w() const {
  std::vector<double> pw(nw_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y)
      for (std::size_t w = 0; w < nw_; ++w) pw[w] += (*this)(x, y, w);
  return Dist::validate(pw);
}

Joint Joint3::marginal_xy() const {
  std::vector<double> pxy(nx_ * ny_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y)
      for (std::size_t w = 0; w < nw_; ++w) pxy[x * ny_ + y] += (*this)(x, y, w);
  return Joint::validate(nx_, ny_, pxy);
}

Joint Joint3::slice(std::size_t w) const {
  if (w >= nw_) throw Error(ErrorKind::InvalidArgument, "W symbol out of range");
  std::vector<double> pxy(nx_ * ny_);
  double mass = 0.0;
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y) {
      pxy[x * ny_ + y] = (*this)(x, y, w);
      mass += pxy[x * ny_ + y];
    }
  if (mass <= 0.0) throw Error(ErrorKind::ZeroConditioningEvent, "P_W(w) = 0");
  for (auto& v : pxy) v /= mass;
  return Joint::validate(nx_, ny_, pxy);
}

std::pair<Dist, Dist> marginals(const Joint& j) {
  std::vector<double> px(j.rows(), 0.0), py(j.cols(), 0.0);
  for (std::size_t x = 0; x < j.rows(); ++x) {
    for (std::size_t y = 0; y < j.cols(); ++y) {
      px[x] += j(x, y);
      py[y] += j(x, y);
    }
  }
  return {Dist::validate(px), Dist::validate(py)};
}

Dist condition_on_y(const Joint& j, std::size_t y) {
  if (y >= j.cols()) throw Error(ErrorKind::InvalidArgument, "Y symbol out of range");
  std::vector<double> col(j.rows());
  double mass = 0.0;
  for (std::size_t x = 0; x < j.rows(); ++x) {
    col[x] = j(x, y);
    mass += col[x];
  }
  if (mass <= 0.0) throw Error(ErrorKind::ZeroConditioningEvent, "P_Y(y) = 0");
  for (auto& v : col) v /= mass;
  return Dist::validate(col);
}

double entropy(const Dist& p) {
  double h = 0.0;
  for (double v : p.probs()) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return std::max(h, 0.0);
}

double mutual_information(const Joint& j) {
  const auto [px, py] = marginals(j);
  double cond = 0.0;
  for (std::size_t y = 0; y < j.cols(); ++y) {
    if (py[y] > 0.0) cond += py[y] * entropy(condition_on_y(j, y));
  }
  return std::max(entropy(px) - cond, 0.0);
}

double conditional_mutual_information(const Joint3& j) {
  const Dist pw = j.marginal_w();
  double total = 0.0;
  for (std::size_t w = 0; w < j.nw(); ++w) {
    if (pw[w] > 0.0) total += pw[w] * mutual_information(j.slice(w));
  }
  return total;
}

Dist mixture(std::span<const double> weights, std::span<const Dist> points) {
  if (weights.size() != points.size() || points.empty()) {
    throw Error(ErrorKind::InvalidArgument, "mixture weights and points differ in length");
  }
  const std::size_t n = points.front().size();
  std::vector<double> m(n, 0.0);
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].size() != n) throw Error(ErrorKind::InvalidArgument, "mixture alphabet mismatch");
    if (weights[k] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) m[i] += weights[k] * points[k][i];
  }
  return Dist::validate(m);
}

double jensen_gap(const ConvexOracle& g, const Dist& weights, std::span<const Dist> points) {
  if (weights.size() != points.size()) {
    throw Error(ErrorKind::InvalidArgument, "jensen_gap weights and points differ in length");
  }
  double mean_value = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (weights[k] > 0.0) mean_value += weights[k] * g.value(points[k]);
  }
  return mean_value - g.value(mixture(weights.probs(), points));
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

ConvexityReport check_convexity(const ConvexOracle& g, std::size_t n, std::size_t pairs,
                                std::uint64_t seed) {
  ConvexityReport rep;
  rep.pairs = pairs;
  Rng rng(seed);
  for (std::size_t k = 0; k < pairs; ++k) {
    const bool sparse = (k % 4 == 3);
    const Dist p = sparse ? random_sparse_dist(n, rng, 0.3) : random_dist(n, rng);
    const Dist q = random_dist(n, rng);
    const double gp = g.value(p);
    const double gq = g.value(q);

    const double half[] = {0.5, 0.5};
    const Dist pts[] = {p, q};
    const double mid = g.value(mixture(half, pts)) - 0.5 * (gp + gq);
    rep.worst_midpoint = std::max(rep.worst_midpoint, mid);
    if (mid > 1e-12) rep.midpoint_ok = false;

    const auto grad = g.subgradient(p);
    double lin = gp;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = q[i] - p[i];
      if (d != 0.0) lin += grad[i] * d;
    }
    const double gap = lin - gq;
    rep.worst_hyperplane = std::max(rep.worst_hyperplane, gap);
    if (gap > 1e-9) rep.hyperplane_ok = false;

    if (g.symmetric) {
      const auto perm = random_permutation(n, rng);
      std::vector<double> pp(n);
      for (std::size_t i = 0; i < n; ++i) pp[perm[i]] = p[i];
      const double diff = std::abs(g.value(Dist::validate(pp)) - gp);
      rep.worst_symmetry = std::max(rep.worst_symmetry, diff);
      if (diff > 1e-12 * std::max(1.0, std::abs(gp))) rep.symmetry_ok = false;
    }
  }
  return rep;
}

}  // namespace sideinfo
