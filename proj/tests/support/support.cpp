#include "support.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace support {

using sideinfo::Dist;
using sideinfo::Joint;
using sideinfo::Joint3;
using sideinfo::ProcessModel;

double unit(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

std::vector<double> simplex_point(Rng& rng, std::size_t n, double zero_prob) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& x : v) {
    x = unit(rng) < zero_prob ? 0.0 : e(rng);
    s += x;
  }
  if (s == 0.0) {
    v[below(rng, n)] = 1.0;
    return v;
  }
  for (auto& x : v) x /= s;
  return v;
}

Dist gen_dist(Rng& rng, std::size_t n, double zero_prob) { return Dist::validate(simplex_point(rng, n, zero_prob)); }

Joint gen_joint(Rng& rng, std::size_t rows, std::size_t cols, double zero_prob) {
  return Joint::validate(rows, cols, simplex_point(rng, rows * cols, zero_prob));
}

Joint3 gen_joint3(Rng& rng, std::size_t nx, std::size_t ny, std::size_t nw) {
  return Joint3::validate(nx, ny, nw, simplex_point(rng, nx * ny * nw));
}

std::vector<double> gen_kernel(Rng& rng, std::size_t states, double zero_prob) {
  std::vector<double> k;
  for (std::size_t z = 0; z < states; ++z) {
    const auto row = simplex_point(rng, states, zero_prob);
    k.insert(k.end(), row.begin(), row.end());
  }
  return k;
}

ProcessModel gen_markov(Rng& rng, std::size_t nx, std::size_t ny, double zero_prob) {
  const std::size_t k = nx * ny;
  auto init = simplex_point(rng, k);
  auto kernel = gen_kernel(rng, k, zero_prob);
  return ProcessModel::markov(nx, ny, init, kernel);
}

std::vector<double> power_stationary(const std::vector<double>& kernel, std::size_t states) {
  std::vector<double> pi(states, 1.0 / static_cast<double>(states));
  for (int it = 0; it < 100000; ++it) {
    std::vector<double> next(states, 0.0);
    for (std::size_t a = 0; a < states; ++a)
      for (std::size_t b = 0; b < states; ++b) next[b] += pi[a] * kernel[a * states + b];
    double diff = 0.0;
    for (std::size_t a = 0; a < states; ++a) diff = std::max(diff, std::abs(next[a] - pi[a]));
    pi = next;
    if (diff < 1e-16) break;
  }
  return pi;
}

ProcessModel gen_stationary_markov(Rng& rng, std::size_t nx, std::size_t ny) {
  const std::size_t k = nx * ny;
  // Dense rows keep the chain aperiodic so power iteration converges.
  auto kernel = gen_kernel(rng, k);
  return ProcessModel::markov(nx, ny, power_stationary(kernel, k), kernel);
}

namespace {

// Pair alphabet state z = x * ny + y.
ProcessModel from_rule(std::vector<double> init, const std::function<double(int, int, int, int)>& step) {
  std::vector<double> kernel(16);
  for (int z = 0; z < 4; ++z)
    for (int w = 0; w < 4; ++w) kernel[z * 4 + w] = step(z / 2, z % 2, w / 2, w % 2);
  return ProcessModel::markov(2, 2, std::move(init), std::move(kernel));
}

}  // namespace

ProcessModel copy_process() {
  return from_rule({0.5, 0, 0, 0.5}, [](int, int, int x, int y) { return x == y ? 0.5 : 0.0; });
}

ProcessModel delayed_copy_process() {
  return from_rule({0.25, 0.25, 0.25, 0.25}, [](int xp, int, int, int y) { return y == xp ? 0.5 : 0.0; });
}

ProcessModel lagged_follower_process() {
  return from_rule({0.25, 0.25, 0.25, 0.25}, [](int, int yp, int x, int) { return x == yp ? 0.5 : 0.0; });
}

ProcessModel independent_process() {
  return from_rule({0.25, 0.25, 0.25, 0.25}, [](int, int, int, int) { return 0.25; });
}

double ref_entropy(const std::vector<double>& p) {
  long double h = 0.0L;
  for (double v : p)
    if (v > 0.0) h -= static_cast<long double>(v) * std::log(static_cast<long double>(v));
  return static_cast<double>(h);
}

double ref_mutual_information(const Joint& j) {
  std::vector<double> px(j.rows(), 0.0), py(j.cols(), 0.0), pxy;
  for (std::size_t x = 0; x < j.rows(); ++x)
    for (std::size_t y = 0; y < j.cols(); ++y) {
      px[x] += j(x, y);
      py[y] += j(x, y);
      pxy.push_back(j(x, y));
    }
  return ref_entropy(px) + ref_entropy(py) - ref_entropy(pxy);
}

double ref_conditional_mi(const Joint3& j) {
  // I(X;Y|W) = H(X,W) + H(Y,W) - H(X,Y,W) - H(W)
  std::vector<double> pxw(j.nx() * j.nw(), 0.0), pyw(j.ny() * j.nw(), 0.0), pw(j.nw(), 0.0), pxyw;
  for (std::size_t x = 0; x < j.nx(); ++x)
    for (std::size_t y = 0; y < j.ny(); ++y)
      for (std::size_t w = 0; w < j.nw(); ++w) {
        const double p = j(x, y, w);
        pxw[x * j.nw() + w] += p;
        pyw[y * j.nw() + w] += p;
        pw[w] += p;
        pxyw.push_back(p);
      }
  return ref_entropy(pxw) + ref_entropy(pyw) - ref_entropy(pxyw) - ref_entropy(pw);
}

PathTable ref_paths(const sideinfo::MarkovJoint& m, std::size_t n) {
  PathTable t{m.nx, m.ny, n, {}, {}};
  const std::size_t k = m.nx * m.ny;
  for (std::size_t z = 0; z < k; ++z) {
    t.paths.push_back({{static_cast<int>(z / m.ny), static_cast<int>(z % m.ny)}});
    t.probs.push_back(m.initial[z]);
  }
  for (std::size_t step = 1; step < n; ++step) {
    PathTable next{m.nx, m.ny, n, {}, {}};
    for (std::size_t i = 0; i < t.paths.size(); ++i) {
      const auto& path = t.paths[i];
      const std::size_t last = static_cast<std::size_t>(path.back().first) * m.ny + path.back().second;
      for (std::size_t z = 0; z < k; ++z) {
        auto extended = path;
        extended.emplace_back(static_cast<int>(z / m.ny), static_cast<int>(z % m.ny));
        next.paths.push_back(std::move(extended));
        next.probs.push_back(t.probs[i] * m(last, z));
      }
    }
    t.paths = std::move(next.paths);
    t.probs = std::move(next.probs);
  }
  return t;
}

double ref_prefix_entropy(const PathTable& t, std::size_t a, std::size_t b) {
  std::map<std::pair<std::vector<int>, std::vector<int>>, double> law;
  for (std::size_t i = 0; i < t.paths.size(); ++i) {
    std::vector<int> xs, ys;
    for (std::size_t s = 0; s < a; ++s) xs.push_back(t.paths[i][s].first);
    for (std::size_t s = 0; s < b; ++s) ys.push_back(t.paths[i][s].second);
    law[{xs, ys}] += t.probs[i];
  }
  std::vector<double> p;
  for (const auto& [key, v] : law) p.push_back(v);
  return ref_entropy(p);
}

double ref_directed_info(const PathTable& t) {
  // sum_i H(Y_i | Y^{i-1}) - H(Y_i | Y^{i-1}, X^i)
  double s = 0.0;
  for (std::size_t i = 1; i <= t.n; ++i) {
    s += ref_prefix_entropy(t, 0, i) - ref_prefix_entropy(t, 0, i - 1);
    s -= ref_prefix_entropy(t, i, i) - ref_prefix_entropy(t, i, i - 1);
  }
  return s;
}

double ref_reverse_delayed_di(const PathTable& t) {
  // sum_i H(X_i | X^{i-1}) - H(X_i | X^{i-1}, Y^{i-1})
  double s = 0.0;
  for (std::size_t i = 1; i <= t.n; ++i) {
    s += ref_prefix_entropy(t, i, 0) - ref_prefix_entropy(t, i - 1, 0);
    s -= ref_prefix_entropy(t, i, i - 1) - ref_prefix_entropy(t, i - 1, i - 1);
  }
  return s;
}

double ref_total_mi(const PathTable& t) {
  return ref_prefix_entropy(t, t.n, 0) + ref_prefix_entropy(t, 0, t.n) - ref_prefix_entropy(t, t.n, t.n);
}

double SimulatedGeweke::f() const { return std::log(restricted / full); }

namespace {

double ls_residual_variance(const Eigen::MatrixXd& design, const Eigen::VectorXd& target) {
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(target);
  const Eigen::VectorXd r = target - design * beta;
  return r.squaredNorm() / static_cast<double>(r.size());
}

}  // namespace

SimulatedGeweke simulate_geweke(const sideinfo::VarModel& v, std::size_t steps, std::size_t restricted_lags,
                                std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto& s = v.noise();
  const double l00 = std::sqrt(s[0]);
  const double l10 = s[2] / l00;
  const double l11 = std::sqrt(s[3] - l10 * l10);
  const std::size_t p = v.order();
  const std::size_t burn = 2000;
  std::vector<double> xs(steps + burn, 0.0), ys(steps + burn, 0.0);
  for (std::size_t t = p; t < xs.size(); ++t) {
    const double e0 = gauss(rng), e1 = gauss(rng);
    double x = l00 * e0, y = l10 * e0 + l11 * e1;
    for (std::size_t k = 1; k <= p; ++k) {
      const auto& a = v.coefficients()[k - 1];
      x += a[0] * xs[t - k] + a[1] * ys[t - k];
      y += a[2] * xs[t - k] + a[3] * ys[t - k];
    }
    xs[t] = x;
    ys[t] = y;
  }
  const std::size_t lead = std::max(p, restricted_lags);
  const auto rows = static_cast<Eigen::Index>(steps - lead);
  Eigen::VectorXd target(rows);
  Eigen::MatrixXd full(rows, static_cast<Eigen::Index>(2 * p));
  Eigen::MatrixXd restricted(rows, static_cast<Eigen::Index>(restricted_lags));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t t = burn + lead + static_cast<std::size_t>(r);
    target(r) = xs[t];
    for (std::size_t k = 1; k <= p; ++k) {
      full(r, static_cast<Eigen::Index>(2 * (k - 1))) = xs[t - k];
      full(r, static_cast<Eigen::Index>(2 * (k - 1) + 1)) = ys[t - k];
    }
    for (std::size_t k = 1; k <= restricted_lags; ++k) restricted(r, static_cast<Eigen::Index>(k - 1)) = xs[t - k];
  }
  return {ls_residual_variance(full, target), ls_residual_variance(restricted, target)};
}

}  // namespace support
