#include "sideinfo/causality.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "sideinfo/error.hpp"

namespace sideinfo {

namespace {

std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

// base^e, or SIZE_MAX once it passes `cap`
std::size_t capped_pow(std::size_t base, std::size_t e, std::size_t cap) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (r > cap / std::max<std::size_t>(base, 1)) return static_cast<std::size_t>(-1);
    r *= base;
  }
  return r;
}

void check_enumerable(std::size_t nx, std::size_t ny, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "horizon must be at least 1");
  if (capped_pow(nx * ny, n, kMaxSequenceOutcomes) > kMaxSequenceOutcomes) {
    std::ostringstream os;
    os << "(|X||Y|)^n = (" << nx * ny << ")^" << n << " exceeds " << kMaxSequenceOutcomes;
    throw Error(ErrorKind::HorizonTooLarge, os.str());
  }
}

double plogp_sum(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

std::vector<double> validated_row(std::span<const double> row) { return Dist::validate(row).values(); }

bool is_stationary(const MarkovJoint& m, double tol) {
  const std::size_t k = m.nx * m.ny;
  for (std::size_t to = 0; to < k; ++to) {
    double s = 0.0;
    for (std::size_t from = 0; from < k; ++from) s += m.initial[from] * m(from, to);
    if (std::abs(s - m.initial[to]) > tol) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------- models

ProcessModel ProcessModel::explicit_table(std::size_t nx, std::size_t ny, std::size_t horizon,
                                          std::vector<double> probs) {
  if (nx == 0 || ny == 0) throw Error(ErrorKind::InvalidArgument, "empty process alphabet");
  check_enumerable(nx, ny, horizon);
  if (probs.size() != ipow(nx * ny, horizon)) {
    throw Error(ErrorKind::InvalidArgument, "explicit process table has the wrong length");
  }
  return ProcessModel(ExplicitProcess{nx, ny, horizon, Dist::validate(probs).values()});
}

ProcessModel ProcessModel::markov(std::size_t nx, std::size_t ny, std::vector<double> initial,
                                  std::vector<double> kernel) {
  const std::size_t k = nx * ny;
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "empty process alphabet");
  if (initial.size() != k || kernel.size() != k * k) {
    throw Error(ErrorKind::InvalidArgument, "Markov model dimensions do not match the pair alphabet");
  }
  MarkovJoint m{nx, ny, validated_row(initial), {}};
  m.kernel.reserve(k * k);
  for (std::size_t z = 0; z < k; ++z) {
    const auto row = validated_row(std::span<const double>(kernel).subspan(z * k, k));
    m.kernel.insert(m.kernel.end(), row.begin(), row.end());
  }
  return ProcessModel(std::move(m));
}

ProcessModel ProcessModel::stationary_markov(std::size_t nx, std::size_t ny, std::vector<double> kernel) {
  const Dist pi = stationary_distribution(nx * ny, kernel);
  return markov(nx, ny, pi.values(), std::move(kernel));
}

std::size_t ProcessModel::nx() const noexcept {
  return std::visit([](const auto& m) { return m.nx; }, v_);
}

std::size_t ProcessModel::ny() const noexcept {
  return std::visit([](const auto& m) { return m.ny; }, v_);
}

ProcessModel swap_roles(const ProcessModel& m) {
  const std::size_t nx = m.nx(), ny = m.ny(), k = nx * ny;
  auto swap_pair = [nx, ny](std::size_t z) { return (z % ny) * nx + z / ny; };
  if (const auto* mj = m.markov_joint()) {
    std::vector<double> init(k), kern(k * k);
    for (std::size_t z = 0; z < k; ++z) {
      init[swap_pair(z)] = mj->initial[z];
      for (std::size_t w = 0; w < k; ++w) kern[swap_pair(z) * k + swap_pair(w)] = (*mj)(z, w);
    }
    return ProcessModel::markov(ny, nx, std::move(init), std::move(kern));
  }
  const auto& e = std::get<ExplicitProcess>(m.variant());
  std::vector<double> p(e.probs.size());
  for (std::size_t idx = 0; idx < e.probs.size(); ++idx) {
    std::size_t rest = idx, out = 0, place = 1;
    for (std::size_t i = 0; i < e.horizon; ++i) {
      out += swap_pair(rest % k) * place;
      rest /= k;
      place *= k;
    }
    p[out] = e.probs[idx];
  }
  return ProcessModel::explicit_table(ny, nx, e.horizon, std::move(p));
}

Dist stationary_distribution(std::size_t states, const std::vector<double>& kernel) {
  if (kernel.size() != states * states) throw Error(ErrorKind::InvalidArgument, "kernel is not square");
  // Solve pi (K - I) = 0 with sum(pi) = 1 as an overdetermined least-squares system.
  Eigen::MatrixXd a(states + 1, states);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(states + 1));
  for (std::size_t to = 0; to < states; ++to) {
    for (std::size_t from = 0; from < states; ++from) {
      a(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from)) =
          kernel[from * states + to] - (from == to ? 1.0 : 0.0);
    }
  }
  a.row(static_cast<Eigen::Index>(states)).setOnes();
  rhs(static_cast<Eigen::Index>(states)) = 1.0;
  const Eigen::VectorXd pi = a.colPivHouseholderQr().solve(rhs);
  std::vector<double> p(states);
  for (std::size_t i = 0; i < states; ++i) p[i] = std::max(pi(static_cast<Eigen::Index>(i)), 0.0);
  double s = 0.0;
  for (double v : p) s += v;
  for (auto& v : p) v /= s;
  return Dist::validate(p);
}

// ---------------------------------------------------------------- unrolling

namespace {

SequenceTable cut_explicit(const ExplicitProcess& e, std::size_t n) {
  if (n > e.horizon) {
    throw Error(ErrorKind::HorizonTooLarge, "explicit process holds fewer steps than requested");
  }
  const std::size_t k = e.nx * e.ny;
  const std::size_t tail = ipow(k, e.horizon - n);
  SequenceTable s{e.nx, e.ny, n, std::vector<double>(ipow(k, n), 0.0)};
  for (std::size_t j = 0; j < s.probs.size(); ++j) {
    double acc = 0.0;
    for (std::size_t t = 0; t < tail; ++t) acc += e.probs[j * tail + t];
    s.probs[j] = acc;
  }
  return s;
}

}  // namespace

SequenceTable unroll(const ProcessModel& m, std::size_t n) {
  check_enumerable(m.nx(), m.ny(), n);
  if (const auto* e = std::get_if<ExplicitProcess>(&m.variant())) return cut_explicit(*e, n);
  const auto& mj = std::get<MarkovJoint>(m.variant());
  const std::size_t k = mj.nx * mj.ny;
  // same growth as the serial reference, with each step split across workers;
  // every entry is the same product in the same order
  std::vector<double> cur(mj.initial);
  for (std::size_t t = 1; t < n; ++t) {
    std::vector<double> next(cur.size() * k);
    const auto rows = static_cast<std::ptrdiff_t>(cur.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      const std::size_t j = static_cast<std::size_t>(r);
      const std::size_t last = j % k;
      for (std::size_t z = 0; z < k; ++z) next[j * k + z] = cur[j] == 0.0 ? 0.0 : cur[j] * mj(last, z);
    }
    cur = std::move(next);
  }
  return {mj.nx, mj.ny, n, std::move(cur)};
}

SequenceTable unroll_serial(const ProcessModel& m, std::size_t n) {
  check_enumerable(m.nx(), m.ny(), n);
  if (const auto* e = std::get_if<ExplicitProcess>(&m.variant())) return cut_explicit(*e, n);
  const auto& mj = std::get<MarkovJoint>(m.variant());
  const std::size_t k = mj.nx * mj.ny;
  // grow the table one step at a time: p(z^t) = p(z^{t-1}) K(z_{t-1}, z_t)
  std::vector<double> cur(mj.initial);
  for (std::size_t t = 1; t < n; ++t) {
    std::vector<double> next(cur.size() * k);
    for (std::size_t j = 0; j < cur.size(); ++j) {
      const std::size_t last = j % k;
      for (std::size_t z = 0; z < k; ++z) next[j * k + z] = cur[j] == 0.0 ? 0.0 : cur[j] * mj(last, z);
    }
    cur = std::move(next);
  }
  return {mj.nx, mj.ny, n, std::move(cur)};
}

// ---------------------------------------------------------------- marginals

namespace {

// Offsets into the full table for every assignment of the listed coordinates,
// first coordinate most significant.
std::vector<std::size_t> expand_offsets(const std::vector<std::pair<std::size_t, std::size_t>>& coords) {
  std::vector<std::size_t> out{0};
  for (const auto& [radix, stride] : coords) {
    std::vector<std::size_t> next;
    next.reserve(out.size() * radix);
    for (std::size_t o : out)
      for (std::size_t v = 0; v < radix; ++v) next.push_back(o + v * stride);
    out = std::move(next);
  }
  return out;
}

void check_prefix(const SequenceTable& s, std::size_t a, std::size_t b) {
  if (a > s.horizon || b > s.horizon) throw Error(ErrorKind::InvalidArgument, "prefix longer than the horizon");
}

}  // namespace

PrefixMarginal prefix_marginal(const SequenceTable& s, std::size_t a, std::size_t b) {
  check_prefix(s, a, b);
  const std::size_t n = s.horizon, k = s.nx * s.ny;
  // stride of time step i (1-based) in the full index
  auto step_stride = [&](std::size_t i) { return ipow(k, n - i); };
  std::vector<std::pair<std::size_t, std::size_t>> xs, ys, summed;
  for (std::size_t i = 1; i <= n; ++i) {
    (i <= a ? xs : summed).push_back({s.nx, s.ny * step_stride(i)});
    (i <= b ? ys : summed).push_back({s.ny, step_stride(i)});
  }
  const auto base_x = expand_offsets(xs);
  const auto base_y = expand_offsets(ys);
  const auto off = expand_offsets(summed);

  PrefixMarginal out{a, b, std::vector<double>(base_x.size() * base_y.size())};
  const auto cells = static_cast<std::ptrdiff_t>(out.probs.size());
  const std::size_t ny_b = base_y.size();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < cells; ++c) {
    const std::size_t cell = static_cast<std::size_t>(c);
    const std::size_t base = base_x[cell / ny_b] + base_y[cell % ny_b];
    double acc = 0.0;
    for (std::size_t o : off) acc += s.probs[base + o];
    out.probs[cell] = acc;
  }
  return out;
}

PrefixMarginal prefix_marginal_serial(const SequenceTable& s, std::size_t a, std::size_t b) {
  check_prefix(s, a, b);
  const std::size_t n = s.horizon, k = s.nx * s.ny;
  PrefixMarginal out{a, b, std::vector<double>(ipow(s.nx, a) * ipow(s.ny, b), 0.0)};
  const std::size_t ny_b = ipow(s.ny, b);
  std::vector<std::size_t> z(n);
  for (std::size_t idx = 0; idx < s.probs.size(); ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = n; i-- > 0;) {
      z[i] = rest % k;
      rest /= k;
    }
    std::size_t kx = 0, ky = 0;
    for (std::size_t i = 0; i < a; ++i) kx = kx * s.nx + z[i] / s.ny;
    for (std::size_t i = 0; i < b; ++i) ky = ky * s.ny + z[i] % s.ny;
    out.probs[kx * ny_b + ky] += s.probs[idx];
  }
  return out;
}

// ---------------------------------------------------------------- analysis

SequenceAnalysis::SequenceAnalysis(const ProcessModel& m, std::size_t n)
    : table_(unroll(m, n)),
      cache_(n + 1, std::vector<PrefixMarginal>(n + 1)),
      cached_(n + 1, std::vector<bool>(n + 1, false)) {}

const PrefixMarginal& SequenceAnalysis::marginal(std::size_t a, std::size_t b) {
  if (!cached_.at(a).at(b)) {
    cache_[a][b] = prefix_marginal(table_, a, b);
    cached_[a][b] = true;
  }
  return cache_[a][b];
}

double SequenceAnalysis::entropy(std::size_t a, std::size_t b) { return plogp_sum(marginal(a, b).probs); }

double SequenceAnalysis::cond_mi(std::pair<std::size_t, std::size_t> abc, std::pair<std::size_t, std::size_t> ac,
                                 std::pair<std::size_t, std::size_t> bc, std::pair<std::size_t, std::size_t> c) {
  const std::size_t nx = table_.nx, ny = table_.ny;
  for (const auto& sub : {ac, bc, c}) {
    if (sub.first > abc.first || sub.second > abc.second) {
      throw Error(ErrorKind::InvalidArgument, "conditional MI blocks must be nested prefixes");
    }
  }
  const auto& pabc = marginal(abc.first, abc.second).probs;
  const auto& pac = marginal(ac.first, ac.second).probs;
  const auto& pbc = marginal(bc.first, bc.second).probs;
  const auto& pc = marginal(c.first, c.second).probs;
  const std::size_t ny_b = ipow(ny, abc.second);

  auto sub_key = [&](std::size_t kx, std::size_t ky, std::pair<std::size_t, std::size_t> to) {
    return (kx / ipow(nx, abc.first - to.first)) * ipow(ny, to.second) + ky / ipow(ny, abc.second - to.second);
  };
  double total = 0.0;
  for (std::size_t key = 0; key < pabc.size(); ++key) {
    const double p = pabc[key];
    if (p <= 0.0) continue;
    const std::size_t kx = key / ny_b, ky = key % ny_b;
    const double ratio = (p * pc[sub_key(kx, ky, c)]) / (pac[sub_key(kx, ky, ac)] * pbc[sub_key(kx, ky, bc)]);
    total += p * std::log(ratio);
  }
  return std::max(total, 0.0);
}

double SequenceAnalysis::forward_term(std::size_t i) { return cond_mi({i, i}, {i, i - 1}, {0, i}, {0, i - 1}); }

double SequenceAnalysis::forward_lagged_term(std::size_t i) {
  return cond_mi({i - 1, i}, {i - 1, i - 1}, {0, i}, {0, i - 1});
}

double SequenceAnalysis::reverse_term(std::size_t i) {
  return cond_mi({i, i - 1}, {i - 1, i - 1}, {i, 0}, {i - 1, 0});
}

double SequenceAnalysis::instantaneous_term(std::size_t i) {
  return cond_mi({i, i}, {i, i - 1}, {i - 1, i}, {i - 1, i - 1});
}

double SequenceAnalysis::total_mi() {
  const std::size_t n = table_.horizon, k = table_.nx * table_.ny;
  const auto& px = marginal(n, 0).probs;
  const auto& py = marginal(0, n).probs;
  double total = 0.0;
  for (std::size_t idx = 0; idx < table_.probs.size(); ++idx) {
    const double p = table_.probs[idx];
    if (p <= 0.0) continue;
    std::size_t place = ipow(k, n - 1), rest = idx, kx = 0, ky = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t z = rest / place;
      rest %= place;
      place = std::max<std::size_t>(place / k, 1);
      kx = kx * table_.nx + z / table_.ny;
      ky = ky * table_.ny + z % table_.ny;
    }
    total += p * std::log(p / (px[kx] * py[ky]));
  }
  return std::max(total, 0.0);
}

Joint3 SequenceAnalysis::causal_prediction_joint(std::size_t i) {
  if (i == 0 || i > table_.horizon) throw Error(ErrorKind::InvalidArgument, "step outside the horizon");
  const std::size_t nx = table_.nx, ny = table_.ny;
  const std::size_t nw = ipow(nx, i - 1), nyp = ipow(ny, i - 1);
  const auto& p = marginal(i, i - 1).probs;
  std::vector<double> t(nx * nyp * nw);
  for (std::size_t key = 0; key < p.size(); ++key) {
    const std::size_t kx = key / nyp, ky = key % nyp;
    const std::size_t past = kx / nx, now = kx % nx;
    t[(now * nyp + ky) * nw + past] = p[key];
  }
  return Joint3::validate(nx, nyp, nw, t);
}

// ---------------------------------------------------------------- measures

double directed_info(const ProcessModel& m, std::size_t n) {
  SequenceAnalysis s(m, n);
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) total += s.forward_term(i);
  return total;
}

double causally_cond_entropy(const ProcessModel& m, std::size_t n) {
  SequenceAnalysis s(m, n);
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) total += s.entropy(i, i) - s.entropy(i, i - 1);
  return std::max(total, 0.0);
}

double reverse_delayed_di(const ProcessModel& m, std::size_t n) {
  const auto* mj = m.markov_joint();
  if (mj != nullptr && capped_pow(m.nx() * m.ny(), n, kMaxSequenceOutcomes) > kMaxSequenceOutcomes) {
    double total = 0.0;
    for (double v : reverse_di_increments_markov(*mj, n)) total += v;
    return total;
  }
  SequenceAnalysis s(m, n);
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) total += s.reverse_term(i);
  return total;
}

DIReport conservation_check(const ProcessModel& m, std::size_t n) {
  SequenceAnalysis s(m, n);
  DIReport r;
  for (std::size_t i = 1; i <= n; ++i) {
    r.forward_terms.push_back(s.forward_term(i));
    r.reverse_terms.push_back(s.reverse_term(i));
    r.forward += r.forward_terms.back();
    r.reverse_delayed += r.reverse_terms.back();
    r.forward_lagged += s.forward_lagged_term(i);
    r.instantaneous += s.instantaneous_term(i);
  }
  r.total_mi = s.total_mi();
  r.residual = std::abs(r.total_mi - r.forward - r.reverse_delayed);
  r.refined_residual = std::abs(r.total_mi - r.forward_lagged - r.reverse_delayed - r.instantaneous);
  return r;
}

bool granger_noncausal(const ProcessModel& m, std::size_t n, double tol) {
  return reverse_delayed_di(m, n) <= tol;
}

double transfer_entropy(const ProcessModel& m, Direction dir) {
  if (dir == Direction::XtoY) return transfer_entropy(swap_roles(m), Direction::YtoX);
  const auto* mj = m.markov_joint();
  if (mj == nullptr || !is_stationary(*mj, 1e-9)) {
    throw Error(ErrorKind::NotStationary, "transfer entropy needs a Markov model in its stationary law");
  }
  const std::size_t nx = mj->nx, ny = mj->ny;
  // axes: target X_i, side information Y_{i-1}, common X_{i-1}
  std::vector<double> t(nx * ny * nx, 0.0);
  for (std::size_t xp = 0; xp < nx; ++xp)
    for (std::size_t yp = 0; yp < ny; ++yp) {
      const std::size_t from = xp * ny + yp;
      for (std::size_t x = 0; x < nx; ++x) {
        double s = 0.0;
        for (std::size_t y = 0; y < ny; ++y) s += (*mj)(from, x * ny + y);
        t[(x * ny + yp) * nx + xp] += mj->initial[from] * s;
      }
    }
  return conditional_mutual_information(Joint3::validate(nx, ny, nx, t));
}

std::vector<double> reverse_di_increments_markov(const MarkovJoint& m, std::size_t n) {
  const std::size_t nx = m.nx, ny = m.ny, k = nx * ny;
  if (capped_pow(nx, n, kMaxSequenceOutcomes) > kMaxSequenceOutcomes / std::max<std::size_t>(ny, 1)) {
    throw Error(ErrorKind::HorizonTooLarge, "X history table too large");
  }
  std::vector<double> inc(n, 0.0);
  // alpha[(x^i, y_i)] = P(X^i = x^i, Y_i = y_i)
  std::vector<double> alpha(m.initial);
  std::vector<double> pair_law(m.initial);  // law of (X_i, Y_i)
  auto h_x_hist = [&](const std::vector<double>& a) {
    std::vector<double> px(a.size() / ny, 0.0);
    for (std::size_t j = 0; j < a.size(); ++j) px[j / ny] += a[j];
    return plogp_sum(px);
  };
  double h_prev = h_x_hist(alpha);
  for (std::size_t i = 2; i <= n; ++i) {
    // H(X_i | X_{i-1}, Y_{i-1}) under the current pair law
    double h_local = 0.0;
    for (std::size_t z = 0; z < k; ++z) {
      if (pair_law[z] <= 0.0) continue;
      std::vector<double> row(nx, 0.0);
      for (std::size_t w = 0; w < k; ++w) row[w / ny] += m(z, w);
      h_local += pair_law[z] * plogp_sum(row);
    }
    std::vector<double> next(alpha.size() * nx, 0.0);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      if (alpha[j] == 0.0) continue;
      const std::size_t hist = j / ny, y_prev = j % ny, x_prev = hist % nx;
      const std::size_t from = x_prev * ny + y_prev;
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) next[(hist * nx + x) * ny + y] += alpha[j] * m(from, x * ny + y);
    }
    alpha = std::move(next);
    std::vector<double> law(k, 0.0);
    for (std::size_t z = 0; z < k; ++z)
      for (std::size_t w = 0; w < k; ++w) law[w] += pair_law[z] * m(z, w);
    pair_law = std::move(law);

    const double h_now = h_x_hist(alpha);
    inc[i - 1] = std::max(h_now - h_prev - h_local, 0.0);
    h_prev = h_now;
  }
  return inc;
}

RateReport di_rate(const ProcessModel& m, Direction dir, std::size_t max_n, double tol) {
  if (dir == Direction::XtoY) return di_rate(swap_roles(m), Direction::YtoX, max_n, tol);
  const auto* mj = m.markov_joint();
  if (mj == nullptr || !is_stationary(*mj, 1e-9)) {
    throw Error(ErrorKind::NotStationary, "directed information rate needs a stationary Markov model");
  }
  if (max_n < 3) throw Error(ErrorKind::InvalidArgument, "rate estimation needs max_n >= 3");
  RateReport r;
  // grow the horizon until two successive increments agree or the X history
  // table no longer fits
  for (std::size_t n = 3; n <= max_n; ++n) {
    if (capped_pow(mj->nx, n, kMaxSequenceOutcomes) > kMaxSequenceOutcomes / std::max<std::size_t>(mj->ny, 1)) {
      if (n == 3) throw Error(ErrorKind::HorizonTooLarge, "X history table too large");
      break;
    }
    r.increments = reverse_di_increments_markov(*mj, n);
    r.horizon = n;
    r.rate = r.increments.back();
    if (std::abs(r.increments[n - 1] - r.increments[n - 2]) < tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

}  // namespace sideinfo
