#include "sideinfo/sufficiency.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "sideinfo/benefit.hpp"
#include "sideinfo/random.hpp"

namespace sideinfo {

// ---------------------------------------------------------------- Transform

Transform::Transform(std::vector<std::size_t> map) : map_(std::move(map)) {
  if (map_.empty()) throw Error(ErrorKind::InvalidArgument, "transform on an empty alphabet");
  const std::size_t top = *std::max_element(map_.begin(), map_.end());
  std::vector<bool> hit(top + 1, false);
  for (auto t : map_) hit[t] = true;
  if (!std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) {
    throw Error(ErrorKind::InvalidArgument, "transform image is not contiguous");
  }
  image_ = top + 1;
}

Transform Transform::identity(std::size_t n) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  return Transform(std::move(m));
}

Transform Transform::canonical(std::span<const std::size_t> block_of) {
  std::vector<std::size_t> seen;
  std::vector<std::size_t> m(block_of.size());
  for (std::size_t x = 0; x < block_of.size(); ++x) {
    const auto it = std::find(seen.begin(), seen.end(), block_of[x]);
    if (it == seen.end()) {
      seen.push_back(block_of[x]);
      m[x] = seen.size() - 1;
    } else {
      m[x] = static_cast<std::size_t>(it - seen.begin());
    }
  }
  return Transform(std::move(m));
}

Transform Transform::permutation(std::vector<std::size_t> perm) {
  Transform t(std::move(perm));
  if (!t.is_bijection()) throw Error(ErrorKind::InvalidArgument, "not a permutation");
  return t;
}

bool Transform::is_identity() const noexcept {
  for (std::size_t x = 0; x < map_.size(); ++x)
    if (map_[x] != x) return false;
  return true;
}

Transform Transform::inverse() const {
  if (!is_bijection()) throw Error(ErrorKind::InvalidArgument, "only bijections have inverses");
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t x = 0; x < map_.size(); ++x) inv[map_[x]] = x;
  return Transform(std::move(inv));
}

// ---------------------------------------------------------------- sufficiency

namespace {

// P_{Y|X=x} rows; empty for zero-mass symbols.
std::vector<std::vector<double>> y_given_x(const Joint& j) {
  std::vector<std::vector<double>> rows(j.rows());
  for (std::size_t x = 0; x < j.rows(); ++x) {
    double mass = 0.0;
    for (std::size_t y = 0; y < j.cols(); ++y) mass += j(x, y);
    if (mass <= 0.0) continue;
    rows[x].resize(j.cols());
    for (std::size_t y = 0; y < j.cols(); ++y) rows[x][y] = j(x, y) / mass;
  }
  return rows;
}

}  // namespace

SufficiencyCert check_sufficient(const Transform& t, const Joint& j, double tol) {
  if (t.domain_size() != j.rows()) throw Error(ErrorKind::InvalidArgument, "transform and joint differ in |X|");
  const auto rows = y_given_x(j);
  SufficiencyCert cert;
  for (std::size_t x = 0; x < rows.size(); ++x)
    if (rows[x].empty()) cert.zero_mass_symbols.push_back(x);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    if (rows[a].empty()) continue;
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      if (rows[b].empty() || t(a) != t(b)) continue;
      cert.max_class_tv = std::max(cert.max_class_tv, total_variation(rows[a], rows[b]));
    }
  }
  cert.is_sufficient = cert.max_class_tv <= tol;
  return cert;
}

SufficientSet enumerate_sufficient(const Joint& j, double tol, std::uint64_t seed,
                                   std::size_t sampled_permutations) {
  const std::size_t n = j.rows();
  if (n > kMaxEnumerationAlphabet) {
    throw Error(ErrorKind::AlphabetTooLarge, "partition enumeration is limited to 12 symbols");
  }
  const auto rows = y_given_x(j);
  SufficientSet out;

  // Restricted growth strings, "open a new block" tried first so the identity
  // comes out first. A symbol may join a block only if it agrees with every
  // positive-mass member already there.
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> block_of(n);
  std::function<void(std::size_t)> rec = [&](std::size_t x) {
    if (x == n) {
      out.merges.emplace_back(block_of);
      return;
    }
    blocks.push_back({x});
    block_of[x] = blocks.size() - 1;
    rec(x + 1);
    blocks.pop_back();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      bool ok = true;
      if (!rows[x].empty()) {
        for (std::size_t other : blocks[b]) {
          if (!rows[other].empty() && total_variation(rows[x], rows[other]) > tol) {
            ok = false;
            break;
          }
        }
      }
      if (!ok) continue;
      blocks[b].push_back(x);
      block_of[x] = b;
      rec(x + 1);
      blocks[b].pop_back();
    }
  };
  rec(0);

  std::uint64_t fact = 1;
  for (std::size_t k = 2; k <= n; ++k) {
    fact = fact > std::numeric_limits<std::uint64_t>::max() / k ? std::numeric_limits<std::uint64_t>::max()
                                                                 : fact * k;
  }
  out.permutation_count = fact;
  if (n <= 5) {
    out.all_permutations = true;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
      out.permutations.push_back(Transform::permutation(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    Rng rng(seed);
    out.permutations.push_back(Transform::identity(n));
    for (std::size_t k = 0; k < sampled_permutations; ++k) {
      out.permutations.push_back(Transform::permutation(random_permutation(n, rng)));
    }
  }
  return out;
}

Joint push_forward(const Joint& j, const Transform& t) {
  if (t.domain_size() != j.rows()) throw Error(ErrorKind::InvalidArgument, "transform and joint differ in |X|");
  std::vector<double> p(t.image_size() * j.cols(), 0.0);
  for (std::size_t x = 0; x < j.rows(); ++x)
    for (std::size_t y = 0; y < j.cols(); ++y) p[t(x) * j.cols() + y] += j(x, y);
  return Joint::validate(t.image_size(), j.cols(), p);
}

Joint push_within(const Joint& j, const Transform& t) {
  if (t.domain_size() != j.rows()) throw Error(ErrorKind::InvalidArgument, "transform and joint differ in |X|");
  if (t.is_bijection()) return push_forward(j, t);
  std::vector<std::size_t> rep(t.image_size(), j.rows());
  for (std::size_t x = 0; x < j.rows(); ++x) rep[t(x)] = std::min(rep[t(x)], x);
  std::vector<double> p(j.rows() * j.cols(), 0.0);
  for (std::size_t x = 0; x < j.rows(); ++x)
    for (std::size_t y = 0; y < j.cols(); ++y) p[rep[t(x)] * j.cols() + y] += j(x, y);
  return Joint::validate(j.rows(), j.cols(), p);
}

Joint permute_x(const Joint& j, std::span<const std::size_t> perm) {
  return push_forward(j, Transform::permutation({perm.begin(), perm.end()}));
}

std::string to_string(WitnessKind k) {
  return k == WitnessKind::DpaViolation ? "dpa_violation" : "asymmetry";
}

namespace {

std::optional<WitnessKind> classify(const Transform& t, double before, double after, double tol) {
  if (t.is_bijection()) {
    if (std::abs(after - before) > tol) return WitnessKind::Asymmetry;
    return std::nullopt;
  }
  if (after > before + tol) return WitnessKind::DpaViolation;
  return std::nullopt;
}

}  // namespace

bool reverify(const LossSpec& l, const ViolationWitness& w, double tol) {
  if (!check_sufficient(w.transform, w.joint, tol).is_sufficient) return false;
  const double before = benefit(l, w.joint).c_value;
  const double after = benefit(l, push_within(w.joint, w.transform)).c_value;
  const auto kind = classify(w.transform, before, after, tol);
  return kind && *kind == w.kind && std::abs(before - w.c_before) <= 1e-12 &&
         std::abs(after - w.c_after) <= 1e-12;
}

DpaAudit audit_dpa(const LossSpec& l, const Joint& j, double tol, std::uint64_t seed) {
  DpaAudit audit;
  audit.c_before = benefit(l, j).c_value;
  const auto set = enumerate_sufficient(j, tol, seed);
  for (const auto& t : set.merges) {
    if (t.is_identity()) continue;
    ++audit.merges_checked;
    const double after = benefit(l, push_within(j, t)).c_value;
    const double dev = std::abs(after - audit.c_before);
    audit.max_equality_deviation = std::max(audit.max_equality_deviation, dev);
    if (dev > tol) ++audit.equality_deviations;
    if (const auto kind = classify(t, audit.c_before, after, tol)) {
      audit.witnesses.push_back({j, t, audit.c_before, after, *kind});
    }
  }
  for (const auto& t : set.permutations) {
    if (t.is_identity()) continue;
    ++audit.permutations_checked;
    const double after = benefit(l, push_within(j, t)).c_value;
    if (const auto kind = classify(t, audit.c_before, after, tol)) {
      audit.witnesses.push_back({j, t, audit.c_before, after, *kind});
    }
  }
  return audit;
}

// ---------------------------------------------------------------- proof family

Joint proof_family(std::size_t n, double t, double lambda1, double lambda2, double alpha,
                   std::span<const double> tail) {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::ParameterOutOfRange, what); };
  if (n < 3) bad("proof family needs n >= 3");
  if (tail.size() != n - 3) bad("tail must hold n - 3 entries");
  if (!(t >= 0.0 && t <= 1.0)) bad("t must lie in [0, 1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) bad("alpha must lie in [0, 1]");
  double tail_mass = 0.0;
  for (double v : tail) {
    if (!(v >= 0.0)) bad("tail entries must be nonnegative");
    tail_mass += v;
  }
  if (!(tail_mass < 1.0)) bad("tail must sum to less than one");
  const double r = 1.0 - tail_mass;
  if (!(lambda1 >= 0.0 && lambda1 < lambda2 && lambda2 <= r)) bad("need 0 <= lambda1 < lambda2 <= r");

  auto member = [&](double lambda) {
    std::vector<double> p{lambda * t, lambda * (1.0 - t), r - lambda};
    p.insert(p.end(), tail.begin(), tail.end());
    return p;
  };
  const auto p1 = member(lambda1);
  const auto p2 = member(lambda2);
  std::vector<double> table(n * 2);
  for (std::size_t x = 0; x < n; ++x) {
    table[x * 2 + 0] = alpha * p1[x];
    table[x * 2 + 1] = (1.0 - alpha) * p2[x];
  }
  return Joint::validate(n, 2, table);
}

Transform merge_first_two(std::size_t n) {
  std::vector<std::size_t> m(n);
  m[0] = 0;
  for (std::size_t x = 1; x < n; ++x) m[x] = x - 1;
  return Transform(std::move(m));
}

// ---------------------------------------------------------------- search

namespace {

constexpr std::size_t kGridPoints = 20;
constexpr std::size_t kLambdaPairs = kGridPoints * (kGridPoints - 1) / 2;
constexpr std::size_t kGridSize = kGridPoints * kGridPoints * kLambdaPairs;

struct Candidate {
  Joint joint;
  Transform transform;
};

double grid_value(std::size_t i) { return static_cast<double>(i) / static_cast<double>(kGridPoints - 1); }

std::vector<double> random_tail(std::size_t n, Rng& rng, double& r) {
  if (n == 3) {
    r = 1.0;
    return {};
  }
  r = 0.4 + 0.6 * uniform01(rng);
  const Dist d = random_dist(n - 3, rng);
  std::vector<double> tail(d.values());
  for (auto& v : tail) v *= (1.0 - r);
  return tail;
}

Candidate grid_candidate(std::size_t n, std::size_t local, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xA000000000ULL + local));
  double r = 1.0;
  const auto tail = random_tail(n, rng, r);
  double t, alpha, l1, l2;
  if (local < kGridSize) {
    t = grid_value(local % kGridPoints);
    alpha = grid_value((local / kGridPoints) % kGridPoints);
    std::size_t pair = local / (kGridPoints * kGridPoints);
    std::size_t a = 0;
    while (pair >= kGridPoints - 1 - a) {
      pair -= kGridPoints - 1 - a;
      ++a;
    }
    const std::size_t b = a + 1 + pair;
    l1 = r * grid_value(a);
    l2 = r * grid_value(b);
  } else {
    // grid exhausted: continuous draws from the same family
    t = uniform01(rng);
    alpha = uniform01(rng);
    l1 = r * uniform01(rng);
    l2 = l1 + (r - l1) * (0.05 + 0.95 * uniform01(rng));
  }
  return {proof_family(n, t, l1, std::min(l2, r), alpha, tail), merge_first_two(n)};
}

Candidate planted_candidate(std::size_t n, std::size_t local, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xB000000000ULL + local));
  const std::size_t m = 2 + static_cast<std::size_t>(rng() % 3);
  const std::size_t blocks = 1 + static_cast<std::size_t>(rng() % (n - 1));
  std::vector<std::size_t> block_of(n);
  for (auto& b : block_of) b = static_cast<std::size_t>(rng() % blocks);
  const Transform t = Transform::canonical(block_of);
  std::vector<Dist> rows;
  for (std::size_t b = 0; b < t.image_size(); ++b) rows.push_back(random_dist(m, rng));
  const Dist px = random_dist(n, rng);
  std::vector<double> table(n * m);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < m; ++y) table[x * m + y] = px[x] * rows[t(x)][y];
  return {Joint::validate(n, m, table), t};
}

Candidate permutation_candidate(std::size_t n, std::size_t local, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xC000000000ULL + local));
  const std::size_t m = 2 + static_cast<std::size_t>(rng() % 3);
  Joint j = random_joint(n, m, rng);
  auto perm = random_permutation(n, rng);
  if (Transform(perm).is_identity()) std::rotate(perm.begin(), perm.begin() + 1, perm.end());
  return {std::move(j), Transform::permutation(std::move(perm))};
}

Candidate make_candidate(std::size_t n, std::size_t index, std::uint64_t seed) {
  if (n >= 3) {
    const std::size_t local = index / 3;
    switch (index % 3) {
      case 0: return grid_candidate(n, local, seed);
      case 1: return planted_candidate(n, local, seed);
      default: return permutation_candidate(n, local, seed);
    }
  }
  const std::size_t local = index / 2;
  return index % 2 == 0 ? planted_candidate(n, local, seed) : permutation_candidate(n, local, seed);
}

std::optional<ViolationWitness> evaluate(const LossSpec& l, std::size_t n, std::size_t index,
                                         std::uint64_t seed, double tol) {
  Candidate c = make_candidate(n, index, seed);
  const double before = benefit(l, c.joint).c_value;
  const double after = benefit(l, push_within(c.joint, c.transform)).c_value;
  if (const auto kind = classify(c.transform, before, after, tol)) {
    return ViolationWitness{std::move(c.joint), std::move(c.transform), before, after, *kind};
  }
  return std::nullopt;
}

void check_search_args(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "violation search needs n >= 2");
}

}  // namespace

std::optional<ViolationWitness> find_violation_serial(const LossSpec& l, std::size_t n, std::size_t budget,
                                                      std::uint64_t seed, double tol, SearchStats* stats) {
  check_search_args(n);
  for (std::size_t k = 0; k < budget; ++k) {
    if (auto w = evaluate(l, n, k, seed, tol)) {
      if (stats) *stats = {k + 1, k};
      return w;
    }
  }
  if (stats) *stats = {budget, std::nullopt};
  return std::nullopt;
}

std::optional<ViolationWitness> find_violation(const LossSpec& l, std::size_t n, std::size_t budget,
                                               std::uint64_t seed, double tol, SearchStats* stats) {
  check_search_args(n);
  constexpr std::size_t kBlock = 256;
  for (std::size_t start = 0; start < budget; start += kBlock) {
    const std::size_t len = std::min(kBlock, budget - start);
    std::vector<std::optional<ViolationWitness>> found(len);
    std::vector<std::exception_ptr> errors(len);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(len); ++i) {
      const auto u = static_cast<std::size_t>(i);
      try {
        found[u] = evaluate(l, n, start + u, seed, tol);
      } catch (...) {
        errors[u] = std::current_exception();
      }
    }
    // lowest scan index wins, exactly as in the serial scan
    for (std::size_t u = 0; u < len; ++u) {
      if (errors[u]) std::rethrow_exception(errors[u]);
      if (found[u]) {
        if (stats) *stats = {start + u + 1, start + u};
        return std::move(found[u]);
      }
    }
  }
  if (stats) *stats = {budget, std::nullopt};
  return std::nullopt;
}

}  // namespace sideinfo
