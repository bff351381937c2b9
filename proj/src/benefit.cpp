#include "sideinfo/benefit.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "sideinfo/random.hpp"

namespace sideinfo {

namespace {

// Direct risk with side information: for each y, the best act against the
// unnormalized column P(., y).
double side_risk_term(const LossSpec& l, const Joint& j, std::size_t y, std::optional<Action>& minimizer) {
  if (const auto* m = std::get_if<ActionMatrix>(&l.variant())) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t a = 0; a < m->actions; ++a) {
      double s = 0.0;
      for (std::size_t x = 0; x < j.rows(); ++x) {
        if (j(x, y) != 0.0) s += j(x, y) * (*m)(x, a);
      }
      if (s < best) {
        best = s;
        arg = a;
      }
    }
    minimizer = arg;
    return best;
  }
  const Dist cond = condition_on_y(j, y);
  const BayesResult r = bayes_risk(l, cond);
  minimizer = r.minimizer;
  const Dist& q = std::get<Dist>(r.minimizer);
  double s = 0.0;
  for (std::size_t x = 0; x < j.rows(); ++x) {
    if (j(x, y) != 0.0) s += j(x, y) * rule_loss(l, x, q);
  }
  return s;
}

std::vector<Dist> supported_conditionals(const Joint& j, const Dist& py, std::vector<double>& weights) {
  std::vector<Dist> conds;
  for (std::size_t y = 0; y < j.cols(); ++y) {
    if (py[y] > 0.0) {
      conds.push_back(condition_on_y(j, y));
      weights.push_back(py[y]);
    }
  }
  return conds;
}

}  // namespace

ConvexOracle envelope_oracle(const LossSpec& l) {
  ConvexOracle g;
  g.name = "V[" + l.name() + "]";
  g.value = [l](const Dist& p) { return v_envelope(l, p); };
  g.subgradient = [l](const Dist& p) {
    return numeric_subgradient([&l](const Dist& q) { return v_envelope(l, q); }, p).gradient;
  };
  return g;
}

double benefit_via_envelope(const LossSpec& l, const Joint& j) {
  const auto [px, py] = marginals(j);
  std::vector<double> w;
  const auto conds = supported_conditionals(j, py, w);
  const ConvexOracle v = envelope_oracle(l);
  return jensen_gap(v, Dist::validate(w), conds);
}

BenefitReport benefit(const LossSpec& l, const Joint& j) {
  BenefitReport rep;
  const auto [px, py] = marginals(j);
  rep.risk_no_side = bayes_risk(l, px).risk;
  rep.per_y_minimizers.resize(j.cols());
  double with_side = 0.0;
  for (std::size_t y = 0; y < j.cols(); ++y) {
    if (py[y] <= 0.0) continue;
    with_side += side_risk_term(l, j, y, rep.per_y_minimizers[y]);
  }
  rep.risk_with_side = with_side;
  rep.c_value = rep.risk_no_side - rep.risk_with_side;
  rep.decomposition_residual = std::abs(rep.c_value - benefit_via_envelope(l, j));
  return rep;
}

SubgradientProbe numeric_subgradient(const std::function<double(const Dist&)>& f, const Dist& p) {
  constexpr double h = 1e-6;
  const std::size_t n = p.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double f0 = f(p);
  SubgradientProbe probe;
  probe.gradient.resize(n);

  auto shifted = [&](std::size_t i, double t) -> std::optional<Dist> {
    std::vector<double> q(p.values());
    for (std::size_t k = 0; k < n; ++k) q[k] += t * ((k == i ? 1.0 : 0.0) - inv_n);
    for (double v : q)
      if (v < 0.0) return std::nullopt;
    return Dist::validate(q);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const auto up = shifted(i, h);
    const auto dn = shifted(i, -h);
    double d = 0.0;
    if (up && dn) {
      const double fu = f(*up);
      const double fd = f(*dn);
      const double right = (fu - f0) / h;
      const double left = (f0 - fd) / h;
      if (std::abs(right - left) > 1e-3) probe.nondifferentiable = true;
      d = (fu - fd) / (2 * h);
    } else if (up) {
      d = (f(*up) - f0) / h;
    } else if (dn) {
      d = (f0 - f(*dn)) / h;
    }
    probe.gradient[i] = d;
  }
  double mean = 0.0;
  for (double v : probe.gradient) mean += v * inv_n;
  for (auto& v : probe.gradient) v -= mean;
  return probe;
}

ConvexOracle g_normalized(const LossSpec& l, std::size_t n) {
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = v_envelope(l, Dist::point_mass(n, i));

  ConvexOracle g;
  g.name = "G[" + l.name() + "]";
  auto value = [l, a](const Dist& p) {
    double lin = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (p[i] != 0.0) lin += a[i] * p[i];
    return v_envelope(l, p) - lin;
  };
  g.value = value;
  g.subgradient = [value](const Dist& p) { return numeric_subgradient(value, p).gradient; };

  // Probe permutation symmetry on seeded interior and boundary points.
  Rng rng(0x5eed);
  g.symmetric = true;
  for (int k = 0; k < 64 && g.symmetric; ++k) {
    const Dist p = (k % 4 == 3) ? random_sparse_dist(n, rng, 0.4) : random_dist(n, rng);
    const auto perm = random_permutation(n, rng);
    std::vector<double> pp(n);
    for (std::size_t i = 0; i < n; ++i) pp[perm[i]] = p[i];
    const double gp = value(p);
    if (std::abs(value(Dist::validate(pp)) - gp) > 1e-9 * std::max(1.0, std::abs(gp))) g.symmetric = false;
  }
  return g;
}

double benefit_from_G(const ConvexOracle& g, const Joint& j) {
  const auto [px, py] = marginals(j);
  std::vector<double> w;
  const auto conds = supported_conditionals(j, py, w);
  return jensen_gap(g, Dist::validate(w), conds);
}

double conditional_benefit(const LossSpec& l, const Joint3& j) {
  const Dist pw = j.marginal_w();
  double total = 0.0;
  for (std::size_t w = 0; w < j.nw(); ++w) {
    if (pw[w] > 0.0) total += pw[w] * benefit(l, j.slice(w)).c_value;
  }
  return total;
}

std::vector<BenefitReport> benefit_batch_serial(const LossSpec& l, std::span<const Joint> joints) {
  std::vector<BenefitReport> out;
  out.reserve(joints.size());
  for (const auto& j : joints) out.push_back(benefit(l, j));
  return out;
}

std::vector<BenefitReport> benefit_batch(const LossSpec& l, std::span<const Joint> joints) {
  const auto count = static_cast<std::ptrdiff_t>(joints.size());
  std::vector<BenefitReport> out(joints.size());
  std::vector<std::exception_ptr> errors(joints.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = benefit(l, joints[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace sideinfo
