#include "sideinfo/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sideinfo/oracles.hpp"
#include "sideinfo/random.hpp"

namespace sideinfo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_alphabet(const LossSpec& l, std::size_t n) {
  if (l.alphabet() != 0 && l.alphabet() != n) {
    std::ostringstream os;
    os << "loss '" << l.name() << "' is defined on " << l.alphabet() << " symbols, got " << n;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

// <G'(Q), Q> with 0 * anything = 0
double pairing(const std::vector<double>& grad, const Dist& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] != 0.0) s += grad[i] * q[i];
  return s;
}

double savage_loss(const ConvexOracle& g, std::size_t x, const Dist& q) {
  const auto grad = g.subgradient(q);
  return pairing(grad, q) - g.value(q) - grad[x];
}

double rule_expected(const LossSpec& l, const Dist& p, const Dist& q) {
  double s = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    s += p[x] * rule_loss(l, x, q);
  }
  return s;
}

// Projected-gradient descent from one start, numeric gradient.
std::vector<double> descend(const std::function<double(const std::vector<double>&)>& f,
                            std::vector<double> q) {
  const std::size_t n = q.size();
  double fq = f(q);
  if (!std::isfinite(fq)) return q;
  double step = 0.1;
  for (int it = 0; it < 200 && step > 1e-12; ++it) {
    std::vector<double> grad(n);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      constexpr double h = 1e-7;
      auto up = q;
      auto dn = q;
      up[i] += h;
      dn[i] -= h;
      const double fu = f(up);
      const double fd = f(dn);
      ok = std::isfinite(fu) && std::isfinite(fd);
      grad[i] = (fu - fd) / (2 * h);
    }
    if (!ok) break;
    bool improved = false;
    while (step > 1e-12) {
      std::vector<double> cand(n);
      for (std::size_t i = 0; i < n; ++i) cand[i] = q[i] - step * grad[i];
      cand = project_to_simplex(std::move(cand));
      const double fc = f(cand);
      if (fc < fq - 1e-15) {
        q = std::move(cand);
        fq = fc;
        step *= 1.5;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return q;
}

// Nelder-Mead over the first n-1 coordinates; points are projected onto the
// simplex before evaluation.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& start) {
  const std::size_t n = start.size();
  if (n < 2) return start;
  const std::size_t d = n - 1;
  auto lift = [n, d](const std::vector<double>& z) {
    std::vector<double> q(n);
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      q[i] = z[i];
      s += z[i];
    }
    q[d] = 1.0 - s;
    return project_to_simplex(std::move(q));
  };
  auto fz = [&](const std::vector<double>& z) { return f(lift(z)); };

  std::vector<std::vector<double>> simplex(d + 1, std::vector<double>(start.begin(), start.begin() + d));
  for (std::size_t i = 0; i < d; ++i) simplex[i + 1][i] += 0.05;
  std::vector<double> vals(d + 1);
  for (std::size_t i = 0; i <= d; ++i) vals[i] = fz(simplex[i]);

  for (int it = 0; it < 400; ++it) {
    std::vector<std::size_t> order(d + 1);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[d > 0 ? d - 1 : 0];
    if (std::abs(vals[worst] - vals[best]) < 1e-14) break;

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < d; ++k) centroid[k] += simplex[i][k] / static_cast<double>(d);
    auto along = [&](double t) {
      std::vector<double> z(d);
      for (std::size_t k = 0; k < d; ++k) z[k] = centroid[k] + t * (simplex[worst][k] - centroid[k]);
      return z;
    };
    const auto refl = along(-1.0);
    const double fr = fz(refl);
    if (fr < vals[best]) {
      const auto exp = along(-2.0);
      const double fe = fz(exp);
      if (fe < fr) {
        simplex[worst] = exp;
        vals[worst] = fe;
      } else {
        simplex[worst] = refl;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      simplex[worst] = refl;
      vals[worst] = fr;
    } else {
      const auto con = along(0.5);
      const double fc = fz(con);
      if (fc < vals[worst]) {
        simplex[worst] = con;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= d; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < d; ++k) simplex[i][k] = 0.5 * (simplex[i][k] + simplex[best][k]);
          vals[i] = fz(simplex[i]);
        }
      }
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  return lift(simplex[static_cast<std::size_t>(it - vals.begin())]);
}

// Minimum over the lattice {k/steps} of the simplex.
std::pair<double, std::vector<double>> grid_minimum(
    const std::function<double(const std::vector<double>&)>& f, std::size_t n, int steps) {
  std::vector<int> counts(n, 0);
  std::vector<double> q(n), best_q;
  double best = kInf;
  // enumerate compositions of `steps` into n parts in lexicographic order
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == n) {
      counts[i] = left;
      for (std::size_t k = 0; k < n; ++k) q[k] = static_cast<double>(counts[k]) / steps;
      const double v = f(q);
      if (v < best) {
        best = v;
        best_q = q;
      }
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[i] = c;
      rec(i + 1, left - c);
    }
  };
  rec(0, steps);
  return {best, best_q};
}

BayesResult numeric_bayes(const LossSpec& l, const Dist& p, std::uint64_t seed) {
  const std::size_t n = p.size();
  auto f = [&](const std::vector<double>& q) {
    return rule_expected(l, p, Dist::validate(q, 1e-6));
  };

  Rng rng(seed);
  std::vector<std::vector<double>> starts;
  starts.push_back(Dist::uniform(n).values());
  for (std::size_t i = 0; i < n && starts.size() < 16; ++i) starts.push_back(Dist::point_mass(n, i).values());
  starts.push_back(p.values());
  while (starts.size() < 16) starts.push_back(random_dist(n, rng).values());
  starts.resize(16);

  std::vector<double> best_q = starts.front();
  double best = f(best_q);
  for (const auto& s : starts) {
    auto q = descend(f, s);
    const double v = f(q);
    if (v < best) {
      best = v;
      best_q = std::move(q);
    }
  }
  {
    auto q = nelder_mead(f, best_q);
    const double v = f(q);
    if (v < best) {
      best = v;
      best_q = std::move(q);
    }
  }

  BayesResult r;
  r.method = BayesMethod::NumericSearch;
  if (n <= 4) {
    auto [gbest, gq] = grid_minimum(f, n, 200);
    r.optimality_gap = std::max(0.0, best - gbest);
    if (gbest < best) {
      best = gbest;
      best_q = std::move(gq);
    }
  }
  r.risk = best;
  r.minimizer = Dist::validate(best_q);
  return r;
}

}  // namespace

LossSpec LossSpec::matrix(std::size_t outcomes, std::size_t actions, std::vector<double> entries,
                          std::string name) {
  if (outcomes == 0 || actions == 0 || entries.size() != outcomes * actions) {
    throw Error(ErrorKind::InvalidArgument, "loss matrix shape mismatch");
  }
  for (double v : entries) {
    if (std::isnan(v)) throw Error(ErrorKind::InvalidArgument, "loss matrix entries must be real or +inf");
    if (v == -kInf) throw Error(ErrorKind::UnboundedBelow, "loss matrix has a -inf entry");
  }
  ActionMatrix m{outcomes, actions, std::move(entries)};
  for (std::size_t a = 0; a < actions; ++a) {
    bool finite = false;
    for (std::size_t x = 0; x < outcomes; ++x) finite = finite || std::isfinite(m(x, a));
    if (!finite) throw Error(ErrorKind::InvalidArgument, "loss matrix column has no finite entry");
  }
  for (std::size_t x = 0; x < outcomes; ++x) {
    bool finite = false;
    for (std::size_t a = 0; a < actions; ++a) finite = finite || std::isfinite(m(x, a));
    if (!finite) {
      throw Error(ErrorKind::UnboundedBelow, "outcome " + std::to_string(x) + " has no finite action");
    }
  }
  return LossSpec(std::move(m), std::move(name), outcomes);
}

LossSpec LossSpec::scoring_rule(std::string name, std::function<double(std::size_t, const Dist&)> eval,
                                bool proper, std::size_t alphabet) {
  return LossSpec(ScoringRule{std::move(eval), proper}, std::move(name), alphabet);
}

LossSpec LossSpec::savage(ConvexOracle g) {
  std::string name = "savage(" + g.name + ")";
  return LossSpec(SavageRule{std::move(g)}, std::move(name), 0);
}

BuiltinLoss parse_builtin_loss(const std::string& name) {
  std::string s = name;
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "log") return BuiltinLoss::Log;
  if (s == "zero_one") return BuiltinLoss::ZeroOne;
  if (s == "brier") return BuiltinLoss::Brier;
  if (s == "spherical") return BuiltinLoss::Spherical;
  if (s == "absolute_ordered") return BuiltinLoss::AbsoluteOrdered;
  throw Error(ErrorKind::UnknownLoss, "'" + name + "'");
}

std::string to_string(BuiltinLoss loss) {
  switch (loss) {
    case BuiltinLoss::Log: return "log";
    case BuiltinLoss::ZeroOne: return "zero_one";
    case BuiltinLoss::Brier: return "brier";
    case BuiltinLoss::Spherical: return "spherical";
    case BuiltinLoss::AbsoluteOrdered: return "absolute_ordered";
  }
  return "unknown";
}

LossSpec builtin_loss(BuiltinLoss which, std::size_t n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "built-in losses need n >= 2");
  switch (which) {
    case BuiltinLoss::Log:
      return LossSpec::scoring_rule(
          "log", [](std::size_t x, const Dist& q) { return q[x] > 0.0 ? -std::log(q[x]) : kInf; }, true, n);
    case BuiltinLoss::Brier:
      return LossSpec::scoring_rule(
          "brier",
          [](std::size_t x, const Dist& q) {
            double s = 0.0;
            for (std::size_t i = 0; i < q.size(); ++i) {
              const double d = (i == x ? 1.0 : 0.0) - q[i];
              s += d * d;
            }
            return s;
          },
          true, n);
    case BuiltinLoss::Spherical:
      return LossSpec::scoring_rule(
          "spherical",
          [](std::size_t x, const Dist& q) {
            double norm = 0.0;
            for (double v : q.probs()) norm += v * v;
            return -q[x] / std::sqrt(norm);
          },
          true, n);
    case BuiltinLoss::ZeroOne: {
      std::vector<double> m(n * n);
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t a = 0; a < n; ++a) m[x * n + a] = x == a ? 0.0 : 1.0;
      return LossSpec::matrix(n, n, std::move(m), "zero_one");
    }
    case BuiltinLoss::AbsoluteOrdered: {
      std::vector<double> m(n * n);
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t a = 0; a < n; ++a)
          m[x * n + a] = std::abs(static_cast<double>(x) - static_cast<double>(a));
      return LossSpec::matrix(n, n, std::move(m), "absolute_ordered");
    }
  }
  throw Error(ErrorKind::UnknownLoss, "unhandled built-in");
}

LossSpec builtin_loss(const std::string& name, std::size_t n) {
  return builtin_loss(parse_builtin_loss(name), n);
}

LossSpec scaled(const LossSpec& l, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorKind::InvalidArgument, "scale must be positive");
  std::ostringstream name;
  name << a << "*" << l.name();
  return std::visit(
      Overloaded{
          [&](const ActionMatrix& m) {
            auto e = m.entries;
            for (auto& v : e) v *= a;
            return LossSpec::matrix(m.outcomes, m.actions, std::move(e), name.str());
          },
          [&](const ScoringRule& r) {
            auto eval = r.eval;
            return LossSpec::scoring_rule(
                name.str(), [eval, a](std::size_t x, const Dist& q) { return a * eval(x, q); }, r.proper,
                l.alphabet());
          },
          [&](const SavageRule& s) { return LossSpec::savage(oracles::combine({{a, s.g}})); },
      },
      l.variant());
}

std::string to_string(BayesMethod m) {
  switch (m) {
    case BayesMethod::ColumnMin: return "column-min";
    case BayesMethod::ProperFixedPoint: return "proper-fixed-point";
    case BayesMethod::NumericSearch: return "numeric-search";
  }
  return "unknown";
}

double rule_loss(const LossSpec& l, std::size_t x, const Dist& q) {
  return std::visit(Overloaded{
                        [&](const ActionMatrix&) -> double {
                          throw Error(ErrorKind::InvalidArgument, "matrix losses take action indices");
                        },
                        [&](const ScoringRule& r) { return r.eval(x, q); },
                        [&](const SavageRule& s) { return savage_loss(s.g, x, q); },
                    },
                    l.variant());
}

double expected_loss(const LossSpec& l, const Dist& p, const Action& action) {
  check_alphabet(l, p.size());
  if (const auto* m = std::get_if<ActionMatrix>(&l.variant())) {
    const auto* a = std::get_if<std::size_t>(&action);
    if (a == nullptr || *a >= m->actions) throw Error(ErrorKind::InvalidArgument, "bad matrix action");
    double s = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x)
      if (p[x] != 0.0) s += p[x] * (*m)(x, *a);
    return s;
  }
  const auto* q = std::get_if<Dist>(&action);
  if (q == nullptr || q->size() != p.size()) throw Error(ErrorKind::InvalidArgument, "bad simplex action");
  return rule_expected(l, p, *q);
}

BayesResult bayes_risk(const LossSpec& l, const Dist& p, std::uint64_t seed) {
  check_alphabet(l, p.size());
  BayesResult r;
  if (const auto* m = std::get_if<ActionMatrix>(&l.variant())) {
    if (m->outcomes != p.size()) throw Error(ErrorKind::InvalidArgument, "loss matrix alphabet mismatch");
    r.method = BayesMethod::ColumnMin;
    r.risk = kInf;
    std::size_t best = 0;
    for (std::size_t a = 0; a < m->actions; ++a) {
      const double v = expected_loss(l, p, Action{a});
      if (v < r.risk) {
        r.risk = v;
        best = a;
      }
    }
    r.minimizer = best;
  } else {
    const bool proper = std::holds_alternative<SavageRule>(l.variant()) ||
                        std::get<ScoringRule>(l.variant()).proper;
    if (proper) {
      r.method = BayesMethod::ProperFixedPoint;
      r.risk = rule_expected(l, p, p);
      r.minimizer = p;
    } else {
      r = numeric_bayes(l, p, seed);
    }
  }
  if (!std::isfinite(r.risk)) {
    throw Error(ErrorKind::UnboundedBelow, "no finite Bayes risk for loss '" + l.name() + "'");
  }
  return r;
}

double v_envelope(const LossSpec& l, const Dist& p) { return -bayes_risk(l, p).risk; }

LossSpec savage_from_G(const ConvexOracle& g) { return LossSpec::savage(g); }

NotProperError::NotProperError(Dist p, Dist q, double margin)
    : Error(ErrorKind::NotProper, [&] {
        std::ostringstream os;
        os << "forecast Q beats the truth P by " << -margin;
        return os.str();
      }()),
      p_(std::move(p)),
      q_(std::move(q)),
      margin_(margin) {}

ProprietyReport audit_propriety(const LossSpec& l, std::size_t n, std::size_t trials, std::uint64_t seed) {
  if (l.is_matrix()) throw Error(ErrorKind::InvalidArgument, "propriety applies to simplex-action rules");
  check_alphabet(l, n);

  std::vector<Dist> grid;
  if (n <= 3) {
    const int steps = n == 2 ? 200 : 20;
    std::vector<int> c(n);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
      if (i + 1 == n) {
        c[i] = left;
        std::vector<double> q(n);
        for (std::size_t k = 0; k < n; ++k) q[k] = static_cast<double>(c[k]) / steps;
        grid.push_back(Dist::validate(q));
        return;
      }
      for (int v = 0; v <= left; ++v) {
        c[i] = v;
        rec(i + 1, left - v);
      }
    };
    rec(0, steps);
  }

  ProprietyReport rep;
  rep.trials = trials;
  rep.worst_margin = kInf;
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const Dist p = random_dist(n, rng);
    const double truth = rule_expected(l, p, p);
    auto check = [&](const Dist& q) {
      const double margin = rule_expected(l, p, q) - truth;
      ++rep.comparisons;
      rep.worst_margin = std::min(rep.worst_margin, margin);
      if (margin < -1e-9) throw NotProperError(p, q, margin);
    };
    for (int k = 0; k < 32; ++k) check(random_dist(n, rng));
    for (int k = 0; k < 8; ++k) check(random_sparse_dist(n, rng, 0.5));
    for (const auto& q : grid) check(q);
  }
  return rep;
}

std::vector<double> project_to_simplex(std::vector<double> v) {
  const std::size_t n = v.size();
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cumulative += u[i];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  double s = 0.0;
  for (auto& x : v) {
    x = std::max(x - theta, 0.0);
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace sideinfo
