#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "sideinfo/error.hpp"
#include "sideinfo/loss.hpp"
#include "sideinfo/oracles.hpp"
#include "support/support.hpp"

using namespace sideinfo;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Brute-force minimum over every action column.
double brute_matrix_risk(const ActionMatrix& m, const Dist& p) {
  double best = kInf;
  for (std::size_t a = 0; a < m.actions; ++a) {
    double s = 0.0;
    for (std::size_t x = 0; x < m.outcomes; ++x)
      if (p[x] > 0.0) s += p[x] * m(x, a);
    best = std::min(best, s);
  }
  return best;
}

}  // namespace

TEST(BuiltinLoss, PointValues) {
  EXPECT_NEAR(rule_loss(builtin_loss("log", 2), 0, Dist::validate({0.5, 0.5})), 0.693147, 1e-6);
  const auto zo = builtin_loss("zero_one", 3);
  EXPECT_EQ(std::get<ActionMatrix>(zo.variant())(1, 1), 0.0);
  EXPECT_EQ(rule_loss(builtin_loss("brier", 2), 0, Dist::validate({1.0, 0.0})), 0.0);
  EXPECT_EQ(rule_loss(builtin_loss("log", 2), 1, Dist::validate({1.0, 0.0})), kInf);
  EXPECT_NEAR(rule_loss(builtin_loss("spherical", 2), 0, Dist::validate({0.75, 0.25})), -3.0 / std::sqrt(10.0), 1e-15);
  EXPECT_EQ(std::get<ActionMatrix>(builtin_loss("absolute-ordered", 4).variant())(0, 3), 3.0);
}

TEST(BuiltinLoss, UnknownNameAndTinyAlphabet) {
  try {
    builtin_loss("hinge", 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownLoss);
  }
  EXPECT_THROW(builtin_loss("log", 1), Error);
}

TEST(LossMatrix, RejectsUnboundedShapes) {
  auto kind = [](std::vector<double> e) {
    try {
      LossSpec::matrix(2, 2, std::move(e));
    } catch (const Error& err) {
      return err.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  EXPECT_EQ(kind({kInf, 0, kInf, 1}), ErrorKind::InvalidArgument);  // action 0 never finite
  EXPECT_EQ(kind({0, 1, kInf, kInf}), ErrorKind::UnboundedBelow);   // outcome 1 has no finite action
  EXPECT_EQ(kind({0, -kInf, 1, 0}), ErrorKind::UnboundedBelow);
  EXPECT_NO_THROW(LossSpec::matrix(2, 2, {0, kInf, kInf, 0}));
}

TEST(BayesRisk, KnownValues) {
  const Dist p = Dist::validate({0.25, 0.25, 0.5});
  const auto log = bayes_risk(builtin_loss("log", 3), p);
  EXPECT_NEAR(log.risk, 1.039721, 1e-6);
  EXPECT_EQ(log.method, BayesMethod::ProperFixedPoint);
  const auto zo = bayes_risk(builtin_loss("zero_one", 3), p);
  EXPECT_EQ(zo.risk, 0.5);
  EXPECT_EQ(std::get<std::size_t>(zo.minimizer), 2u);
  EXPECT_EQ(bayes_risk(builtin_loss("brier", 2), Dist::uniform(2)).risk, 0.5);
}

TEST(BayesRisk, LowestIndexTieBreak) {
  const auto r = bayes_risk(builtin_loss("zero_one", 3), Dist::validate({0.4, 0.4, 0.2}));
  EXPECT_EQ(std::get<std::size_t>(r.minimizer), 0u);
}

TEST(BayesRisk, MatrixEqualsBruteForce) {
  support::for_all(21, 300, [](support::Rng& rng) {
    const std::size_t n = 2 + support::below(rng, 4), k = 1 + support::below(rng, 5);
    std::vector<double> e(n * k);
    for (auto& v : e) v = std::floor(support::unit(rng) * 10.0) / 4.0;
    return std::make_pair(LossSpec::matrix(n, k, e), support::gen_dist(rng, n, 0.3));
  }, [](const auto& c) {
    EXPECT_EQ(bayes_risk(c.first, c.second).risk, brute_matrix_risk(std::get<ActionMatrix>(c.first.variant()), c.second));
  });
}

TEST(BayesRisk, InfiniteEntriesUseZeroTimesInfinity) {
  const auto l = LossSpec::matrix(2, 2, {0, kInf, kInf, 0});
  EXPECT_EQ(bayes_risk(l, Dist::validate({1.0, 0.0})).risk, 0.0);
  // Every action is infinite on the interior even though each vertex is fine.
  try {
    bayes_risk(l, Dist::validate({0.5, 0.5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnboundedBelow);
  }
}

TEST(BayesRisk, NumericSearchFindsImproperOptimum) {
  // l(x, Q) = -Q(x) favours reporting the mode.
  const auto l = LossSpec::scoring_rule("linear", [](std::size_t x, const Dist& q) { return -q[x]; }, false, 2);
  const auto r = bayes_risk(l, Dist::validate({0.6, 0.4}));
  EXPECT_EQ(r.method, BayesMethod::NumericSearch);
  EXPECT_NEAR(r.risk, -0.6, 1e-9);
  ASSERT_TRUE(r.optimality_gap.has_value());
  EXPECT_LE(*r.optimality_gap, 1e-9);
}

TEST(VEnvelope, KnownValues) {
  EXPECT_NEAR(v_envelope(builtin_loss("log", 2), Dist::uniform(2)), -std::log(2.0), 1e-15);
  EXPECT_EQ(v_envelope(builtin_loss("zero_one", 3), Dist::validate({0.25, 0.25, 0.5})), -0.5);
  for (const auto* name : {"log", "zero_one", "brier", "spherical", "absolute_ordered"}) {
    for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(std::isfinite(v_envelope(builtin_loss(name, 3), Dist::point_mass(3, i))));
  }
}

TEST(VEnvelope, ConvexAndBoundedByVertices) {
  for (const auto* name : {"log", "zero_one", "brier", "spherical", "absolute_ordered"}) {
    const auto l = builtin_loss(name, 3);
    double vmax = -kInf;
    for (std::size_t i = 0; i < 3; ++i) vmax = std::max(vmax, v_envelope(l, Dist::point_mass(3, i)));
    support::for_all(22, 200, [](support::Rng& rng) {
      return std::make_tuple(support::gen_dist(rng, 3, 0.2), support::gen_dist(rng, 3, 0.2), support::unit(rng));
    }, [&](const auto& c) {
      const auto& [p, q, t] = c;
      std::vector<double> m(3);
      for (std::size_t i = 0; i < 3; ++i) m[i] = t * p[i] + (1 - t) * q[i];
      const double vm = v_envelope(l, Dist::validate(m));
      EXPECT_LE(vm, t * v_envelope(l, p) + (1 - t) * v_envelope(l, q) + 1e-9) << name;
      EXPECT_LE(v_envelope(l, p), vmax + 1e-9) << name;
    });
  }
}

TEST(Savage, NegEntropyGivesLogLoss) {
  const auto l = savage_from_G(oracles::neg_entropy());
  for (int a = 1; a < 20; ++a)
    for (int b = 1; a + b < 20; ++b) {
      const Dist q = Dist::validate({a / 20.0, b / 20.0, (20 - a - b) / 20.0});
      for (std::size_t x = 0; x < 3; ++x) EXPECT_NEAR(rule_loss(l, x, q), -std::log(q[x]), 1e-9);
    }
}

TEST(Savage, SumSquaresGivesShiftedBrier) {
  const auto l = savage_from_G(oracles::sum_squares());
  const auto brier = builtin_loss("brier", 3);
  for (int a = 0; a <= 10; ++a)
    for (int b = 0; a + b <= 10; ++b) {
      const Dist q = Dist::validate({a / 10.0, b / 10.0, (10 - a - b) / 10.0});
      for (std::size_t x = 0; x < 3; ++x) EXPECT_NEAR(rule_loss(l, x, q), rule_loss(brier, x, q) - 1.0, 1e-9);
    }
}

TEST(Savage, LinearGIsConstant) {
  const std::vector<double> c = {0.3, -1.0, 2.0};
  const auto l = savage_from_G(oracles::linear(c));
  for (std::size_t x = 0; x < 3; ++x) {
    EXPECT_NEAR(rule_loss(l, x, Dist::validate({0.2, 0.3, 0.5})), -c[x], 1e-12);
    EXPECT_NEAR(rule_loss(l, x, Dist::point_mass(3, 1)), -c[x], 1e-12);
  }
}

TEST(Savage, EnvelopeRecoversG) {
  for (const auto* name : {"neg_entropy", "sum_squares"}) {
    const auto g = oracles::by_name(name);
    const auto l = savage_from_G(g);
    support::for_all(23, 100, [](support::Rng& rng) { return support::gen_dist(rng, 4, 0.2); },
                     [&](const Dist& p) { EXPECT_NEAR(v_envelope(l, p), g.value(p), 1e-9) << name; });
  }
}

TEST(Propriety, ProperRulesPass) {
  for (const auto* name : {"log", "brier", "spherical"}) {
    const auto r = audit_propriety(builtin_loss(name, 3), 3, 100, 5);
    EXPECT_GE(r.worst_margin, -1e-9) << name;
    EXPECT_EQ(r.trials, 100u);
  }
  EXPECT_NO_THROW(audit_propriety(savage_from_G(oracles::neg_entropy()), 3, 100, 5));
  EXPECT_NO_THROW(audit_propriety(savage_from_G(oracles::sum_squares()), 3, 100, 5));
}

TEST(Propriety, LinearScoreIsNotProper) {
  const auto l = LossSpec::scoring_rule("linear", [](std::size_t x, const Dist& q) { return -q[x]; }, false, 2);
  try {
    audit_propriety(l, 2, 100, 5);
    FAIL() << "expected NotProper";
  } catch (const NotProperError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotProper);
    EXPECT_LT(e.margin(), -1e-9);
    // the witness really is a strict improvement
    double at_p = 0.0, at_q = 0.0;
    for (std::size_t x = 0; x < 2; ++x) {
      at_p += e.p()[x] * -e.p()[x];
      at_q += e.p()[x] * -e.q()[x];
    }
    EXPECT_LT(at_q, at_p);
  }
}

TEST(Scaled, MultipliesRisk) {
  const Dist p = Dist::validate({0.2, 0.8});
  EXPECT_NEAR(bayes_risk(scaled(builtin_loss("log", 2), 3.0), p).risk, 3.0 * entropy(p), 1e-12);
  EXPECT_EQ(bayes_risk(scaled(builtin_loss("zero_one", 2), 2.0), p).risk, 0.4);
}

TEST(ProjectToSimplex, Basics) {
  const auto v = project_to_simplex({2.0, 0.0});
  EXPECT_EQ(v[0], 1.0);
  EXPECT_EQ(v[1], 0.0);
  const auto w = project_to_simplex({0.3, 0.3, 0.3});
  for (double x : w) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
}
