#include <gtest/gtest.h>

#include <cmath>

#include "sideinfo/error.hpp"
#include "sideinfo/oracles.hpp"
#include "sideinfo/prob.hpp"
#include "sideinfo/random.hpp"
#include "support/support.hpp"

using namespace sideinfo;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Dist, ValidateKeepsExactDecimals) {
  const Dist d = Dist::validate({0.1, 0.2, 0.7});
  EXPECT_EQ(d[0], 0.1);
  EXPECT_EQ(d[1], 0.2);
  EXPECT_EQ(d[2], 0.7);
  EXPECT_EQ(d.correction(), 0.0);
}

TEST(Dist, ClampsTinyNegativesAndRenormalizes) {
  const Dist d = Dist::validate({-1e-12, 0.5, 0.5 + 2e-10});
  EXPECT_EQ(d[0], 0.0);
  EXPECT_NEAR(d[1] + d[2], 1.0, 1e-15);
  EXPECT_GT(d.correction(), 0.0);
}

TEST(Dist, RejectsOffSimplexInput) {
  EXPECT_EQ(kind_of([] { Dist::validate({-0.1, 1.1}); }), ErrorKind::NegativeMass);
  EXPECT_EQ(kind_of([] { Dist::validate({0.6, 0.6}); }), ErrorKind::NotNormalized);
  EXPECT_EQ(kind_of([] { Dist::validate({}); }), ErrorKind::InvalidArgument);
}

TEST(Joint, ConditionOnZeroColumnThrows) {
  const Joint j = Joint::from_rows({{0.5, 0.0}, {0.5, 0.0}});
  EXPECT_EQ(kind_of([&] { condition_on_y(j, 1); }), ErrorKind::ZeroConditioningEvent);
  const Dist c = condition_on_y(j, 0);
  EXPECT_EQ(c[0], 0.5);
}

TEST(Joint3, SliceOfZeroMassThrows) {
  std::vector<double> p(8, 0.0);
  p[0] = 0.5;
  p[6] = 0.5;  // (x=1, y=1, w=0)
  const Joint3 j = Joint3::validate(2, 2, 2, p);
  EXPECT_EQ(j.marginal_w()[1], 0.0);
  EXPECT_EQ(kind_of([&] { j.slice(1); }), ErrorKind::ZeroConditioningEvent);
}

TEST(Entropy, KnownValues) {
  EXPECT_NEAR(entropy(Dist::uniform(4)), std::log(4.0), 1e-15);
  EXPECT_EQ(entropy(Dist::point_mass(3, 1)), 0.0);
  EXPECT_NEAR(entropy(Dist::validate({0.5, 0.25, 0.25})), 1.5 * std::log(2.0), 1e-15);
}

TEST(MutualInformation, MatchesEntropyIdentity) {
  support::for_all(11, 300, [](support::Rng& rng) {
    return support::gen_joint(rng, 1 + support::below(rng, 5), 1 + support::below(rng, 5), 0.3);
  }, [](const Joint& j) {
    EXPECT_NEAR(mutual_information(j), std::max(0.0, support::ref_mutual_information(j)), 1e-12);
  });
}

TEST(MutualInformation, ProductIsZeroAndDiagonalIsEntropy) {
  const Dist px = Dist::validate({0.2, 0.3, 0.5});
  const Dist py = Dist::validate({0.6, 0.4});
  EXPECT_NEAR(mutual_information(Joint::product(px, py)), 0.0, 1e-15);
  const Joint diag = Joint::from_rows({{0.2, 0, 0}, {0, 0.3, 0}, {0, 0, 0.5}});
  EXPECT_NEAR(mutual_information(diag), entropy(px), 1e-15);
}

TEST(ConditionalMutualInformation, MatchesEntropyIdentity) {
  support::for_all(12, 200, [](support::Rng& rng) {
    return support::gen_joint3(rng, 2 + support::below(rng, 2), 2 + support::below(rng, 2), 1 + support::below(rng, 3));
  }, [](const Joint3& j) { EXPECT_NEAR(conditional_mutual_information(j), support::ref_conditional_mi(j), 1e-12); });
}

TEST(JensenGap, NonnegativeForConvexOracles) {
  const std::vector<ConvexOracle> gs = {oracles::neg_entropy(), oracles::sum_squares()};
  support::for_all(13, 200, [](support::Rng& rng) {
    const std::size_t n = 2 + support::below(rng, 4), m = 1 + support::below(rng, 4);
    std::vector<Dist> pts;
    for (std::size_t i = 0; i < m; ++i) pts.push_back(support::gen_dist(rng, n, 0.2));
    return std::make_pair(support::gen_dist(rng, m, 0.2), pts);
  }, [&](const auto& c) {
    for (const auto& g : gs) EXPECT_GE(jensen_gap(g, c.first, c.second), -1e-12) << g.name;
  });
}

TEST(Oracles, PassConvexityChecks) {
  for (const auto& name : {"neg_entropy", "sum_squares"}) {
    for (std::size_t n : {2u, 3u, 5u}) {
      const auto r = check_convexity(oracles::by_name(name), n, 256, 7);
      EXPECT_TRUE(r.ok()) << name << " n=" << n << " midpoint " << r.worst_midpoint << " hyperplane "
                          << r.worst_hyperplane << " symmetry " << r.worst_symmetry;
    }
  }
  for (const auto& name : {"abs_power2", "abs_power3", "abs_power4", "exp_first"}) {
    EXPECT_TRUE(check_convexity(oracles::by_name(name), 2, 256, 7).ok()) << name;
  }
  EXPECT_FALSE(oracles::exp_first(3.0).symmetric);
}

TEST(Oracles, CombineKeepsSentinelAtBoundary) {
  const auto g = oracles::combine({{2.0, oracles::neg_entropy()}, {1.0, oracles::sum_squares()}});
  const auto d = g.subgradient(Dist::validate({0.0, 1.0}));
  EXPECT_EQ(d[0], oracles::kLogZeroSentinel);
  EXPECT_TRUE(g.symmetric);
}

TEST(Random, DeriveSeedSeparatesStreams) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
}

TEST(Random, PermutationIsBijection) {
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    auto p = random_permutation(7, rng);
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(p[i], i);
  }
}

TEST(TotalVariation, Basic) {
  const std::vector<double> p{0.5, 0.5, 0.0}, q{0.0, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(total_variation(p, q), 0.5);
}
