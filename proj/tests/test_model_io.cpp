#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include "sideinfo/error.hpp"
#include "sideinfo/model_io.hpp"
#include "support/support.hpp"

using namespace sideinfo;
using namespace sideinfo::io;

namespace {

ErrorKind parse_error_kind(std::string_view text, std::string* message = nullptr) {
  try {
    parse_model(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "parsed without error: " << text;
  return ErrorKind::InvalidArgument;
}

Model random_model(support::Rng& rng) {
  switch (support::below(rng, 8)) {
    case 0:
      return support::gen_dist(rng, 1 + support::below(rng, 6), 0.2);
    case 1:
      return support::gen_joint(rng, 1 + support::below(rng, 4), 1 + support::below(rng, 4), 0.2);
    case 2:
      return support::gen_joint3(rng, 2, 1 + support::below(rng, 3), 2);
    case 3: {
      LossDoc l;
      if (support::below(rng, 2) == 0) {
        static const char* names[] = {"log", "zero_one", "brier", "spherical", "absolute_ordered"};
        l.builtin = names[support::below(rng, 5)];
      } else {
        l.outcomes = 2 + support::below(rng, 3);
        l.actions = 1 + support::below(rng, 3);
        for (std::size_t i = 0; i < l.outcomes * l.actions; ++i) l.matrix.push_back(std::round(support::unit(rng) * 1e6) / 1e3);
      }
      if (support::below(rng, 2) == 0) l.scale = 0.5 + support::unit(rng);
      return l;
    }
    case 4: {
      std::vector<std::size_t> block(2 + support::below(rng, 5));
      for (auto& b : block) b = support::below(rng, block.size());
      return Transform::canonical(block);
    }
    case 5:
      if (support::below(rng, 2) == 0) return support::gen_markov(rng, 2, 1 + support::below(rng, 2), 0.3);
      return support::gen_stationary_markov(rng, 2, 2);
    case 6: {
      const std::size_t p = 1 + support::below(rng, 2);
      std::vector<Mat2> a(p);
      for (auto& m : a)
        for (auto& v : m) v = (support::unit(rng) - 0.5) * 0.5;
      return VarModel(a, {1.0 + support::unit(rng), 0.2, 0.2, 1.0});
    }
    default: {
      static const char* names[] = {"neg_entropy", "sum_squares"};
      ConvexGDoc g;
      for (std::size_t i = 0, k = 1 + support::below(rng, 2); i < k; ++i) g.terms.emplace_back(names[i], 0.1 + support::unit(rng));
      return g;
    }
  }
}

}  // namespace

TEST(ParseModel, WitnessJointDocument) {
  const auto m = parse_model(R"({"kind":"joint","rows":3,"cols":2,"p":[["0","0.25"],["0","0.25"],["0.5","0"]]})");
  EXPECT_EQ(m.version, 1);
  EXPECT_EQ(std::get<Joint>(m.model), Joint::from_rows({{0, 0.25}, {0, 0.25}, {0.5, 0}}));
}

TEST(ParseModel, BuiltinLoss) {
  const auto m = parse_model(R"({"kind":"loss","builtin":"log"})");
  const auto& l = std::get<LossDoc>(m.model);
  ASSERT_TRUE(l.builtin.has_value());
  EXPECT_EQ(*l.builtin, "log");
  EXPECT_NEAR(bayes_risk(l.to_loss(2), Dist::uniform(2)).risk, std::log(2.0), 1e-12);
}

TEST(ParseModel, BadSumCitesField) {
  std::string msg;
  EXPECT_EQ(parse_error_kind(R"({"kind":"dist","p":["0.5","0.7"]})", &msg), ErrorKind::ValidationError);
  EXPECT_NE(msg.find("\"p\""), std::string::npos) << msg;
}

TEST(ParseModel, SchemaErrors) {
  EXPECT_EQ(parse_error_kind("{"), ErrorKind::SchemaError);
  EXPECT_EQ(parse_error_kind(R"({"p":["1"]})"), ErrorKind::SchemaError);
  EXPECT_EQ(parse_error_kind(R"({"kind":"banana"})"), ErrorKind::SchemaError);
  EXPECT_EQ(parse_error_kind(R"({"kind":"dist","p":["x"]})"), ErrorKind::SchemaError);
  EXPECT_EQ(parse_error_kind(R"({"kind":"joint","rows":2,"cols":2,"p":[["1","0"]]})"), ErrorKind::SchemaError);
  EXPECT_EQ(parse_error_kind(R"({"kind":"dist","version":2,"p":["1"]})"), ErrorKind::SchemaError);
  EXPECT_EQ(parse_error_kind(R"({"kind":"transform","map":[0,1]})"), ErrorKind::ValidationError);
  EXPECT_EQ(parse_error_kind(R"({"kind":"loss","builtin":"hinge"})"), ErrorKind::ValidationError);
}

TEST(ParseModel, MarkovDefaultsToStationaryStart) {
  const auto m = parse_model(R"({"kind":"markov_process","nx":2,"ny":1,"kernel":[["0.9","0.1"],["0.2","0.8"]]})");
  const auto* mj = std::get<ProcessModel>(m.model).markov_joint();
  ASSERT_NE(mj, nullptr);
  EXPECT_NEAR(mj->initial[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(mj->initial[1], 1.0 / 3.0, 1e-12);
}

TEST(RoundTrip, SeededCorpusOfAllKinds) {
  std::set<std::string> kinds;
  support::for_all(81, 200, [](support::Rng& rng) { return ModelFile{kSchemaVersion, random_model(rng)}; },
                   [&](const ModelFile& m) {
                     kinds.insert(kind_name(m.model));
                     const std::string text = serialize_model(m);
                     const ModelFile back = parse_model(text);
                     EXPECT_EQ(back, m) << text;
                     EXPECT_EQ(serialize_model(back), text);
                   });
  EXPECT_EQ(kinds.size(), 8u);
}

TEST(RoundTrip, FileIo) {
  const auto path = std::filesystem::temp_directory_path() / "sideinfo_roundtrip.json";
  const ModelFile m{kSchemaVersion, Dist::validate({0.1, 0.2, 0.7})};
  write_model(path, m);
  EXPECT_EQ(read_model(path), m);
  std::filesystem::remove(path);
}

TEST(Decimal, ParseForms) {
  EXPECT_EQ(parse_decimal("0.25"), 0.25);
  EXPECT_EQ(parse_decimal("1e-3"), 1e-3);
  EXPECT_EQ(parse_decimal("1/3"), 1.0 / 3.0);
  EXPECT_EQ(parse_decimal("inf"), std::numeric_limits<double>::infinity());
  EXPECT_THROW(parse_decimal("0.2.5"), Error);
  EXPECT_THROW(parse_decimal("1/0"), Error);
  EXPECT_THROW(parse_decimal(""), Error);
}

TEST(Decimal, FormatRoundTrips) {
  std::mt19937_64 rng(82);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng);
    EXPECT_EQ(parse_decimal(format_decimal(v)), v);
  }
  EXPECT_EQ(format_decimal(0.1), "0.1");
  EXPECT_EQ(format_decimal(0.0), "0");
}

TEST(EmpiricalJoint, CountingExamples) {
  const std::vector<std::pair<std::size_t, std::size_t>> s = {{1, 1}, {1, 1}, {2, 2}, {2, 2}};
  const auto e = empirical_joint(s, 2, 2);
  EXPECT_EQ(e.sample_size, 4u);
  EXPECT_EQ(e.joint, Joint::from_rows({{0.5, 0}, {0, 0.5}}));
  const std::vector<std::pair<std::size_t, std::size_t>> one = {{1, 2}};
  EXPECT_EQ(empirical_joint(one, 2, 2).joint, Joint::from_rows({{0, 1}, {0, 0}}));
}

TEST(EmpiricalJoint, Errors) {
  auto kind = [](std::vector<std::pair<std::size_t, std::size_t>> s) {
    try {
      empirical_joint(s, 2, 3);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidArgument;
  };
  EXPECT_EQ(kind({}), ErrorKind::EmptySample);
  EXPECT_EQ(kind({{3, 1}}), ErrorKind::UnknownSymbol);
  EXPECT_EQ(kind({{1, 0}}), ErrorKind::UnknownSymbol);
}

TEST(EmpiricalJoint, ConvergesToTruth) {
  support::Rng rng(83);
  const Joint truth = support::gen_joint(rng, 3, 4);
  std::discrete_distribution<std::size_t> draw(truth.data().begin(), truth.data().end());
  std::vector<std::pair<std::size_t, std::size_t>> s(100000);
  for (auto& p : s) {
    const std::size_t k = draw(rng);
    p = {k / 4 + 1, k % 4 + 1};
  }
  const auto e = empirical_joint(s, 3, 4);
  EXPECT_LT(total_variation(e.joint.data(), truth.data()), 0.02);
}

TEST(SamplesCsv, ReadsAndRejects) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto good = dir / "sideinfo_samples.csv";
  std::ofstream(good) << "x,y\n1,2\n2,1\n\n";
  const auto s = read_samples_csv(good);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], (std::pair<std::size_t, std::size_t>{1, 2}));
  const auto bad = dir / "sideinfo_samples_bad.csv";
  std::ofstream(bad) << "a,b\n1,2\n";
  EXPECT_THROW(read_samples_csv(bad), Error);
  std::ofstream(bad) << "x,y\n1;2\n";
  EXPECT_THROW(read_samples_csv(bad), Error);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}
