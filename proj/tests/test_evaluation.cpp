#include <gtest/gtest.h>

#include <cmath>

#include "exai/engine.hpp"
#include "exai/evaluation.hpp"
#include "support.hpp"

using namespace exai;

namespace {

const ResponseTypeDef& kindness() { return default_registry().get("kindness"); }

FacetVector base_of(const char* id) { return test_support::npc(id).base(); }

void expect_distribution(const ResponseDistribution& d, std::array<double, 5> mass, double esc = 0.0, double tol = 1e-12) {
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(d.mass[k], mass[k], tol) << "level " << k;
  EXPECT_NEAR(d.escalation, esc, tol);
}

}  // namespace

TEST(CompositeScore, KindnessOnTT) {
  // (85 + 0.5*75 + 0.5*60 + 70 + (99-30)) / 4
  const double oracle = (85.0 + 37.5 + 30.0 + 70.0 + 69.0) / 4.0;
  EXPECT_DOUBLE_EQ(oracle, 72.875);
  EXPECT_NEAR(composite_score(base_of("TT"), kindness()), oracle, 1e-12);
}

TEST(CompositeScore, KindnessOnAG) {
  const double oracle = (40.0 + 15.0 + 20.0 + 30.0 + 34.0) / 4.0;
  EXPECT_DOUBLE_EQ(oracle, 34.75);
  EXPECT_NEAR(composite_score(base_of("AG"), kindness()), oracle, 1e-12);
}

TEST(CompositeScore, SingleFacetIdentity) {
  FacetVector v;
  v.set(Facet::Warmth, 99);
  EXPECT_EQ(composite_score(v, ResponseTypeDef("w", {{Facet::Warmth, 1.0}})), 99.0);
}

TEST(CompositeScoreProperty, FlippedTypeSumsTo99) {
  Rng rng(5);
  for (const auto& [name, def] : default_registry()) {
    const ResponseTypeDef flip = def.flipped("flip");
    for (int i = 0; i < 50; ++i) {
      FacetVector v;
      for (Facet f : kAllFacets) v.set(f, rng.uniform(0, 99));
      EXPECT_NEAR(composite_score(v, def) + composite_score(v, flip), 99.0, 1e-9) << name;
    }
  }
}

TEST(RandomEvaluator, UniformAndScoreless) {
  Rng rng(1);
  const ResponseOutcome o = evaluate_random(rng);
  expect_distribution(o.distribution, {0.2, 0.2, 0.2, 0.2, 0.2});
  EXPECT_FALSE(o.escalated);
  EXPECT_FALSE(o.score.has_value());
}

TEST(RandomEvaluator, SeededLevelRepeats) {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(evaluate_random(a).level, evaluate_random(b).level);
}

TEST(RandomEvaluator, ChiSquareUniform) {
  Rng rng(2024);
  constexpr int n = 100000;
  std::array<int, 5> counts{};
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(evaluate_random(rng).level)];
  double chi2 = 0.0;
  for (int c : counts) {
    const double expected = n / 5.0;
    chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_NEAR(c / static_cast<double>(n), 0.2, 0.01);
  }
  EXPECT_LT(chi2, 18.467);  // chi-square critical value, 4 degrees of freedom, alpha 0.001
}

TEST(DpTableTest, PaperPoints) {
  expect_distribution(evaluate_dp(default_dp_table(), 57), {0, 0, 0.06, 0.94, 0});
  expect_distribution(evaluate_dp(default_dp_table(), 86), {0, 0, 0, 0.08, 0.92}, 0.04);
  expect_distribution(evaluate_dp(default_dp_table(), 0), {1, 0, 0, 0, 0});
  expect_distribution(evaluate_dp(default_dp_table(), 99), {0, 0, 0, 0, 1}, 0.10);
}

TEST(DpTableTest, AnchorsAreExact) {
  const auto& t = default_dp_table();
  for (const auto& a : t.anchors()) EXPECT_EQ(evaluate_dp(t, a.score), a.distribution);
  EXPECT_EQ(evaluate_dp(t, 57).mass[2], 0.06);
  EXPECT_EQ(evaluate_dp(t, 86).mass[4], 0.92);
}

TEST(DpTableTest, Interpolates) {
  // Between anchors 45 {2: .90, 3: .10} and 57 {2: .06, 3: .94}: t = 5/12.
  const double t = 5.0 / 12.0;
  expect_distribution(evaluate_dp(default_dp_table(), 50), {0, 0, 0.90 + t * (0.06 - 0.90), 0.10 + t * (0.94 - 0.10), 0});
  // Between 86 and 99 the escalation share interpolates too.
  const double u = 6.0 / 13.0;
  expect_distribution(evaluate_dp(default_dp_table(), 92), {0, 0, 0, 0.08 * (1 - u), 0.92 + u * 0.08}, 0.04 + u * 0.06);
}

TEST(DpTableTest, OutOfRange) {
  EXPECT_THROW(evaluate_dp(default_dp_table(), -0.1), ValidationError);
  EXPECT_THROW(evaluate_dp(default_dp_table(), 99.5), ValidationError);
}

TEST(DpTableTest, LoadValidation) {
  EXPECT_THROW(load_dp_table("anchor 0\n  0 1.0\nend\nanchor 50\n  2 1.0\nend\n"), ParseError);  // no 99 row
  EXPECT_THROW(load_dp_table("anchor 0\n  0 0.5\nend\nanchor 99\n  4 1.0\nend\n"), ParseError);  // row sum
  EXPECT_THROW(load_dp_table("anchor 0\n  7 1.0\nend\nanchor 99\n  4 1.0\nend\n"), ParseError);     // level
  const DpTable ok = load_dp_table("anchor 0\n  0 1.0\nend\nanchor 99\n  4 0.8\n  esc 0.2\nend\n");
  expect_distribution(evaluate_dp(ok, 99), {0, 0, 0, 0, 1.0}, 0.2);
}

TEST(DpTableTest, RoundTrip) {
  const DpTable& t = default_dp_table();
  const DpTable again = load_dp_table(serialize_dp_table(t));
  ASSERT_EQ(again.anchors().size(), t.anchors().size());
  for (std::size_t i = 0; i < t.anchors().size(); ++i) {
    EXPECT_EQ(again.anchors()[i].score, t.anchors()[i].score);
    EXPECT_EQ(again.anchors()[i].distribution, t.anchors()[i].distribution);
  }
}

TEST(Fuzzify, Points) {
  auto check = [](double v, std::array<double, 5> want) {
    const FlvMembership m = fuzzify(v);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(m.degree[k], want[k], 1e-12) << v << " flv " << k;
  };
  check(50, {0, 0, 1, 0, 0});
  check(57, {0, 0, 0.65, 0.35, 0});
  check(99, {0, 0, 0, 0, 1});
  check(0, {1, 0, 0, 0, 0});
  check(10, {1, 0, 0, 0, 0});
  check(20, {0.5, 0.5, 0, 0, 0});
  check(85, {0, 0, 0, 0.25, 0.75});
  EXPECT_THROW(fuzzify(100), ValidationError);
}

TEST(FuzzifyProperty, Partition) {
  for (double v = 0; v <= 99; v += 0.25) EXPECT_NEAR(fuzzify(v).total(), 1.0, 1e-12);
}

TEST(GroupMembershipsTest, KindnessOnTT) {
  const GroupMemberships g = group_memberships(base_of("TT"), kindness());
  EXPECT_NEAR(g.positive[Flv::Average], 0.25 / 3.0, 1e-12);
  EXPECT_NEAR(g.positive[Flv::High], 0.625, 1e-12);
  EXPECT_NEAR(g.positive[Flv::VeryHigh], 0.875 / 3.0, 1e-12);
  EXPECT_NEAR(g.negative[Flv::Average], 0.05, 1e-12);
  EXPECT_NEAR(g.negative[Flv::High], 0.95, 1e-12);
  EXPECT_NEAR(g.positive_share, 0.75, 1e-12);
  EXPECT_NEAR(g.negative_share, 0.25, 1e-12);
  // Published rounding of the same values
  EXPECT_NEAR(g.positive[Flv::Average], 0.0833, 5e-5);
  EXPECT_NEAR(g.positive[Flv::VeryHigh], 0.2917, 5e-5);
}

TEST(GroupMembershipsTest, PositiveOnlyType) {
  const GroupMemberships g = group_memberships(base_of("SS"), default_registry().get("trust"));
  EXPECT_EQ(g.negative_share, 0.0);
  EXPECT_EQ(g.negative.total(), 0.0);
}

TEST(GroupMembershipsTest, MidpointsAreAverage) {
  FacetVector v = FacetVector::filled(50);
  v.set(Facet::AngryHostility, 49);  // negative weights read 99 - v
  const GroupMemberships g = group_memberships(v, kindness());
  EXPECT_EQ(g.positive[Flv::Average], 1.0);
  EXPECT_EQ(g.negative[Flv::Average], 1.0);
}

TEST(ApplyRules, TTKindness) {
  const RuleEvaluation r = apply_rules(group_memberships(base_of("TT"), kindness()));
  EXPECT_EQ(r.firings.size(), 10u);
  // 0.75 * positive + 0.25 * negative, level by level
  EXPECT_NEAR(r.confidence[2], 0.75 * (0.25 / 3.0) + 0.25 * 0.05, 1e-12);
  EXPECT_NEAR(r.confidence[3], 0.75 * 0.625 + 0.25 * 0.95, 1e-12);
  EXPECT_NEAR(r.confidence[4], 0.75 * (0.875 / 3.0), 1e-12);
  EXPECT_NEAR(r.confidence[2], 0.075, 1e-12);
  EXPECT_NEAR(r.confidence[3], 0.70625, 1e-12);
  EXPECT_NEAR(r.confidence[4], 0.21875, 1e-12);
}

TEST(ApplyRules, SingleGroup) {
  GroupMemberships g;
  g.positive.degree = {0, 0, 1, 0, 0};
  g.positive_share = 1.0;
  const RuleEvaluation r = apply_rules(g);
  EXPECT_EQ(r.confidence[2], 1.0);
  EXPECT_EQ(r.confidence[0] + r.confidence[1] + r.confidence[3] + r.confidence[4], 0.0);
  g.positive_share = 0.6;
  EXPECT_THROW(apply_rules(g), ValidationError);
}

TEST(Defuzzify, NormalizesByTrueSum) {
  const ResponseDistribution d = defuzzify({0, 0, 0.29, 0.61, 0});
  EXPECT_NEAR(d.mass[3], 0.61 / 0.90, 1e-12);
  EXPECT_NEAR(d.mass[2], 0.29 / 0.90, 1e-12);
  EXPECT_NEAR(d.mass[3], 0.6778, 5e-5);
  EXPECT_NEAR(d.mass[2], 0.3222, 5e-5);
  EXPECT_EQ(d.escalation, 0.0);
}

TEST(Defuzzify, IdentityUniformAndZero) {
  expect_distribution(defuzzify({0, 0, 1, 0, 0}), {0, 0, 1, 0, 0});
  expect_distribution(defuzzify({3, 3, 3, 3, 3}), {0.2, 0.2, 0.2, 0.2, 0.2});
  EXPECT_THROW(defuzzify({0, 0, 0, 0, 0}), ValidationError);
}

TEST(Evaluate, FuzzyTTKindness) {
  const Personality tt = test_support::npc("TT");
  Rng a(7), b(7);
  const ResponseOutcome o = evaluate(tt, std::nullopt, "kindness", Method::Fuzzy, default_registry(), default_dp_table(), a);
  expect_distribution(o.distribution, {0, 0, 0.075, 0.70625, 0.21875}, 0.0, 1e-9);
  EXPECT_NEAR(*o.score, 72.875, 1e-12);
  EXPECT_FALSE(o.escalated);
  EXPECT_EQ(evaluate(tt, std::nullopt, "kindness", Method::Fuzzy, default_registry(), default_dp_table(), b).level, o.level);
}

TEST(Evaluate, DpComposes) {
  const Personality tt = test_support::npc("TT");
  Rng rng(1);
  const ResponseOutcome o = evaluate(tt, std::nullopt, "kindness", Method::Dp, default_registry(), default_dp_table(), rng);
  EXPECT_EQ(o.distribution, evaluate_dp(default_dp_table(), 72.875));
}

TEST(Evaluate, RandomIgnoresType) {
  const Personality tt = test_support::npc("TT");
  Rng rng(1);
  const ResponseOutcome o = evaluate(tt, std::nullopt, "no-such-type", Method::Random, default_registry(), default_dp_table(), rng);
  expect_distribution(o.distribution, {0.2, 0.2, 0.2, 0.2, 0.2});
}

TEST(Evaluate, ErrorsAndPurity) {
  Personality tt = test_support::npc("TT");
  tt.attitude("p1").set(Facet::Warmth, -20);
  const Personality before = tt;
  Rng rng(1);
  EXPECT_THROW(evaluate(tt, std::nullopt, "kindnes", Method::Fuzzy, default_registry(), default_dp_table(), rng), NotFoundError);
  EXPECT_THROW(parse_method("magic"), ValidationError);
  evaluate(tt, "p1", "kindness", Method::Dp, default_registry(), default_dp_table(), rng);
  evaluate(tt, "p1", "kindness", Method::Fuzzy, default_registry(), default_dp_table(), rng);
  EXPECT_EQ(tt, before);
}

TEST(Evaluate, ActorAttitudeChangesScore) {
  Personality tt = test_support::npc("TT");
  tt.attitude("p1").set(Facet::Warmth, -20);
  Rng rng(1);
  const auto o = evaluate(tt, "p1", "kindness", Method::Fuzzy, default_registry(), default_dp_table(), rng);
  EXPECT_NEAR(*o.score, 72.875 - 20.0 / 4.0, 1e-12);
}

TEST(Sampling, InverseCdfAscending) {
  ResponseDistribution d;
  d.mass = {0.1, 0.2, 0.3, 0.4, 0.0};
  // Reproduce the first uniform the sampler sees.
  Rng probe(42);
  const double u = probe.uniform();
  const int expected = u < 0.1 ? 0 : u < 0.3 ? 1 : u < 0.6 ? 2 : 3;
  Rng rng(42);
  EXPECT_EQ(sample_outcome(d, rng).level, expected);
}

TEST(Sampling, EscalationOnlyWithinLevelFour) {
  ResponseDistribution d;
  d.mass = {0, 0, 0, 0, 1.0};
  d.escalation = 1.0;
  Rng rng(3);
  const auto o = sample_outcome(d, rng);
  EXPECT_EQ(o.level, 4);
  EXPECT_TRUE(o.escalated);

  int escalated = 0;
  const ResponseDistribution d86 = evaluate_dp(default_dp_table(), 86);
  for (int i = 0; i < 20000; ++i) {
    const auto s = sample_outcome(d86, rng);
    if (s.escalated) {
      EXPECT_EQ(s.level, 4);
      ++escalated;
    }
  }
  EXPECT_NEAR(escalated / 20000.0, 0.04, 0.006);
}

TEST(FuzzyProperty, PartitionPreservedOverRandomSweep) {
  Rng rng(8);
  std::vector<const ResponseTypeDef*> types;
  for (const auto& [name, def] : default_registry()) types.push_back(&def);
  for (int i = 0; i < 1000; ++i) {
    FacetVector v;
    for (Facet f : kAllFacets) v.set(f, rng.uniform(0, 99));
    const ResponseTypeDef& def = *types[rng.index(types.size())];
    const RuleEvaluation r = apply_rules(group_memberships(v, def));
    double s = 0.0;
    for (double c : r.confidence) s += c;
    EXPECT_NEAR(s, 1.0, 1e-9) << def.name();
  }
}

TEST(MonotonicityProperty, RaisingPositiveFacetDominates) {
  Rng rng(21);
  std::vector<const ResponseTypeDef*> types;
  for (const auto& [name, def] : default_registry()) types.push_back(&def);
  for (int trial = 0; trial < 200; ++trial) {
    FacetVector v;
    for (Facet f : kAllFacets) v.set(f, rng.uniform(0, 99));
    const ResponseTypeDef& def = *types[rng.index(types.size())];
    const FacetWeight& fw = def.weights()[rng.index(def.weights().size())];
    ResponseDistribution prev_dp, prev_fz;
    for (int step = 0; step <= 33; ++step) {
      // Move the facet in the direction that should raise the type.
      v.set(fw.facet, fw.weight > 0 ? step * 3.0 : 99.0 - step * 3.0);
      const ResponseDistribution dp = evaluate_dp(default_dp_table(), composite_score(v, def));
      const ResponseDistribution fz = evaluate_fuzzy(v, def);
      if (step > 0) {
        for (int k = 1; k <= 4; ++k) {
          EXPECT_GE(dp.at_least(k), prev_dp.at_least(k)) << def.name();
          EXPECT_GE(fz.at_least(k), prev_fz.at_least(k)) << def.name();
        }
      }
      prev_dp = dp;
      prev_fz = fz;
    }
  }
}

TEST(FuzzyProperty, CumulativeFormMatchesRulePipeline) {
  Rng rng(12);
  std::vector<const ResponseTypeDef*> types;
  for (const auto& [name, def] : default_registry()) types.push_back(&def);
  for (int i = 0; i < 1000; ++i) {
    FacetVector v;
    for (Facet f : kAllFacets) v.set(f, rng.uniform(0, 99));
    const ResponseTypeDef& def = *types[rng.index(types.size())];
    const ResponseDistribution a = evaluate_fuzzy(v, def);
    const ResponseDistribution b = defuzzify(apply_rules(group_memberships(v, def)).confidence);
    for (std::size_t k = 0; k < kLevelCount; ++k) EXPECT_NEAR(a.mass[k], b.mass[k], 1e-11) << def.name();
    EXPECT_EQ(a.total(), 1.0);
  }
}

TEST(SnapGrid, SumsAreExact) {
  EXPECT_EQ(snap_to_grid(0.1) + snap_to_grid(0.2) - snap_to_grid(0.2), snap_to_grid(0.1));
  EXPECT_NEAR(snap_to_grid(0.1), 0.1, 1e-12);
  EXPECT_EQ(snap_to_grid(-1e-17), 0.0);
  EXPECT_EQ(snap_to_grid(1.0 + 1e-15), 1.0);
}
