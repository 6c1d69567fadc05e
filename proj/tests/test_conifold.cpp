#include <gtest/gtest.h>

#include "support/conifold_fixture.hpp"

using namespace k3pt;
using oracle::Gen;

using oracle::inject_fault;

TEST(PtH, SingleClassCoefficients) {
  auto m = oracle::resolved_monoid(1);
  auto s = pt_h_series(m, {{0, 1}}, Window(1, 0, 15));
  EXPECT_EQ(s.coefficient({0, 1}, 1), 1);
  for (int n = 1; n <= 15; ++n) EXPECT_EQ(s.coefficient({0, 1}, n), (n % 2 ? 1 : -1) * n) << n;
}

TEST(PtH, MatchesDenseExpansion) {
  auto m = oracle::resolved_monoid(1);
  auto s = pt_h_series(m, {{0, 1}}, Window(4, 0, 10), 3);
  auto dense = oracle::pth_dense(4, 10);
  for (int k = 0; k <= 4; ++k)
    for (int q = 0; q <= 10; ++q) EXPECT_EQ(s.coefficient({0, k}, q), dense[k][q]);
}

TEST(PtH, EmptyAndErrors) {
  auto m = oracle::resolved_monoid(2);
  EXPECT_EQ(pt_h_series(m, {}, Window(2, 0, 3)), Series::one(m, Window(2, 0, 3)));
  EXPECT_THROW(pt_h_series(m, {{0, 1, 0}, {0, 1, 0}}, Window(2, 0, 3)), EffectivityError);
  EXPECT_THROW(pt_h_series(m, {{0, 0, 0}}, Window(2, 0, 3)), EffectivityError);
  EXPECT_THROW(pt_h_series(m, {{0, -1, 0}}, Window(2, 0, 3)), EffectivityError);
}

TEST(Conifold, TrivialBase) {
  auto m = oracle::resolved_monoid(1);
  auto tgt = ClassMonoid::single("b");
  PushforwardMap map{m, tgt, {{1, 0}}};
  auto pth = pt_h_series(m, {{0, 1}}, Window(3, 0, 6));
  auto report = conifold_check(pth, {{0, 1}}, map, Series::one(tgt, Window(1, 0, 6)));
  EXPECT_TRUE(report.holds());
  EXPECT_FALSE(report.certified_keys.empty());
}

TEST(Conifold, SyntheticConsistentTriples) {
  Gen g(51);
  for (int i = 0; i < 15; ++i) {
    auto t = oracle::make_triple(g, static_cast<int>(g.uniform(1, 2)), g.uniform(1, 2), g.uniform(3, 5));
    auto report = conifold_check(t.resolved, t.exceptional, t.map, t.base);
    EXPECT_TRUE(report.holds());
    EXPECT_FALSE(report.certified_keys.empty());
  }
}

TEST(Conifold, FaultInjectionFlagsExactlyTheShadow) {
  Gen g(52);
  int nonvacuous = 0;
  for (int i = 0; i < 30; ++i) {
    auto t = oracle::make_triple(g, static_cast<int>(g.uniform(1, 2)), g.uniform(1, 2), g.uniform(3, 5));
    auto f = inject_fault(g, t);
    auto report = conifold_check(t.resolved, t.exceptional, t.map, t.base);
    auto expected = oracle::expected_mismatches(t, f, report);
    EXPECT_EQ(oracle::reported_mismatches(report), expected);
    nonvacuous += !expected.empty();
  }
  EXPECT_GE(nonvacuous, 15);
}

TEST(Conifold, RelabelingExceptionalClasses) {
  Gen g(53);
  for (int i = 0; i < 10; ++i) {
    auto t = oracle::make_triple(g, 2, 2, 4);
    inject_fault(g, t);
    auto a = conifold_check(t.resolved, t.exceptional, t.map, t.base);
    auto b = conifold_check(t.resolved, {t.exceptional[1], t.exceptional[0]}, t.map, t.base);
    EXPECT_EQ(a.lhs, b.lhs);
    EXPECT_EQ(to_json(a), to_json(b));

    // Swap the generator order of the resolved monoid.
    auto swapped = std::make_shared<const ClassMonoid>(std::vector<std::string>{"b", "e2", "e1"},
                                                       std::vector<std::int64_t>{1, 1, 1});
    std::vector<Term> terms;
    for (const auto &[k, v] : t.resolved.terms()) terms.push_back({{k.cls[0], k.cls[2], k.cls[1]}, k.q, v});
    auto resolved = Series::make(swapped, t.resolved.window(), terms);
    PushforwardMap map{swapped, t.tgt, {{1, 0, 0}}};
    auto c = conifold_check(resolved, {{0, 1, 0}, {0, 0, 1}}, map, t.base);
    EXPECT_EQ(to_json(a), to_json(c));
  }
}

TEST(Conifold, PushforwardBeforeDivisionIsRefused) {
  Gen g(54);
  auto t = oracle::make_triple(g, 1, 1, 8);
  const Window tw(1, t.base.window().q_min, 8);
  EXPECT_THROW(pushforward_complete(t.resolved, t.map, tw), IncompletePushforward);
  auto report = conifold_check(t.resolved, t.exceptional, t.map, t.base);
  EXPECT_TRUE(report.holds());
}

TEST(Conifold, KernelMismatch) {
  auto m = oracle::resolved_monoid(2);
  auto tgt = ClassMonoid::single("b");
  PushforwardMap map{m, tgt, {{1, 0, 0}}};
  auto one = Series::one(m, Window(3, 0, 3));
  auto base = Series::one(tgt, Window(1, 0, 3));
  // e2 is contracted but not declared exceptional.
  EXPECT_THROW(conifold_check(one, {{0, 1, 0}}, map, base), IllFormedPushforward);
  // b is declared exceptional but is not contracted.
  EXPECT_THROW(conifold_check(one, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, map, base), IllFormedPushforward);
  EXPECT_THROW(conifold_check(base, {{0, 1, 0}, {0, 0, 1}}, map, base), MonoidError);
}

TEST(Conifold, ReportJson) {
  Gen g(55);
  auto t = oracle::make_triple(g, 1, 1, 4);
  inject_fault(g, t);
  auto doc = to_json(conifold_check(t.resolved, t.exceptional, t.map, t.base));
  EXPECT_EQ(doc["format"], "k3pt.conifold-report/1");
  EXPECT_TRUE(doc.contains("matches"));
  EXPECT_TRUE(doc.contains("uncertified"));
  EXPECT_EQ(doc["holds"].get<bool>(), doc["mismatches"].empty());
}
