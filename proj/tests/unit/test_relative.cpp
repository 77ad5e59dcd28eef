#include <gtest/gtest.h>

#include <random>

#include "critlab/catalog.hpp"
#include "critlab/relative.hpp"
#include "oracles.hpp"

using namespace critlab;

namespace {

oracle::Set to_set(const GroupSubset& s) {
  oracle::Set out;
  s.for_each([&](Element x) { out.insert(static_cast<int>(x)); });
  return out;
}

oracle::Mul table_mul(const FiniteGroup& g) {
  return [g](int a, int b) { return static_cast<int>(g.mul(a, b)); };
}

Subgroup normal(const FiniteGroup& g, std::initializer_list<Element> xs) {
  return Subgroup::make(GroupSubset(g, xs));
}

// Z2 x Z6 with index 6a + b.
struct Z2Z6 {
  FiniteGroup g = parse_group_spec("Z2xZ6");
  Subgroup n = normal(g, {0, 1, 2, 3, 4, 5});
  GroupSubset a = GroupSubset(g, {0, 1, 9, 10});
  GroupSubset b = GroupSubset(g, {0, 3, 6, 9});
};

}  // namespace

TEST(Slice, Fixtures) {
  Z2Z6 f;
  EXPECT_EQ(slice(f.a, f.n, 6, Side::left), GroupSubset(f.g, {3, 4}));
  EXPECT_EQ(slice(f.a, f.n, 0, Side::left), f.a & f.n.members());
  auto z6 = build_cyclic(6);
  EXPECT_TRUE(slice(GroupSubset(z6, {0, 2}), normal(z6, {0, 3}), 1, Side::left).empty());
}

TEST(Slice, RejectsNonNormal) {
  auto d3 = build_dihedral(3);
  auto h = Subgroup::make(GroupSubset(d3, {0, 3}));
  try {
    slice(GroupSubset(d3, {0}), h, 0, Side::left);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_normal);
  }
}

TEST(Disintegrate, Fixtures) {
  Z2Z6 f;
  auto v = disintegrate(f.a, f.n);
  ASSERT_EQ(v.coset_reps, (std::vector<Element>{0, 6}));
  EXPECT_EQ(v.slices[0], GroupSubset(f.g, {0, 1}));
  EXPECT_EQ(v.slices[1], GroupSubset(f.g, {3, 4}));

  auto all = disintegrate(GroupSubset::full(f.g), f.n);
  for (const auto& s : all.slices) EXPECT_EQ(s, f.n.members());
  auto just_n = disintegrate(f.n.members(), f.n);
  EXPECT_EQ(just_n.slices[0], f.n.members());
  EXPECT_TRUE(just_n.slices[1].empty());
}

TEST(Disintegrate, MeasureIdentityHoldsEverywhere) {
  std::mt19937_64 rng(2);
  for (const auto& spec : small_group_specs()) {
    auto g = parse_group_spec(spec);
    for (const auto& n : subgroups(g, true)) {
      for (int it = 0; it < 40; ++it) {
        auto a = GroupSubset::from_mask(g, rng() & ((1ull << g.order()) - 1));
        for (Side side : {Side::left, Side::right}) {
          auto v = disintegrate(a, n, side);
          Fraction sum = 0;
          for (const auto& s : v.slices) sum += Fraction(static_cast<std::int64_t>(s.size()), n.order());
          EXPECT_EQ(haar(a), sum / static_cast<std::int64_t>(n.index())) << spec;
        }
      }
    }
  }
}

TEST(Slice, ProductOfSlicesLiesInProductSlice) {
  // A_x B^y ⊆ x^-1 (AB ∩ N xy) y^-1
  std::mt19937_64 rng(4);
  for (const char* spec : {"D4", "Q8", "A4", "Z2xZ6", "Dic3"}) {
    auto g = parse_group_spec(spec);
    for (const auto& n : subgroups(g, true))
      for (int it = 0; it < 30; ++it) {
        auto a = GroupSubset::from_mask(g, rng() & ((1ull << g.order()) - 1));
        auto b = GroupSubset::from_mask(g, rng() & ((1ull << g.order()) - 1));
        const auto ab = product_set(a, b);
        for (Element x = 0; x < g.order(); ++x)
          for (Element y = 0; y < g.order(); ++y) {
            auto lhs = product_set(slice(a, n, x, Side::left), slice(b, n, y, Side::right));
            GroupSubset coset = translate(n.members(), g.mul(x, y), Side::right);
            auto rhs = translate(translate(ab & coset, g.inv(x), Side::left), g.inv(y), Side::right);
            EXPECT_TRUE(lhs.subset_of(rhs)) << spec;
          }
      }
  }
}

TEST(CriticalWrt, Fixtures) {
  Z2Z6 f;
  auto w = is_critical_wrt(f.a, f.b, f.n);
  EXPECT_TRUE(w.holds);
  EXPECT_EQ(w.slice_measure_a, Fraction(1, 3));
  EXPECT_EQ(w.slice_measure_b, Fraction(1, 3));
  EXPECT_FALSE(w.violating_pair);

  auto t = is_critical_wrt(f.a, f.b, Subgroup::trivial(f.g));
  EXPECT_FALSE(t.holds);
  ASSERT_TRUE(t.violating_pair);
  EXPECT_EQ(t.violating_pair->condition, "slice_a");
}

TEST(CriticalWrt, TrivialSubgroupNeverHolds) {
  for (const char* spec : {"Z6", "S3", "Z2xZ2xZ2"}) {
    auto g = parse_group_spec(spec);
    const auto e = Subgroup::trivial(g);
    for (std::uint64_t ma = 1; ma < (1u << g.order()); ma += 5)
      for (std::uint64_t mb = 1; mb < (1u << g.order()); mb += 3)
        EXPECT_FALSE(is_critical_wrt(GroupSubset::from_mask(g, ma), GroupSubset::from_mask(g, mb), e).holds);
  }
}

TEST(CriticalWrt, WholeGroupMeansExactSum) {
  for (const char* spec : {"Z6", "S3", "Q8"}) {
    auto g = parse_group_spec(spec);
    const auto whole = Subgroup::whole(g);
    for (std::uint64_t ma = 1; ma < (1u << g.order()); ma += 3)
      for (std::uint64_t mb = 1; mb < (1u << g.order()); mb += 7) {
        auto a = GroupSubset::from_mask(g, ma), b = GroupSubset::from_mask(g, mb);
        const auto c = classify_pair(a, b);
        EXPECT_EQ(is_critical_wrt(a, b, whole).holds, c.measure_ab == c.measure_a + c.measure_b);
      }
  }
}

TEST(Support, Fixtures) {
  auto z6 = build_cyclic(6);
  const auto u = normal(z6, {0, 3});
  auto s = support(GroupSubset(z6, {0, 1}), u);
  EXPECT_EQ(s.cosets.size(), 2u);
  EXPECT_TRUE(s.cosets.contains(s.quotient.projection(0)));
  EXPECT_TRUE(s.cosets.contains(s.quotient.projection(1)));
  EXPECT_EQ(support(GroupSubset(z6, {3}), u).cosets.elements(), (std::vector<Element>{0}));
  EXPECT_EQ(support(GroupSubset::full(z6), u).cosets.size(), 3u);
}

TEST(Balanced, Fixtures) {
  auto z6 = build_cyclic(6);
  const auto u = normal(z6, {0, 3});
  EXPECT_TRUE(is_balanced(GroupSubset(z6, {0, 1}), u));
  EXPECT_FALSE(is_balanced(GroupSubset(z6, {1, 4}), u));
  EXPECT_TRUE(is_balanced(u.members(), u));
}

TEST(LocalSubcritical, Fixtures) {
  auto z4 = build_cyclic(4);
  auto w = detect_local_subcritical(GroupSubset(z4, {0}), GroupSubset(z4, {0}));
  ASSERT_TRUE(w);
  EXPECT_EQ(w->u.members(), GroupSubset(z4, {0, 2}));
  EXPECT_EQ(w->x, 0u);
  EXPECT_EQ(w->y, 0u);

  auto z6 = build_cyclic(6);
  w = detect_local_subcritical(GroupSubset(z6, {0, 1}), GroupSubset(z6, {0, 3}));
  ASSERT_TRUE(w);
  EXPECT_EQ(w->u.members(), GroupSubset(z6, {0, 2, 4}));
  EXPECT_EQ(w->slice_ab, 1u);

  // Z_p has no proper nontrivial subgroup and the trivial one is skipped.
  for (std::size_t p : {2u, 5u, 7u}) {
    auto zp = build_cyclic(p);
    EXPECT_FALSE(detect_local_subcritical(GroupSubset(zp, {0}), GroupSubset(zp, {0})));
  }
}

TEST(LocalSubcritical, MatchesOracle) {
  for (const char* spec : {"Z6", "S3", "Z8", "D4", "Q8", "Z2xZ4"}) {
    auto g = parse_group_spec(spec);
    auto mul = table_mul(g);
    const int n = static_cast<int>(g.order());
    std::vector<oracle::Set> us, all_us;
    for (const auto& u : oracle::subgroups(mul, n)) {
      if (u.size() == 1 || static_cast<int>(u.size()) == n) continue;
      all_us.push_back(u);
      if (oracle::is_normal(mul, n, u)) us.push_back(u);
    }
    for (std::uint64_t ma = 1; ma < (1u << n); ma += 3)
      for (std::uint64_t mb = 1; mb < (1u << n); mb += 5) {
        auto a = GroupSubset::from_mask(g, ma), b = GroupSubset::from_mask(g, mb);
        bool expect = false, expect_wide = false;
        for (const auto& u : us) expect = expect || oracle::has_subcritical_slices(mul, n, to_set(a), to_set(b), u);
        for (const auto& u : all_us)
          expect_wide = expect_wide || oracle::has_subcritical_slices(mul, n, to_set(a), to_set(b), u);
        EXPECT_EQ(detect_local_subcritical(a, b).has_value(), expect) << spec;
        EXPECT_EQ(detect_local_subcritical(a, b, {true}).has_value(), expect_wide) << spec;
      }
  }
}

TEST(Relativize, LocallySubcriticalThroughAnotherSubgroup) {
  auto z6 = build_cyclic(6);
  const auto u = normal(z6, {0, 3});
  const auto a = GroupSubset(z6, {0, 1}), b = GroupSubset(z6, {0, 3});
  auto r = relativize(a, b, u);
  EXPECT_EQ(r.outcome, RelativizeOutcome::locally_subcritical);
  EXPECT_FALSE(r.supports_equal);
  ASSERT_TRUE(r.local);
  auto direct = detect_local_subcritical(a, b);
  ASSERT_TRUE(direct);
  EXPECT_EQ(r.local->u, direct->u);
  EXPECT_EQ(r.local->u.members(), GroupSubset(z6, {0, 2, 4}));
}

TEST(Relativize, CriticalInWholeGroup) {
  Z2Z6 f;
  auto r = relativize(f.a, f.b, f.n);
  ASSERT_EQ(r.outcome, RelativizeOutcome::critical_wrt_u_in_l);
  EXPECT_EQ(r.l->members(), GroupSubset::full(f.g));
  EXPECT_TRUE(r.witness->holds);
  EXPECT_TRUE(r.supports_equal && r.support_is_subgroup && r.constant_slices);
}

TEST(Relativize, SetsInsideU) {
  Z2Z6 f;
  const auto a = GroupSubset(f.g, {0, 1}), b = GroupSubset(f.g, {0, 3});
  auto r = relativize(a, b, f.n);
  ASSERT_EQ(r.outcome, RelativizeOutcome::critical_wrt_u_in_l);
  EXPECT_EQ(r.l->members(), f.n.members());
}

TEST(Relativize, Preconditions) {
  auto z6 = build_cyclic(6);
  const auto u = normal(z6, {0, 3});
  auto code = [&](const GroupSubset& a, const GroupSubset& b) {
    try {
      relativize(a, b, u);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io_error;
  };
  EXPECT_EQ(code(GroupSubset(z6, {1, 2}), GroupSubset(z6, {0, 3})), ErrorCode::not_balanced);
  EXPECT_EQ(code(GroupSubset(z6, {0, 1}), GroupSubset(z6, {0, 1})), ErrorCode::wrong_class);
}

TEST(Relativize, OutcomeAgreesWithDirectChecks) {
  for (const char* spec : {"Z6", "Z8", "D4", "Z2xZ4"}) {
    auto g = parse_group_spec(spec);
    auto mul = table_mul(g);
    const int n = static_cast<int>(g.order());
    for (const auto& u : subgroups(g, true)) {
      if (u.order() == 1 || u.order() == g.order()) continue;
      for (std::uint64_t ma = 1; ma < (1u << n); ++ma)
        for (std::uint64_t mb = 1; mb < (1u << n); mb += 3) {
          auto a = GroupSubset::from_mask(g, ma), b = GroupSubset::from_mask(g, mb);
          if (classify_pair(a, b).tag != PairTag::CriticalSum) continue;
          if (!is_balanced(a, u) || !is_balanced(b, u)) continue;
          auto r = relativize(a, b, u);
          const bool in_u = oracle::has_subcritical_slices(mul, n, to_set(a), to_set(b), to_set(u.members()));
          if (in_u) {
            EXPECT_EQ(r.outcome, RelativizeOutcome::locally_subcritical);
            EXPECT_EQ(r.local->u, u);
            continue;
          }
          if (r.outcome == RelativizeOutcome::critical_wrt_u_in_l) {
            EXPECT_TRUE(r.supports_equal && r.support_is_subgroup && r.constant_slices);
            EXPECT_TRUE(a.subset_of(r.l->members()) && b.subset_of(r.l->members()));
          } else if (r.outcome == RelativizeOutcome::conclusions_violated) {
            EXPECT_FALSE(detect_local_subcritical(a, b).has_value());
          }
        }
    }
  }
}

TEST(Chain, Fixtures) {
  Z2Z6 f;
  auto r = check_chain_criticality(f.a, f.b, {Subgroup::whole(f.g)});
  EXPECT_EQ(r.holds, is_critical_wrt(f.a, f.b, Subgroup::whole(f.g)).holds);
  EXPECT_TRUE(r.holds);

  r = check_chain_criticality(f.a, f.b, {Subgroup::whole(f.g), f.n});
  EXPECT_TRUE(r.holds);
  EXPECT_TRUE(r.intersection_holds);
  EXPECT_EQ(r.intersection, f.n);

  r = check_chain_criticality(f.a, f.b, {Subgroup::whole(f.g), f.n, Subgroup::trivial(f.g)});
  EXPECT_FALSE(r.holds);
  EXPECT_FALSE(r.intersection_holds);
}

TEST(Chain, RejectsIncreasingChain) {
  Z2Z6 f;
  try {
    check_chain_criticality(f.a, f.b, {f.n, Subgroup::whole(f.g)});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_decreasing);
  }
}

TEST(EssentialStabilizer, AgreeingTranslatesDifferByAStabilizerElement) {
  // Translates Cx and Cy with the same singleton measures are equal sets,
  // so xy^-1 stabilizes C from the right.
  for (const char* spec : {"Z6", "S3", "D4", "Q8"}) {
    auto g = parse_group_spec(spec);
    for (std::uint64_t mc = 1; mc < (1u << g.order()); mc += 3) {
      auto c = GroupSubset::from_mask(g, mc);
      for (Element x = 0; x < g.order(); ++x)
        for (Element y = 0; y < g.order(); ++y) {
          auto cx = translate(c, x, Side::right), cy = translate(c, y, Side::right);
          bool agree = true;
          for (Element s = 0; s < g.order(); ++s) agree = agree && cx.contains(s) == cy.contains(s);
          if (!agree) continue;
          const Element d = g.mul(x, g.inv(y));
          EXPECT_EQ(translate(c, d, Side::right), c) << spec;
          if (g.is_abelian()) {
            auto st = oracle::stabilizer(table_mul(g), static_cast<int>(g.order()), to_set(c));
            EXPECT_TRUE(st.count(static_cast<int>(d))) << spec;
          }
        }
    }
  }
}
