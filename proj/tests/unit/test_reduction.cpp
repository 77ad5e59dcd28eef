#include <gtest/gtest.h>

#include "critlab/catalog.hpp"
#include "critlab/reduction.hpp"
#include "oracles.hpp"

using namespace critlab;

namespace {

GroupSubset from_bits(const FiniteGroup& g, std::uint64_t bits) {
  GroupSubset s(g);
  for (std::size_t i = 0; i < g.order(); ++i)
    if (bits >> i & 1) s.insert(static_cast<Element>(i));
  return s;
}

oracle::Set to_set(const GroupSubset& s) {
  oracle::Set out;
  s.for_each([&](Element x) { out.insert(static_cast<int>(x)); });
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::io_error;
}

}  // namespace

TEST(Kneser, Z6CriticalFixture) {
  auto g = build_cyclic(6);
  auto a = GroupSubset(g, {0, 1}), b = GroupSubset(g, {0, 3});
  auto c = kneser_reduce(a, b);
  EXPECT_EQ(c.kernel.members(), GroupSubset(g, {0, 3}));
  EXPECT_EQ(c.quotient.group.order(), 3u);
  EXPECT_EQ(c.image_i.elements(), (std::vector<Element>{0, 1}));
  EXPECT_EQ(c.image_j.elements(), (std::vector<Element>{0}));
  EXPECT_TRUE(c.product_measure_match);
  EXPECT_TRUE(c.overshoot_holds);
  EXPECT_TRUE(validate_certificate(c, a, b).ok(true));
}

TEST(Kneser, SubgroupPair) {
  auto g = build_cyclic(8);
  auto h = GroupSubset(g, {0, 4});
  auto c = kneser_reduce(h, h);
  EXPECT_EQ(c.quotient.group.order(), 4u);
  EXPECT_EQ(c.image_i.size(), 1u);
  EXPECT_EQ(c.image_j.size(), 1u);
  EXPECT_TRUE(c.overshoot_holds);
}

TEST(Kneser, Z5SubCriticalFixture) {
  auto g = build_cyclic(5);
  auto a = GroupSubset(g, {0, 1});
  auto c = kneser_reduce(a, a);
  EXPECT_EQ(c.kernel.order(), 1u);
  EXPECT_EQ(c.image_i.elements(), a.elements());
  EXPECT_TRUE(c.overshoot_holds);
}

TEST(Kneser, Preconditions) {
  auto s3 = build_dihedral(3);
  EXPECT_EQ(code_of([&] { kneser_reduce(GroupSubset(s3, {0}), GroupSubset(s3, {0})); }),
            ErrorCode::not_abelian);
  auto z2 = build_cyclic(2);
  EXPECT_EQ(code_of([&] { kneser_reduce(GroupSubset::full(z2), GroupSubset::full(z2)); }),
            ErrorCode::wrong_class);
}

TEST(Kneser, KernelIsStabilizerAndCertificatesValidate) {
  for (std::size_t n = 1; n <= 10; ++n) {
    auto g = build_cyclic(n);
    for (std::uint64_t ma = 1; ma < (1u << n); ++ma)
      for (std::uint64_t mb = ma; mb < (1u << n); mb += (n > 8 ? 5 : 1)) {
        auto a = from_bits(g, ma), b = from_bits(g, mb);
        const auto tag = classify_pair(a, b).tag;
        if (tag != PairTag::SubCritical && tag != PairTag::CriticalSum) continue;
        auto c = kneser_reduce(a, b);
        auto ab = product_set(a, b);
        ASSERT_EQ(to_set(c.kernel.members()),
                  oracle::stabilizer(oracle::cyclic(static_cast<int>(n)), static_cast<int>(n), to_set(ab)));
        ASSERT_EQ(product_set(ab, c.kernel.members()), ab);
        ASSERT_TRUE(validate_certificate(c, a, b).ok(tag == PairTag::SubCritical));
      }
  }
}

TEST(Kemperman, AgreesWithKneserOnCyclicGroups) {
  for (std::size_t n = 1; n <= 8; ++n) {
    auto g = build_cyclic(n);
    for (std::uint64_t ma = 1; ma < (1u << n); ++ma)
      for (std::uint64_t mb = 1; mb < (1u << n); ++mb) {
        auto a = from_bits(g, ma), b = from_bits(g, mb);
        if (classify_pair(a, b).tag != PairTag::SubCritical) continue;
        ASSERT_EQ(kemperman_reduce(a, b).kernel.members(), kneser_reduce(a, b).kernel.members());
      }
  }
}

TEST(Kemperman, D4CosetPair) {
  auto g = build_dihedral(4);
  // A = B = the center {e, r^2}; AB is the center, a union of its cosets.
  auto z = GroupSubset(g, {0, 2});
  auto c = kemperman_reduce(z, z);
  EXPECT_TRUE(z.subset_of(c.kernel.members()));
  EXPECT_TRUE(c.product_measure_match);
  EXPECT_TRUE(validate_certificate(c, z, z).ok(false));
}

TEST(Kemperman, ExhaustiveOnD4) {
  auto g = build_dihedral(4);
  std::size_t with_nontrivial = 0;
  for (std::uint64_t ma = 1; ma < 256; ++ma)
    for (std::uint64_t mb = 1; mb < 256; ++mb) {
      auto a = from_bits(g, ma), b = from_bits(g, mb);
      if (classify_pair(a, b).tag != PairTag::SubCritical) continue;
      auto c = kemperman_reduce(a, b);
      ASSERT_TRUE(validate_certificate(c, a, b).ok(false));
      auto ab = product_set(a, b);
      // No strictly larger normal subgroup also absorbs AB.
      for (const auto& h : subgroups(g, true))
        if (h.order() > c.kernel.order()) ASSERT_NE(product_set(ab, h.members()), ab);
      with_nontrivial += c.kernel.order() > 1;
    }
  EXPECT_GT(with_nontrivial, 0u);
}

TEST(Kemperman, TrivialPairAndWrongClass) {
  auto g = build_dihedral(3);
  auto e = GroupSubset(g, {0});
  auto c = kemperman_reduce(e, e);
  EXPECT_EQ(c.kernel.order(), 1u);
  EXPECT_EQ(c.quotient.group.order(), 6u);
  auto z6 = build_cyclic(6);
  EXPECT_EQ(code_of([&] { kemperman_reduce(GroupSubset(z6, {0, 1}), GroupSubset(z6, {0, 3})); }),
            ErrorCode::wrong_class);
}

TEST(Validator, DetectsTamperedCertificate) {
  auto g = build_cyclic(6);
  auto a = GroupSubset(g, {0, 1}), b = GroupSubset(g, {0, 3});
  auto c = kneser_reduce(a, b);
  c.image_i = GroupSubset(c.quotient.group, {0});
  auto v = validate_certificate(c, a, b);
  EXPECT_FALSE(v.contains_a);
  EXPECT_FALSE(v.ok(false));
}

TEST(Vosper, Fixtures) {
  auto z7 = build_cyclic(7);
  auto v = vosper_classify(GroupSubset(z7, {0, 1, 2}), GroupSubset(z7, {0, 1}));
  EXPECT_EQ(v.difference, 1u);
  EXPECT_EQ(v.start_a, 0u);
  EXPECT_EQ(v.start_b, 0u);
  EXPECT_EQ(v.length_a, 3u);
  EXPECT_EQ(v.length_b, 2u);
  auto z11 = build_cyclic(11);
  EXPECT_EQ(vosper_classify(GroupSubset(z11, {0, 3, 6}), GroupSubset(z11, {0, 3})).difference, 3u);
}

TEST(Vosper, Rejections) {
  auto z5 = build_cyclic(5);
  EXPECT_EQ(code_of([&] { vosper_classify(GroupSubset(z5, {0, 1}), GroupSubset(z5, {0, 2})); }),
            ErrorCode::vosper_near_full);
  EXPECT_EQ(code_of([&] { vosper_classify(GroupSubset(z5, {0}), GroupSubset(z5, {0, 2})); }),
            ErrorCode::vosper_singleton);
  auto z6 = build_cyclic(6);
  EXPECT_EQ(code_of([&] { vosper_classify(GroupSubset(z6, {0, 1}), GroupSubset(z6, {0, 1})); }),
            ErrorCode::vosper_not_prime_cyclic);
  auto z11 = build_cyclic(11);
  EXPECT_EQ(code_of([&] { vosper_classify(GroupSubset(z11, {0, 1}), GroupSubset(z11, {0, 3})); }),
            ErrorCode::vosper_not_minimal);
}

TEST(Vosper, AgreesWithBruteForce) {
  for (int p : {5, 7}) {
    auto g = build_cyclic(static_cast<std::size_t>(p));
    for (std::uint64_t ma = 1; ma < (1u << p); ++ma)
      for (std::uint64_t mb = 1; mb < (1u << p); ++mb) {
        auto a = from_bits(g, ma), b = from_bits(g, mb);
        const auto nab = product_set(a, b).size();
        if (a.size() < 2 || b.size() < 2 || nab + 1 >= static_cast<std::size_t>(p) ||
            nab + 1 != a.size() + b.size())
          continue;
        auto v = vosper_classify(a, b);
        const int da = oracle::ap_difference(p, to_set(a));
        const int db = oracle::ap_difference(p, to_set(b));
        ASSERT_EQ(da, db);
        ASSERT_EQ(static_cast<int>(v.difference), da);
      }
  }
}

TEST(Bilinear, Fixtures) {
  auto z4 = build_cyclic(4), z2 = build_cyclic(2);
  auto f = factorize_bilinear(z4, z2, {1, 0, 1, 0}, {0, 1, 0, 1});
  EXPECT_EQ(f.s, 1u);
  EXPECT_EQ(f.t, 0u);
  EXPECT_EQ(f.pi.map(), (std::vector<Element>{0, 1, 0, 1}));

  auto triv = factorize_bilinear(z4, z2, {0, 0, 0, 0}, {0, 0, 0, 0});
  EXPECT_EQ(triv.s, 0u);
  EXPECT_EQ(triv.t, 0u);
  EXPECT_EQ(triv.pi.map(), (std::vector<Element>{0, 0, 0, 0}));

  auto z6 = build_cyclic(6), z3 = build_cyclic(3);
  std::vector<Element> alpha(6), beta(6);
  for (Element x = 0; x < 6; ++x) alpha[x] = (2 + x) % 3, beta[x] = (x % 3 + 1) % 3;
  auto g = factorize_bilinear(z6, z3, alpha, beta);
  EXPECT_EQ(g.s, 2u);
  EXPECT_EQ(g.t, 1u);
  for (Element x = 0; x < 6; ++x) EXPECT_EQ(g.pi(x), x % 3);
}

TEST(Bilinear, RejectsNonBilinear) {
  auto z4 = build_cyclic(4), z2 = build_cyclic(2);
  EXPECT_EQ(code_of([&] { factorize_bilinear(z4, z2, {0, 1, 1, 0}, {0, 0, 0, 0}); }),
            ErrorCode::not_bilinear);
}

TEST(Bilinear, RoundTripOverSurjections) {
  for (const char* gs : {"Z6", "S3", "D4", "Z2xZ4"})
    for (const char* ms : {"Z2", "Z3", "S3", "Z2xZ2"}) {
      auto g = parse_group_spec(gs), m = parse_group_spec(ms);
      for (const auto& pi : homomorphisms(g, m, true))
        for (Element s = 0; s < m.order(); ++s)
          for (Element t = 0; t < m.order(); ++t) {
            std::vector<Element> alpha(g.order()), beta(g.order());
            for (Element x = 0; x < g.order(); ++x) alpha[x] = m.mul(s, pi(x)), beta[x] = m.mul(pi(x), t);
            auto f = factorize_bilinear(g, m, alpha, beta);
            for (Element x = 0; x < g.order(); ++x) {
              ASSERT_EQ(m.mul(f.s, f.pi(x)), alpha[x]);
              ASSERT_EQ(m.mul(f.pi(x), f.t), beta[x]);
            }
          }
    }
}

TEST(MatchPullbacks, Fixtures) {
  auto z4 = build_cyclic(4);
  auto id = Homomorphism::identity(z4);
  auto neg = Homomorphism::make(z4, z4, {0, 3, 2, 1});
  auto a = match_pullbacks(id, neg, GroupSubset(z4, {0, 1}), GroupSubset(z4, {0, 3}));
  EXPECT_EQ(a.map(), neg.map());
  auto same = match_pullbacks(id, id, GroupSubset(z4, {0, 1}), GroupSubset(z4, {0, 1}));
  EXPECT_EQ(same.map(), id.map());

  auto z5 = build_cyclic(5);
  auto p1 = Homomorphism::identity(z5);
  auto p2 = Homomorphism::make(z5, z5, {0, 2, 4, 1, 3});
  auto i1 = GroupSubset(z5, {0, 1}), i2 = GroupSubset(z5, {0, 2});
  auto m = match_pullbacks(p1, p2, i1, i2);
  EXPECT_EQ(m.map(), (std::vector<Element>{0, 3, 1, 4, 2}));
}

TEST(MatchPullbacks, Rejections) {
  auto z4 = build_cyclic(4);
  auto id = Homomorphism::identity(z4);
  EXPECT_EQ(code_of([&] { match_pullbacks(id, id, GroupSubset(z4, {0, 2}), GroupSubset(z4, {0, 2})); }),
            ErrorCode::stabilizer_not_trivial);
  EXPECT_EQ(code_of([&] { match_pullbacks(id, id, GroupSubset(z4, {0, 1}), GroupSubset(z4, {0, 3})); }),
            ErrorCode::no_matching_automorphism);
  auto z8 = build_cyclic(8);
  auto p1 = Homomorphism::make(z8, z4, {0, 1, 2, 3, 0, 1, 2, 3});
  auto collapse = Homomorphism::make(z8, z4, {0, 2, 0, 2, 0, 2, 0, 2});
  EXPECT_EQ(code_of([&] { match_pullbacks(p1, collapse, GroupSubset(z4, {0, 1}), GroupSubset(z4, {0, 1})); }),
            ErrorCode::not_surjective);
}

TEST(MatchPullbacks, KernelMismatch) {
  auto g = build_product(build_cyclic(2), build_cyclic(2));
  auto z2 = build_cyclic(2);
  auto first = Homomorphism::make(g, z2, {0, 0, 1, 1});
  auto second = Homomorphism::make(g, z2, {0, 1, 0, 1});
  EXPECT_EQ(code_of([&] { match_pullbacks(first, second, GroupSubset(z2, {0}), GroupSubset(z2, {0})); }),
            ErrorCode::kernel_mismatch);
}

TEST(SplitCharacters, Z5) {
  auto z5 = build_cyclic(5);
  std::vector<Homomorphism> chars;
  for (const auto& h : homomorphisms(z5, z5))
    if (h(1) != 0) chars.push_back(h);
  auto [s, sc] = split_characters(chars);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0](1), 1u);
  EXPECT_EQ(s[1](1), 2u);
  EXPECT_EQ(sc[0](1), 4u);
  EXPECT_EQ(sc[1](1), 3u);
}

TEST(SplitCharacters, EmptyAndSelfInverse) {
  auto [s, sc] = split_characters({});
  EXPECT_TRUE(s.empty() && sc.empty());
  auto z4 = build_cyclic(4);
  std::vector<Homomorphism> chars;
  for (const auto& h : homomorphisms(z4, z4))
    if (h(1) != 0) chars.push_back(h);
  EXPECT_EQ(code_of([&] { split_characters(chars); }), ErrorCode::self_inverse_character);
}

TEST(SplitCharacters, MissingInverseAndNonCyclic) {
  auto z5 = build_cyclic(5);
  auto x1 = Homomorphism::make(z5, z5, {0, 1, 2, 3, 4});
  EXPECT_EQ(code_of([&] { split_characters({x1}); }), ErrorCode::missing_inverse_character);
  auto v = build_product(build_cyclic(2), build_cyclic(2));
  auto h = Homomorphism::make(v, v, {0, 1, 2, 3});
  EXPECT_EQ(code_of([&] { split_characters({h}); }), ErrorCode::not_cyclic_target);
}

TEST(SplitCharacters, PartitionProperty) {
  for (std::size_t n : {5u, 7u, 9u, 11u, 12u}) {
    auto src = build_cyclic(n), tgt = build_cyclic(n);
    std::vector<Homomorphism> chars;
    for (const auto& h : homomorphisms(src, tgt)) {
      std::vector<Element> inv(n);
      for (std::size_t x = 0; x < n; ++x) inv[x] = tgt.inv(h(static_cast<Element>(x)));
      if (inv != h.map()) chars.push_back(h);
    }
    auto [s, sc] = split_characters(chars);
    ASSERT_EQ(s.size() + sc.size(), chars.size());
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t x = 0; x < n; ++x)
        ASSERT_EQ(sc[i](static_cast<Element>(x)), tgt.inv(s[i](static_cast<Element>(x))));
    for (const auto& a : s)
      for (const auto& b : sc) ASSERT_NE(a.map(), b.map());
  }
}

TEST(Sturmian, Z6QuotientWitness) {
  auto g = build_cyclic(6);
  auto a = GroupSubset(g, {0, 1}), b = GroupSubset(g, {0, 3});
  auto r = detect_sturmian_reduction(a, b);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->kind, TargetKind::cyclic);
  EXPECT_EQ(r.witness->modulus, 3u);
  EXPECT_EQ(r.witness->interval_i.size(), 2u);
  EXPECT_EQ(r.witness->interval_j.size(), 1u);
  EXPECT_EQ(r.witness->measure_ij, Fraction(2, 3));
  for (Element x = 0; x < 6; ++x) EXPECT_EQ(r.witness->pi(x), x % 3);
  EXPECT_TRUE(validate_sturmian_witness(*r.witness, a, b));
}

TEST(Sturmian, WrongClassAndBudget) {
  auto z5 = build_cyclic(5);
  EXPECT_EQ(code_of([&] { detect_sturmian_reduction(GroupSubset(z5, {0}), GroupSubset(z5, {0})); }),
            ErrorCode::wrong_class);
  auto g = build_cyclic(12);
  auto a = GroupSubset(g, {0, 1}), b = GroupSubset(g, {0, 6});
  EXPECT_EQ(code_of([&] { detect_sturmian_reduction(a, b, 1); }), ErrorCode::budget_exceeded);
  EXPECT_TRUE(detect_sturmian_reduction(a, b).witness.has_value());
}

TEST(Sturmian, IntervalPairsInCyclicGroupsAreRecovered) {
  for (std::size_t n = 3; n <= 12; ++n) {
    auto g = build_cyclic(n);
    for (std::size_t la = 1; la < n; ++la)
      for (std::size_t lb = 1; la + lb < n; ++lb) {
        GroupSubset a(g), b(g);
        for (std::size_t i = 0; i < la; ++i) a.insert(static_cast<Element>((i + 2) % n));
        for (std::size_t i = 0; i < lb; ++i) b.insert(static_cast<Element>((i + 5) % n));
        if (classify_pair(a, b).tag != PairTag::CriticalSum) continue;
        auto r = detect_sturmian_reduction(a, b);
        ASSERT_TRUE(r.witness.has_value()) << n << " " << la << " " << lb;
        ASSERT_TRUE(validate_sturmian_witness(*r.witness, a, b));
      }
  }
}

TEST(Sturmian, EveryReturnedWitnessValidates) {
  std::size_t found = 0;
  for (const char* spec : {"Z8", "D4", "Z2xZ4", "Q8"}) {
    auto g = parse_group_spec(spec);
    for (std::uint64_t ma = 1; ma < 256; ma += 3)
      for (std::uint64_t mb = 1; mb < 256; mb += 5) {
        auto a = from_bits(g, ma), b = from_bits(g, mb);
        if (classify_pair(a, b).tag != PairTag::CriticalSum) continue;
        auto r = detect_sturmian_reduction(a, b);
        if (!r.witness) continue;
        ++found;
        ASSERT_TRUE(validate_sturmian_witness(*r.witness, a, b)) << spec;
      }
  }
  EXPECT_GT(found, 0u);
}
