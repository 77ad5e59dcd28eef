#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "critlab/catalog.hpp"
#include "critlab/dyson.hpp"
#include "critlab/io.hpp"
#include "critlab/reduction.hpp"
#include "critlab/relative.hpp"
#include "critlab/subset_algebra.hpp"
#include "critlab/torus_exact.hpp"

// Acceptance sweeps. Each criterion runs a hand-written mask kernel next to
// the library routine it checks and counts disagreements between the two.

namespace critlab::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;
  nlohmann::json diagnostics = nlohmann::json::object();
  double seconds = 0;
  double budget_seconds = 0;
};

struct CriterionInfo {
  int id;
  std::string name;
  double budget_seconds;
};

inline const std::vector<CriterionInfo>& criteria() {
  static const std::vector<CriterionInfo> list{
      {1, "finite_kneser_bound", 60},
      {2, "cauchy_davenport", 30},
      {3, "kneser_certificates", 120},
      {4, "vosper_classification", 300},
      {5, "dyson_invariants", 120},
      {6, "arc_criticality", 10},
      {7, "stability_and_rigidity", 30},
      {8, "bilinear_round_trip", 60},
      {9, "relativization_dichotomy", 600},
      {10, "sturmian_round_trip", 120},
  };
  return list;
}

namespace detail {

using Mask = std::uint32_t;

/// Translation tables over all subsets of a group of order <= 13, built
/// from the raw Cayley table: left[g][m] = g·m, right[g][m] = m·g.
class MaskGroup {
 public:
  explicit MaskGroup(const FiniteGroup& g) : g_(g), n_(g.order()), full_((Mask{1} << n_) - 1) {
    require(n_ <= 13, ErrorCode::cap_exceeded, "mask kernel needs order <= 13");
    const std::size_t size = std::size_t{1} << n_;
    left_.assign(n_ * size, 0);
    right_.assign(n_ * size, 0);
    for (std::size_t x = 0; x < n_; ++x)
      for (std::size_t m = 1; m < size; ++m) {
        const std::size_t low = std::countr_zero(m);
        left_[x * size + m] = left_[x * size + (m & (m - 1))] | Mask{1} << g.mul(static_cast<Element>(x), static_cast<Element>(low));
        right_[x * size + m] =
            right_[x * size + (m & (m - 1))] | Mask{1} << g.mul(static_cast<Element>(low), static_cast<Element>(x));
      }
  }

  const FiniteGroup& group() const { return g_; }
  std::size_t order() const { return n_; }
  Mask full() const { return full_; }
  Mask left(Element x, Mask m) const { return left_[(std::size_t{x} << n_) + m]; }
  Mask right(Element x, Mask m) const { return right_[(std::size_t{x} << n_) + m]; }

  Mask product(Mask a, Mask b) const {
    Mask out = 0;
    for (; a != 0; a &= a - 1) out |= left(static_cast<Element>(std::countr_zero(a)), b);
    return out;
  }

  /// {g : gS = S}.
  Mask left_stabilizer(Mask s) const {
    Mask h = 0;
    for (std::size_t x = 0; x < n_; ++x)
      if (left(static_cast<Element>(x), s) == s) h |= Mask{1} << x;
    return h;
  }

 private:
  FiniteGroup g_;
  std::size_t n_;
  Mask full_;
  std::vector<Mask> left_, right_;
};

inline int pop(Mask m) { return std::popcount(m); }

inline GroupSubset subset_of_mask(const FiniteGroup& g, Mask m) { return GroupSubset::from_mask(g, m); }

inline Mask mask_of(const GroupSubset& s) { return static_cast<Mask>(s.mask()); }

/// Elements of Z_p that form an arithmetic progression with difference d.
inline bool is_ap(Mask s, std::size_t p, std::size_t d) {
  const int k = pop(s);
  for (std::size_t a = 0; a < p; ++a) {
    Mask run = 0;
    for (int i = 0; i < k; ++i) run |= Mask{1} << ((a + i * d) % p);
    if (run == s) return true;
  }
  return false;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

inline Rational random_rational(std::mt19937_64& rng, long lo_num, long hi_num_per_den, long den) {
  std::uniform_int_distribution<long> d(lo_num, hi_num_per_den);
  return Rational(d(rng), den);
}

// --- criteria ----------------------------------------------------------------

inline CriterionResult kneser_bound() {
  CriterionResult r;
  std::vector<std::string> specs;
  for (int n = 1; n <= 10; ++n) specs.push_back("Z" + std::to_string(n));
  specs.push_back("Z2xZ4");
  specs.push_back("Z2xZ6");
  std::uint64_t pairs = 0, violations = 0, route_mismatch = 0;
  for (const auto& spec : specs) {
    const FiniteGroup g = parse_group_spec(spec);
    const MaskGroup mg(g);
    const Mask full = mg.full();
    std::vector<int> stab_cache(std::size_t{full} + 1, -1);
    for (Mask a = 1; a <= full; ++a)
      for (Mask b = 1; b <= full; ++b) {
        ++pairs;
        const Mask ab = mg.product(a, b);
        const GroupSubset lib = product_set(subset_of_mask(g, a), subset_of_mask(g, b));
        if (mask_of(lib) != ab) ++route_mismatch;
        if (stab_cache[ab] < 0) {
          const Mask h = mg.left_stabilizer(ab);
          if (mask_of(stabilizer(subset_of_mask(g, ab)).members()) != h) ++route_mismatch;
          stab_cache[ab] = static_cast<int>(h);
        }
        const Mask h = static_cast<Mask>(stab_cache[ab]);
        const int ah = pop(mg.product(a, h)), bh = pop(mg.product(b, h));
        if (pop(ab) < ah + bh - pop(h)) ++violations;
      }
  }
  r.pass = violations == 0 && route_mismatch == 0;
  r.summary = std::to_string(pairs) + " pairs, " + std::to_string(violations) + " violations";
  r.diagnostics = {{"groups", specs}, {"pairs", pairs}, {"violations", violations}, {"route_mismatch", route_mismatch}};
  return r;
}

inline CriterionResult cauchy_davenport() {
  CriterionResult r;
  std::uint64_t pairs = 0, violations = 0, route_mismatch = 0;
  for (std::size_t p : {2, 3, 5, 7, 11}) {
    const FiniteGroup g = build_cyclic(p);
    const MaskGroup mg(g);
    for (Mask a = 1; a <= mg.full(); ++a)
      for (Mask b = 1; b <= mg.full(); ++b) {
        ++pairs;
        const Mask ab = mg.product(a, b);
        if (mask_of(product_set(subset_of_mask(g, a), subset_of_mask(g, b))) != ab) ++route_mismatch;
        if (static_cast<std::size_t>(pop(ab)) < std::min<std::size_t>(p, pop(a) + pop(b) - 1)) ++violations;
      }
  }
  r.pass = violations == 0 && route_mismatch == 0;
  r.summary = std::to_string(pairs) + " pairs, " + std::to_string(violations) + " violations";
  r.diagnostics = {{"primes", {2, 3, 5, 7, 11}}, {"pairs", pairs}, {"violations", violations},
                   {"route_mismatch", route_mismatch}};
  return r;
}

inline CriterionResult kneser_certificates() {
  CriterionResult r;
  std::uint64_t subcritical = 0, bad = 0, errors = 0;
  nlohmann::json first_bad;
  for (std::size_t n = 1; n <= 10; ++n) {
    const FiniteGroup g = build_cyclic(n);
    const MaskGroup mg(g);
    for (Mask a = 1; a <= mg.full(); ++a)
      for (Mask b = 1; b <= mg.full(); ++b) {
        const int nab = pop(mg.product(a, b));
        if (nab >= std::min<int>(static_cast<int>(n), pop(a) + pop(b))) continue;
        ++subcritical;
        const GroupSubset sa = subset_of_mask(g, a), sb = subset_of_mask(g, b);
        try {
          const ReductionCertificate c = kneser_reduce(sa, sb);
          const CertificateValidation v = validate_certificate(c, sa, sb);
          if (!(c.product_measure_match && c.overshoot_holds && v.ok(true))) {
            ++bad;
            if (first_bad.is_null()) first_bad = {{"n", n}, {"a", subset_json(sa)}, {"b", subset_json(sb)}};
          }
        } catch (const Error& e) {
          ++errors;
          if (first_bad.is_null()) first_bad = e.to_json();
        }
      }
  }
  r.pass = bad == 0 && errors == 0 && subcritical > 0;
  r.summary = std::to_string(subcritical) + " sub-critical pairs, " + std::to_string(bad + errors) + " bad certificates";
  r.diagnostics = {{"subcritical_pairs", subcritical}, {"bad", bad}, {"errors", errors}};
  if (!first_bad.is_null()) r.diagnostics["first_bad"] = first_bad;
  return r;
}

inline CriterionResult vosper() {
  CriterionResult r;
  std::uint64_t qualifying = 0, non_ap = 0, ap_pairs = 0, misclassified = 0;
  nlohmann::json per_prime = nlohmann::json::object();
  for (std::size_t p : {5, 7, 11, 13}) {
    const FiniteGroup g = build_cyclic(p);
    const MaskGroup mg(g);
    std::uint64_t q = 0;
    // Same-difference AP pairs with the size constraints, counted directly.
    std::vector<std::vector<char>> ap(p);
    for (std::size_t d = 1; d < p; ++d) {
      ap[d].assign(std::size_t{mg.full()} + 1, 0);
      for (std::size_t start = 0; start < p; ++start)
        for (std::size_t k = 2; k < p; ++k) {
          Mask m = 0;
          for (std::size_t i = 0; i < k; ++i) m |= Mask{1} << ((start + i * d) % p);
          ap[d][m] = 1;
        }
    }
    for (Mask a = 1; a <= mg.full(); ++a) {
      const int na = pop(a);
      if (na < 2) continue;
      for (Mask b = 1; b <= mg.full(); ++b) {
        const int nb = pop(b);
        if (nb < 2 || static_cast<std::size_t>(na + nb - 1) > p - 2) continue;
        bool same_d = false;
        for (std::size_t d = 1; d < p && !same_d; ++d) same_d = ap[d][a] && ap[d][b];
        if (same_d) ++ap_pairs;
        const Mask ab = mg.product(a, b);
        if (pop(ab) != na + nb - 1) continue;
        ++q;
        if (!same_d) ++non_ap;
        try {
          const VosperStructure v = vosper_classify(subset_of_mask(g, a), subset_of_mask(g, b));
          if (v.exceptional || !is_ap(a, p, v.difference) || !is_ap(b, p, v.difference) ||
              v.length_a != static_cast<std::size_t>(na) || v.length_b != static_cast<std::size_t>(nb))
            ++misclassified;
        } catch (const Error&) {
          ++misclassified;
        }
      }
    }
    per_prime[std::to_string(p)] = q;
    qualifying += q;
  }
  r.pass = non_ap == 0 && misclassified == 0 && qualifying == ap_pairs;
  r.summary = std::to_string(qualifying) + " qualifying pairs, " + std::to_string(non_ap) + " non-AP, " +
              std::to_string(misclassified) + " misclassified";
  r.diagnostics = {{"qualifying", per_prime}, {"same_difference_ap_pairs", ap_pairs}, {"non_ap", non_ap},
                   {"misclassified", misclassified}};
  return r;
}

inline CriterionResult dyson_invariants() {
  CriterionResult r;
  std::uint64_t traces = 0, steps = 0, monotone = 0, contain = 0, conserve = 0, critical = 0, route = 0;
  for (std::size_t n = 1; n <= 8; ++n) {
    const FiniteGroup g = build_cyclic(n);
    const MaskGroup mg(g);
    for (Mask a = 1; a <= mg.full(); ++a)
      for (Mask b = 1; b <= mg.full(); ++b) {
        const GroupSubset sa = subset_of_mask(g, a), sb = subset_of_mask(g, b);
        const DysonTrace t = dyson_run(sa, sb);
        ++traces;
        const Mask ab0 = mg.product(a, b);
        const int sum = pop(a) + pop(b);
        const bool crit0 = pop(ab0) == sum && sum < static_cast<int>(n);
        Mask pa = a, pb = b;
        for (const DysonStep& s : t.steps) {
          ++steps;
          const Mask na = mask_of(s.a), nb = mask_of(s.b);
          // x^-1 A ∩ B and A ∪ Bx recomputed from the tables.
          const Element xi = g.inv(s.pivot);
          if (na != (pa | mg.right(s.pivot, pb)) || nb != (mg.left(xi, pa) & pb)) ++route;
          if ((pa & ~na) != 0 || (nb & ~pb) != 0) ++monotone;
          const Mask ab = mg.product(na, nb);
          if ((ab & ~ab0) != 0) ++contain;
          if (pop(na) + pop(nb) != sum) ++conserve;
          if (crit0) {
            const PairTag tag = classify_counts(n, pop(na), pop(nb), pop(ab));
            if (tag != PairTag::CriticalSum && tag != PairTag::SubCritical) ++critical;
          }
          pa = na;
          pb = nb;
        }
      }
  }
  r.pass = monotone + contain + conserve + critical + route == 0;
  r.summary = std::to_string(traces) + " traces, " + std::to_string(steps) + " steps, " +
              std::to_string(monotone + contain + conserve + critical) + " invariant breaks";
  r.diagnostics = {{"traces", traces},       {"steps", steps},     {"monotonicity", monotone},
                   {"containment", contain}, {"conservation", conserve}, {"criticality", critical},
                   {"route_mismatch", route}};
  return r;
}

inline CriterionResult arc_criticality() {
  CriterionResult r;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<long> den(1, 97);
  std::uint64_t plain_bad = 0, twisted_bad = 0;
  constexpr int kPairs = 10000;
  for (int k = 0; k < kPairs; ++k) {
    const long d1 = den(rng), d2 = den(rng), d3 = den(rng), d4 = den(rng);
    const Rational s1 = random_rational(rng, 0, d1 - 1, d1), l1 = random_rational(rng, 0, d2, d2);
    const Rational s2 = random_rational(rng, 0, d3 - 1, d3), l2 = random_rational(rng, 0, d4, d4);
    const Rational m = arcset_measure(arc_sumset(ArcSet::arc(s1, l1), ArcSet::arc(s2, l2)));
    if (m != std::min(Rational(1), l1 + l2)) ++plain_bad;
  }
  for (int k = 0; k < kPairs; ++k) {
    const long d = 2 * den(rng) + 4;
    std::uniform_int_distribution<long> num(1, d / 2 - 2);
    const long a = num(rng);
    std::uniform_int_distribution<long> rest(1, d / 2 - 1 - a);
    const Rational hi(a, 2 * d), hj(rest(rng), 2 * d);  // 2hi + 2hj < 1/2
    const TwistedSet i = TwistedSet::both_signs(ArcSet::symmetric(hi));
    const TwistedSet j = TwistedSet::both_signs(ArcSet::symmetric(hj));
    if (twisted_measure(twisted_product(i, j)) != twisted_measure(i) + twisted_measure(j)) ++twisted_bad;
  }
  r.pass = plain_bad == 0 && twisted_bad == 0;
  r.summary = std::to_string(kPairs) + " arc pairs and " + std::to_string(kPairs) + " twisted pairs, " +
              std::to_string(plain_bad + twisted_bad) + " mismatches";
  r.diagnostics = {{"plain_pairs", kPairs}, {"plain_mismatch", plain_bad}, {"twisted_pairs", kPairs},
                   {"twisted_mismatch", twisted_bad}};
  return r;
}

/// Pullback of [s, s + l] under x -> kx.
inline ArcSet pullback_arc(const Rational& s, const Rational& l, int k) {
  std::vector<Arc> arcs;
  for (int i = 0; i < k; ++i) arcs.push_back({(s + i) / k, l / k});
  return ArcSet(std::move(arcs));
}

inline CriterionResult stability_and_rigidity() {
  CriterionResult r;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> den(3, 64);
  constexpr int kStable = 1000;
  std::uint64_t unstable = 0;
  for (int k = 0; k < kStable; ++k) {
    const long d = den(rng);
    std::uniform_int_distribution<long> la(1, d - 2);
    const long a = la(rng);
    std::uniform_int_distribution<long> lb(1, d - 1 - a);
    const Rational s1 = random_rational(rng, 0, 4 * d - 1, 4 * d), s2 = random_rational(rng, 0, 4 * d - 1, 4 * d);
    if (!is_stable_pair(ArcSet::arc(s1, Rational(a, d)), ArcSet::arc(s2, Rational(lb(rng), d)))) ++unstable;
  }

  constexpr int kFuzz = 1500;
  std::uint64_t contained = 0, witnessed = 0, refuted = 0, bad_witness = 0;
  std::map<std::string, std::uint64_t> rejected;
  std::uniform_int_distribution<int> variant(0, 6), kdist(1, 3);
  for (int trial = 0; trial < kFuzz; ++trial) {
    const long d = den(rng);
    std::uniform_int_distribution<long> la(1, d - 2);
    const long a = la(rng);
    std::uniform_int_distribution<long> lb(1, d - 1 - a);
    const int k = kdist(rng);
    const Rational s1 = random_rational(rng, 0, d - 1, d), s2 = random_rational(rng, 0, d - 1, d);
    const ArcSet a2 = pullback_arc(s1, Rational(a, d), k), b2 = pullback_arc(s2, Rational(lb(rng), d), k);
    auto inside = [&](const ArcSet& s) {
      const Arc& c = s.arcs()[0];
      return c.start + c.length * random_rational(rng, 0, 16, 16);
    };
    auto anywhere = [&] { return random_rational(rng, 0, 4 * d - 1, 4 * d); };
    ArcSet a1 = a2, b1 = b2, a2v = a2, b2v = b2;
    switch (variant(rng)) {
      case 0: break;
      case 1: a1 = ArcSet(a2.arcs(), {}, {inside(a2)}); break;
      case 2: b1 = ArcSet(b2.arcs(), {}, {inside(b2), inside(b2)}); break;
      case 3: a1 = ArcSet(a2.arcs(), {anywhere()}); break;
      case 4: b1 = ArcSet(b2.arcs(), {anywhere()}, {inside(b2)}); break;
      case 5: a1 = shift(a2, Rational(1, 4 * d)); break;
      case 6: a2v = ArcSet(a2.arcs(), {}, {inside(a2)}); break;
    }
    try {
      const RigidityResult res = rigidity_force_containment(a1, b1, a2v, b2v);
      if (res.contained) {
        ++contained;
        if (!arcset_contained(a1, a2v) || !arcset_contained(b1, b2v)) ++refuted;
      } else if (res.witness) {
        ++witnessed;
        const auto& w = *res.witness;
        const bool stray = w.in_a ? a1.contains(w.point) && !a2v.contains(w.point)
                                  : b1.contains(w.point) && !b2v.contains(w.point);
        if (!stray) ++bad_witness;
      }
    } catch (const Error& e) {
      ++rejected[std::string(to_string(e.code()))];
      if (e.code() == ErrorCode::theorem_violation) ++refuted;
    }
  }
  r.pass = unstable == 0 && refuted == 0 && bad_witness == 0 && contained > 0;
  r.summary = std::to_string(kStable) + " arc pairs (" + std::to_string(unstable) + " unstable), " +
              std::to_string(kFuzz) + " rigidity cases (" + std::to_string(refuted) + " refuted)";
  r.diagnostics = {{"stable_pairs", kStable},   {"unstable", unstable},       {"fuzz_cases", kFuzz},
                   {"contained", contained},    {"witnessed", witnessed},     {"refuted", refuted},
                   {"bad_witness", bad_witness}, {"rejected", rejected}};
  return r;
}

inline CriterionResult bilinear_round_trip() {
  CriterionResult r;
  std::uint64_t maps = 0, cases = 0, mismatch = 0, count_mismatch = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    const FiniteGroup g = build_cyclic(n);
    for (std::size_t m = 1; m <= n; ++m) {
      if (n % m != 0) continue;
      const FiniteGroup t = build_cyclic(m);
      std::uint64_t found = 0;
      for_each_homomorphism(g, t, true, [&](const Homomorphism& pi) {
        ++found;
        for (std::size_t s = 0; s < m; ++s)
          for (std::size_t u = 0; u < m; ++u) {
            ++cases;
            std::vector<Element> alpha(n), beta(n);
            for (std::size_t x = 0; x < n; ++x) {
              alpha[x] = static_cast<Element>((s + pi(static_cast<Element>(x))) % m);
              beta[x] = static_cast<Element>((pi(static_cast<Element>(x)) + u) % m);
            }
            try {
              const BilinearFactorization f = factorize_bilinear(g, t, alpha, beta);
              for (std::size_t x = 0; x < n; ++x)
                if (t.mul(f.s, f.pi(static_cast<Element>(x))) != alpha[x] ||
                    t.mul(f.pi(static_cast<Element>(x)), f.t) != beta[x]) {
                  ++mismatch;
                  break;
                }
            } catch (const Error&) {
              ++mismatch;
            }
          }
        return true;
      });
      // Surjections Z_n -> Z_m send 1 to a unit of Z_m.
      std::uint64_t units = 0;
      for (std::size_t u = 0; u < m; ++u) units += std::gcd(u, m) == 1 ? 1 : 0;
      if (m == 1) units = 1;
      if (found != units) ++count_mismatch;
      maps += found;
    }
  }
  r.pass = mismatch == 0 && count_mismatch == 0;
  r.summary = std::to_string(maps) + " surjections, " + std::to_string(cases) + " (s,t) cases, " +
              std::to_string(mismatch) + " mismatches";
  r.diagnostics = {{"surjections", maps}, {"cases", cases}, {"mismatch", mismatch},
                   {"surjection_count_mismatch", count_mismatch}};
  return r;
}

/// Per normal subgroup data for the relativization sweep.
struct NormalData {
  Mask members = 0;
  int order = 0;
  std::vector<Element> reps;          // least element of each coset
  std::vector<Mask> cosets;           // members of each coset
  std::vector<std::uint8_t> coset_of; // coset index of each element
  std::vector<Mask> local;            // global mask of U -> local bits
  std::vector<std::uint8_t> prod;     // |XY| for local masks X, Y
  std::vector<char> subgroup;         // coset mask is a subgroup of G/U
};

inline NormalData normal_data(const MaskGroup& mg, const Subgroup& u) {
  const FiniteGroup& g = mg.group();
  const std::size_t n = g.order();
  NormalData d;
  d.members = mask_of(u.members());
  d.order = pop(d.members);
  d.coset_of.assign(n, 0xff);
  for (std::size_t x = 0; x < n; ++x) {
    if (d.coset_of[x] != 0xff) continue;
    const Mask c = mg.left(static_cast<Element>(x), d.members);
    for (Mask m = c; m; m &= m - 1) d.coset_of[std::countr_zero(m)] = static_cast<std::uint8_t>(d.reps.size());
    d.reps.push_back(static_cast<Element>(x));
    d.cosets.push_back(c);
  }
  std::vector<Element> elems;
  for (Mask m = d.members; m; m &= m - 1) elems.push_back(static_cast<Element>(std::countr_zero(m)));
  d.local.assign(std::size_t{mg.full()} + 1, 0);
  for (Mask m = 0; m <= mg.full(); ++m) {
    Mask l = 0;
    for (std::size_t i = 0; i < elems.size(); ++i)
      if (m >> elems[i] & 1) l |= Mask{1} << i;
    d.local[m] = l;
  }
  const std::size_t ls = std::size_t{1} << d.order;
  auto global = [&](Mask l) {
    Mask m = 0;
    for (std::size_t i = 0; i < elems.size(); ++i)
      if (l >> i & 1) m |= Mask{1} << elems[i];
    return m;
  };
  d.prod.assign(ls * ls, 0);
  for (Mask x = 1; x < ls; ++x)
    for (Mask y = 1; y < ls; ++y) d.prod[x * ls + y] = static_cast<std::uint8_t>(pop(mg.product(global(x), global(y))));
  const std::size_t k = d.reps.size();
  d.subgroup.assign(std::size_t{1} << k, 0);
  for (Mask c = 1; c < (Mask{1} << k); ++c) {
    bool closed = (c & 1) != 0;
    for (std::size_t i = 0; i < k && closed; ++i)
      for (std::size_t j = 0; j < k && closed; ++j)
        if ((c >> i & 1) && (c >> j & 1) && !(c >> d.coset_of[g.mul(d.reps[i], d.reps[j])] & 1)) closed = false;
    d.subgroup[c] = closed;
  }
  return d;
}

struct SliceVerdict {
  bool capped = false;    // |XY| < min(|U|, |X|+|Y|) for some slice pair
  bool uncapped = false;  // |XY| < |X|+|Y| for some slice pair
};

inline SliceVerdict slice_verdict(const MaskGroup& mg, const NormalData& u, Mask a, Mask b) {
  const FiniteGroup& g = mg.group();
  const std::size_t ls = std::size_t{1} << u.order;
  std::array<Mask, 16> xs{}, ys{};
  const std::size_t k = u.reps.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Element inv = g.inv(u.reps[i]);
    xs[i] = u.local[mg.left(inv, a) & u.members];
    ys[i] = u.local[mg.right(inv, b) & u.members];
  }
  SliceVerdict v;
  for (std::size_t i = 0; i < k; ++i) {
    if (!xs[i]) continue;
    for (std::size_t j = 0; j < k; ++j) {
      if (!ys[j]) continue;
      const int p = u.prod[xs[i] * ls + ys[j]], s = pop(xs[i]) + pop(ys[j]);
      if (p < s) v.uncapped = true;
      if (p < std::min(u.order, s)) v.capped = true;
      if (v.capped) return v;
    }
  }
  return v;
}

struct Conclusions {
  bool supports_equal = false;
  bool support_is_subgroup = false;
  bool constant_slices = false;
  bool all() const { return supports_equal && support_is_subgroup && constant_slices; }
};

inline Conclusions conclusions(const NormalData& u, Mask a, Mask b) {
  Conclusions c;
  Mask ca = 0, cb = 0;
  for (Mask m = a; m; m &= m - 1) ca |= Mask{1} << u.coset_of[std::countr_zero(m)];
  for (Mask m = b; m; m &= m - 1) cb |= Mask{1} << u.coset_of[std::countr_zero(m)];
  c.supports_equal = ca == cb;
  c.support_is_subgroup = u.subgroup[ca] != 0;
  auto constant = [&](Mask s, Mask cs) {
    const int k = pop(cs);
    if (pop(s) % k != 0) return false;
    for (Mask m = cs; m; m &= m - 1)
      if (pop(s & u.cosets[std::countr_zero(m)]) * k != pop(s)) return false;
    return true;
  };
  c.constant_slices = constant(a, ca) && constant(b, cb);
  return c;
}

inline CriterionResult relativization_dichotomy() {
  CriterionResult r;
  nlohmann::json groups = nlohmann::json::array();
  std::uint64_t tot_crit = 0, tot_nonlocal_capped = 0, tot_nonlocal_uncapped = 0;
  std::uint64_t tot_inst_capped = 0, tot_fail_capped = 0, tot_inst_uncapped = 0, tot_fail_uncapped = 0;
  std::uint64_t sampled = 0, route_mismatch = 0;
  for (const auto& spec : small_group_specs()) {
    const FiniteGroup g = parse_group_spec(spec);
    const std::size_t n = g.order();
    const MaskGroup mg(g);
    std::vector<NormalData> normals;
    for (const Subgroup& u : subgroups(g, true))
      if (u.order() != 1 && u.order() != n) normals.push_back(normal_data(mg, u));
    // Count CriticalSum pairs first so library checks can be spread evenly.
    std::uint64_t crit = 0;
    std::vector<std::uint8_t> size_ok;
    for (Mask a = 1; a <= mg.full(); ++a)
      for (Mask b = 1; b <= mg.full(); ++b) {
        const int s = pop(a) + pop(b);
        if (s < static_cast<int>(n) && pop(mg.product(a, b)) == s) ++crit;
      }
    const std::uint64_t stride = std::max<std::uint64_t>(1, crit / 400);
    std::uint64_t idx = 0, nonlocal_c = 0, nonlocal_u = 0, inst_c = 0, fail_c = 0, inst_u = 0, fail_u = 0;
    nlohmann::json example;
    for (Mask a = 1; a <= mg.full(); ++a)
      for (Mask b = 1; b <= mg.full(); ++b) {
        const int s = pop(a) + pop(b);
        if (s >= static_cast<int>(n) || pop(mg.product(a, b)) != s) continue;
        bool local_c = false, local_u = false;
        std::vector<std::pair<std::size_t, Conclusions>> capped_instances;
        for (std::size_t k = 0; k < normals.size(); ++k) {
          const NormalData& u = normals[k];
          const SliceVerdict v = slice_verdict(mg, u, a, b);
          local_c = local_c || v.capped;
          local_u = local_u || v.uncapped;
          if (!(a & u.members) || !(b & u.members)) continue;
          const Conclusions c = conclusions(u, a, b);
          if (!v.capped) {
            ++inst_c;
            if (!c.all()) {
              ++fail_c;
              if (example.is_null())
                example = {{"a", subset_json(subset_of_mask(g, a))},
                           {"b", subset_json(subset_of_mask(g, b))},
                           {"u", subset_json(subset_of_mask(g, u.members))}};
            }
            capped_instances.emplace_back(k, c);
          }
          if (!v.uncapped) {
            ++inst_u;
            if (!c.all()) ++fail_u;
          }
        }
        if (!local_c) ++nonlocal_c;
        if (!local_u) ++nonlocal_u;
        if (idx++ % stride == 0) {
          ++sampled;
          const GroupSubset sa = subset_of_mask(g, a), sb = subset_of_mask(g, b);
          if (detect_local_subcritical(sa, sb).has_value() != local_c) ++route_mismatch;
          for (const auto& [k, c] : capped_instances) {
            const Subgroup u = Subgroup::make(subset_of_mask(g, normals[k].members));
            const RelativizeResult rel = relativize(sa, sb, u);
            if (rel.outcome == RelativizeOutcome::locally_subcritical && rel.local &&
                rel.local->u == u)
              ++route_mismatch;  // no slice pair in U was sub-critical
            else if (rel.outcome != RelativizeOutcome::locally_subcritical &&
                     (rel.supports_equal != c.supports_equal || rel.support_is_subgroup != c.support_is_subgroup ||
                      rel.constant_slices != c.constant_slices))
              ++route_mismatch;
          }
        }
      }
    nlohmann::json row{{"group", spec},
                       {"critical_sum_pairs", crit},
                       {"not_locally_subcritical", nonlocal_c},
                       {"not_locally_subcritical_uncapped", nonlocal_u},
                       {"relativization_instances", inst_c},
                       {"relativization_failures", fail_c},
                       {"relativization_instances_uncapped", inst_u},
                       {"relativization_failures_uncapped", fail_u}};
    if (!example.is_null()) row["first_failure"] = example;
    groups.push_back(row);
    tot_crit += crit;
    tot_nonlocal_capped += nonlocal_c;
    tot_nonlocal_uncapped += nonlocal_u;
    tot_inst_capped += inst_c;
    tot_fail_capped += fail_c;
    tot_inst_uncapped += inst_u;
    tot_fail_uncapped += fail_u;
  }
  r.pass = tot_nonlocal_capped == 0 && tot_fail_capped == 0 && route_mismatch == 0;
  r.summary = std::to_string(tot_crit) + " CriticalSum pairs, " + std::to_string(tot_nonlocal_capped) +
              " not locally sub-critical, " + std::to_string(tot_fail_capped) + "/" +
              std::to_string(tot_inst_capped) + " balanced instances break the slice conclusions";
  r.diagnostics = {{"groups", groups},
                   {"critical_sum_pairs", tot_crit},
                   {"capped",
                    {{"not_locally_subcritical", tot_nonlocal_capped},
                     {"instances", tot_inst_capped},
                     {"failures", tot_fail_capped}}},
                   {"uncapped",
                    {{"not_locally_subcritical", tot_nonlocal_uncapped},
                     {"instances", tot_inst_uncapped},
                     {"failures", tot_fail_uncapped}}},
                   {"library_samples", sampled},
                   {"route_mismatch", route_mismatch}};
  return r;
}

inline CriterionResult sturmian_round_trip() {
  CriterionResult r;
  std::uint64_t pairs = 0, not_critical = 0, missed = 0, invalid = 0, measure_mismatch = 0;
  for (DiscreteModel model : {DiscreteModel::cyclic_product, DiscreteModel::dihedral}) {
    for (std::size_t n = 1; n <= 12; ++n)
      for (std::size_t m = 6; m <= n; ++m) {
        if (n % m != 0) continue;
        const std::size_t target = model == DiscreteModel::dihedral ? 2 * m : m;
        for (std::size_t ri = 1; 2 * ri + 3 < m; ++ri)
          for (std::size_t rj = 1; 2 * ri + 2 * rj + 1 < m; ++rj)
            for (std::size_t s = 0; s < target; ++s)
              for (std::size_t t = 0; t < target; ++t) {
                const DiscreteSturmian ds = make_discrete_sturmian(
                    {model, n, m, ri, rj, static_cast<Element>(s), static_cast<Element>(t)});
                ++pairs;
                const PairClass c = classify_pair(ds.a, ds.b);
                if (c.tag != PairTag::CriticalSum) {
                  ++not_critical;
                  continue;
                }
                const SturmianSearch found = detect_sturmian_reduction(ds.a, ds.b);
                if (!found.witness) {
                  ++missed;
                  continue;
                }
                const SturmianWitness& w = *found.witness;
                if (!validate_sturmian_witness(w, ds.a, ds.b)) ++invalid;
                if (w.measure_ij != c.measure_ab || w.measure_i < c.measure_a || w.measure_j < c.measure_b ||
                    haar(w.interval_i) != w.measure_i || haar(w.interval_j) != w.measure_j)
                  ++measure_mismatch;
              }
      }
  }
  r.pass = pairs > 0 && not_critical + missed + invalid + measure_mismatch == 0;
  r.summary = std::to_string(pairs) + " discretized pairs, " + std::to_string(not_critical) + " not critical, " +
              std::to_string(missed) + " undetected, " + std::to_string(invalid + measure_mismatch) + " bad witnesses";
  r.diagnostics = {{"pairs", pairs},       {"not_critical", not_critical},        {"undetected", missed},
                   {"invalid_witness", invalid}, {"measure_mismatch", measure_mismatch}};
  return r;
}

}  // namespace detail

inline CriterionResult run_criterion(int id) {
  const auto& list = criteria();
  require(id >= 1 && id <= static_cast<int>(list.size()), ErrorCode::invalid_argument, "unknown criterion",
          {{"criterion", id}});
  static const std::array<std::function<CriterionResult()>, 10> runners{
      detail::kneser_bound,          detail::cauchy_davenport, detail::kneser_certificates,
      detail::vosper,                detail::dyson_invariants, detail::arc_criticality,
      detail::stability_and_rigidity, detail::bilinear_round_trip, detail::relativization_dichotomy,
      detail::sturmian_round_trip};
  const detail::Timer timer;
  CriterionResult r;
  try {
    r = runners[id - 1]();
  } catch (const Error& e) {
    r.pass = false;
    r.summary = std::string("error: ") + e.what();
    r.diagnostics = {{"error", e.to_json()}};
  }
  r.id = id;
  r.name = list[id - 1].name;
  r.budget_seconds = list[id - 1].budget_seconds;
  r.seconds = timer.seconds();
  if (r.seconds > r.budget_seconds) {
    r.pass = false;
    r.diagnostics["over_budget"] = true;
  }
  return r;
}

inline nlohmann::json to_json(const CriterionResult& r) {
  return {{"id", r.id},
          {"name", r.name},
          {"pass", r.pass},
          {"summary", r.summary},
          {"milliseconds", static_cast<std::int64_t>(r.seconds * 1000)},
          {"budget_seconds", static_cast<std::int64_t>(r.budget_seconds)},
          {"diagnostics", r.diagnostics}};
}

}  // namespace critlab::verify
