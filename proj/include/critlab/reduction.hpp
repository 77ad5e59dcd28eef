#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "critlab/error.hpp"
#include "critlab/group_core.hpp"
#include "critlab/subset_algebra.hpp"

namespace critlab {

// --- Kneser / Kemperman certificates ---------------------------------------

/// A quotient map p : G -> M = G/H with image sets I = p(A), J = p(B).
struct ReductionCertificate {
  Subgroup kernel;
  Quotient quotient;
  GroupSubset image_i;
  GroupSubset image_j;
  bool product_measure_match = false;  // m_G(AB) = m_M(IJ)
  bool overshoot_holds = false;         // m_M(IJ) = m_M(I) + m_M(J) - m_M({e})
};

namespace detail {

inline ReductionCertificate certify(const GroupSubset& a, const GroupSubset& b, const Subgroup& h) {
  Quotient q = quotient(a.group(), h);
  GroupSubset i = q.projection.image(a);
  GroupSubset j = q.projection.image(b);
  const Fraction mij = haar(product_set(i, j));
  const Fraction unit(1, static_cast<std::int64_t>(q.group.order()));
  ReductionCertificate c{h, std::move(q), i, j, false, false};
  c.product_measure_match = haar(product_set(a, b)) == mij;
  c.overshoot_holds = mij == haar(i) + haar(j) - unit;
  return c;
}

}  // namespace detail

/// Kneser reduction through H = Stab(AB) for abelian G. Throws
/// theorem_violation if a sub-critical pair yields a certificate whose
/// measures do not match or whose overshoot identity fails.
inline ReductionCertificate kneser_reduce(const GroupSubset& a, const GroupSubset& b) {
  require(a.group().is_abelian(), ErrorCode::not_abelian, "kneser_reduce needs an abelian group");
  const PairClass c = classify_pair(a, b);
  require(c.tag == PairTag::SubCritical || c.tag == PairTag::CriticalSum, ErrorCode::wrong_class,
          "kneser_reduce needs a SubCritical or CriticalSum pair",
          {{"class", std::string(to_string(c.tag))}});
  ReductionCertificate cert = detail::certify(a, b, stabilizer(product_set(a, b)));
  if (!cert.product_measure_match || (c.tag == PairTag::SubCritical && !cert.overshoot_holds))
    throw Error(ErrorCode::theorem_violation, "Kneser certificate failed its measure identities",
                {{"a", a.to_string()}, {"b", b.to_string()}});
  return cert;
}

/// Reduction through the largest normal H with ABH = AB; for H normal this
/// is the same as m(AH BH) = m(AB). The overshoot identity is reported but
/// may fail in nonabelian groups. {e} always qualifies.
inline ReductionCertificate kemperman_reduce(const GroupSubset& a, const GroupSubset& b) {
  const PairClass c = classify_pair(a, b);
  require(c.tag == PairTag::SubCritical, ErrorCode::wrong_class,
          "kemperman_reduce needs a SubCritical pair", {{"class", std::string(to_string(c.tag))}});
  const GroupSubset ab = product_set(a, b);
  auto normals = subgroups(a.group(), true);
  for (auto it = normals.rbegin(); it != normals.rend(); ++it)
    if (product_set(ab, it->members()) == ab) return detail::certify(a, b, *it);
  return detail::certify(a, b, Subgroup::trivial(a.group()));
}

/// Result of recomputing a certificate from scratch with plain loops.
struct CertificateValidation {
  bool kernel_normal = false;
  bool projection_matches_kernel = false;
  bool contains_a = false;
  bool contains_b = false;
  bool images_exact = false;
  bool product_measure_match = false;
  bool overshoot_holds = false;

  bool ok(bool require_overshoot) const {
    return kernel_normal && projection_matches_kernel && contains_a && contains_b && images_exact &&
           product_measure_match && (!require_overshoot || overshoot_holds);
  }
};

/// Independent validator: it uses only the Cayley tables and the maps
/// stored in the certificate, never the product or stabilizer kernels.
inline CertificateValidation validate_certificate(const ReductionCertificate& cert,
                                                  const GroupSubset& a, const GroupSubset& b) {
  CertificateValidation v;
  const FiniteGroup& g = a.group();
  const FiniteGroup& m = cert.quotient.group;
  const auto& p = cert.quotient.projection.map();
  const std::size_t n = g.order(), k = m.order();

  v.kernel_normal = true;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t h = 0; h < n; ++h)
      if (cert.kernel.contains(static_cast<Element>(h))) {
        const Element c = g.mul(g.mul(static_cast<Element>(x), static_cast<Element>(h)),
                                g.inv(static_cast<Element>(x)));
        if (!cert.kernel.contains(c)) v.kernel_normal = false;
      }

  v.projection_matches_kernel = p.size() == n;
  for (std::size_t x = 0; x < n && v.projection_matches_kernel; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      const bool same = p[x] == p[y];
      const bool coset = cert.kernel.contains(g.mul(g.inv(static_cast<Element>(x)), static_cast<Element>(y)));
      if (same != coset || p[g.mul(static_cast<Element>(x), static_cast<Element>(y))] != m.mul(p[x], p[y])) {
        v.projection_matches_kernel = false;
        break;
      }
    }
  if (!v.projection_matches_kernel) return v;

  std::vector<char> in_i(k, 0), in_j(k, 0), img_a(k, 0), img_b(k, 0);
  for (std::size_t y = 0; y < k; ++y) {
    in_i[y] = cert.image_i.contains(static_cast<Element>(y));
    in_j[y] = cert.image_j.contains(static_cast<Element>(y));
  }
  v.contains_a = v.contains_b = true;
  for (std::size_t x = 0; x < n; ++x) {
    if (a.contains(static_cast<Element>(x))) v.contains_a &= in_i[p[x]] != 0, img_a[p[x]] = 1;
    if (b.contains(static_cast<Element>(x))) v.contains_b &= in_j[p[x]] != 0, img_b[p[x]] = 1;
  }
  v.images_exact = img_a == in_i && img_b == in_j;

  std::vector<char> ab(n, 0), ij(k, 0);
  std::size_t nab = 0, nij = 0, ni = 0, nj = 0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (a.contains(static_cast<Element>(x)) && b.contains(static_cast<Element>(y))) {
        char& c = ab[g.mul(static_cast<Element>(x), static_cast<Element>(y))];
        if (!c) c = 1, ++nab;
      }
  for (std::size_t x = 0; x < k; ++x) {
    ni += in_i[x] != 0;
    nj += in_j[x] != 0;
    for (std::size_t y = 0; y < k; ++y)
      if (in_i[x] && in_j[y]) {
        char& c = ij[m.mul(static_cast<Element>(x), static_cast<Element>(y))];
        if (!c) c = 1, ++nij;
      }
  }
  // m_G(AB) = m_M(IJ)  <=>  |AB| * k = |IJ| * n
  v.product_measure_match = nab * k == nij * n;
  v.overshoot_holds = nij + 1 == ni + nj;
  return v;
}

// --- Vosper ------------------------------------------------------------------

struct VosperStructure {
  Element difference;
  Element start_a;
  Element start_b;
  std::size_t length_a;
  std::size_t length_b;
  bool exceptional = false;
};

namespace detail {

inline bool is_prime(std::size_t p) {
  if (p < 2) return false;
  for (std::size_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

inline bool is_canonical_cyclic(const FiniteGroup& g) {
  const std::size_t n = g.order();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (g.mul(static_cast<Element>(a), static_cast<Element>(b)) != (a + b) % n) return false;
  return true;
}

/// Start of s as a progression with difference d in Z_p, if it is one.
inline std::optional<Element> ap_start(const GroupSubset& s, std::size_t p, std::size_t d) {
  const std::size_t k = s.size();
  std::optional<Element> start;
  s.for_each([&](Element x) {
    if (start) return;
    if (!s.contains(static_cast<Element>((x + p - d) % p))) start = x;
  });
  if (!start) return std::nullopt;
  for (std::size_t i = 0; i < k; ++i)
    if (!s.contains(static_cast<Element>((*start + i * d) % p))) return std::nullopt;
  return start;
}

}  // namespace detail

/// Structure of a minimal sumset pair in Z_p. The degenerate cases
/// (singletons, |A+B| >= p-1) are rejected rather than classified.
inline VosperStructure vosper_classify(const GroupSubset& a, const GroupSubset& b) {
  a.check_parent(b);
  const FiniteGroup& g = a.group();
  const std::size_t p = g.order();
  require(detail::is_prime(p) && detail::is_canonical_cyclic(g), ErrorCode::vosper_not_prime_cyclic,
          "Vosper classification needs Z_p with p prime");
  require(a.size() >= 2 && b.size() >= 2, ErrorCode::vosper_singleton,
          "Vosper classification needs |A|, |B| >= 2");
  const std::size_t nab = product_set(a, b).size();
  require(nab + 1 < p, ErrorCode::vosper_near_full, "|A+B| >= p-1 is an exceptional case",
          {{"sumset_size", nab}, {"p", p}});
  require(nab + 1 == a.size() + b.size(), ErrorCode::vosper_not_minimal, "|A+B| != |A|+|B|-1",
          {{"sumset_size", nab}});
  for (std::size_t d = 1; 2 * d < p; ++d) {
    auto sa = detail::ap_start(a, p, d);
    auto sb = detail::ap_start(b, p, d);
    if (sa && sb) return {static_cast<Element>(d), *sa, *sb, a.size(), b.size(), false};
  }
  throw Error(ErrorCode::vosper_not_arithmetic, "pair is not a same-difference progression pair");
}

// --- translation-map factorization ------------------------------------------

/// alpha(x) = s pi(x) and beta(y) = pi(y) t.
struct BilinearFactorization {
  Element s;
  Element t;
  Homomorphism pi;
};

/// Factors maps with alpha(x) beta(y) depending only on xy. Every point of
/// the domain is used, and the base points are the identity: s = alpha(e),
/// t = beta(e), pi(x) = s^-1 alpha(x).
inline BilinearFactorization factorize_bilinear(const FiniteGroup& domain, const FiniteGroup& target,
                                                const std::vector<Element>& alpha,
                                                const std::vector<Element>& beta) {
  const std::size_t n = domain.order();
  require(alpha.size() == n && beta.size() == n, ErrorCode::invalid_argument,
          "alpha and beta must have one entry per domain element");
  for (std::size_t x = 0; x < n; ++x)
    require(alpha[x] < target.order() && beta[x] < target.order(), ErrorCode::invalid_argument,
            "map value out of range");
  // alpha(x) beta(x^-1 z) must not depend on x.
  for (std::size_t z = 0; z < n; ++z) {
    const Element ref = target.mul(alpha[domain.identity()], beta[z]);
    for (std::size_t x = 0; x < n; ++x) {
      const Element y = domain.mul(domain.inv(static_cast<Element>(x)), static_cast<Element>(z));
      if (target.mul(alpha[x], beta[y]) != ref)
        throw Error(ErrorCode::not_bilinear, "alpha(x)beta(y) depends on more than xy",
                    {{"pair", {x, y}}, {"versus", {domain.identity(), z}}});
    }
  }
  const Element s = alpha[domain.identity()];
  const Element t = beta[domain.identity()];
  std::vector<Element> pi(n);
  for (std::size_t x = 0; x < n; ++x) pi[x] = target.mul(target.inv(s), alpha[x]);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (pi[domain.mul(static_cast<Element>(x), static_cast<Element>(y))] != target.mul(pi[x], pi[y]))
        throw Error(ErrorCode::not_homomorphism, "derived map is not a homomorphism",
                    {{"pair", {x, y}}});
  for (std::size_t x = 0; x < n; ++x)
    require(target.mul(pi[x], t) == beta[x], ErrorCode::not_bilinear, "beta is not pi(y) t",
            {{"element", x}});
  return {s, t, Homomorphism(detail::trusted, domain, target, std::move(pi))};
}

/// The automorphism alpha of the common target with pi1 = alpha ∘ pi2 and
/// I1 = alpha(I2), for surjections whose pullbacks of I1, I2 coincide.
inline Homomorphism match_pullbacks(const Homomorphism& pi1, const Homomorphism& pi2,
                                    const GroupSubset& i1, const GroupSubset& i2) {
  require(pi1.source().same_as(pi2.source()) && pi1.target().same_as(pi2.target()),
          ErrorCode::parent_mismatch, "maps must share source and target");
  require(pi1.surjective() && pi2.surjective(), ErrorCode::not_surjective, "maps must be surjective");
  const FiniteGroup& h = pi1.target();
  require(i1.group().same_as(h) && i2.group().same_as(h), ErrorCode::parent_mismatch,
          "interval sets must live in the target");
  require(pi1.kernel().members() == pi2.kernel().members(), ErrorCode::kernel_mismatch,
          "maps have different kernels");
  require(stabilizer(i1).order() == 1 && stabilizer(i2).order() == 1,
          ErrorCode::stabilizer_not_trivial, "interval sets must have trivial stabilizer");
  require(pi1.preimage(i1) == pi2.preimage(i2), ErrorCode::no_matching_automorphism,
          "pullbacks differ");
  std::vector<Element> alpha(h.order());
  for (std::size_t x = 0; x < pi1.source().order(); ++x) alpha[pi2(static_cast<Element>(x))] = pi1(static_cast<Element>(x));
  Homomorphism a = Homomorphism::make(h, h, std::move(alpha));
  require(a.image(i2) == i1, ErrorCode::no_matching_automorphism, "alpha(I2) differs from I1");
  return a;
}

/// Splits characters into S and the inverses Š, with Š[k] the inverse of
/// S[k] and S the members whose table precedes their inverse's.
inline std::pair<std::vector<Homomorphism>, std::vector<Homomorphism>> split_characters(
    const std::vector<Homomorphism>& chars) {
  std::vector<Homomorphism> s, sc;
  if (chars.empty()) return {s, sc};
  const FiniteGroup& m = chars.front().target();
  bool cyclic = false;
  for (std::size_t x = 0; x < m.order() && !cyclic; ++x) cyclic = m.element_order(static_cast<Element>(x)) == m.order();
  require(cyclic, ErrorCode::not_cyclic_target, "characters must take values in a cyclic group");
  for (const auto& c : chars)
    require(c.target().same_as(m) && c.source().same_as(chars.front().source()),
            ErrorCode::parent_mismatch, "characters must share source and target");
  for (std::size_t i = 0; i < chars.size(); ++i)
    for (std::size_t j = i + 1; j < chars.size(); ++j)
      require(chars[i].map() != chars[j].map(), ErrorCode::invalid_argument, "duplicate character");
  for (const auto& c : chars) {
    std::vector<Element> inv(c.map().size());
    for (std::size_t x = 0; x < inv.size(); ++x) inv[x] = m.inv(c.map()[x]);
    require(inv != c.map(), ErrorCode::self_inverse_character, "character equals its own inverse");
    const Homomorphism* partner = nullptr;
    for (const auto& d : chars)
      if (d.map() == inv) partner = &d;
    require(partner != nullptr, ErrorCode::missing_inverse_character,
            "inverse of a character is missing from the list");
    if (c.map() < inv) {
      s.push_back(c);
      sc.push_back(*partner);
    }
  }
  return {s, sc};
}

// --- sturmian reduction detection -------------------------------------------

enum class TargetKind { cyclic, dihedral };

constexpr std::string_view to_string(TargetKind k) {
  return k == TargetKind::cyclic ? "cyclic" : "dihedral";
}

/// A ⊆ π^-1(sI), B ⊆ π^-1(Jt), m_G(AB) = m_M(IJ). For cyclic targets I and
/// J are runs {0..len-1}; for D_m they are symmetric runs {-r..r} × {±}.
struct SturmianWitness {
  Homomorphism pi;
  TargetKind kind;
  std::size_t modulus;
  Element s;
  Element t;
  GroupSubset interval_i;
  GroupSubset interval_j;
  Fraction measure_i;
  Fraction measure_j;
  Fraction measure_ij;
};

struct SturmianSearch {
  std::optional<SturmianWitness> witness;
  std::uint64_t candidates = 0;
};

inline constexpr std::uint64_t kSturmianBudget = 1'000'000;

namespace detail {

/// Shortest run {start..start+len-1} of Z_m covering `hit`; ties go to the
/// least start.
inline std::pair<std::size_t, std::size_t> covering_run(const std::vector<char>& hit) {
  const std::size_t m = hit.size();
  std::size_t best_len = m, best_start = 0;
  for (std::size_t start = 0; start < m; ++start) {
    if (!hit[start]) continue;
    // The run from `start` must reach the member farthest ahead of it.
    std::size_t len = 0;
    for (std::size_t k = m; k >= 1; --k)
      if (hit[(start + k - 1) % m]) {
        len = k;
        break;
      }
    if (len < best_len) best_len = len, best_start = start;
  }
  return {best_start, best_len};
}

inline GroupSubset cyclic_run(const FiniteGroup& zm, std::size_t len) {
  GroupSubset s(zm);
  for (std::size_t i = 0; i < len; ++i) s.insert(static_cast<Element>(i));
  return s;
}

/// {(i, ±) : i in [-r, r]} in D_m with the library's dihedral layout.
inline GroupSubset dihedral_run(const FiniteGroup& dm, std::size_t m, std::size_t r) {
  GroupSubset s(dm);
  for (std::size_t i = 0; i <= std::min(r, m); ++i) {
    s.insert(static_cast<Element>(i % m));
    s.insert(static_cast<Element>((m - i % m) % m));
    s.insert(static_cast<Element>(m + i % m));
    s.insert(static_cast<Element>(m + (m - i % m) % m));
  }
  return s;
}

inline std::size_t circular_abs(std::size_t i, std::size_t m) { return std::min(i, m - i); }

}  // namespace detail

/// Searches surjections onto Z_m (m | |G|) and D_m (2m | |G|) in increasing
/// target order, cyclic first on ties, and returns the first witness. Only
/// the group itself and quotient composition are searched; passage to
/// subgroups or supergroups is left to the caller. Throws budget_exceeded
/// when `budget` candidates are examined without a verdict.
inline SturmianSearch detect_sturmian_reduction(const GroupSubset& a, const GroupSubset& b,
                                                std::uint64_t budget = kSturmianBudget) {
  const PairClass cls = classify_pair(a, b);
  require(cls.tag == PairTag::CriticalSum, ErrorCode::wrong_class,
          "sturmian detection needs a CriticalSum pair", {{"class", std::string(to_string(cls.tag))}});
  const FiniteGroup& g = a.group();
  const std::size_t n = g.order();
  const Fraction mab = cls.measure_ab;
  SturmianSearch out;

  auto spend = [&] {
    if (++out.candidates > budget)
      throw Error(ErrorCode::budget_exceeded, "sturmian search budget exhausted",
                  {{"budget", budget}});
  };

  for (std::size_t order = 2; order <= n && !out.witness; ++order) {
    if (n % order != 0) continue;
    for (TargetKind kind : {TargetKind::cyclic, TargetKind::dihedral}) {
      if (out.witness) break;
      std::size_t m = order;
      if (kind == TargetKind::dihedral) {
        if (order % 2 != 0 || order < 4) continue;
        m = order / 2;
      }
      const FiniteGroup target = kind == TargetKind::cyclic ? build_cyclic(m) : build_dihedral(m);
      for_each_homomorphism(
          g, target, true,
          [&](const Homomorphism& pi) {
            spend();
            const GroupSubset pa = pi.image(a), pb = pi.image(b);
            if (kind == TargetKind::cyclic) {
              std::vector<char> ha(m), hb(m);
              pa.for_each([&](Element x) { ha[x] = 1; });
              pb.for_each([&](Element x) { hb[x] = 1; });
              const auto [sa, la] = detail::covering_run(ha);
              const auto [sb, lb] = detail::covering_run(hb);
              GroupSubset ri = detail::cyclic_run(target, la), rj = detail::cyclic_run(target, lb);
              const Fraction mij = haar(product_set(ri, rj));
              if (mij != mab) return true;
              out.witness = SturmianWitness{pi, kind, m, static_cast<Element>(sa), static_cast<Element>(sb),
                                            ri, rj, haar(ri), haar(rj), mij};
              return false;
            }
            // Dihedral: minimal radius over all left shifts s and right shifts t.
            auto radius = [&](const GroupSubset& p, Element shift, bool left) {
              std::size_t r = 0;
              p.for_each([&](Element x) {
                const Element y = left ? target.mul(target.inv(shift), x) : target.mul(x, target.inv(shift));
                r = std::max(r, detail::circular_abs(y % m, m));
              });
              return r;
            };
            std::size_t best_ra = m, best_rb = m;
            Element s = 0, t = 0;
            for (std::size_t x = 0; x < 2 * m; ++x) {
              const std::size_t ra = radius(pa, static_cast<Element>(x), true);
              const std::size_t rb = radius(pb, static_cast<Element>(x), false);
              if (ra < best_ra) best_ra = ra, s = static_cast<Element>(x);
              if (rb < best_rb) best_rb = rb, t = static_cast<Element>(x);
            }
            GroupSubset ri = detail::dihedral_run(target, m, best_ra);
            GroupSubset rj = detail::dihedral_run(target, m, best_rb);
            const Fraction mij = haar(product_set(ri, rj));
            if (mij != mab) return true;
            out.witness = SturmianWitness{pi, kind, m, s, t, ri, rj, haar(ri), haar(rj), mij};
            return false;
          });
    }
  }
  return out;
}

/// Checks a witness against its defining conditions using plain loops.
inline bool validate_sturmian_witness(const SturmianWitness& w, const GroupSubset& a,
                                      const GroupSubset& b) {
  const FiniteGroup& g = a.group();
  const FiniteGroup& m = w.pi.target();
  const std::size_t n = g.order(), k = m.order();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (w.pi(g.mul(static_cast<Element>(x), static_cast<Element>(y))) !=
          m.mul(w.pi(static_cast<Element>(x)), w.pi(static_cast<Element>(y))))
        return false;
  for (std::size_t x = 0; x < n; ++x) {
    const Element px = w.pi(static_cast<Element>(x));
    if (a.contains(static_cast<Element>(x)) && !w.interval_i.contains(m.mul(m.inv(w.s), px))) return false;
    if (b.contains(static_cast<Element>(x)) && !w.interval_j.contains(m.mul(px, m.inv(w.t)))) return false;
  }
  std::vector<char> ab(n, 0), ij(k, 0);
  std::size_t nab = 0, nij = 0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (a.contains(static_cast<Element>(x)) && b.contains(static_cast<Element>(y)) &&
          !ab[g.mul(static_cast<Element>(x), static_cast<Element>(y))])
        ab[g.mul(static_cast<Element>(x), static_cast<Element>(y))] = 1, ++nab;
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t y = 0; y < k; ++y)
      if (w.interval_i.contains(static_cast<Element>(x)) && w.interval_j.contains(static_cast<Element>(y)) &&
          !ij[m.mul(static_cast<Element>(x), static_cast<Element>(y))])
        ij[m.mul(static_cast<Element>(x), static_cast<Element>(y))] = 1, ++nij;
  return nab * k == nij * n;
}

}  // namespace critlab
