#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "critlab/error.hpp"
#include "critlab/group_core.hpp"
#include "critlab/subset_algebra.hpp"

namespace critlab {

// Finite model of the measure-theoretic notions below: Haar measure is
// normalized counting measure, so every "conull subset" is the set itself.

namespace detail {

inline void require_normal_in(const Subgroup& n, const FiniteGroup& g) {
  require(n.group().same_as(g), ErrorCode::parent_mismatch, "subgroup belongs to another group");
  require(n.is_normal(), ErrorCode::not_normal, "subgroup must be normal",
          {{"members", n.members().to_string()}});
}

/// Least element of each coset xN, in increasing order.
inline std::vector<Element> coset_reps(const Subgroup& n) {
  const FiniteGroup& g = n.group();
  std::vector<char> seen(g.order(), 0);
  std::vector<Element> reps;
  for (Element x = 0; x < g.order(); ++x) {
    if (seen[x]) continue;
    reps.push_back(x);
    n.members().for_each([&](Element h) { seen[g.mul(x, h)] = 1; });
  }
  return reps;
}

/// |C ∩ xN|; equals |x^-1 C ∩ N| = |C x^-1 ∩ N| for normal N.
inline std::size_t coset_count(const GroupSubset& c, const Subgroup& n, Element x) {
  const FiniteGroup& g = n.group();
  std::size_t k = 0;
  n.members().for_each([&](Element h) { k += c.contains(g.mul(x, h)); });
  return k;
}

}  // namespace detail

/// left: A_x = x^-1 A ∩ N. right: A^x = A x^-1 ∩ N.
inline GroupSubset slice(const GroupSubset& a, const Subgroup& n, Element x, Side side) {
  detail::require_normal_in(n, a.group());
  const FiniteGroup& g = a.group();
  return translate(a, g.inv(x), side) & n.members();
}

struct SliceView {
  FiniteGroup group;
  Subgroup normal;
  std::vector<Element> coset_reps;
  std::vector<GroupSubset> slices;  // slices[k] = A_{coset_reps[k]}
};

/// Slices of A at the least representative of every coset of N.
inline SliceView disintegrate(const GroupSubset& a, const Subgroup& n, Side side = Side::left) {
  detail::require_normal_in(n, a.group());
  SliceView v{a.group(), n, detail::coset_reps(n), {}};
  for (Element x : v.coset_reps) v.slices.push_back(slice(a, n, x, side));
  return v;
}

struct CriticalityViolation {
  std::string condition;  // "slice_a", "slice_b" or "slice_sum"
  Element x = 0;
  Element y = 0;
  Fraction measure_a;
  Fraction measure_b;
  Fraction measure_ab;
};

struct CriticalityWitness {
  bool holds = false;
  Fraction slice_measure_a;  // m_G(A), the common slice measure when holds
  Fraction slice_measure_b;
  std::optional<CriticalityViolation> violating_pair;
};

/// (A, B) is critical with respect to N inside `ambient` (default: all of G):
/// m_N(A_x) = m(A), m_N(B^y) = m(B) and m_N((AB)_{xy}) = m_N(A_x) + m_N(B^y)
/// for every x, y in the ambient subgroup. Under counting measure the conull sets X and Z are
/// all of the ambient group and its square.
inline CriticalityWitness is_critical_wrt(const GroupSubset& a, const GroupSubset& b, const Subgroup& n,
                                          const std::optional<Subgroup>& ambient = std::nullopt) {
  a.check_parent(b);
  detail::require_normal_in(n, a.group());
  require(!a.empty() && !b.empty(), ErrorCode::empty_input, "criticality needs nonempty sets");
  const FiniteGroup& g = a.group();
  const Subgroup l = ambient ? *ambient : Subgroup::whole(g);
  require(n.members().subset_of(l.members()), ErrorCode::invalid_argument, "N must lie in the ambient subgroup");
  require(a.subset_of(l.members()) && b.subset_of(l.members()), ErrorCode::invalid_argument,
          "A and B must lie in the ambient subgroup");
  const std::int64_t nn = static_cast<std::int64_t>(n.order());
  const Fraction ma(static_cast<std::int64_t>(a.size()), static_cast<std::int64_t>(l.order()));
  const Fraction mb(static_cast<std::int64_t>(b.size()), static_cast<std::int64_t>(l.order()));
  CriticalityWitness w{true, ma, mb, std::nullopt};
  const GroupSubset ab = product_set(a, b);

  std::vector<Element> reps;
  for (Element x : detail::coset_reps(n))
    if (l.contains(x)) reps.push_back(x);
  std::vector<Fraction> sa, sb;
  for (Element x : reps) {
    sa.emplace_back(static_cast<std::int64_t>(detail::coset_count(a, n, x)), nn);
    sb.emplace_back(static_cast<std::int64_t>(detail::coset_count(b, n, x)), nn);
  }
  for (std::size_t i = 0; i < reps.size(); ++i)
    if (sa[i] != ma) {
      w.holds = false;
      w.violating_pair = CriticalityViolation{"slice_a", reps[i], reps[i], sa[i], mb, 0};
      return w;
    }
  for (std::size_t i = 0; i < reps.size(); ++i)
    if (sb[i] != mb) {
      w.holds = false;
      w.violating_pair = CriticalityViolation{"slice_b", reps[i], reps[i], ma, sb[i], 0};
      return w;
    }
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = 0; j < reps.size(); ++j) {
      const Element z = g.mul(reps[i], reps[j]);
      const Fraction sab(static_cast<std::int64_t>(detail::coset_count(ab, n, z)), nn);
      if (sab != sa[i] + sb[j]) {
        w.holds = false;
        w.violating_pair = CriticalityViolation{"slice_sum", reps[i], reps[j], sa[i], sb[j], sab};
        return w;
      }
    }
  return w;
}

/// C^+ = {y in G/U : C ∩ Uy ≠ ∅}.
struct SupportSet {
  Quotient quotient;
  GroupSubset cosets;  // subset of quotient.group
};

inline SupportSet support(const GroupSubset& a, const Subgroup& u) {
  detail::require_normal_in(u, a.group());
  Quotient q = quotient(a.group(), u);
  GroupSubset s = q.projection.image(a);
  return {std::move(q), std::move(s)};
}

/// e ∈ A^+. Positivity of m(C_y) on the support is automatic for counting
/// measure.
inline bool is_balanced(const GroupSubset& a, const Subgroup& u) {
  detail::require_normal_in(u, a.group());
  return !(a & u.members()).empty();
}

struct LocalWitness {
  Subgroup u;
  Element x;
  Element y;
  std::size_t slice_a;   // |x^-1 A ∩ U|
  std::size_t slice_b;   // |B y^-1 ∩ U|
  std::size_t slice_ab;  // |(x^-1 A ∩ U)(B y^-1 ∩ U)|
};

struct LocalSearchOptions {
  bool widen = false;  // also search subgroups that are not normal
};

namespace detail {

/// First (x, y) with both slices nonempty and SubCritical inside U.
inline std::optional<LocalWitness> subcritical_slice_pair(const GroupSubset& a, const GroupSubset& b,
                                                          const Subgroup& u) {
  const FiniteGroup& g = a.group();
  const std::size_t n = g.order();
  // x ranges over least elements of left cosets xU, y over right cosets Uy.
  std::vector<char> lseen(n, 0), rseen(n, 0);
  std::vector<Element> xs, ys;
  for (Element x = 0; x < n; ++x) {
    if (!lseen[x]) {
      xs.push_back(x);
      u.members().for_each([&](Element h) { lseen[g.mul(x, h)] = 1; });
    }
    if (!rseen[x]) {
      ys.push_back(x);
      u.members().for_each([&](Element h) { rseen[g.mul(h, x)] = 1; });
    }
  }
  std::vector<GroupSubset> as, bs;
  for (Element x : xs) as.push_back(translate(a, g.inv(x), Side::left) & u.members());
  for (Element y : ys) bs.push_back(translate(b, g.inv(y), Side::right) & u.members());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (as[i].empty()) continue;
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (bs[j].empty()) continue;
      const std::size_t k = product_set(as[i], bs[j]).size();
      if (classify_counts(u.order(), as[i].size(), bs[j].size(), k) == PairTag::SubCritical)
        return LocalWitness{u, xs[i], ys[j], as[i].size(), bs[j].size(), k};
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Searches proper nontrivial normal subgroups U in increasing order for a
/// translated slice pair (x^-1 A ∩ U, B y^-1 ∩ U) that is SubCritical in U.
/// The trivial subgroup is skipped: with it every pair would qualify.
inline std::optional<LocalWitness> detect_local_subcritical(const GroupSubset& a, const GroupSubset& b,
                                                            LocalSearchOptions opt = {}) {
  a.check_parent(b);
  const FiniteGroup& g = a.group();
  for (const Subgroup& u : subgroups(g, !opt.widen)) {
    if (u.order() == 1 || u.order() == g.order()) continue;
    if (auto w = detail::subcritical_slice_pair(a, b, u)) return w;
  }
  return std::nullopt;
}

enum class RelativizeOutcome { locally_subcritical, critical_wrt_u_in_l, conclusions_violated };

constexpr std::string_view to_string(RelativizeOutcome o) {
  switch (o) {
    case RelativizeOutcome::locally_subcritical: return "locally_subcritical";
    case RelativizeOutcome::critical_wrt_u_in_l: return "critical_wrt_u_in_L";
    case RelativizeOutcome::conclusions_violated: return "conclusions_violated";
  }
  return "unknown";
}

struct RelativizeResult {
  RelativizeOutcome outcome;
  std::optional<LocalWitness> local;       // locally_subcritical
  std::optional<Subgroup> l;               // critical_wrt_u_in_l: L = A^+ U
  std::optional<CriticalityWitness> witness;
  bool supports_equal = false;             // A^+ = B^+
  bool support_is_subgroup = false;        // A^+ < G/U
  bool constant_slices = false;            // m(A ∩ Ux) = m(A)/|A^+|, same for B
};

/// For a U-balanced CriticalSum pair: either some slice pair in U is
/// SubCritical, or A^+ = B^+ is a subgroup of G/U, slices have constant
/// measure m(A)/|A^+|, and (A, B) is critical with respect to U inside
/// L = A^+ U. When neither holds the pair is checked for local
/// sub-criticality through other subgroups.
inline RelativizeResult relativize(const GroupSubset& a, const GroupSubset& b, const Subgroup& u) {
  a.check_parent(b);
  detail::require_normal_in(u, a.group());
  require(!a.empty() && !b.empty(), ErrorCode::empty_input, "relativization needs nonempty sets");
  require(is_balanced(a, u) && is_balanced(b, u), ErrorCode::not_balanced, "pair is not U-balanced");
  const PairClass cls = classify_pair(a, b);
  require(cls.tag == PairTag::CriticalSum, ErrorCode::wrong_class, "relativization needs a CriticalSum pair",
          {{"class", std::string(to_string(cls.tag))}});

  RelativizeResult r{RelativizeOutcome::conclusions_violated, std::nullopt, std::nullopt, std::nullopt};
  if (auto w = detail::subcritical_slice_pair(a, b, u)) {
    r.outcome = RelativizeOutcome::locally_subcritical;
    r.local = std::move(w);
    return r;
  }

  const SupportSet sa = support(a, u), sb = support(b, u);
  r.supports_equal = sa.cosets == sb.cosets;
  r.support_is_subgroup = product_set(sa.cosets, sa.cosets) == sa.cosets;
  auto constant = [&](const GroupSubset& c, const SupportSet& s) {
    const std::size_t k = s.cosets.size();
    if (c.size() % k != 0) return false;
    bool ok = true;
    s.cosets.for_each([&](Element coset) {
      const Element x = s.quotient.representatives[coset];
      ok = ok && detail::coset_count(c, u, x) * k == c.size();
    });
    return ok;
  };
  r.constant_slices = constant(a, sa) && constant(b, sb);

  if (r.supports_equal && r.support_is_subgroup && r.constant_slices) {
    Subgroup l = Subgroup::make(sa.quotient.projection.preimage(sa.cosets));
    r.witness = is_critical_wrt(a, b, u, l);
    if (r.witness->holds) {
      r.outcome = RelativizeOutcome::critical_wrt_u_in_l;
      r.l = std::move(l);
      return r;
    }
  }
  if (auto w = detect_local_subcritical(a, b)) {
    r.outcome = RelativizeOutcome::locally_subcritical;
    r.local = std::move(w);
    return r;
  }
  return r;
}

struct ChainResult {
  bool holds = false;               // critical w.r.t. every N_k
  bool intersection_holds = false;  // critical w.r.t. the intersection
  std::vector<CriticalityWitness> levels;
  Subgroup intersection;
};

/// Criticality with respect to each member of a decreasing chain of normal
/// subgroups and with respect to its intersection, which for a finite chain
/// is its last member.
inline ChainResult check_chain_criticality(const GroupSubset& a, const GroupSubset& b,
                                           const std::vector<Subgroup>& chain) {
  require(!chain.empty(), ErrorCode::invalid_argument, "chain must be nonempty");
  for (const auto& n : chain) detail::require_normal_in(n, a.group());
  for (std::size_t k = 1; k < chain.size(); ++k)
    require(chain[k].members().subset_of(chain[k - 1].members()), ErrorCode::not_decreasing,
            "chain must be decreasing", {{"position", k}});
  ChainResult r{true, false, {}, chain.back()};
  for (const auto& n : chain) {
    r.levels.push_back(is_critical_wrt(a, b, n));
    r.holds = r.holds && r.levels.back().holds;
  }
  GroupSubset meet = chain.front().members();
  for (const auto& n : chain) meet = meet & n.members();
  r.intersection = Subgroup::make(meet);
  r.intersection_holds = is_critical_wrt(a, b, r.intersection).holds;
  require(!r.holds || r.intersection_holds, ErrorCode::theorem_violation,
          "criticality along the chain did not pass to the intersection");
  return r;
}

}  // namespace critlab
