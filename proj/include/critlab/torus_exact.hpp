#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "critlab/error.hpp"
#include "critlab/group_core.hpp"
#include "critlab/rational.hpp"
#include "critlab/subset_algebra.hpp"

namespace critlab {

/// Closed arc [start, start + length] on Q/Z. length 1 is the full circle.
struct Arc {
  Rational start;
  Rational length;

  Rational end() const { return start + length; }
  bool contains(const Rational& x) const {
    return length >= 1 || mod_one(x - start) <= length;
  }
  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Finite union of closed arcs, with finitely many points added or removed.
/// Kept canonical: arcs sorted by start, pairwise disjoint and non-touching,
/// at most the last one wraps past 1. Added points lie outside the arcs and
/// removed points inside them.
class ArcSet {
 public:
  ArcSet() = default;
  explicit ArcSet(std::vector<Arc> arcs, std::vector<Rational> added = {},
                  std::vector<Rational> removed = {}) {
    assign(std::move(arcs), std::move(added), std::move(removed));
  }

  static ArcSet full() { return ArcSet({Arc{0, 1}}); }
  static ArcSet arc(const Rational& start, const Rational& length) { return ArcSet({Arc{start, length}}); }
  static ArcSet point(const Rational& x) { return ArcSet({Arc{x, 0}}); }
  /// [-h, h].
  static ArcSet symmetric(const Rational& half) { return ArcSet({Arc{-half, 2 * half}}); }

  const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  const std::vector<Rational>& added() const noexcept { return added_; }
  const std::vector<Rational>& removed() const noexcept { return removed_; }

  bool empty() const noexcept { return arcs_.empty() && added_.empty(); }
  bool has_points() const noexcept { return !added_.empty() || !removed_.empty(); }
  bool is_full() const { return arcs_.size() == 1 && arcs_[0].length >= 1; }

  bool in_arcs(const Rational& x) const {
    return std::any_of(arcs_.begin(), arcs_.end(), [&](const Arc& a) { return a.contains(x); });
  }

  bool contains(const Rational& x) const {
    const Rational y = mod_one(x);
    if (std::binary_search(added_.begin(), added_.end(), y)) return true;
    return in_arcs(y) && !std::binary_search(removed_.begin(), removed_.end(), y);
  }

  /// Same set with the point corrections dropped.
  ArcSet closed_part() const { return ArcSet(arcs_); }

  friend bool operator==(const ArcSet&, const ArcSet&) = default;

 private:
  void assign(std::vector<Arc> arcs, std::vector<Rational> added, std::vector<Rational> removed);

  std::vector<Arc> arcs_;
  std::vector<Rational> added_;
  std::vector<Rational> removed_;
};

namespace detail {

struct Span {
  Rational lo, hi;  // lo <= hi, both in [0, 1]
};

/// Splits arcs into spans of [0, 1].
inline std::vector<Span> linearize(const std::vector<Arc>& arcs) {
  std::vector<Span> out;
  for (const Arc& a : arcs) {
    if (a.length >= 1) {
      out.push_back({0, 1});
      continue;
    }
    const Rational s = mod_one(a.start), e = s + a.length;
    if (e <= 1) {
      out.push_back({s, e});
    } else {
      out.push_back({s, 1});
      out.push_back({0, e - 1});
    }
  }
  return out;
}

/// Merges spans and folds a span ending at 1 into one starting at 0.
inline std::vector<Arc> canonical_arcs(std::vector<Span> spans) {
  if (spans.empty()) return {};
  std::sort(spans.begin(), spans.end(), [](const Span& x, const Span& y) { return x.lo < y.lo; });
  std::vector<Span> merged{spans[0]};
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, spans[i].hi);
    else
      merged.push_back(spans[i]);
  }
  if (merged.size() == 1 && merged[0].lo == 0 && merged[0].hi == 1) return {Arc{0, 1}};
  // A span touching 1 and a span touching 0 are one arc through 0.
  if (merged.size() >= 2 && merged.front().lo == 0 && merged.back().hi == 1) {
    merged.back().hi = 1 + merged.front().hi;
    merged.erase(merged.begin());
  }
  std::vector<Arc> out;
  out.reserve(merged.size());
  for (const Span& s : merged) out.push_back(Arc{s.lo, s.hi - s.lo});
  return out;
}

inline std::vector<Rational> sorted_unique(std::vector<Rational> v) {
  for (auto& x : v) x = mod_one(x);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace detail

inline void ArcSet::assign(std::vector<Arc> arcs, std::vector<Rational> added, std::vector<Rational> removed) {
  for (const Arc& a : arcs)
    require(a.length >= 0 && a.length <= 1, ErrorCode::invalid_argument, "arc length outside [0, 1]",
            {{"length", to_string(a.length)}});
  arcs_ = detail::canonical_arcs(detail::linearize(arcs));
  added_.clear();
  removed_.clear();
  for (const Rational& x : detail::sorted_unique(std::move(removed)))
    if (in_arcs(x)) removed_.push_back(x);
  // A removed point that is a whole degenerate arc deletes that arc.
  std::erase_if(arcs_, [&](const Arc& a) {
    return a.length == 0 && std::binary_search(removed_.begin(), removed_.end(), mod_one(a.start));
  });
  std::erase_if(removed_, [&](const Rational& x) { return !in_arcs(x); });
  for (const Rational& x : detail::sorted_unique(std::move(added)))
    if (!in_arcs(x)) added_.push_back(x);
    else std::erase(removed_, x);
}

/// Sum of arc lengths; point corrections are null.
inline Rational arcset_measure(const ArcSet& a) {
  Rational m = 0;
  for (const Arc& x : a.arcs()) m += x.length;
  return m;
}

inline ArcSet negate(const ArcSet& a) {
  std::vector<Arc> arcs;
  for (const Arc& x : a.arcs()) arcs.push_back(Arc{-x.start - x.length, x.length});
  std::vector<Rational> added, removed;
  for (const auto& p : a.added()) added.push_back(-p);
  for (const auto& p : a.removed()) removed.push_back(-p);
  return ArcSet(std::move(arcs), std::move(added), std::move(removed));
}

inline ArcSet shift(const ArcSet& a, const Rational& t) {
  std::vector<Arc> arcs;
  for (const Arc& x : a.arcs()) arcs.push_back(Arc{x.start + t, x.length});
  std::vector<Rational> added, removed;
  for (const auto& p : a.added()) added.push_back(p + t);
  for (const auto& p : a.removed()) removed.push_back(p + t);
  return ArcSet(std::move(arcs), std::move(added), std::move(removed));
}

inline ArcSet arc_union(const ArcSet& a, const ArcSet& b) {
  require(!a.has_points() && !b.has_points(), ErrorCode::point_corrections,
          "union is only defined for closed arc sets");
  std::vector<Arc> arcs = a.arcs();
  arcs.insert(arcs.end(), b.arcs().begin(), b.arcs().end());
  return ArcSet(std::move(arcs));
}

/// Intersection of the closed parts.
inline ArcSet arc_intersection(const ArcSet& a, const ArcSet& b) {
  // A span ending at 1 also holds the point 0.
  auto spans = [](const ArcSet& s) {
    auto v = detail::linearize(s.arcs());
    for (std::size_t k = 0, n = v.size(); k < n; ++k)
      if (v[k].hi == 1) v.push_back({0, 0});
    return v;
  };
  std::vector<detail::Span> out;
  for (const auto& x : spans(a))
    for (const auto& y : spans(b)) {
      Rational lo = std::max(x.lo, y.lo), hi = std::min(x.hi, y.hi);
      if (lo <= hi) out.push_back({lo, hi});
    }
  return ArcSet(detail::canonical_arcs(std::move(out)));
}

/// Minkowski sum modulo 1; [a, a+l] + [c, c+l'] = [a+c, a+c+l+l'].
inline ArcSet arc_sumset(const ArcSet& a, const ArcSet& b) {
  require(!a.has_points() && !b.has_points(), ErrorCode::point_corrections,
          "sumsets of point-corrected sets are not defined");
  std::vector<Arc> arcs;
  for (const Arc& x : a.arcs())
    for (const Arc& y : b.arcs()) {
      const Rational len = x.length + y.length;
      arcs.push_back(len >= 1 ? Arc{0, 1} : Arc{x.start + y.start, len});
    }
  return ArcSet(std::move(arcs));
}

// --- twisted torus T ⋊ {-1, 1} ----------------------------------------------

struct TwistedElement {
  Rational angle;
  bool flip = false;  // sign -1
  friend bool operator==(const TwistedElement&, const TwistedElement&) = default;
};

/// (a, p)(b, q) = (a + p·b, pq).
inline TwistedElement twisted_mul(const TwistedElement& x, const TwistedElement& y) {
  return {mod_one(x.flip ? x.angle - y.angle : x.angle + y.angle), x.flip != y.flip};
}

struct TwistedSet {
  ArcSet plus;
  ArcSet minus;

  static TwistedSet singleton(const TwistedElement& x) {
    TwistedSet s;
    (x.flip ? s.minus : s.plus) = ArcSet::point(x.angle);
    return s;
  }
  /// I ⋊ {-1, 1}.
  static TwistedSet both_signs(const ArcSet& i) { return {i, i}; }

  bool contains(const TwistedElement& x) const { return (x.flip ? minus : plus).contains(x.angle); }
  friend bool operator==(const TwistedSet&, const TwistedSet&) = default;
};

/// Normalized Haar measure: (m(plus) + m(minus)) / 2.
inline Rational twisted_measure(const TwistedSet& a) {
  return (arcset_measure(a.plus) + arcset_measure(a.minus)) / 2;
}

inline TwistedSet twisted_product(const TwistedSet& a, const TwistedSet& b) {
  const ArcSet neg_plus = negate(b.plus), neg_minus = negate(b.minus);
  return {arc_union(arc_sumset(a.plus, b.plus), arc_sumset(a.minus, neg_minus)),
          arc_union(arc_sumset(a.plus, b.minus), arc_sumset(a.minus, neg_plus))};
}

// --- regularity and stability ------------------------------------------------

/// Closure of the interior: no point corrections and no degenerate arcs.
inline bool is_regular(const ArcSet& a) {
  if (a.has_points()) return false;
  return std::all_of(a.arcs().begin(), a.arcs().end(), [](const Arc& x) { return x.length > 0; });
}

namespace detail {

inline bool arc_inside(const Rational& start, const Rational& length, const ArcSet& s) {
  for (const Arc& c : s.arcs()) {
    if (c.length >= 1) return true;
    if (length <= c.length && mod_one(start - c.start) + length <= c.length) return true;
  }
  return false;
}

/// x + J ⊆ S.
inline bool translate_inside(const Rational& x, const ArcSet& j, const ArcSet& s) {
  return std::all_of(j.arcs().begin(), j.arcs().end(),
                     [&](const Arc& a) { return arc_inside(x + a.start, a.length, s); });
}

inline std::vector<Rational> endpoints(const ArcSet& a) {
  std::vector<Rational> out;
  for (const Arc& x : a.arcs()) {
    out.push_back(x.start);
    out.push_back(x.end());
  }
  return out;
}

/// {x : x + J ⊆ I + J} == I. Both sides are finite unions of closed arcs
/// whose endpoints lie in the endpoints of I and the differences (endpoint
/// of I + J) - (endpoint of J), so comparing membership at those candidates
/// and at the midpoints between consecutive ones decides equality.
inline bool one_sided_stable(const ArcSet& i, const ArcSet& j) {
  const ArcSet s = arc_sumset(i, j);
  std::vector<Rational> cand = endpoints(i);
  for (const auto& u : endpoints(s))
    for (const auto& c : endpoints(j)) cand.push_back(u - c);
  cand.push_back(0);
  cand = sorted_unique(std::move(cand));
  std::vector<Rational> probes = cand;
  for (std::size_t k = 0; k < cand.size(); ++k) {
    const Rational next = k + 1 < cand.size() ? cand[k + 1] : cand[0] + 1;
    probes.push_back(mod_one((cand[k] + next) / 2));
  }
  for (const auto& x : probes)
    if (i.contains(x) != translate_inside(x, j, s)) return false;
  return true;
}

}  // namespace detail

/// xJ ⊆ IJ implies x ∈ I.
inline bool is_left_stable(const ArcSet& i, const ArcSet& j) {
  require(!i.has_points() && !j.has_points(), ErrorCode::point_corrections,
          "stability is checked on closed arc sets");
  return detail::one_sided_stable(i, j);
}

/// Iy ⊆ IJ implies y ∈ J.
inline bool is_right_stable(const ArcSet& i, const ArcSet& j) {
  require(!i.has_points() && !j.has_points(), ErrorCode::point_corrections,
          "stability is checked on closed arc sets");
  return detail::one_sided_stable(j, i);
}

inline bool is_stable_pair(const ArcSet& i, const ArcSet& j) {
  return is_left_stable(i, j) && is_right_stable(i, j);
}

// --- sturmian pairs ----------------------------------------------------------

enum class TorusTarget { plain, twisted };

struct SturmianSpec {
  TorusTarget target = TorusTarget::plain;
  Rational half_length_i;
  Rational half_length_j;
  TwistedElement shift_s;  // plain targets ignore the sign
  TwistedElement shift_t;
};

using PlainPair = std::pair<ArcSet, ArcSet>;
using TwistedPair = std::pair<TwistedSet, TwistedSet>;

/// Plain: (s + I, J + t). Twisted: (s·Ĩ, J̃·t) with Ĩ = I ⋊ {-1, 1}.
/// I and J are the closed arcs symmetric about 0 with the given half-lengths.
inline std::variant<PlainPair, TwistedPair> make_sturmian(const SturmianSpec& spec) {
  require(spec.half_length_i > 0 && spec.half_length_j > 0, ErrorCode::invalid_argument,
          "half-lengths must be positive");
  require(2 * spec.half_length_i + 2 * spec.half_length_j < 1, ErrorCode::invalid_argument,
          "m(I) + m(J) must be below 1",
          {{"sum", to_string(2 * spec.half_length_i + 2 * spec.half_length_j)}});
  const ArcSet i = ArcSet::symmetric(spec.half_length_i);
  const ArcSet j = ArcSet::symmetric(spec.half_length_j);
  if (spec.target == TorusTarget::plain)
    return PlainPair{shift(i, spec.shift_s.angle), shift(j, spec.shift_t.angle)};
  return TwistedPair{twisted_product(TwistedSet::singleton(spec.shift_s), TwistedSet::both_signs(i)),
                     twisted_product(TwistedSet::both_signs(j), TwistedSet::singleton(spec.shift_t))};
}

enum class DiscreteModel { dihedral, cyclic_product };

constexpr std::string_view to_string(DiscreteModel m) {
  return m == DiscreteModel::dihedral ? "dihedral" : "cyclic_product";
}

/// Discretized sturmian pair pulled back along a quotient map.
/// dihedral: D_n -> D_m, (I' ⋊ {±}, J ⋊ {±}).
/// cyclic_product: Z2 x Z_n -> Z_m, (b mod m), (I', J).
/// I' = {-ri..ri} \ {0} and J = {-rj..rj} in Z_m, so |I'J| = |I'| + |J|.
struct DiscreteSturmianSpec {
  DiscreteModel model = DiscreteModel::cyclic_product;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t radius_i = 1;
  std::size_t radius_j = 1;
  Element s = 0;  // target elements
  Element t = 0;
};

struct DiscreteSturmian {
  FiniteGroup group;
  Homomorphism pi;
  GroupSubset model_i;  // s·I' (or s·Ĩ') in the target
  GroupSubset model_j;  // J·t (or J̃·t)
  GroupSubset a;
  GroupSubset b;
};

inline DiscreteSturmian make_discrete_sturmian(const DiscreteSturmianSpec& spec) {
  const std::size_t n = spec.n, m = spec.m;
  require(m >= 1 && n >= 1 && n % m == 0, ErrorCode::invalid_argument, "m must divide n",
          {{"n", n}, {"m", m}});
  require(spec.radius_i >= 1 && spec.radius_j >= 1, ErrorCode::invalid_argument, "radii must be positive");
  require(2 * spec.radius_i + 2 * spec.radius_j + 1 < m, ErrorCode::invalid_argument,
          "model pair must be a proper CriticalSum pair in Z_m",
          {{"radius_i", spec.radius_i}, {"radius_j", spec.radius_j}, {"m", m}});
  const bool dihedral = spec.model == DiscreteModel::dihedral;
  FiniteGroup g = dihedral ? build_dihedral(n) : build_product(build_cyclic(2), build_cyclic(n));
  FiniteGroup target = dihedral ? build_dihedral(m) : build_cyclic(m);
  require(spec.s < target.order() && spec.t < target.order(), ErrorCode::invalid_argument,
          "shift outside the target group");
  std::vector<Element> map(g.order());
  for (std::size_t x = 0; x < g.order(); ++x)
    map[x] = dihedral ? static_cast<Element>((x / n) * m + (x % n) % m) : static_cast<Element>((x % n) % m);
  Homomorphism pi = Homomorphism::make(g, target, std::move(map));

  auto run = [&](std::size_t r, bool skip_zero) {
    GroupSubset s(target);
    for (std::size_t k = 0; k <= r; ++k) {
      if (k == 0 && skip_zero) continue;
      for (std::size_t v : {k % m, (m - k % m) % m}) {
        s.insert(static_cast<Element>(v));
        if (dihedral) s.insert(static_cast<Element>(m + v));
      }
    }
    return s;
  };
  GroupSubset mi = translate(run(spec.radius_i, true), spec.s, Side::left);
  GroupSubset mj = translate(run(spec.radius_j, false), spec.t, Side::right);
  GroupSubset a = pi.preimage(mi), b = pi.preimage(mj);
  return {std::move(g), std::move(pi), std::move(mi), std::move(mj), std::move(a), std::move(b)};
}

// --- rigidity ----------------------------------------------------------------

/// A1 ⊆ A2 and B1 ⊆ B2, as sets including point corrections. Written
/// independently of the arc canonicalization.
inline bool arcset_contained(const ArcSet& x, const ArcSet& y) {
  for (const Arc& a : x.arcs()) {
    if (!y.in_arcs(a.start) || !y.in_arcs(a.end())) return false;
    bool inside = false;
    for (const Arc& c : y.arcs())
      if (c.length >= 1 || (mod_one(a.start - c.start) + a.length <= c.length)) inside = true;
    if (!inside) return false;
  }
  for (const auto& p : x.added())
    if (!y.contains(p)) return false;
  for (const auto& p : y.removed())
    if (x.contains(p)) return false;
  return true;
}

struct RigidityWitness {
  Rational point;
  bool in_a = true;  // false: the point lies in B1 \ B2
  Rational excess;   // m((x + B2) \ A2B2) or m((A2 + y) \ A2B2)
};

struct RigidityResult {
  bool contained = false;
  std::optional<RigidityWitness> witness;
};

namespace detail {

/// m(XY) for point-corrected sets: removed points of positive-length arcs
/// change XY only at finitely many points, added points act as degenerate
/// arcs.
inline Rational corrected_product_measure(const ArcSet& x, const ArcSet& y) {
  auto closure = [](const ArcSet& s) {
    std::vector<Arc> arcs = s.arcs();
    for (const auto& p : s.added()) arcs.push_back(Arc{p, 0});
    return ArcSet(std::move(arcs));
  };
  return arcset_measure(arc_sumset(closure(x), closure(y)));
}

inline Rational excess_measure(const ArcSet& translate_of, const ArcSet& product) {
  return arcset_measure(translate_of) - arcset_measure(arc_intersection(translate_of, product));
}

}  // namespace detail

/// Almost-equal critical pairs with (A2, B2) stable and regular satisfy
/// A1 ⊆ A2 and B1 ⊆ B2. Points of A1 \ A2 or B1 \ B2 are reported with the
/// measure they add to the product, which is positive whenever the
/// preconditions hold.
inline RigidityResult rigidity_force_containment(const ArcSet& a1, const ArcSet& b1, const ArcSet& a2,
                                                 const ArcSet& b2) {
  require(a1.arcs() == a2.arcs() && b1.arcs() == b2.arcs(), ErrorCode::not_almost_equal,
          "pairs must agree up to finitely many points");
  require(is_regular(a2) && is_regular(b2), ErrorCode::not_regular, "(A2, B2) must be regular sets");
  const ArcSet ab2 = arc_sumset(a2, b2);
  const Rational ma = arcset_measure(a2), mb = arcset_measure(b2);
  require(ma + mb < 1 && arcset_measure(ab2) == ma + mb, ErrorCode::not_critical,
          "(A2, B2) is not a CriticalSum pair", {{"m_ab", to_string(arcset_measure(ab2))}});
  require(is_stable_pair(a2, b2), ErrorCode::not_stable, "(A2, B2) is not stable");
  RigidityResult out;
  for (const auto& x : a1.added())
    if (!a2.contains(x)) {
      out.witness = RigidityWitness{x, true, detail::excess_measure(shift(b2, x), ab2)};
      break;
    }
  if (!out.witness)
    for (const auto& y : b1.added())
      if (!b2.contains(y)) {
        out.witness = RigidityWitness{y, false, detail::excess_measure(shift(a2, y), ab2)};
        break;
      }
  const Rational m1 = detail::corrected_product_measure(a1, b1);
  if (m1 != arcset_measure(a1) + arcset_measure(b1)) {
    nlohmann::json details{{"m_ab", to_string(m1)}};
    if (out.witness)
      details["witness"] = {{"point", to_string(out.witness->point)},
                            {"side", out.witness->in_a ? "A" : "B"},
                            {"excess", to_string(out.witness->excess)}};
    throw Error(ErrorCode::not_critical, "(A1, B1) is not a CriticalSum pair", std::move(details));
  }
  if (out.witness) {
    // Critical yet a stray point adds measure: the sets were not almost equal
    // in the sense the argument needs.
    require(out.witness->excess > 0, ErrorCode::theorem_violation,
            "stray point adds no measure to a stable product", {{"point", to_string(out.witness->point)}});
    return out;
  }
  // Only removals remain, and a2, b2 carry no corrections.
  out.contained = true;
  return out;
}

}  // namespace critlab
