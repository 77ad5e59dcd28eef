#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "critlab/error.hpp"
#include "critlab/finite_group.hpp"
#include "critlab/group_subset.hpp"

namespace critlab {

/// A subgroup together with its normality flag.
class Subgroup {
 public:
  /// Validates closure and computes normality.
  static Subgroup make(const GroupSubset& members) {
    const FiniteGroup& g = members.group();
    require(members.contains(g.identity()), ErrorCode::not_subgroup, "subgroup must contain the identity");
    bool closed = true;
    members.for_each([&](Element a) {
      if (!closed) return;
      if (!members.contains(g.inv(a))) closed = false;
      members.for_each([&](Element b) {
        if (closed && !members.contains(g.mul(a, b))) closed = false;
      });
    });
    require(closed, ErrorCode::not_subgroup, "set is not closed under the group law",
            {{"members", members.to_string()}});
    return Subgroup(members, compute_normal(members));
  }

  static Subgroup trivial(const FiniteGroup& g) {
    return Subgroup(GroupSubset(g, {g.identity()}), true);
  }
  static Subgroup whole(const FiniteGroup& g) { return Subgroup(GroupSubset::full(g), true); }

  /// Subgroup generated by `gens`.
  static Subgroup generated(const FiniteGroup& g, std::span<const Element> gens) {
    GroupSubset s = GroupSubset::of(g, g.closure(gens));
    const bool normal = compute_normal(s);
    return Subgroup(std::move(s), normal);
  }

  const FiniteGroup& group() const noexcept { return members_.group(); }
  const GroupSubset& members() const noexcept { return members_; }
  bool is_normal() const noexcept { return normal_; }
  std::size_t order() const { return members_.size(); }
  std::size_t index() const { return group().order() / order(); }
  bool contains(Element x) const { return members_.contains(x); }
  std::vector<Element> elements() const { return members_.elements(); }

  friend bool operator==(const Subgroup& a, const Subgroup& b) { return a.members_ == b.members_; }

 private:
  Subgroup(GroupSubset m, bool normal) : members_(std::move(m)), normal_(normal) {}

  static bool compute_normal(const GroupSubset& h) {
    const FiniteGroup& g = h.group();
    if (g.is_abelian()) return true;
    for (Element s : g.generators()) {
      const Element si = g.inv(s);
      bool ok = true;
      h.for_each([&](Element x) {
        if (ok && !h.contains(g.mul(g.mul(s, x), si))) ok = false;
      });
      if (!ok) return false;
    }
    return true;
  }

  GroupSubset members_;
  bool normal_;
};

namespace detail {
struct trusted_t {};
inline constexpr trusted_t trusted{};
}  // namespace detail

/// A group homomorphism given by its element table.
class Homomorphism {
 public:
  /// Validates the homomorphism law on every pair.
  static Homomorphism make(FiniteGroup source, FiniteGroup target, std::vector<Element> map) {
    const std::size_t n = source.order();
    require(map.size() == n, ErrorCode::invalid_homomorphism, "map length differs from source order");
    for (Element v : map)
      require(v < target.order(), ErrorCode::invalid_homomorphism, "map value out of range");
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        require(map[source.mul(static_cast<Element>(a), static_cast<Element>(b))] ==
                    target.mul(map[a], map[b]),
                ErrorCode::invalid_homomorphism, "map does not respect the group law",
                {{"pair", {a, b}}});
    return Homomorphism(detail::trusted, std::move(source), std::move(target), std::move(map));
  }

  /// Caller guarantees the homomorphism law.
  Homomorphism(detail::trusted_t, FiniteGroup source, FiniteGroup target, std::vector<Element> map)
      : src_(std::move(source)), tgt_(std::move(target)), map_(std::move(map)) {
    std::vector<char> hit(tgt_.order(), 0);
    std::size_t cnt = 0;
    for (Element v : map_)
      if (!hit[v]) hit[v] = 1, ++cnt;
    surjective_ = cnt == tgt_.order();
  }

  static Homomorphism identity(const FiniteGroup& g) {
    std::vector<Element> m(g.order());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<Element>(i);
    return Homomorphism(detail::trusted, g, g, std::move(m));
  }

  const FiniteGroup& source() const noexcept { return src_; }
  const FiniteGroup& target() const noexcept { return tgt_; }
  const std::vector<Element>& map() const noexcept { return map_; }
  Element operator()(Element x) const { return map_[x]; }
  bool surjective() const noexcept { return surjective_; }
  bool injective() const { return surjective_ && src_.order() == tgt_.order(); }

  GroupSubset image(const GroupSubset& a) const {
    require(a.group().same_as(src_), ErrorCode::parent_mismatch, "subset is not in the source group");
    GroupSubset out(tgt_);
    a.for_each([&](Element x) { out.insert(map_[x]); });
    return out;
  }

  GroupSubset preimage(const GroupSubset& b) const {
    require(b.group().same_as(tgt_), ErrorCode::parent_mismatch, "subset is not in the target group");
    GroupSubset out(src_);
    for (std::size_t x = 0; x < map_.size(); ++x)
      if (b.contains(map_[x])) out.insert(static_cast<Element>(x));
    return out;
  }

  Subgroup kernel() const { return Subgroup::make(preimage(GroupSubset(tgt_, {tgt_.identity()}))); }

  /// this ∘ other.
  Homomorphism after(const Homomorphism& other) const {
    require(other.tgt_.same_as(src_), ErrorCode::parent_mismatch, "composition domains differ");
    std::vector<Element> m(other.map_.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = map_[other.map_[i]];
    return Homomorphism(detail::trusted, other.src_, tgt_, std::move(m));
  }

  friend bool operator==(const Homomorphism& a, const Homomorphism& b) {
    return a.map_ == b.map_ && a.src_.same_as(b.src_) && a.tgt_.same_as(b.tgt_);
  }

 private:
  FiniteGroup src_;
  FiniteGroup tgt_;
  std::vector<Element> map_;
  bool surjective_ = false;
};

/// All subgroups (or only the normal ones), sorted by order and then by
/// member list. Built from cyclic subgroups by repeated joins with cyclic
/// subgroups; closures are memoized on their member bitsets.
inline std::vector<Subgroup> subgroups(const FiniteGroup& g, bool normal_only = false) {
  const std::size_t n = g.order();
  using Key = std::vector<std::uint64_t>;
  std::map<Key, std::size_t> seen;
  std::vector<std::vector<Element>> gens;
  std::vector<GroupSubset> sets;

  auto add = [&](std::vector<Element> gen) -> bool {
    GroupSubset s = GroupSubset::of(g, g.closure(gen));
    Key key(s.words().begin(), s.words().end());
    if (seen.count(key)) return false;
    seen.emplace(std::move(key), sets.size());
    sets.push_back(std::move(s));
    gens.push_back(std::move(gen));
    return true;
  };

  add({});
  std::vector<std::size_t> cyclic;
  for (std::size_t x = 0; x < n; ++x)
    if (add({static_cast<Element>(x)})) cyclic.push_back(sets.size() - 1);
  std::vector<Element> cyclic_gen;
  for (std::size_t c : cyclic) cyclic_gen.push_back(gens[c][0]);

  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (Element c : cyclic_gen) {
      if (sets[i].contains(c)) continue;
      std::vector<Element> gen = gens[i];
      gen.push_back(c);
      // The closure may already be known; memoization is on the result.
      add(std::move(gen));
    }
  }

  std::vector<Subgroup> out;
  for (const auto& gen : gens) {
    Subgroup h = Subgroup::generated(g, gen);
    if (!normal_only || h.is_normal()) out.push_back(std::move(h));
  }
  std::sort(out.begin(), out.end(), [](const Subgroup& a, const Subgroup& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    return a.elements() < b.elements();
  });
  return out;
}

/// G/N with its canonical surjection. Cosets are represented by their least
/// element index and labelled with that element's label.
struct Quotient {
  FiniteGroup group;
  Homomorphism projection;
  std::vector<Element> representatives;
};

inline Quotient quotient(const FiniteGroup& g, const Subgroup& n) {
  require(n.group().same_as(g), ErrorCode::parent_mismatch, "subgroup belongs to another group");
  require(n.is_normal(), ErrorCode::not_normal, "quotient requires a normal subgroup",
          {{"subgroup", n.members().to_string()}});
  const std::size_t order = g.order();
  constexpr Element unset = ~Element{0};
  std::vector<Element> coset(order, unset);
  std::vector<Element> reps;
  const auto members = n.elements();
  for (std::size_t x = 0; x < order; ++x) {
    if (coset[x] != unset) continue;
    const Element q = static_cast<Element>(reps.size());
    reps.push_back(static_cast<Element>(x));
    for (Element h : members) coset[g.mul(static_cast<Element>(x), h)] = q;
  }
  const std::size_t k = reps.size();
  std::vector<Element> table(k * k);
  std::vector<std::string> labels(k);
  for (std::size_t a = 0; a < k; ++a) {
    labels[a] = g.label(reps[a]);
    for (std::size_t b = 0; b < k; ++b) table[a * k + b] = coset[g.mul(reps[a], reps[b])];
  }
  FiniteGroup q = FiniteGroup::from_table(std::move(table), std::move(labels),
                                          g.name() + "/" + std::to_string(n.order()));
  Homomorphism p(detail::trusted, g, q, std::move(coset));
  return {std::move(q), std::move(p), std::move(reps)};
}

inline constexpr std::uint64_t kHomomorphismBudget = 10'000'000;

/// Calls `visit` on every homomorphism g -> m (or only surjective ones) in
/// lexicographic order of generator images; stops early when `visit`
/// returns false. Throws budget_exceeded if the candidate space exceeds
/// `budget` maps.
inline void for_each_homomorphism(const FiniteGroup& g, const FiniteGroup& m, bool surjective_only,
                                  const std::function<bool(const Homomorphism&)>& visit,
                                  std::uint64_t budget = kHomomorphismBudget) {
  const auto gens = g.generators();
  const std::size_t k = gens.size();
  std::vector<std::vector<Element>> cands(k);
  std::uint64_t space = 1;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t ord = g.element_order(gens[i]);
    for (std::size_t y = 0; y < m.order(); ++y)
      if (ord % m.element_order(static_cast<Element>(y)) == 0) cands[i].push_back(static_cast<Element>(y));
    space *= cands[i].size();
    if (space > budget)
      throw Error(ErrorCode::budget_exceeded, "homomorphism search exceeds candidate budget",
                  {{"budget", budget}, {"source", g.order()}, {"target", m.order()}});
  }

  const std::size_t n = g.order();
  constexpr Element unset = ~Element{0};
  std::vector<std::size_t> digit(k, 0);
  std::vector<Element> map(n), queue;
  queue.reserve(n);
  for (;;) {
    std::fill(map.begin(), map.end(), unset);
    map[g.identity()] = m.identity();
    queue.assign(1, g.identity());
    bool ok = true;
    for (std::size_t qi = 0; qi < queue.size() && ok; ++qi) {
      const Element x = queue[qi];
      for (std::size_t i = 0; i < k; ++i) {
        const Element y = g.mul(x, gens[i]);
        const Element v = m.mul(map[x], cands[i][digit[i]]);
        if (map[y] == unset) {
          map[y] = v;
          queue.push_back(y);
        } else if (map[y] != v) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      Homomorphism h(detail::trusted, g, m, map);
      if ((!surjective_only || h.surjective()) && !visit(h)) return;
    }
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (++digit[i] < cands[i].size()) break;
      digit[i] = 0;
      if (i == 0) return;
    }
    if (k == 0) return;
  }
}

inline std::vector<Homomorphism> homomorphisms(const FiniteGroup& g, const FiniteGroup& m,
                                               bool surjective_only = false,
                                               std::uint64_t budget = kHomomorphismBudget) {
  std::vector<Homomorphism> out;
  for_each_homomorphism(
      g, m, surjective_only, [&](const Homomorphism& h) { return out.push_back(h), true; }, budget);
  return out;
}

inline std::vector<Homomorphism> automorphisms(const FiniteGroup& m,
                                               std::uint64_t budget = kHomomorphismBudget) {
  return homomorphisms(m, m, true, budget);
}

/// First isomorphism g -> h found by homomorphism search.
inline std::optional<Homomorphism> find_isomorphism(const FiniteGroup& g, const FiniteGroup& h,
                                                    std::uint64_t budget = kHomomorphismBudget) {
  if (g.order() != h.order()) return std::nullopt;
  std::optional<Homomorphism> found;
  for_each_homomorphism(
      g, h, true,
      [&](const Homomorphism& f) {
        found = f;
        return false;
      },
      budget);
  return found;
}

}  // namespace critlab
