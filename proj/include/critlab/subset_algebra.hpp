#pragma once

#include <cstdint>
#include <string_view>

#include "critlab/error.hpp"
#include "critlab/group_core.hpp"
#include "critlab/group_subset.hpp"
#include "critlab/rational.hpp"

namespace critlab {

enum class Side { left, right };

/// Normalized counting measure |A| / |G|.
using HaarValue = Fraction;

inline HaarValue haar(const GroupSubset& a) {
  return HaarValue(static_cast<std::int64_t>(a.size()), static_cast<std::int64_t>(a.universe()));
}

/// AB = {ab : a in A, b in B}.
inline GroupSubset product_set(const GroupSubset& a, const GroupSubset& b) {
  a.check_parent(b);
  const FiniteGroup& g = a.group();
  GroupSubset out(g);
  if (a.empty() || b.empty()) return out;
  if (g.uses_masks()) {
    std::uint64_t m = 0;
    const std::uint64_t bm = b.mask();
    a.for_each([&](Element x) { m |= g.left_mask(x, bm); });
    out.words()[0] = m;
    return out;
  }
  auto& w = out.words();
  const auto bs = b.elements();
  a.for_each([&](Element x) {
    const auto row = g.row(x);
    for (Element y : bs) {
      const Element z = row[y];
      w[z >> 6] |= std::uint64_t{1} << (z & 63);
    }
  });
  return out;
}

inline GroupSubset translate(const GroupSubset& a, Element x, Side side) {
  const FiniteGroup& g = a.group();
  GroupSubset out(g);
  if (g.uses_masks()) {
    out.words()[0] = side == Side::left ? g.left_mask(x, a.mask()) : g.right_mask(x, a.mask());
    return out;
  }
  a.for_each([&](Element y) { out.insert(side == Side::left ? g.mul(x, y) : g.mul(y, x)); });
  return out;
}

inline GroupSubset invert(const GroupSubset& a) {
  const FiniteGroup& g = a.group();
  GroupSubset out(g);
  a.for_each([&](Element y) { out.insert(g.inv(y)); });
  return out;
}

/// {m : mA = A = Am}.
inline Subgroup stabilizer(const GroupSubset& a) {
  const FiniteGroup& g = a.group();
  GroupSubset s(g);
  for (std::size_t m = 0; m < g.order(); ++m) {
    const Element x = static_cast<Element>(m);
    if (translate(a, x, Side::left) == a && translate(a, x, Side::right) == a) s.insert(x);
  }
  return Subgroup::make(s);
}

enum class PairTag { SubCritical, CriticalSum, CriticalFull, SuperCritical };

constexpr std::string_view to_string(PairTag t) {
  switch (t) {
    case PairTag::SubCritical: return "SubCritical";
    case PairTag::CriticalSum: return "CriticalSum";
    case PairTag::CriticalFull: return "CriticalFull";
    case PairTag::SuperCritical: return "SuperCritical";
  }
  return "unknown";
}

struct PairClass {
  PairTag tag;
  Fraction deficit;  // m(A) + m(B) - m(AB)
  Fraction measure_a, measure_b, measure_ab;
};

/// Classification from cardinalities in a group of order n.
inline PairTag classify_counts(std::size_t n, std::size_t na, std::size_t nb, std::size_t nab) {
  const std::size_t cap = std::min(n, na + nb);
  if (nab < cap) return PairTag::SubCritical;
  if (nab > cap) return PairTag::SuperCritical;
  return na + nb < n ? PairTag::CriticalSum : PairTag::CriticalFull;
}

inline PairClass classify_pair(const GroupSubset& a, const GroupSubset& b) {
  a.check_parent(b);
  require(!a.empty() && !b.empty(), ErrorCode::empty_input, "classification needs nonempty sets");
  const GroupSubset ab = product_set(a, b);
  const std::size_t n = a.universe();
  PairClass c{classify_counts(n, a.size(), b.size(), ab.size()), {}, haar(a), haar(b), haar(ab)};
  c.deficit = c.measure_a + c.measure_b - c.measure_ab;
  return c;
}

}  // namespace critlab
