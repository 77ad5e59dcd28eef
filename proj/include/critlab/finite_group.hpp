#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "critlab/error.hpp"

namespace critlab {

using Element = std::uint32_t;

inline constexpr std::size_t kDefaultOrderCap = 4096;

/// Largest group order the library will construct. CRITLAB_CAP overrides it.
inline std::size_t order_cap() {
  if (const char* env = std::getenv("CRITLAB_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultOrderCap;
}

namespace detail {

inline constexpr std::size_t kMaskOrder = 64;

// Byte-indexed translation tables for groups of order <= 64. Entry
// [(g * bytes + k) * 256 + v] is the mask of {g x} (left) or {x g} (right)
// over the elements x encoded by value v in byte k of a subset mask.
struct MaskTables {
  std::size_t bytes = 0;
  std::vector<std::uint64_t> left;
  std::vector<std::uint64_t> right;
};

struct GroupData {
  std::size_t order = 0;
  std::vector<Element> cayley;
  std::vector<Element> inverse;
  Element identity = 0;
  std::vector<std::string> labels;
  std::string name;
  bool abelian = false;
  std::vector<Element> designated_normal;

  mutable std::once_flag tables_once;
  mutable MaskTables tables;
  mutable std::once_flag gens_once;
  mutable std::vector<Element> generators;
};

}  // namespace detail

/// A finite group stored as a dense Cayley table. Copies share the same
/// immutable table.
class FiniteGroup {
 public:
  /// Validates the table (Latin square, identity, inverses, associativity)
  /// and returns the group. Associativity is checked exhaustively up to
  /// order 256 and on 10^6 seeded random triples above that.
  static FiniteGroup from_table(std::vector<Element> cayley, std::vector<std::string> labels,
                                std::string name = {});

  std::size_t order() const noexcept { return d_->order; }
  Element mul(Element a, Element b) const noexcept { return d_->cayley[a * d_->order + b]; }
  Element inv(Element a) const noexcept { return d_->inverse[a]; }
  Element identity() const noexcept { return d_->identity; }
  std::span<const Element> row(Element a) const {
    return {d_->cayley.data() + a * d_->order, d_->order};
  }
  std::span<const Element> cayley() const { return d_->cayley; }
  const std::string& label(Element a) const { return d_->labels[a]; }
  const std::vector<std::string>& labels() const { return d_->labels; }
  const std::string& name() const { return d_->name; }
  bool is_abelian() const noexcept { return d_->abelian; }

  std::optional<Element> find_label(std::string_view s) const {
    for (std::size_t i = 0; i < d_->order; ++i)
      if (d_->labels[i] == s) return static_cast<Element>(i);
    return std::nullopt;
  }

  std::size_t element_order(Element a) const {
    std::size_t k = 1;
    for (Element x = a; x != d_->identity; x = mul(x, a)) ++k;
    return k;
  }

  /// Sorted members of the subgroup generated by `gens`.
  std::vector<Element> closure(std::span<const Element> gens) const;

  /// A small generating set, chosen greedily by largest closure growth.
  std::span<const Element> generators() const;

  /// Members of the embedded normal factor, for groups built as semidirect
  /// products; empty otherwise.
  std::span<const Element> designated_normal() const { return d_->designated_normal; }

  bool same_as(const FiniteGroup& other) const noexcept {
    return d_ == other.d_ || (d_->order == other.d_->order && d_->cayley == other.d_->cayley);
  }

  bool uses_masks() const noexcept { return d_->order <= detail::kMaskOrder; }

  /// {g x : x in m} for a subset mask m (order <= 64 only).
  std::uint64_t left_mask(Element g, std::uint64_t m) const {
    const auto& t = tables();
    return gather(t.left, t.bytes, g, m);
  }
  /// {x g : x in m} for a subset mask m (order <= 64 only).
  std::uint64_t right_mask(Element g, std::uint64_t m) const {
    const auto& t = tables();
    return gather(t.right, t.bytes, g, m);
  }

  FiniteGroup with_name(std::string name) const;
  FiniteGroup with_designated_normal(std::vector<Element> members) const;

 private:
  explicit FiniteGroup(std::shared_ptr<const detail::GroupData> d) : d_(std::move(d)) {}

  const detail::MaskTables& tables() const;

  static std::uint64_t gather(const std::vector<std::uint64_t>& tab, std::size_t bytes, Element g,
                              std::uint64_t m) {
    std::uint64_t out = 0;
    const std::uint64_t* base = tab.data() + static_cast<std::size_t>(g) * bytes * 256;
    for (std::size_t k = 0; k < bytes && m != 0; ++k, m >>= 8) out |= base[k * 256 + (m & 0xff)];
    return out;
  }

  std::shared_ptr<const detail::GroupData> d_;
};

inline FiniteGroup FiniteGroup::from_table(std::vector<Element> cayley,
                                           std::vector<std::string> labels, std::string name) {
  const std::size_t n2 = cayley.size();
  std::size_t n = 0;
  while (n * n < n2) ++n;
  require(n >= 1 && n * n == n2, ErrorCode::invalid_group, "cayley table is not square",
          {{"entries", n2}});
  require(n <= order_cap(), ErrorCode::cap_exceeded,
          "group order " + std::to_string(n) + " exceeds cap " + std::to_string(order_cap()),
          {{"order", n}, {"cap", order_cap()}});
  if (labels.empty()) {
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  require(labels.size() == n, ErrorCode::invalid_group, "label count does not match order");

  for (Element v : cayley)
    require(v < n, ErrorCode::invalid_group, "cayley entry out of range");
  std::vector<char> seen(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t b = 0; b < n; ++b) {
      require(!seen[cayley[a * n + b]], ErrorCode::invalid_group, "cayley table row repeats an entry",
              {{"row", a}});
      seen[cayley[a * n + b]] = 1;
    }
  }
  for (std::size_t b = 0; b < n; ++b) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t a = 0; a < n; ++a) {
      require(!seen[cayley[a * n + b]], ErrorCode::invalid_group,
              "cayley table column repeats an entry", {{"column", b}});
      seen[cayley[a * n + b]] = 1;
    }
  }

  std::optional<Element> identity;
  for (std::size_t e = 0; e < n && !identity; ++e) {
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x)
      ok = cayley[e * n + x] == x && cayley[x * n + e] == x;
    if (ok) identity = static_cast<Element>(e);
  }
  require(identity.has_value(), ErrorCode::invalid_group, "cayley table has no identity");

  auto mul = [&](std::size_t a, std::size_t b) { return cayley[a * n + b]; };
  if (n <= 256) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        const Element ab = mul(a, b);
        for (std::size_t c = 0; c < n; ++c)
          if (mul(ab, c) != mul(a, mul(b, c)))
            throw Error(ErrorCode::invalid_group, "cayley table is not associative",
                        {{"triple", {a, b, c}}});
      }
  } else {
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int i = 0; i < 1'000'000; ++i) {
      std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
      if (mul(mul(a, b), c) != mul(a, mul(b, c)))
        throw Error(ErrorCode::invalid_group, "cayley table is not associative",
                    {{"triple", {a, b, c}}});
    }
  }

  auto d = std::make_shared<detail::GroupData>();
  d->order = n;
  d->identity = *identity;
  d->inverse.resize(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (mul(a, b) == *identity) {
        d->inverse[a] = static_cast<Element>(b);
        break;
      }
  d->abelian = true;
  for (std::size_t a = 0; a < n && d->abelian; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (mul(a, b) != mul(b, a)) {
        d->abelian = false;
        break;
      }
  d->cayley = std::move(cayley);
  d->labels = std::move(labels);
  d->name = std::move(name);
  return FiniteGroup(std::move(d));
}

inline FiniteGroup FiniteGroup::with_name(std::string name) const {
  auto d = std::make_shared<detail::GroupData>();
  d->order = d_->order;
  d->cayley = d_->cayley;
  d->inverse = d_->inverse;
  d->identity = d_->identity;
  d->labels = d_->labels;
  d->abelian = d_->abelian;
  d->designated_normal = d_->designated_normal;
  d->name = std::move(name);
  return FiniteGroup(std::move(d));
}

inline FiniteGroup FiniteGroup::with_designated_normal(std::vector<Element> members) const {
  auto d = std::make_shared<detail::GroupData>();
  d->order = d_->order;
  d->cayley = d_->cayley;
  d->inverse = d_->inverse;
  d->identity = d_->identity;
  d->labels = d_->labels;
  d->abelian = d_->abelian;
  d->name = d_->name;
  std::sort(members.begin(), members.end());
  d->designated_normal = std::move(members);
  return FiniteGroup(std::move(d));
}

inline const detail::MaskTables& FiniteGroup::tables() const {
  std::call_once(d_->tables_once, [this] {
    auto& t = d_->tables;
    const std::size_t n = d_->order;
    if (n > detail::kMaskOrder)
      throw Error(ErrorCode::invalid_argument, "mask kernel requires order <= 64");
    t.bytes = (n + 7) / 8;
    t.left.assign(n * t.bytes * 256, 0);
    t.right.assign(n * t.bytes * 256, 0);
    for (std::size_t g = 0; g < n; ++g)
      for (std::size_t k = 0; k < t.bytes; ++k)
        for (std::size_t v = 1; v < 256; ++v) {
          std::uint64_t lm = 0, rm = 0;
          for (std::size_t bit = 0; bit < 8; ++bit) {
            if (!(v >> bit & 1)) continue;
            const std::size_t x = k * 8 + bit;
            if (x >= n) continue;
            lm |= std::uint64_t{1} << mul(static_cast<Element>(g), static_cast<Element>(x));
            rm |= std::uint64_t{1} << mul(static_cast<Element>(x), static_cast<Element>(g));
          }
          t.left[(g * t.bytes + k) * 256 + v] = lm;
          t.right[(g * t.bytes + k) * 256 + v] = rm;
        }
  });
  return d_->tables;
}

inline std::vector<Element> FiniteGroup::closure(std::span<const Element> gens) const {
  const std::size_t n = d_->order;
  std::vector<char> in(n, 0);
  std::vector<Element> members{d_->identity};
  in[d_->identity] = 1;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (Element s : gens) {
      const Element y = mul(members[i], s);
      if (!in[y]) {
        in[y] = 1;
        members.push_back(y);
      }
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

inline std::span<const Element> FiniteGroup::generators() const {
  std::call_once(d_->gens_once, [this] {
    const std::size_t n = d_->order;
    std::vector<Element> gens;
    std::vector<Element> current{d_->identity};
    while (current.size() < n) {
      std::vector<char> in(n, 0);
      for (Element x : current) in[x] = 1;
      Element best = 0;
      std::size_t best_size = 0;
      if (n <= 256) {
        for (std::size_t x = 0; x < n; ++x) {
          if (in[x]) continue;
          gens.push_back(static_cast<Element>(x));
          const std::size_t sz = closure(gens).size();
          gens.pop_back();
          if (sz > best_size) {
            best_size = sz;
            best = static_cast<Element>(x);
          }
        }
      } else {
        for (std::size_t x = 0; x < n; ++x) {
          if (in[x]) continue;
          const std::size_t ord = element_order(static_cast<Element>(x));
          if (ord > best_size) {
            best_size = ord;
            best = static_cast<Element>(x);
          }
        }
      }
      gens.push_back(best);
      current = closure(gens);
    }
    d_->generators = std::move(gens);
  });
  return d_->generators;
}

// --- builders -------------------------------------------------------------

/// Z_n under addition; labels "0".."n-1".
inline FiniteGroup build_cyclic(std::size_t n) {
  require(n >= 1 && n <= order_cap(), ErrorCode::cap_exceeded,
          "cyclic order " + std::to_string(n) + " outside [1, " + std::to_string(order_cap()) + "]",
          {{"order", n}, {"cap", order_cap()}});
  std::vector<Element> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = static_cast<Element>((a + b) % n);
  return FiniteGroup::from_table(std::move(t), {}, "Z" + std::to_string(n));
}

/// Direct product with element (a, b) stored at index a * |h| + b.
inline FiniteGroup build_product(const FiniteGroup& g, const FiniteGroup& h) {
  const std::size_t n = g.order(), m = h.order();
  require(n * m <= order_cap(), ErrorCode::cap_exceeded,
          "product order " + std::to_string(n * m) + " exceeds cap " + std::to_string(order_cap()),
          {{"order", n * m}, {"cap", order_cap()}});
  const std::size_t nm = n * m;
  std::vector<Element> t(nm * nm);
  std::vector<std::string> labels(nm);
  for (std::size_t x = 0; x < nm; ++x) {
    labels[x] = "(" + g.label(static_cast<Element>(x / m)) + "," + h.label(static_cast<Element>(x % m)) + ")";
    for (std::size_t y = 0; y < nm; ++y) {
      const Element a = g.mul(static_cast<Element>(x / m), static_cast<Element>(y / m));
      const Element b = h.mul(static_cast<Element>(x % m), static_cast<Element>(y % m));
      t[x * nm + y] = static_cast<Element>(a * m + b);
    }
  }
  return FiniteGroup::from_table(std::move(t), std::move(labels), g.name() + "x" + h.name());
}

/// N ⋊ K data: action[k] is the automorphism c_k of N as an element table.
struct SemidirectSpec {
  FiniteGroup n_part;
  FiniteGroup k_part;
  std::vector<std::vector<Element>> action;
};

/// Pairs (m, p) with (m,p)(n,q) = (m c_p(n), pq), stored at p * |N| + m.
/// The copy of N (pairs with p = e) is recorded as the designated normal
/// subgroup.
inline FiniteGroup build_semidirect(const SemidirectSpec& spec) {
  const FiniteGroup& N = spec.n_part;
  const FiniteGroup& K = spec.k_part;
  const std::size_t n = N.order(), k = K.order();
  require(n * k <= order_cap(), ErrorCode::cap_exceeded,
          "semidirect order " + std::to_string(n * k) + " exceeds cap", {{"order", n * k}});
  require(spec.action.size() == k, ErrorCode::invalid_action, "action must have one entry per K element");
  for (std::size_t p = 0; p < k; ++p) {
    const auto& c = spec.action[p];
    require(c.size() == n, ErrorCode::invalid_action, "action entry has wrong length", {{"k", p}});
    std::vector<char> hit(n, 0);
    for (Element v : c) {
      require(v < n && !hit[v], ErrorCode::invalid_action, "action entry is not a bijection", {{"k", p}});
      hit[v] = 1;
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        require(c[N.mul(static_cast<Element>(a), static_cast<Element>(b))] == N.mul(c[a], c[b]),
                ErrorCode::invalid_action, "action entry is not an automorphism",
                {{"k", p}, {"pair", {a, b}}});
  }
  for (std::size_t a = 0; a < n; ++a)
    require(spec.action[K.identity()][a] == a, ErrorCode::invalid_action,
            "identity of K must act trivially");
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t q = 0; q < k; ++q) {
      const auto& cpq = spec.action[K.mul(static_cast<Element>(p), static_cast<Element>(q))];
      for (std::size_t a = 0; a < n; ++a)
        require(cpq[a] == spec.action[p][spec.action[q][a]], ErrorCode::invalid_action,
                "action is not a homomorphism K -> Aut(N)", {{"pair", {p, q}}});
    }

  const std::size_t nk = n * k;
  std::vector<Element> t(nk * nk);
  std::vector<std::string> labels(nk);
  for (std::size_t x = 0; x < nk; ++x) {
    const Element m = static_cast<Element>(x % n), p = static_cast<Element>(x / n);
    labels[x] = "(" + N.label(m) + "," + K.label(p) + ")";
    for (std::size_t y = 0; y < nk; ++y) {
      const Element nn = static_cast<Element>(y % n), q = static_cast<Element>(y / n);
      const Element first = N.mul(m, spec.action[p][nn]);
      const Element second = K.mul(p, q);
      t[x * nk + y] = static_cast<Element>(second * n + first);
    }
  }
  std::vector<Element> normal(n);
  for (std::size_t a = 0; a < n; ++a) normal[a] = static_cast<Element>(K.identity() * n + a);
  return FiniteGroup::from_table(std::move(t), std::move(labels),
                                 "(" + N.name() + ")sd(" + K.name() + ")")
      .with_designated_normal(std::move(normal));
}

/// D_n = Z_n ⋊ {+,-} acting by negation. Rotation (i,+) has index i and
/// reflection (i,-) has index n + i.
inline FiniteGroup build_dihedral(std::size_t n) {
  require(n >= 1 && 2 * n <= order_cap(), ErrorCode::cap_exceeded, "dihedral order exceeds cap",
          {{"order", 2 * n}});
  FiniteGroup sign = FiniteGroup::from_table({0, 1, 1, 0}, {"+", "-"}, "Z2");
  std::vector<std::vector<Element>> action(2, std::vector<Element>(n));
  for (std::size_t i = 0; i < n; ++i) {
    action[0][i] = static_cast<Element>(i);
    action[1][i] = static_cast<Element>((n - i) % n);
  }
  return build_semidirect({build_cyclic(n), sign, std::move(action)}).with_name("D" + std::to_string(n));
}

/// Dic_n of order 4n: a^k x^j with a^{2n} = e, x^2 = a^n, x a x^-1 = a^-1.
/// Dic_2 is the quaternion group Q8.
inline FiniteGroup build_dicyclic(std::size_t n) {
  require(n >= 1 && 4 * n <= order_cap(), ErrorCode::cap_exceeded, "dicyclic order exceeds cap",
          {{"order", 4 * n}});
  const std::size_t m = 2 * n, total = 4 * n;
  auto idx = [m](std::size_t k, std::size_t j) { return static_cast<Element>(j * m + k % m); };
  std::vector<Element> t(total * total);
  std::vector<std::string> labels(total);
  for (std::size_t x = 0; x < total; ++x) {
    const std::size_t k = x % m, j = x / m;
    labels[x] = "a^" + std::to_string(k) + (j ? "x" : "");
    for (std::size_t y = 0; y < total; ++y) {
      const std::size_t l = y % m, i = y / m;
      Element r;
      if (j == 0) r = idx(k + l, i);
      else if (i == 0) r = idx(k + m - l, 1);
      else r = idx(k + m - l + n, 0);
      t[x * total + y] = r;
    }
  }
  return FiniteGroup::from_table(std::move(t), std::move(labels), "Dic" + std::to_string(n));
}

}  // namespace critlab
