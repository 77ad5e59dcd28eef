#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "critlab/error.hpp"
#include "critlab/finite_group.hpp"

namespace critlab {

/// A subset of a finite group stored as a bitset over element indices.
class GroupSubset {
 public:
  using Words = boost::container::small_vector<std::uint64_t, 2>;

  explicit GroupSubset(FiniteGroup g) : g_(std::move(g)), w_((g_.order() + 63) / 64, 0) {}

  GroupSubset(FiniteGroup g, std::initializer_list<Element> xs) : GroupSubset(std::move(g)) {
    for (Element x : xs) insert(x);
  }

  static GroupSubset of(const FiniteGroup& g, const std::vector<Element>& xs) {
    GroupSubset s(g);
    for (Element x : xs) s.insert(x);
    return s;
  }

  static GroupSubset full(const FiniteGroup& g) {
    GroupSubset s(g);
    for (std::size_t x = 0; x < g.order(); ++x) s.insert(static_cast<Element>(x));
    return s;
  }

  /// Subset of a group of order <= 64 from its mask.
  static GroupSubset from_mask(const FiniteGroup& g, std::uint64_t m) {
    GroupSubset s(g);
    s.w_[0] = m;
    return s;
  }

  const FiniteGroup& group() const noexcept { return g_; }
  std::size_t universe() const noexcept { return g_.order(); }

  bool contains(Element x) const { return x < g_.order() && (w_[x >> 6] >> (x & 63) & 1); }
  void insert(Element x) {
    require(x < g_.order(), ErrorCode::invalid_argument, "element index out of range",
            {{"element", x}, {"order", g_.order()}});
    w_[x >> 6] |= std::uint64_t{1} << (x & 63);
  }
  void erase(Element x) {
    if (x < g_.order()) w_[x >> 6] &= ~(std::uint64_t{1} << (x & 63));
  }

  std::size_t size() const noexcept {
    std::size_t c = 0;
    for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool empty() const noexcept {
    for (auto w : w_)
      if (w) return false;
    return true;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      for (std::uint64_t w = w_[i]; w; w &= w - 1)
        f(static_cast<Element>(i * 64 + static_cast<std::size_t>(std::countr_zero(w))));
  }

  std::vector<Element> elements() const {
    std::vector<Element> out;
    out.reserve(size());
    for_each([&](Element x) { out.push_back(x); });
    return out;
  }

  /// Least member; the set must be nonempty.
  Element first() const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i]) return static_cast<Element>(i * 64 + static_cast<std::size_t>(std::countr_zero(w_[i])));
    throw Error(ErrorCode::empty_input, "first() of empty subset");
  }

  std::uint64_t mask() const noexcept { return w_[0]; }
  const Words& words() const noexcept { return w_; }
  Words& words() noexcept { return w_; }

  bool subset_of(const GroupSubset& o) const {
    check_parent(o);
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }

  GroupSubset& operator|=(const GroupSubset& o) { return combine(o, [](auto a, auto b) { return a | b; }); }
  GroupSubset& operator&=(const GroupSubset& o) { return combine(o, [](auto a, auto b) { return a & b; }); }
  GroupSubset& operator-=(const GroupSubset& o) { return combine(o, [](auto a, auto b) { return a & ~b; }); }
  GroupSubset& operator^=(const GroupSubset& o) { return combine(o, [](auto a, auto b) { return a ^ b; }); }

  friend GroupSubset operator|(GroupSubset a, const GroupSubset& b) { return a |= b; }
  friend GroupSubset operator&(GroupSubset a, const GroupSubset& b) { return a &= b; }
  friend GroupSubset operator-(GroupSubset a, const GroupSubset& b) { return a -= b; }
  friend GroupSubset operator^(GroupSubset a, const GroupSubset& b) { return a ^= b; }

  GroupSubset complement() const {
    GroupSubset c = full(g_);
    return c -= *this;
  }

  friend bool operator==(const GroupSubset& a, const GroupSubset& b) {
    return a.g_.same_as(b.g_) && a.w_ == b.w_;
  }

  /// "{l1,l2,...}" using element labels.
  std::string to_string() const {
    std::string s = "{";
    bool first_item = true;
    for_each([&](Element x) {
      if (!first_item) s += ",";
      s += g_.label(x);
      first_item = false;
    });
    return s + "}";
  }

  void check_parent(const GroupSubset& o) const {
    require(g_.same_as(o.g_), ErrorCode::parent_mismatch, "subsets belong to different groups");
  }

 private:
  template <class Op>
  GroupSubset& combine(const GroupSubset& o, Op op) {
    check_parent(o);
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] = op(w_[i], o.w_[i]);
    return *this;
  }

  FiniteGroup g_;
  Words w_;
};

}  // namespace critlab
