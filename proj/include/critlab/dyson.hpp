#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "critlab/error.hpp"
#include "critlab/group_subset.hpp"
#include "critlab/subset_algebra.hpp"

namespace critlab {

/// One e-transform step: (A ∪ Bx, x^-1 A ∩ B). The pivot must lie in A.
inline std::pair<GroupSubset, GroupSubset> dyson_step(const GroupSubset& a, const GroupSubset& b,
                                                      Element x) {
  a.check_parent(b);
  require(!a.empty() && !b.empty(), ErrorCode::empty_input, "dyson step needs nonempty sets");
  require(a.contains(x), ErrorCode::pivot_not_in_set, "pivot is not in A", {{"pivot", x}});
  const FiniteGroup& g = a.group();
  GroupSubset a2 = a | translate(b, x, Side::right);
  GroupSubset b2 = translate(a, g.inv(x), Side::left) & b;
  return {std::move(a2), std::move(b2)};
}

/// Chooses the next pivot, or nothing to stop the run.
struct PivotRule {
  std::string name;
  std::function<std::optional<Element>(const GroupSubset&, const GroupSubset&)> choose;
};

namespace detail {

inline std::size_t dyson_new_b_size(const GroupSubset& a, const GroupSubset& b, Element x) {
  return (translate(a, a.group().inv(x), Side::left) & b).size();
}

}  // namespace detail

/// Least x in A with 0 < |B'| < |B|.
inline PivotRule least_shrinking_pivot() {
  return {"least", [](const GroupSubset& a, const GroupSubset& b) -> std::optional<Element> {
            std::optional<Element> pick;
            a.for_each([&](Element x) {
              if (pick) return;
              const std::size_t s = detail::dyson_new_b_size(a, b, x);
              if (s > 0 && s < b.size()) pick = x;
            });
            return pick;
          }};
}

/// Greatest x in A with 0 < |B'| < |B|.
inline PivotRule greatest_shrinking_pivot() {
  return {"greatest", [](const GroupSubset& a, const GroupSubset& b) -> std::optional<Element> {
            std::optional<Element> pick;
            a.for_each([&](Element x) {
              const std::size_t s = detail::dyson_new_b_size(a, b, x);
              if (s > 0 && s < b.size()) pick = x;
            });
            return pick;
          }};
}

/// x in A with the smallest nonempty |B'| < |B|; least index on ties.
inline PivotRule max_shrink_pivot() {
  return {"max-shrink", [](const GroupSubset& a, const GroupSubset& b) -> std::optional<Element> {
            std::optional<Element> pick;
            std::size_t best = b.size();
            a.for_each([&](Element x) {
              const std::size_t s = detail::dyson_new_b_size(a, b, x);
              if (s > 0 && s < best) best = s, pick = x;
            });
            return pick;
          }};
}

inline PivotRule pivot_rule_by_name(std::string_view name) {
  if (name == "least") return least_shrinking_pivot();
  if (name == "greatest") return greatest_shrinking_pivot();
  if (name == "max-shrink") return max_shrink_pivot();
  throw Error(ErrorCode::invalid_argument, "unknown pivot rule '" + std::string(name) + "'");
}

enum class DysonStop { no_shrinking_pivot, b_is_translate_of_subgroup, step_limit };

constexpr std::string_view to_string(DysonStop s) {
  switch (s) {
    case DysonStop::no_shrinking_pivot: return "no_shrinking_pivot";
    case DysonStop::b_is_translate_of_subgroup: return "b_is_translate_of_subgroup";
    case DysonStop::step_limit: return "step_limit";
  }
  return "unknown";
}

struct DysonStep {
  Element pivot;
  GroupSubset a;
  GroupSubset b;
};

struct DysonTrace {
  GroupSubset a0;
  GroupSubset b0;
  std::vector<DysonStep> steps;
  DysonStop reason;

  const GroupSubset& final_a() const { return steps.empty() ? a0 : steps.back().a; }
  const GroupSubset& final_b() const { return steps.empty() ? b0 : steps.back().b; }
};

struct DysonOptions {
  std::optional<std::size_t> step_limit;  // default |B0| + |G|
  bool unsafe_nonabelian = false;          // no invariant guarantees
};

/// True if B = bH for a subgroup H.
inline bool is_translate_of_subgroup(const GroupSubset& b) {
  if (b.empty()) return false;
  const FiniteGroup& g = b.group();
  const GroupSubset h = translate(b, g.inv(b.first()), Side::left);
  return product_set(h, h) == h;
}

inline DysonTrace dyson_run(const GroupSubset& a, const GroupSubset& b,
                            const PivotRule& rule = least_shrinking_pivot(), DysonOptions opt = {}) {
  a.check_parent(b);
  require(!a.empty() && !b.empty(), ErrorCode::empty_input, "dyson run needs nonempty sets");
  require(a.group().is_abelian() || opt.unsafe_nonabelian, ErrorCode::not_abelian,
          "the e-transform is only exposed for abelian groups");
  const std::size_t limit = opt.step_limit.value_or(b.size() + a.universe());
  DysonTrace t{a, b, {}, DysonStop::no_shrinking_pivot};
  GroupSubset ca = a, cb = b;
  for (;;) {
    const auto x = rule.choose(ca, cb);
    if (!x) {
      t.reason = is_translate_of_subgroup(cb) ? DysonStop::b_is_translate_of_subgroup
                                              : DysonStop::no_shrinking_pivot;
      break;
    }
    if (t.steps.size() >= limit) {
      t.reason = DysonStop::step_limit;
      break;
    }
    auto [na, nb] = dyson_step(ca, cb, *x);
    require(!nb.empty(), ErrorCode::invalid_argument, "pivot rule emptied B", {{"pivot", *x}});
    ca = na;
    cb = nb;
    t.steps.push_back({*x, std::move(na), std::move(nb)});
  }
  return t;
}

}  // namespace critlab
