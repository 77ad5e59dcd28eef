#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "critlab/error.hpp"
#include "critlab/finite_group.hpp"
#include "critlab/group_subset.hpp"

namespace critlab {

namespace detail {

inline std::size_t parse_count(std::string_view s, std::string_view whole) {
  if (s.empty() || s.size() > 6)
    throw Error(ErrorCode::parse_error, "bad group size in '" + std::string(whole) + "'",
                {{"input", std::string(whole)}});
  std::size_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9')
      throw Error(ErrorCode::parse_error, "bad group size in '" + std::string(whole) + "'",
                  {{"input", std::string(whole)}});
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  if (v == 0)
    throw Error(ErrorCode::parse_error, "group size must be positive in '" + std::string(whole) + "'",
                {{"input", std::string(whole)}});
  return v;
}

/// Automorphism table of N used as the image of the generator 1 of Z_m.
inline std::vector<Element> action_generator(const FiniteGroup& n, std::string_view id,
                                             std::string_view whole) {
  const std::size_t order = n.order();
  std::vector<Element> c(order);
  if (id == "id") {
    for (std::size_t x = 0; x < order; ++x) c[x] = static_cast<Element>(x);
    return c;
  }
  if (id == "neg") {
    require(n.is_abelian(), ErrorCode::invalid_action, "negation action needs an abelian N");
    for (std::size_t x = 0; x < order; ++x) c[x] = n.inv(static_cast<Element>(x));
    return c;
  }
  if (id.substr(0, 4) == "mul:") {
    require(n.name() == "Z" + std::to_string(order), ErrorCode::invalid_action,
            "mul:r action needs a cyclic N");
    long r = 0;
    try {
      r = std::stol(std::string(id.substr(4)));
    } catch (...) {
      throw Error(ErrorCode::parse_error, "bad multiplier in '" + std::string(whole) + "'");
    }
    const long m = static_cast<long>(order);
    for (long x = 0; x < m; ++x) c[static_cast<std::size_t>(x)] = static_cast<Element>(((r * x) % m + m) % m);
    return c;
  }
  if (id == "cycle") {
    require(n.name() == "Z2xZ2", ErrorCode::invalid_action, "cycle action needs N = Z2xZ2");
    // (a,b) -> (b,a+b) permutes the three involutions cyclically.
    for (std::size_t x = 0; x < 4; ++x) {
      const std::size_t a = x / 2, b = x % 2;
      c[x] = static_cast<Element>(b * 2 + (a ^ b));
    }
    return c;
  }
  throw Error(ErrorCode::parse_error, "unknown action '" + std::string(id) + "'",
              {{"input", std::string(whole)}});
}

}  // namespace detail

/// Group spec mini-language: Zn, ZaxZb[xZc...], Dn, S3, Q8, A4, Dicn, and
/// sd:N,K,action where K is cyclic and action is one of id, neg, mul:r,
/// cycle (the generator 1 of K acts by the named automorphism).
inline FiniteGroup parse_group_spec(std::string_view spec) {
  const std::string whole(spec);
  if (spec.substr(0, 3) == "sd:") {
    const std::string_view body = spec.substr(3);
    const auto c1 = body.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : body.find(',', c1 + 1);
    if (c2 == std::string_view::npos)
      throw Error(ErrorCode::parse_error, "expected sd:N,K,action in '" + whole + "'", {{"input", whole}});
    FiniteGroup n = parse_group_spec(body.substr(0, c1));
    const std::string_view kspec = body.substr(c1 + 1, c2 - c1 - 1);
    if (kspec.empty() || kspec[0] != 'Z' || kspec.find('x') != std::string_view::npos)
      throw Error(ErrorCode::parse_error, "K must be cyclic in '" + whole + "'", {{"input", whole}});
    FiniteGroup k = build_cyclic(detail::parse_count(kspec.substr(1), spec));
    const auto gen = detail::action_generator(n, body.substr(c2 + 1), spec);
    std::vector<std::vector<Element>> action(k.order(), std::vector<Element>(n.order()));
    for (std::size_t x = 0; x < n.order(); ++x) action[0][x] = static_cast<Element>(x);
    for (std::size_t p = 1; p < k.order(); ++p)
      for (std::size_t x = 0; x < n.order(); ++x) action[p][x] = gen[action[p - 1][x]];
    return build_semidirect({n, k, std::move(action)}).with_name(whole);
  }
  if (spec == "S3") return build_dihedral(3).with_name("S3");
  if (spec == "Q8") return build_dicyclic(2).with_name("Q8");
  if (spec == "A4") return parse_group_spec("sd:Z2xZ2,Z3,cycle").with_name("A4");
  if (spec.substr(0, 3) == "Dic") return build_dicyclic(detail::parse_count(spec.substr(3), spec));
  if (!spec.empty() && spec[0] == 'D') return build_dihedral(detail::parse_count(spec.substr(1), spec));
  if (!spec.empty() && spec[0] == 'Z') {
    std::vector<std::size_t> parts;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
      auto x = spec.find('x', pos);
      std::string_view tok = spec.substr(pos, x == std::string_view::npos ? std::string_view::npos : x - pos);
      if (tok.empty() || tok[0] != 'Z')
        throw Error(ErrorCode::parse_error, "bad product factor in '" + whole + "'",
                    {{"input", whole}, {"position", pos}});
      parts.push_back(detail::parse_count(tok.substr(1), spec));
      if (x == std::string_view::npos) break;
      pos = x + 1;
    }
    FiniteGroup g = build_cyclic(parts[0]);
    for (std::size_t i = 1; i < parts.size(); ++i) g = build_product(g, build_cyclic(parts[i]));
    return g;
  }
  throw Error(ErrorCode::parse_error, "unrecognized group spec '" + whole + "'", {{"input", whole}});
}

/// Specs of the 24 groups of order at most 12, one per isomorphism class,
/// ordered by group order.
inline const std::vector<std::string>& small_group_specs() {
  static const std::vector<std::string> specs{
      "Z1", "Z2", "Z3", "Z4", "Z2xZ2", "Z5", "Z6", "S3", "Z7", "Z8", "Z2xZ4", "Z2xZ2xZ2",
      "D4", "Q8", "Z9", "Z3xZ3", "Z10", "D5", "Z11", "Z12", "Z2xZ6", "D6", "A4", "Dic3"};
  return specs;
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace detail

/// Subset literal: comma-separated element labels or index ranges such as
/// "0-3,7". Commas inside parentheses belong to labels like "(1,-)".
/// Optional surrounding braces are ignored; "" and "{}" are empty.
inline GroupSubset parse_subset(const FiniteGroup& g, std::string_view text) {
  GroupSubset out(g);
  std::size_t base = 0;
  if (text.size() >= 2 && text.front() == '{' && text.back() == '}') {
    text = text.substr(1, text.size() - 2);
    base = 1;
  }
  auto fail = [&](std::size_t pos, const std::string& msg) {
    throw Error(ErrorCode::parse_error, msg + " at position " + std::to_string(base + pos),
                {{"position", base + pos}, {"input", std::string(text)}});
  };
  if (text.empty()) return out;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    const char c = i < text.size() ? text[i] : ',';
    if (c == '(') ++depth;
    if (c == ')') {
      if (--depth < 0) fail(i, "unbalanced ')'");
    }
    if (c != ',' || depth > 0) continue;
    std::string_view item = text.substr(start, i - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1), ++start;
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    if (item.empty()) fail(start, "empty element");
    if (auto e = g.find_label(item)) {
      out.insert(*e);
    } else {
      const auto dash = item.find('-', 1);
      std::string_view lo = item.substr(0, dash);
      std::string_view hi = dash == std::string_view::npos ? lo : item.substr(dash + 1);
      if (!detail::all_digits(lo) || !detail::all_digits(hi) || lo.size() > 9 || hi.size() > 9)
        fail(start, "unknown element '" + std::string(item) + "'");
      const std::size_t a = std::stoul(std::string(lo)), b = std::stoul(std::string(hi));
      if (a > b) fail(start, "empty range '" + std::string(item) + "'");
      if (b >= g.order()) fail(start, "index out of range in '" + std::string(item) + "'");
      for (std::size_t x = a; x <= b; ++x) out.insert(static_cast<Element>(x));
    }
    start = i + 1;
  }
  if (depth != 0) fail(text.size(), "unbalanced '('");
  return out;
}

/// JSON array of element indices or labels.
inline GroupSubset subset_from_json(const FiniteGroup& g, const nlohmann::json& j) {
  require(j.is_array(), ErrorCode::parse_error, "subset must be a JSON array");
  GroupSubset out(g);
  for (const auto& v : j) {
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
      const auto x = v.get<unsigned long long>();
      require(x < g.order(), ErrorCode::parse_error, "element index out of range", {{"element", x}});
      out.insert(static_cast<Element>(x));
    } else if (v.is_string()) {
      auto e = g.find_label(v.get<std::string>());
      require(e.has_value(), ErrorCode::parse_error, "unknown element label", {{"label", v}});
      out.insert(*e);
    } else {
      throw Error(ErrorCode::parse_error, "subset entries must be indices or labels");
    }
  }
  return out;
}

}  // namespace critlab
