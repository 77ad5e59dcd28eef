#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "critlab/catalog.hpp"
#include "critlab/dyson.hpp"
#include "critlab/error.hpp"
#include "critlab/finite_group.hpp"
#include "critlab/group_core.hpp"
#include "critlab/rational.hpp"
#include "critlab/reduction.hpp"
#include "critlab/relative.hpp"
#include "critlab/subset_algebra.hpp"
#include "critlab/torus_exact.hpp"

namespace critlab {

using nlohmann::json;

inline constexpr std::string_view kVersion = "0.1.0";

// --- scalars -----------------------------------------------------------------

inline json rational_json(const Rational& r) { return to_string(r); }
inline json rational_json(const Fraction& f) { return to_string(f); }

inline Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  require(j.is_string(), ErrorCode::parse_error, "rational must be a \"p/q\" string", {{"value", j}});
  return parse_rational(j.get<std::string>());
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Digest of the compact dump of `j`; object keys are sorted by nlohmann::json.
inline std::string digest(const json& j) {
  static constexpr char hex[] = "0123456789abcdef";
  std::uint64_t h = fnv1a(j.dump());
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k, h >>= 4) out[k] = hex[h & 0xf];
  return out;
}

// --- groups and subsets ------------------------------------------------------

inline json group_json(const FiniteGroup& g) {
  return {{"name", g.name()},
          {"order", g.order()},
          {"labels", g.labels()},
          {"cayley", std::vector<Element>(g.cayley().begin(), g.cayley().end())}};
}

inline FiniteGroup group_from_json(const json& j) {
  if (j.is_string()) return parse_group_spec(j.get<std::string>());
  require(j.is_object() && j.contains("cayley"), ErrorCode::parse_error,
          "group must be a spec string or an object with a cayley table");
  try {
    auto cayley = j.at("cayley").get<std::vector<Element>>();
    std::vector<std::string> labels;
    if (j.contains("labels")) {
      labels = j.at("labels").get<std::vector<std::string>>();
    } else {
      std::size_t n = 0;
      while (n * n < cayley.size()) ++n;
      for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    }
    if (j.contains("order"))
      require(j.at("order").get<std::size_t>() * j.at("order").get<std::size_t>() == cayley.size(),
              ErrorCode::parse_error, "order does not match the cayley table");
    return FiniteGroup::from_table(std::move(cayley), std::move(labels), j.value("name", std::string{}));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed group: ") + e.what());
  }
}

/// Sorted element indices.
inline json subset_json(const GroupSubset& s) { return s.elements(); }

inline json subset_labels_json(const GroupSubset& s) {
  json out = json::array();
  s.for_each([&](Element x) { out.push_back(s.group().label(x)); });
  return out;
}

inline json subgroup_json(const Subgroup& h) {
  return {{"members", subset_json(h.members())}, {"order", h.order()}, {"normal", h.is_normal()}};
}

inline json homomorphism_json(const Homomorphism& h) {
  return {{"source_order", h.source().order()}, {"target_order", h.target().order()}, {"map", h.map()}};
}

// --- classification and transforms ------------------------------------------

inline json pair_class_json(const PairClass& c) {
  return {{"class", std::string(to_string(c.tag))},
          {"deficit", rational_json(c.deficit)},
          {"measure_a", rational_json(c.measure_a)},
          {"measure_b", rational_json(c.measure_b)},
          {"measure_ab", rational_json(c.measure_ab)}};
}

inline json dyson_trace_json(const DysonTrace& t) {
  json steps = json::array();
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const auto& s = t.steps[k];
    steps.push_back({{"step", k + 1},
                     {"pivot", s.pivot},
                     {"A", subset_json(s.a)},
                     {"B", subset_json(s.b)},
                     {"measures", {{"A", rational_json(haar(s.a))}, {"B", rational_json(haar(s.b))}}}});
  }
  return {{"initial",
           {{"A", subset_json(t.a0)},
            {"B", subset_json(t.b0)},
            {"measures", {{"A", rational_json(haar(t.a0))}, {"B", rational_json(haar(t.b0))}}}}},
          {"steps", std::move(steps)},
          {"terminated_reason", std::string(to_string(t.reason))}};
}

inline json certificate_validation_json(const CertificateValidation& v) {
  return {{"kernel_normal", v.kernel_normal},
          {"projection_matches_kernel", v.projection_matches_kernel},
          {"contains_a", v.contains_a},
          {"contains_b", v.contains_b},
          {"images_exact", v.images_exact},
          {"product_measure_match", v.product_measure_match},
          {"overshoot_holds", v.overshoot_holds}};
}

/// Certificate fields plus a fresh validation and the digest of both.
inline json certificate_json(const ReductionCertificate& c, const GroupSubset& a, const GroupSubset& b) {
  json j{{"kernel", subgroup_json(c.kernel)},
         {"quotient_order", c.quotient.group.order()},
         {"projection", c.quotient.projection.map()},
         {"representatives", c.quotient.representatives},
         {"image_i", subset_json(c.image_i)},
         {"image_j", subset_json(c.image_j)},
         {"product_measure_match", c.product_measure_match},
         {"overshoot_holds", c.overshoot_holds}};
  j["validation"] = certificate_validation_json(validate_certificate(c, a, b));
  j["digest"] = digest(j);
  return j;
}

inline json vosper_json(const VosperStructure& v) {
  return {{"difference", v.difference}, {"start_a", v.start_a},   {"start_b", v.start_b},
          {"length_a", v.length_a},     {"length_b", v.length_b}, {"exceptional", v.exceptional}};
}

inline json sturmian_witness_json(const SturmianWitness& w, const GroupSubset& a, const GroupSubset& b) {
  json j{{"kind", std::string(to_string(w.kind))},
         {"modulus", w.modulus},
         {"pi", w.pi.map()},
         {"s", w.s},
         {"t", w.t},
         {"interval_i", subset_json(w.interval_i)},
         {"interval_j", subset_json(w.interval_j)},
         {"measure_i", rational_json(w.measure_i)},
         {"measure_j", rational_json(w.measure_j)},
         {"measure_ij", rational_json(w.measure_ij)}};
  j["validation"] = {{"witness_valid", validate_sturmian_witness(w, a, b)}};
  j["digest"] = digest(j);
  return j;
}

// --- circle and twisted torus ------------------------------------------------

inline json arcset_json(const ArcSet& s) {
  json arcs = json::array(), added = json::array(), removed = json::array();
  for (const Arc& a : s.arcs()) arcs.push_back({{"start", rational_json(a.start)}, {"length", rational_json(a.length)}});
  for (const auto& p : s.added()) added.push_back(rational_json(p));
  for (const auto& p : s.removed()) removed.push_back(rational_json(p));
  return {{"arcs", std::move(arcs)}, {"added", std::move(added)}, {"removed", std::move(removed)}};
}

inline ArcSet arcset_from_json(const json& j) {
  require(j.is_object(), ErrorCode::parse_error, "arc set must be an object");
  std::vector<Arc> arcs;
  std::vector<Rational> added, removed;
  try {
    for (const auto& a : j.value("arcs", json::array()))
      arcs.push_back({rational_from_json(a.at("start")), rational_from_json(a.at("length"))});
    for (const auto& p : j.value("added", json::array())) added.push_back(rational_from_json(p));
    for (const auto& p : j.value("removed", json::array())) removed.push_back(rational_from_json(p));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed arc set: ") + e.what());
  }
  return ArcSet(std::move(arcs), std::move(added), std::move(removed));
}

inline json twisted_json(const TwistedSet& s) { return {{"plus", arcset_json(s.plus)}, {"minus", arcset_json(s.minus)}}; }

inline TwistedSet twisted_from_json(const json& j) {
  require(j.is_object() && j.contains("plus") && j.contains("minus"), ErrorCode::parse_error,
          "twisted set needs plus and minus");
  return {arcset_from_json(j.at("plus")), arcset_from_json(j.at("minus"))};
}

inline json rigidity_json(const RigidityResult& r) {
  json j{{"contained", r.contained}};
  if (r.witness)
    j["witness"] = {{"point", rational_json(r.witness->point)},
                    {"side", r.witness->in_a ? "A" : "B"},
                    {"excess", rational_json(r.witness->excess)}};
  return j;
}

// --- relative criticality ----------------------------------------------------

inline json criticality_json(const CriticalityWitness& w) {
  json j{{"holds", w.holds},
         {"slice_measure_a", rational_json(w.slice_measure_a)},
         {"slice_measure_b", rational_json(w.slice_measure_b)}};
  if (const auto& v = w.violating_pair)
    j["violating_pair"] = {{"condition", v->condition},
                           {"x", v->x},
                           {"y", v->y},
                           {"measure_a", rational_json(v->measure_a)},
                           {"measure_b", rational_json(v->measure_b)},
                           {"measure_ab", rational_json(v->measure_ab)}};
  return j;
}

inline json local_witness_json(const LocalWitness& w) {
  return {{"u", subgroup_json(w.u)},     {"x", w.x},           {"y", w.y},
          {"slice_a", w.slice_a}, {"slice_b", w.slice_b}, {"slice_ab", w.slice_ab}};
}

inline json relativize_json(const RelativizeResult& r) {
  json j{{"outcome", std::string(to_string(r.outcome))},
         {"supports_equal", r.supports_equal},
         {"support_is_subgroup", r.support_is_subgroup},
         {"constant_slices", r.constant_slices}};
  if (r.local) j["local"] = local_witness_json(*r.local);
  if (r.l) j["L"] = subgroup_json(*r.l);
  if (r.witness) j["criticality"] = criticality_json(*r.witness);
  return j;
}

// --- report document ---------------------------------------------------------

struct Validation {
  std::string name;
  bool pass = false;
};

struct ReportDocument {
  std::string command;
  json inputs = json::object();
  json results = json::object();
  std::vector<Validation> validations;

  void check(std::string name, bool pass) { validations.push_back({std::move(name), pass}); }

  bool all_pass() const {
    for (const auto& v : validations)
      if (!v.pass) return false;
    return true;
  }

  json to_json() const {
    json vs = json::array();
    for (const auto& v : validations) vs.push_back({{"name", v.name}, {"pass", v.pass}});
    return {{"command", command},
            {"inputs", inputs},
            {"results", results},
            {"validations", std::move(vs)},
            {"version", std::string(kVersion)}};
  }
};

inline ReportDocument report_from_json(const json& j) {
  require(j.is_object() && j.contains("command"), ErrorCode::parse_error, "report needs a command");
  ReportDocument r{j.at("command").get<std::string>(), j.value("inputs", json::object()),
                   j.value("results", json::object()), {}};
  for (const auto& v : j.value("validations", json::array()))
    r.validations.push_back({v.at("name").get<std::string>(), v.at("pass").get<bool>()});
  return r;
}

}  // namespace critlab
