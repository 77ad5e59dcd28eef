// critlab: command-line front end for the library.
//
// Every command builds a ReportDocument. Text mode renders it for reading;
// --json prints it as one JSON object. Errors print {code, message, details}
// in JSON mode. Exit codes: 0 ok, 1 validation failure, 2 usage error,
// 3 budget exceeded.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "critlab/catalog.hpp"
#include "critlab/dyson.hpp"
#include "critlab/io.hpp"
#include "critlab/reduction.hpp"
#include "critlab/relative.hpp"
#include "critlab/subset_algebra.hpp"
#include "critlab/torus_exact.hpp"
#include "critlab/verify.hpp"

using namespace critlab;

namespace {

constexpr int kOk = 0, kValidation = 1, kUsage = 2, kBudget = 3;

bool g_json = false;

// --- input parsing -----------------------------------------------------------

FiniteGroup load_group(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return group_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::parse_error, std::string("group JSON: ") + e.what(), {{"position", e.byte}});
    }
  }
  return parse_group_spec(text);
}

GroupSubset load_subset(const FiniteGroup& g, const std::string& text) {
  if (!text.empty() && text.front() == '[') {
    try {
      return subset_from_json(g, json::parse(text));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::parse_error, std::string("subset JSON: ") + e.what(), {{"position", e.byte}});
    }
  }
  return parse_subset(g, text);
}

/// Arc-set literal: ';'-separated items "start:length" (closed arc), "+p"
/// (added point) and "-p" (removed point); or a JSON object.
ArcSet load_arcset(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return arcset_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::parse_error, std::string("arc set JSON: ") + e.what(), {{"position", e.byte}});
    }
  }
  std::vector<Arc> arcs;
  std::vector<Rational> added, removed;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(pos, end - pos);
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    auto fail = [&](const std::string& msg) {
      throw Error(ErrorCode::parse_error, msg + " at position " + std::to_string(pos),
                  {{"position", pos}, {"input", text}});
    };
    if (item.empty()) {
      if (!text.empty()) fail("empty arc item");
    } else if (item[0] == '+' || item[0] == '-') {
      (item[0] == '+' ? added : removed).push_back(parse_rational(item.substr(1)));
    } else {
      const auto colon = item.find(':');
      if (colon == std::string::npos) fail("expected start:length");
      arcs.push_back({parse_rational(item.substr(0, colon)), parse_rational(item.substr(colon + 1))});
    }
    pos = end + 1;
  }
  return ArcSet(std::move(arcs), std::move(added), std::move(removed));
}

// --- output ------------------------------------------------------------------

std::string plain(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void render_text(const ReportDocument& r) {
  std::cout << "command: " << r.command << "\n";
  for (auto it = r.inputs.begin(); it != r.inputs.end(); ++it)
    std::cout << "  input " << it.key() << ": " << plain(*it) << "\n";
  if (r.command == "dyson" && r.results.contains("trace")) {
    const json& t = r.results["trace"];
    std::printf("  %-5s %-6s %-28s %-28s %-8s %-8s\n", "step", "pivot", "A", "B", "m(A)", "m(B)");
    std::printf("  %-5s %-6s %-28s %-28s %-8s %-8s\n", "0", "-", t["initial"]["A"].dump().c_str(),
                t["initial"]["B"].dump().c_str(), plain(t["initial"]["measures"]["A"]).c_str(),
                plain(t["initial"]["measures"]["B"]).c_str());
    for (const auto& s : t["steps"])
      std::printf("  %-5s %-6s %-28s %-28s %-8s %-8s\n", s["step"].dump().c_str(), s["pivot"].dump().c_str(),
                  s["A"].dump().c_str(), s["B"].dump().c_str(), plain(s["measures"]["A"]).c_str(),
                  plain(s["measures"]["B"]).c_str());
    std::cout << "  terminated: " << plain(t["terminated_reason"]) << "\n";
  } else if (r.command == "verify") {
    for (const auto& c : r.results["criteria"])
      std::printf("  criterion %-2d %-26s %s  %s\n", c["id"].get<int>(), plain(c["name"]).c_str(),
                  c["pass"].get<bool>() ? "PASS" : "FAIL", plain(c["summary"]).c_str());
  } else {
    for (auto it = r.results.begin(); it != r.results.end(); ++it)
      std::cout << "  " << it.key() << ": " << plain(*it) << "\n";
  }
  if (!r.validations.empty()) {
    std::cout << "validations:\n";
    for (const auto& v : r.validations) std::cout << "  [" << (v.pass ? "pass" : "FAIL") << "] " << v.name << "\n";
  }
}

int emit(const ReportDocument& r) {
  if (g_json)
    std::cout << r.to_json().dump() << "\n";
  else
    render_text(r);
  return r.all_pass() ? kOk : kValidation;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::budget_exceeded:
    case ErrorCode::cap_exceeded: return kBudget;
    case ErrorCode::theorem_violation: return kValidation;
    default: return kUsage;
  }
}

void print_error(const json& err) {
  if (g_json)
    std::cout << err.dump() << "\n";
  else
    std::cerr << "error [" << plain(err["code"]) << "]: " << plain(err["message"]) << "\n";
}

// --- pair commands -----------------------------------------------------------

struct PairArgs {
  std::string group, a, b;
};

void add_pair_options(CLI::App* cmd, PairArgs& p) {
  cmd->add_option("--group", p.group, "group spec: Zn, ZaxZb, Dn, S3, Q8, A4, Dicn, sd:N,K,action")->required();
  cmd->add_option("--A", p.a, "subset literal, e.g. 0-3,7 or a JSON array")->required();
  cmd->add_option("--B", p.b, "subset literal")->required();
}

json pair_inputs(const PairArgs& p) { return {{"group", p.group}, {"A", p.a}, {"B", p.b}}; }

int cmd_classify(const PairArgs& p) {
  const FiniteGroup g = load_group(p.group);
  const GroupSubset a = load_subset(g, p.a), b = load_subset(g, p.b);
  const PairClass c = classify_pair(a, b);
  const GroupSubset ab = product_set(a, b);
  ReportDocument r{"classify", pair_inputs(p), pair_class_json(c), {}};
  r.results["AB"] = subset_json(ab);
  r.results["stabilizer_ab"] = subset_json(stabilizer(ab).members());
  const std::int64_t n = static_cast<std::int64_t>(g.order());
  r.check("deficit_matches_counts",
          c.deficit == Fraction(static_cast<std::int64_t>(a.size() + b.size()) - static_cast<std::int64_t>(ab.size()), n));
  return emit(r);
}

int cmd_dyson(const PairArgs& p, const std::string& rule, std::optional<std::size_t> limit, bool unsafe) {
  const FiniteGroup g = load_group(p.group);
  const GroupSubset a = load_subset(g, p.a), b = load_subset(g, p.b);
  const DysonTrace t = dyson_run(a, b, pivot_rule_by_name(rule), {limit, unsafe});
  json in = pair_inputs(p);
  in["rule"] = rule;
  ReportDocument r{"dyson", in, {{"trace", dyson_trace_json(t)}}, {}};
  bool monotone = true, contained = true, conserved = true, nonempty = true;
  const GroupSubset ab = product_set(a, b);
  const GroupSubset* pa = &a;
  const GroupSubset* pb = &b;
  for (const auto& s : t.steps) {
    monotone = monotone && pa->subset_of(s.a) && s.b.subset_of(*pb);
    contained = contained && product_set(s.a, s.b).subset_of(ab);
    conserved = conserved && s.a.size() + s.b.size() == a.size() + b.size();
    nonempty = nonempty && !s.b.empty();
    pa = &s.a;
    pb = &s.b;
  }
  r.check("monotonicity", monotone);
  r.check("containment", contained);
  r.check("nonempty_b", nonempty);
  if (g.is_abelian()) r.check("cardinality_conservation", conserved);
  return emit(r);
}

int cmd_reduce(const PairArgs& p, const std::string& kind) {
  const FiniteGroup g = load_group(p.group);
  const GroupSubset a = load_subset(g, p.a), b = load_subset(g, p.b);
  require(kind == "kneser" || kind == "kemperman", ErrorCode::invalid_argument, "kind must be kneser or kemperman");
  const PairClass c = classify_pair(a, b);
  const ReductionCertificate cert = kind == "kneser" ? kneser_reduce(a, b) : kemperman_reduce(a, b);
  json in = pair_inputs(p);
  in["kind"] = kind;
  ReportDocument r{"reduce", in, {{"class", std::string(to_string(c.tag))}, {"certificate", certificate_json(cert, a, b)}}, {}};
  const CertificateValidation v = validate_certificate(cert, a, b);
  r.check("kernel_normal", v.kernel_normal);
  r.check("projection_matches_kernel", v.projection_matches_kernel);
  r.check("containments", v.contains_a && v.contains_b && v.images_exact);
  r.check("product_measure_match", v.product_measure_match);
  if (kind == "kneser" && c.tag == PairTag::SubCritical) r.check("overshoot_holds", v.overshoot_holds);
  return emit(r);
}

int cmd_vosper(const PairArgs& p) {
  const FiniteGroup g = load_group(p.group);
  const GroupSubset a = load_subset(g, p.a), b = load_subset(g, p.b);
  const VosperStructure v = vosper_classify(a, b);
  ReportDocument r{"vosper", pair_inputs(p), vosper_json(v), {}};
  auto is_run = [&](const GroupSubset& s, Element start, std::size_t len) {
    GroupSubset run(g);
    for (std::size_t i = 0; i < len; ++i) run.insert(static_cast<Element>((start + i * v.difference) % g.order()));
    return run == s;
  };
  r.check("progressions_verified", is_run(a, v.start_a, v.length_a) && is_run(b, v.start_b, v.length_b));
  return emit(r);
}

// --- sturmian ----------------------------------------------------------------

struct SturmianArgs {
  std::string target = "plain";
  std::string half_i, half_j, s = "0", t = "0";
  bool s_flip = false, t_flip = false;
  std::string model;
  std::size_t n = 0, m = 0, ri = 1, rj = 1;
  Element ds = 0, dt = 0;
  PairArgs pair;
  std::uint64_t budget = kSturmianBudget;
};

int cmd_sturmian(const SturmianArgs& o) {
  if (!o.pair.group.empty()) {
    const FiniteGroup g = load_group(o.pair.group);
    require(!o.pair.a.empty() && !o.pair.b.empty(), ErrorCode::invalid_argument, "detection needs --A and --B");
    const GroupSubset a = load_subset(g, o.pair.a), b = load_subset(g, o.pair.b);
    const SturmianSearch found = detect_sturmian_reduction(a, b, o.budget);
    ReportDocument r{"sturmian", pair_inputs(o.pair), {{"candidates", found.candidates}}, {}};
    r.results["witness"] = found.witness ? sturmian_witness_json(*found.witness, a, b) : json(nullptr);
    if (found.witness) r.check("witness_valid", validate_sturmian_witness(*found.witness, a, b));
    return emit(r);
  }
  if (!o.model.empty()) {
    require(o.model == "dihedral" || o.model == "cyclic_product", ErrorCode::invalid_argument,
            "model must be dihedral or cyclic_product");
    const DiscreteSturmian ds = make_discrete_sturmian({o.model == "dihedral" ? DiscreteModel::dihedral
                                                                              : DiscreteModel::cyclic_product,
                                                        o.n, o.m, o.ri, o.rj, o.ds, o.dt});
    const PairClass c = classify_pair(ds.a, ds.b);
    const SturmianSearch found = detect_sturmian_reduction(ds.a, ds.b, o.budget);
    ReportDocument r{"sturmian",
                     {{"model", o.model}, {"n", o.n}, {"m", o.m}, {"radius_i", o.ri}, {"radius_j", o.rj},
                      {"s", o.ds}, {"t", o.dt}},
                     {{"group", ds.group.name()},
                      {"A", subset_json(ds.a)},
                      {"B", subset_json(ds.b)},
                      {"model_i", subset_json(ds.model_i)},
                      {"model_j", subset_json(ds.model_j)},
                      {"classification", pair_class_json(c)}},
                     {}};
    r.results["witness"] = found.witness ? sturmian_witness_json(*found.witness, ds.a, ds.b) : json(nullptr);
    r.check("critical_sum", c.tag == PairTag::CriticalSum);
    r.check("witness_found", found.witness.has_value());
    if (found.witness) {
      r.check("witness_valid", validate_sturmian_witness(*found.witness, ds.a, ds.b));
      r.check("measure_ij_matches", found.witness->measure_ij == c.measure_ab);
    }
    return emit(r);
  }
  require(!o.half_i.empty() && !o.half_j.empty(), ErrorCode::invalid_argument,
          "give --half-i and --half-j, --model, or --group with --A and --B");
  require(o.target == "plain" || o.target == "twisted", ErrorCode::invalid_argument, "target must be plain or twisted");
  SturmianSpec spec{o.target == "plain" ? TorusTarget::plain : TorusTarget::twisted, parse_rational(o.half_i),
                    parse_rational(o.half_j), {parse_rational(o.s), o.s_flip}, {parse_rational(o.t), o.t_flip}};
  const auto pair = make_sturmian(spec);
  json in{{"target", o.target}, {"half_i", o.half_i}, {"half_j", o.half_j}, {"s", o.s}, {"t", o.t}};
  if (o.target == "twisted") in["s_flip"] = o.s_flip, in["t_flip"] = o.t_flip;
  ReportDocument r{"sturmian", in, {}, {}};
  Rational mi, mj, mij;
  if (const auto* pp = std::get_if<PlainPair>(&pair)) {
    r.results = {{"I", arcset_json(pp->first)}, {"J", arcset_json(pp->second)}};
    mi = arcset_measure(pp->first);
    mj = arcset_measure(pp->second);
    mij = arcset_measure(arc_sumset(pp->first, pp->second));
  } else {
    const auto& tp = std::get<TwistedPair>(pair);
    r.results = {{"I", twisted_json(tp.first)}, {"J", twisted_json(tp.second)}};
    mi = twisted_measure(tp.first);
    mj = twisted_measure(tp.second);
    mij = twisted_measure(twisted_product(tp.first, tp.second));
  }
  r.results["measure_i"] = rational_json(mi);
  r.results["measure_j"] = rational_json(mj);
  r.results["measure_ij"] = rational_json(mij);
  r.results["class"] = mij == mi + mj && mi + mj < 1 ? "CriticalSum" : mij < std::min(Rational(1), mi + mj) ? "SubCritical" : "other";
  r.check("critical_sum", mij == mi + mj && mi + mj < 1);
  return emit(r);
}

// --- stability and rigidity --------------------------------------------------

struct StabilityArgs {
  std::string i, j, a1, b1, a2, b2;
};

int cmd_stability(const StabilityArgs& o) {
  if (!o.a1.empty() || !o.a2.empty()) {
    require(!o.a1.empty() && !o.b1.empty() && !o.a2.empty() && !o.b2.empty(), ErrorCode::invalid_argument,
            "rigidity needs --A1 --B1 --A2 --B2");
    const ArcSet a1 = load_arcset(o.a1), b1 = load_arcset(o.b1), a2 = load_arcset(o.a2), b2 = load_arcset(o.b2);
    const RigidityResult res = rigidity_force_containment(a1, b1, a2, b2);
    ReportDocument r{"stability", {{"A1", o.a1}, {"B1", o.b1}, {"A2", o.a2}, {"B2", o.b2}}, rigidity_json(res), {}};
    if (res.contained) r.check("containment_confirmed", arcset_contained(a1, a2) && arcset_contained(b1, b2));
    return emit(r);
  }
  require(!o.i.empty() && !o.j.empty(), ErrorCode::invalid_argument, "stability needs --I and --J");
  const ArcSet i = load_arcset(o.i), j = load_arcset(o.j);
  ReportDocument r{"stability",
                   {{"I", o.i}, {"J", o.j}},
                   {{"I", arcset_json(i)},
                    {"J", arcset_json(j)},
                    {"left_stable", is_left_stable(i, j)},
                    {"right_stable", is_right_stable(i, j)},
                    {"stable", is_stable_pair(i, j)},
                    {"regular_i", is_regular(i)},
                    {"regular_j", is_regular(j)}},
                   {}};
  return emit(r);
}

// --- relative criticality ----------------------------------------------------

struct RelativeArgs {
  PairArgs pair;
  std::string n, u, chain;
  bool widen = false;
};

Subgroup load_subgroup(const FiniteGroup& g, const std::string& text) { return Subgroup::make(load_subset(g, text)); }

int cmd_relative(const RelativeArgs& o) {
  const FiniteGroup g = load_group(o.pair.group);
  const GroupSubset a = load_subset(g, o.pair.a), b = load_subset(g, o.pair.b);
  json in = pair_inputs(o.pair);
  ReportDocument r{"relative", in, {}, {}};
  if (!o.u.empty()) {
    r.inputs["U"] = o.u;
    const RelativizeResult res = relativize(a, b, load_subgroup(g, o.u));
    r.results = relativize_json(res);
    if (res.outcome == RelativizeOutcome::critical_wrt_u_in_l)
      r.check("slice_conclusions", res.supports_equal && res.support_is_subgroup && res.constant_slices);
    return emit(r);
  }
  if (!o.chain.empty()) {
    r.inputs["chain"] = o.chain;
    std::vector<Subgroup> chain;
    std::size_t pos = 0;
    while (pos <= o.chain.size()) {
      std::size_t end = o.chain.find('|', pos);
      if (end == std::string::npos) end = o.chain.size();
      chain.push_back(load_subgroup(g, o.chain.substr(pos, end - pos)));
      pos = end + 1;
    }
    const ChainResult res = check_chain_criticality(a, b, chain);
    json levels = json::array();
    for (const auto& l : res.levels) levels.push_back(criticality_json(l));
    r.results = {{"holds", res.holds},
                 {"intersection", subset_json(res.intersection.members())},
                 {"intersection_holds", res.intersection_holds},
                 {"levels", levels}};
    r.check("chain_implies_intersection", !res.holds || res.intersection_holds);
    return emit(r);
  }
  if (!o.n.empty()) {
    r.inputs["N"] = o.n;
    const Subgroup n = load_subgroup(g, o.n);
    const CriticalityWitness w = is_critical_wrt(a, b, n);
    r.results = criticality_json(w);
    json slices = json::array();
    const SliceView va = disintegrate(a, n), vb = disintegrate(b, n, Side::right);
    for (std::size_t k = 0; k < va.coset_reps.size(); ++k)
      slices.push_back({{"x", va.coset_reps[k]}, {"A_x", subset_json(va.slices[k])}, {"B^x", subset_json(vb.slices[k])}});
    r.results["slices"] = slices;
    return emit(r);
  }
  r.inputs["widen"] = o.widen;
  const auto w = detect_local_subcritical(a, b, {o.widen});
  r.results = {{"locally_subcritical", w.has_value()}, {"witness", w ? local_witness_json(*w) : json(nullptr)}};
  if (w) {
    const GroupSubset sa = translate(a, g.inv(w->x), Side::left) & w->u.members();
    const GroupSubset sb = translate(b, g.inv(w->y), Side::right) & w->u.members();
    r.check("witness_subcritical_in_u", classify_counts(w->u.order(), sa.size(), sb.size(), product_set(sa, sb).size()) ==
                                            PairTag::SubCritical);
  }
  return emit(r);
}

// --- survey ------------------------------------------------------------------

struct SurveyArgs {
  std::string family = "cyclic";
  std::size_t max = 4;
  std::string filter = "all";
  std::string check = "none";
  std::string format = "json";
  std::string checkpoint;
  bool resume = false;
  std::uint64_t stop_after = 0;
  unsigned jobs = 1;
  std::uint64_t budget = std::uint64_t{1} << 26;
};

std::vector<std::string> family_specs(const std::string& family, std::size_t max) {
  std::vector<std::string> out;
  if (family == "cyclic") {
    for (std::size_t n = 1; n <= max; ++n) out.push_back("Z" + std::to_string(n));
  } else if (family == "dihedral") {
    for (std::size_t n = 1; n <= max; ++n) out.push_back("D" + std::to_string(n));
  } else if (family == "small") {
    for (const auto& s : small_group_specs())
      if (parse_group_spec(s).order() <= max) out.push_back(s);
  } else {
    throw Error(ErrorCode::invalid_argument, "family must be cyclic, dihedral or small", {{"family", family}});
  }
  return out;
}

bool filter_matches(const std::string& filter, PairTag tag) {
  if (filter == "all") return true;
  if (filter == "subcritical") return tag == PairTag::SubCritical;
  if (filter == "critical") return tag == PairTag::CriticalSum;
  if (filter == "critical-full") return tag == PairTag::CriticalFull;
  if (filter == "supercritical") return tag == PairTag::SuperCritical;
  return false;
}

struct Row {
  std::uint64_t b = 0;
  std::string text;
  bool ok = true;
};

/// One survey row, or nothing when the pair is filtered out.
std::optional<Row> survey_row(const std::string& spec, const FiniteGroup& g, std::uint64_t am, std::uint64_t bm,
                              const SurveyArgs& o) {
  const GroupSubset a = GroupSubset::from_mask(g, am), b = GroupSubset::from_mask(g, bm);
  const PairClass c = classify_pair(a, b);
  if (!filter_matches(o.filter, c.tag)) return std::nullopt;
  ReportDocument r{"survey.row", {{"group", spec}, {"A", subset_json(a)}, {"B", subset_json(b)}}, pair_class_json(c), {}};
  try {
    if (o.check == "kneser" && g.is_abelian() && (c.tag == PairTag::SubCritical || c.tag == PairTag::CriticalSum)) {
      const ReductionCertificate cert = kneser_reduce(a, b);
      r.results["certificate"] = certificate_json(cert, a, b);
      r.check("certificate_valid", validate_certificate(cert, a, b).ok(c.tag == PairTag::SubCritical));
    } else if (o.check == "kemperman" && c.tag == PairTag::SubCritical) {
      const ReductionCertificate cert = kemperman_reduce(a, b);
      r.results["certificate"] = certificate_json(cert, a, b);
      r.check("certificate_valid", validate_certificate(cert, a, b).ok(false));
    } else if (o.check == "sturmian" && c.tag == PairTag::CriticalSum) {
      const SturmianSearch found = detect_sturmian_reduction(a, b);
      r.results["witness"] = found.witness ? sturmian_witness_json(*found.witness, a, b) : json(nullptr);
      if (found.witness) r.check("witness_valid", validate_sturmian_witness(*found.witness, a, b));
    } else if (o.check == "local" && c.tag == PairTag::CriticalSum) {
      const auto w = detect_local_subcritical(a, b);
      r.results["local"] = w ? local_witness_json(*w) : json(nullptr);
    }
  } catch (const Error& e) {
    r.results["check_error"] = e.to_json();
    r.check("check_completed", false);
  }
  Row row{bm, {}, r.all_pass()};
  if (o.format == "csv") {
    std::string cert = r.validations.empty() ? "" : (r.all_pass() ? "pass" : "fail");
    auto list = [](const GroupSubset& s) {
      std::string t;
      s.for_each([&](Element x) { t += (t.empty() ? "" : " ") + std::to_string(x); });
      return t;
    };
    row.text = spec + "," + list(a) + "," + list(b) + "," + std::string(to_string(c.tag)) + "," + to_string(c.measure_a) +
               "," + to_string(c.measure_b) + "," + to_string(c.measure_ab) + "," + to_string(c.deficit) + "," + cert;
  } else {
    row.text = r.to_json().dump();
  }
  return row;
}

struct SurveyState {
  std::size_t group = 0;
  std::uint64_t a = 1, b = 1;  // next pair of the current group
  std::uint64_t rows = 0, failures = 0;
  std::uint64_t group_rows = 0;  // rows of the current group so far
  json counts = json::array();   // finished groups
  bool done = false;
};

json survey_config(const SurveyArgs& o) {
  return {{"family", o.family}, {"max", o.max}, {"filter", o.filter}, {"check", o.check}, {"format", o.format}};
}

void write_checkpoint(const SurveyArgs& o, const SurveyState& s) {
  if (o.checkpoint.empty()) return;
  const json j{{"config", survey_config(o)}, {"group", s.group},         {"a", s.a},
               {"b", s.b},                   {"rows", s.rows},           {"failures", s.failures},
               {"group_rows", s.group_rows}, {"counts", s.counts},       {"done", s.done}};
  const std::string tmp = o.checkpoint + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    require(static_cast<bool>(f), ErrorCode::io_error, "cannot write checkpoint", {{"path", tmp}});
    f << j.dump() << "\n";
  }
  require(std::rename(tmp.c_str(), o.checkpoint.c_str()) == 0, ErrorCode::io_error, "cannot write checkpoint",
          {{"path", o.checkpoint}});
}

SurveyState read_checkpoint(const SurveyArgs& o) {
  std::ifstream f(o.checkpoint);
  require(static_cast<bool>(f), ErrorCode::io_error, "cannot read checkpoint", {{"path", o.checkpoint}});
  try {
    json j;
    f >> j;
    require(j.value("config", json()) == survey_config(o), ErrorCode::invalid_argument,
            "checkpoint was written with different survey options", {{"checkpoint", j.value("config", json())}});
    SurveyState s;
    s.group = j.at("group").get<std::size_t>();
    s.a = j.at("a").get<std::uint64_t>();
    s.b = j.at("b").get<std::uint64_t>();
    s.rows = j.at("rows").get<std::uint64_t>();
    s.failures = j.at("failures").get<std::uint64_t>();
    s.group_rows = j.at("group_rows").get<std::uint64_t>();
    s.counts = j.at("counts");
    s.done = j.at("done").get<bool>();
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed checkpoint: ") + e.what());
  }
}

int cmd_survey(SurveyArgs o) {
  require(o.format == "json" || o.format == "csv", ErrorCode::invalid_argument, "format must be json or csv");
  require(o.filter == "all" || o.filter == "subcritical" || o.filter == "critical" || o.filter == "critical-full" ||
              o.filter == "supercritical",
          ErrorCode::invalid_argument, "unknown filter", {{"filter", o.filter}});
  require(o.check == "none" || o.check == "kneser" || o.check == "kemperman" || o.check == "sturmian" ||
              o.check == "local",
          ErrorCode::invalid_argument, "unknown check", {{"check", o.check}});
  require(!o.resume || !o.checkpoint.empty(), ErrorCode::invalid_argument, "--resume needs --checkpoint");
  o.jobs = std::max(1u, o.jobs);
  const auto specs = family_specs(o.family, o.max);
  std::vector<FiniteGroup> groups;
  std::uint64_t total = 0;
  for (const auto& s : specs) {
    groups.push_back(parse_group_spec(s));
    const std::size_t n = groups.back().order();
    require(n <= 32, ErrorCode::budget_exceeded, "survey group order exceeds budget", {{"group", s}, {"order", n}});
    total += ((std::uint64_t{1} << n) - 1) * ((std::uint64_t{1} << n) - 1);
    require(total <= o.budget, ErrorCode::budget_exceeded, "survey pair count exceeds budget",
            {{"budget", o.budget}, {"group", s}});
  }

  SurveyState st = o.resume ? read_checkpoint(o) : SurveyState{};
  if (!o.resume && o.format == "csv") std::cout << "group,A,B,class,measure_a,measure_b,measure_ab,deficit,check\n";
  std::uint64_t emitted_now = 0;

  while (!st.done && st.group < groups.size()) {
    const FiniteGroup& g = groups[st.group];
    const std::string& spec = specs[st.group];
    const std::uint64_t full = (std::uint64_t{1} << g.order()) - 1;
    auto finish_group = [&] {
      st.counts.push_back({{"group", spec}, {"pairs", full * full}, {"rows", st.group_rows}});
      ++st.group;
      st.a = st.b = 1;
      st.group_rows = 0;
      st.done = st.group >= groups.size();
    };
    const std::uint64_t block = 32 * o.jobs;
    while (st.a <= full) {
      const std::uint64_t a0 = st.a, a1 = std::min(full, a0 + block - 1), b_first = st.b;
      std::vector<std::vector<Row>> rows(a1 - a0 + 1);
      std::atomic<std::uint64_t> next{a0};
      auto work = [&] {
        for (std::uint64_t a; (a = next.fetch_add(1)) <= a1;)
          for (std::uint64_t b = a == a0 ? b_first : 1; b <= full; ++b)
            if (auto row = survey_row(spec, g, a, b, o)) rows[a - a0].push_back(std::move(*row));
      };
      if (o.jobs == 1) {
        work();
      } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < o.jobs; ++k) pool.emplace_back(work);
        for (auto& t : pool) t.join();
      }
      for (std::uint64_t a = a0; a <= a1; ++a)
        for (const Row& row : rows[a - a0]) {
          std::cout << row.text << "\n";
          ++st.rows;
          ++st.group_rows;
          if (!row.ok) ++st.failures;
          if (o.stop_after != 0 && ++emitted_now == o.stop_after) {
            st.a = row.b == full ? a + 1 : a;
            st.b = row.b == full ? 1 : row.b + 1;
            if (st.a > full) finish_group();
            std::cout.flush();
            write_checkpoint(o, st);
            return kOk;
          }
        }
      st.a = a1 + 1;
      st.b = 1;
      std::cout.flush();
      if (st.a <= full) write_checkpoint(o, st);
    }
    finish_group();
    write_checkpoint(o, st);
  }
  if (o.format == "json") {
    ReportDocument r{"survey", survey_config(o), {{"groups", st.counts}, {"rows", st.rows}, {"failures", st.failures}}, {}};
    r.check("row_checks", st.failures == 0);
    std::cout << r.to_json().dump() << "\n";
  }
  return st.failures == 0 ? kOk : kValidation;
}

// --- verify ------------------------------------------------------------------

int cmd_verify(const std::string& suite, std::vector<int> ids) {
  if (ids.empty()) {
    require(suite == "all", ErrorCode::invalid_argument, "suite must be 'all' unless --criterion is given",
            {{"suite", suite}});
    for (const auto& c : verify::criteria()) ids.push_back(c.id);
  }
  ReportDocument r{"verify", {{"suite", suite}, {"criteria", ids}}, {{"criteria", json::array()}}, {}};
  for (int id : ids) {
    const auto res = verify::run_criterion(id);
    r.results["criteria"].push_back(verify::to_json(res));
    r.check("criterion_" + std::to_string(id) + "_" + res.name, res.pass);
  }
  return emit(r);
}

bool argv_has_json(int argc, char** argv) {
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--json") return true;
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critlab: small product sets, critical pairs and their reductions"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", g_json, "machine-readable JSON output");
  std::function<int()> run;

  PairArgs classify_args;
  auto* classify = app.add_subcommand("classify", "classify a pair (A, B) by m(AB) versus min(1, m(A)+m(B))");
  add_pair_options(classify, classify_args);
  classify->callback([&] { run = [&] { return cmd_classify(classify_args); }; });

  SurveyArgs survey_args;
  auto* survey = app.add_subcommand("survey", "enumerate all pairs over a group family");
  survey->add_option("--family", survey_args.family, "cyclic, dihedral or small")->capture_default_str();
  survey->add_option("--max", survey_args.max, "largest n (Zn, Dn) or group order (small)")->capture_default_str();
  survey->add_option("--filter", survey_args.filter, "all, subcritical, critical, critical-full, supercritical")
      ->capture_default_str();
  survey->add_option("--check", survey_args.check, "none, kneser, kemperman, sturmian, local")->capture_default_str();
  survey->add_option("--format", survey_args.format, "json (one document per line) or csv")->capture_default_str();
  survey->add_option("--checkpoint", survey_args.checkpoint, "checkpoint file, rewritten as rows are emitted");
  survey->add_flag("--resume", survey_args.resume, "continue from --checkpoint");
  survey->add_option("--stop-after", survey_args.stop_after, "stop after this many rows and checkpoint");
  survey->add_option("--jobs", survey_args.jobs, "worker threads; output order does not depend on it")
      ->capture_default_str();
  survey->add_option("--budget", survey_args.budget, "maximum number of pairs")->capture_default_str();
  survey->callback([&] { run = [&] { return cmd_survey(survey_args); }; });

  PairArgs dyson_args;
  std::string rule = "least";
  std::optional<std::size_t> step_limit;
  bool unsafe = false;
  auto* dyson = app.add_subcommand("dyson", "run the Dyson e-transform and print its trace");
  add_pair_options(dyson, dyson_args);
  dyson->add_option("--rule", rule, "pivot rule: least, greatest, max-shrink")->capture_default_str();
  dyson->add_option("--step-limit", step_limit, "default |B| + |G|");
  dyson->add_flag("--unsafe-nonabelian", unsafe, "allow nonabelian groups, without invariant guarantees");
  dyson->callback([&] { run = [&] { return cmd_dyson(dyson_args, rule, step_limit, unsafe); }; });

  PairArgs reduce_args;
  std::string kind = "kneser";
  auto* reduce = app.add_subcommand("reduce", "Kneser or Kemperman reduction certificate");
  add_pair_options(reduce, reduce_args);
  reduce->add_option("--kind", kind, "kneser or kemperman")->capture_default_str();
  reduce->callback([&] { run = [&] { return cmd_reduce(reduce_args, kind); }; });

  PairArgs vosper_args;
  auto* vosper = app.add_subcommand("vosper", "arithmetic progression structure of a minimal pair in Z_p");
  add_pair_options(vosper, vosper_args);
  vosper->callback([&] { run = [&] { return cmd_vosper(vosper_args); }; });

  SturmianArgs st;
  auto* sturmian = app.add_subcommand("sturmian", "build sturmian pairs or detect a sturmian reduction");
  sturmian->add_option("--target", st.target, "plain or twisted")->capture_default_str();
  sturmian->add_option("--half-i", st.half_i, "half-length of I, as p/q");
  sturmian->add_option("--half-j", st.half_j, "half-length of J, as p/q");
  sturmian->add_option("--s", st.s, "left shift angle")->capture_default_str();
  sturmian->add_option("--t", st.t, "right shift angle")->capture_default_str();
  sturmian->add_flag("--s-flip", st.s_flip, "left shift has sign -1 (twisted)");
  sturmian->add_flag("--t-flip", st.t_flip, "right shift has sign -1 (twisted)");
  sturmian->add_option("--model", st.model, "discretized model: dihedral or cyclic_product");
  sturmian->add_option("--n", st.n, "model domain parameter");
  sturmian->add_option("--m", st.m, "model target parameter, dividing n");
  sturmian->add_option("--ri", st.ri, "radius of I")->capture_default_str();
  sturmian->add_option("--rj", st.rj, "radius of J")->capture_default_str();
  sturmian->add_option("--ds", st.ds, "left shift in the model target")->capture_default_str();
  sturmian->add_option("--dt", st.dt, "right shift in the model target")->capture_default_str();
  sturmian->add_option("--group", st.pair.group, "detect: group spec");
  sturmian->add_option("--A", st.pair.a, "detect: subset A");
  sturmian->add_option("--B", st.pair.b, "detect: subset B");
  sturmian->add_option("--budget", st.budget, "detect: candidate budget")->capture_default_str();
  sturmian->callback([&] { run = [&] { return cmd_sturmian(st); }; });

  StabilityArgs sa;
  auto* stability = app.add_subcommand("stability", "stability of arc-set pairs, or forced containment");
  stability->add_option("--I", sa.i, "arc set: start:length;...;+point;-point");
  stability->add_option("--J", sa.j, "arc set");
  stability->add_option("--A1", sa.a1, "rigidity: A1");
  stability->add_option("--B1", sa.b1, "rigidity: B1");
  stability->add_option("--A2", sa.a2, "rigidity: A2");
  stability->add_option("--B2", sa.b2, "rigidity: B2");
  stability->callback([&] { run = [&] { return cmd_stability(sa); }; });

  RelativeArgs ra;
  auto* relative = app.add_subcommand("relative", "criticality relative to subgroups");
  add_pair_options(relative, ra.pair);
  relative->add_option("--N", ra.n, "normal subgroup: critical with respect to N, with slices");
  relative->add_option("--U", ra.u, "normal subgroup: relativize the pair to U");
  relative->add_option("--chain", ra.chain, "decreasing normal subgroups separated by '|'");
  relative->add_flag("--widen", ra.widen, "local search over non-normal subgroups too");
  relative->callback([&] { run = [&] { return cmd_relative(ra); }; });

  std::string suite = "all";
  std::vector<int> ids;
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
  verify_cmd->add_option("--suite", suite, "all")->capture_default_str();
  verify_cmd->add_option("--criterion", ids, "criterion id, repeatable")->check(CLI::Range(1, 10));
  verify_cmd->callback([&] { run = [&] { return cmd_verify(suite, ids); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    g_json = argv_has_json(argc, argv);
    print_error({{"code", "usage_error"}, {"message", e.what()}});
    return kUsage;
  }
  try {
    return run();
  } catch (const Error& e) {
    print_error(e.to_json());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    print_error({{"code", "internal_error"}, {"message", e.what()}});
    return kValidation;
  }
}
