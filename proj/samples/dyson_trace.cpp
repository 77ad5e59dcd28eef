// Runs the e-transform on a pair and prints each step.
//   sample_dyson_trace [group-spec A B [rule]]   (default Z5 0,2 0,1 least)

#include <cstdio>
#include <string>

#include "critlab/catalog.hpp"
#include "critlab/dyson.hpp"

using namespace critlab;

int main(int argc, char** argv) {
  const std::string spec = argc > 3 ? argv[1] : "Z5";
  const std::string la = argc > 3 ? argv[2] : "0,2";
  const std::string lb = argc > 3 ? argv[3] : "0,1";
  const std::string rule = argc > 4 ? argv[4] : "least";
  try {
    const FiniteGroup g = parse_group_spec(spec);
    const GroupSubset a = parse_subset(g, la), b = parse_subset(g, lb);
    const DysonTrace t = dyson_run(a, b, pivot_rule_by_name(rule));
    std::printf("start   A=%s B=%s  |A|+|B|=%zu\n", a.to_string().c_str(), b.to_string().c_str(),
                a.size() + b.size());
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      const DysonStep& s = t.steps[i];
      std::printf("step %zu  pivot %s  A=%s B=%s  |A|+|B|=%zu\n", i + 1, g.label(s.pivot).c_str(),
                  s.a.to_string().c_str(), s.b.to_string().c_str(), s.a.size() + s.b.size());
    }
    std::printf("stopped: %s\n", std::string(to_string(t.reason)).c_str());
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.to_json().dump().c_str());
    return 2;
  }
}
