// Tallies the pair classes over all nonempty subset pairs of a small group.
//   sample_classify_pairs [group-spec]   (default Z6, order at most 12)

#include <array>
#include <cstdio>
#include <string>

#include "critlab/catalog.hpp"
#include "critlab/subset_algebra.hpp"

using namespace critlab;

int main(int argc, char** argv) {
  const std::string spec = argc > 1 ? argv[1] : "Z6";
  try {
    const FiniteGroup g = parse_group_spec(spec);
    if (g.order() > 12) {
      std::fprintf(stderr, "order %zu is too large for a full sweep\n", g.order());
      return 2;
    }
    const std::uint64_t full = (std::uint64_t{1} << g.order()) - 1;
    std::array<std::uint64_t, 4> counts{};
    for (std::uint64_t ma = 1; ma <= full; ++ma) {
      const GroupSubset a = GroupSubset::from_mask(g, ma);
      for (std::uint64_t mb = 1; mb <= full; ++mb) {
        const GroupSubset b = GroupSubset::from_mask(g, mb);
        const GroupSubset ab = product_set(a, b);
        ++counts[static_cast<int>(classify_counts(g.order(), a.size(), b.size(), ab.size()))];
      }
    }
    std::printf("%s (order %zu)\n", spec.c_str(), g.order());
    for (PairTag t : {PairTag::SubCritical, PairTag::CriticalSum, PairTag::CriticalFull, PairTag::SuperCritical})
      std::printf("  %-14s %llu\n", std::string(to_string(t)).c_str(),
                  static_cast<unsigned long long>(counts[static_cast<int>(t)]));
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.to_json().dump().c_str());
    return 2;
  }
}
