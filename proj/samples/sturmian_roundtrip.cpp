// Builds a discretized sturmian pair, then recovers the quotient map and the
// intervals from the pair alone.
//   sample_sturmian_roundtrip [dihedral|cyclic_product n m ri rj]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "critlab/reduction.hpp"
#include "critlab/torus_exact.hpp"

using namespace critlab;

int main(int argc, char** argv) {
  DiscreteSturmianSpec spec{DiscreteModel::cyclic_product, 12, 12, 2, 1, 0, 0};
  if (argc > 5) {
    spec.model = std::string(argv[1]) == "dihedral" ? DiscreteModel::dihedral : DiscreteModel::cyclic_product;
    spec.n = std::strtoul(argv[2], nullptr, 10);
    spec.m = std::strtoul(argv[3], nullptr, 10);
    spec.radius_i = std::strtoul(argv[4], nullptr, 10);
    spec.radius_j = std::strtoul(argv[5], nullptr, 10);
  }
  try {
    const DiscreteSturmian d = make_discrete_sturmian(spec);
    const PairClass cls = classify_pair(d.a, d.b);
    std::printf("%s n=%zu m=%zu: |A|=%zu |B|=%zu |AB|=%zu class %s\n", std::string(to_string(spec.model)).c_str(),
                spec.n, spec.m, d.a.size(), d.b.size(), product_set(d.a, d.b).size(),
                std::string(to_string(cls.tag)).c_str());
    const SturmianSearch r = detect_sturmian_reduction(d.a, d.b);
    if (!r.witness) {
      std::printf("no witness after %llu candidates\n", static_cast<unsigned long long>(r.candidates));
      return 1;
    }
    const SturmianWitness& w = *r.witness;
    std::printf("witness: %s target, modulus %zu, s=%u t=%u\n", std::string(to_string(w.kind)).c_str(), w.modulus,
                w.s, w.t);
    std::printf("  I=%s J=%s\n", w.interval_i.to_string().c_str(), w.interval_j.to_string().c_str());
    std::printf("  m(I)=%s m(J)=%s m(IJ)=%s\n", to_string(w.measure_i).c_str(), to_string(w.measure_j).c_str(),
                to_string(w.measure_ij).c_str());
    const bool ok = validate_sturmian_witness(w, d.a, d.b);
    std::printf("valid: %s\n", ok ? "yes" : "no");
    return ok ? 0 : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.to_json().dump().c_str());
    return 2;
  }
}
