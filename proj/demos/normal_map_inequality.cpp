// Certifies |Phi(N)| <= Phi(|N|) # V Phi(|N|) V* for a random normal N and a
// random Kraus map, then sweeps the beta family on the same input.

#include <cstdio>

#include "oplab/oplab.hpp"

using namespace oplab;

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  Rng rng(seed);
  const Index n = 4;
  const PositiveMap phi = random_map(MapKind::kraus, n, 3, rng);
  const ComplexMatrix x = random_normal(n, rng);

  const InequalityCertificate geo = certify_normal_geo(phi, x);
  std::printf("seed %llu, Phi: M_%ld -> M_%ld\n", static_cast<unsigned long long>(seed), static_cast<long>(n),
              static_cast<long>(phi.output_dim()));
  std::printf("geometric form: margin %.3e (scale %.3f) %s\n", geo.margin, geo.scale,
              geo.accepted ? "accepted" : "REJECTED");

  for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const InequalityCertificate c = certify_normal_beta(phi, x, beta);
    std::printf("beta %-4g margin %.3e %s\n", beta, c.margin, c.accepted ? "accepted" : "REJECTED");
  }

  // The bound without the V term need not hold; seed 1 gives a negative margin.
  const ComplexMatrix lhs = operator_abs(phi.apply(x)).matrix();
  const ComplexMatrix plain = phi.apply(operator_abs(x).matrix());
  std::printf("|Phi(N)| <= Phi(|N|) alone: margin %.3e\n", loewner_margin(lhs, plain));
  return geo.accepted ? 0 : 1;
}
