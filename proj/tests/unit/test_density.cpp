#include <doctest.h>

#include <cmath>

#include "lagstat/density.hpp"

using namespace lagstat;

TEST_CASE("density ratios of planes and cones") {
  const Cutoff cut = Cutoff::build();
  const KernelTables tab = build_kernel(cut, KernelGrid::for_cutoff(31.0, 400, 100));
  const struct {
    int p, q;
  } cases[] = {{1, 1}, {1, 2}, {2, 3}};
  for (const auto& c : cases) {
    const ConeSpec spec = ConeSpec::make(c.p, c.q);
    double lo = 1e300, hi = -1e300;
    for (double a : {0.25, 0.5, 1.0}) {
      const DensityResult r = cone_density(tab, spec, a, 25.0, 1301, 32);
      CHECK(std::abs(r.ratio - std::sqrt(c.p * c.q)) <= 1e-3);
      CHECK(r.inner_tail <= 1e-9);
      CHECK(r.outer_edge == 0.0);
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
    CHECK((hi - lo) / lo <= 1e-3);
  }
  // a double cover doubles the ratio
  CHECK(cone_density(tab, ConeSpec::make(1, 2, 2), 0.5, 25.0, 1301, 64).ratio ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-3));

  // samples outside B_2a or below the table are refused
  const ConeSpec plane = ConeSpec::make(1, 1);
  const SampledImmersion wide = cone_log_immersion(plane, -10.0, std::log(2.5), 201, 16);
  CHECK_THROWS_AS(density_ratio(tab, wide, std::vector<double>(wide.size(), 0.0), 1.0), SupportError);
  const SampledImmersion deep = cone_log_immersion(plane, -60.0, 0.0, 201, 16);
  CHECK_THROWS_AS(density_ratio(tab, deep, std::vector<double>(deep.size(), 0.0), 1.0), SupportError);
}
