#pragma once

#include <vector>

#include "lagstat/cone.hpp"
#include "lagstat/immersion.hpp"
#include "lagstat/kernel.hpp"

namespace lagstat {

struct DensityResult {
  double a = 0.0;
  double ratio = 0.0;       // (pi a^2)^-1 int F_a da over the sampled surface
  double inner_tail = 0.0;  // estimate of the part inside the innermost row: F_a there times the cone area it spans
  double outer_edge = 0.0;  // max F_a / lambda on the outermost row; should vanish
  int nodes = 0;
};

/// (pi a^2)^-1 int F(t - 2 log a, theta) da along the lift (points of `imm`, phi values `phi`).
/// The u direction is radial (row 0 innermost). Throws SupportError if a node leaves B_2a or falls
/// below the table's t range.
DensityResult density_ratio(const KernelTables& tab, const SampledImmersion& imm, const std::vector<double>& phi,
                            double a);

/// Cone in log-radius coordinates: X(rho, s) = e^rho gamma(s), analytic jet, s periodic over the full length.
SampledImmersion cone_log_immersion(const ConeSpec& spec, double rho0, double rho1, int nrho, int ns);

/// Density ratio of a cone at radius a, sampled over rho in [log a - depth, log 1.9a], inside B_2a.
DensityResult cone_density(const KernelTables& tab, const ConeSpec& spec, double a, double depth = 25.0,
                           int nrho = 2601, int ns = 64);

}  // namespace lagstat
