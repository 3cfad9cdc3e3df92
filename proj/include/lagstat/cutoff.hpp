#pragma once

#include <stdexcept>
#include <string>

#include "lagstat/interp.hpp"

namespace lagstat {

/// Parameters of the cutoff alpha and the derived zeta, psi.
struct CutoffSpec {
  double c = 31.0;
  double tau = 0.0;       // (c + log 1/2) / 4
  double t0 = 0.0;        // -c + 2 tau, where alpha = 1/2
  double w = 0.0;         // mollifier half-width tau / 2
  double log_half = 0.0;  // log(1/2)
  double a1 = 0.0, a2 = 0.0;  // kinks of the linear part before smoothing: -c + w and log(1/2) - w
  double slope = 0.0;         // 1 / (a2 - a1) = 1 / (3 tau)
  double lambda = 0.0;        // psi(-inf): F = lambda and zeta = 1 - 2 lambda e^t on the far left
  double kappa = 0.0;         // far-left asymptote 1 - zeta = kappa e^t read off the integrating factor

  /// Throws std::invalid_argument unless c + log(1/2) > 2 pi e^(pi/2).
  static CutoffSpec make(double c);
  static double min_c();
};

/// alpha, zeta = e^t int_t^{log 1/2} e^-u alpha du and psi = -e^-t zeta' / 2 as smooth evaluators.
class Cutoff {
 public:
  /// Tables with `cells` uniform cells on [-c, log 1/2], filled by adaptive quadrature per cell.
  static Cutoff build(double c = 31.0, int cells = 8192);

  const CutoffSpec& spec() const { return spec_; }
  Jet3 alpha(double t) const;
  Jet3 zeta(double t) const;
  Jet3 psi(double t) const;
  /// 1 - zeta, accurate on the far left where zeta is close to 1.
  double one_minus_zeta(double t) const;

 private:
  CutoffSpec spec_;
  HermiteTable q_;     // smoothed ramp Q on [-w, w]
  HermiteTable s_;     // e^-t zeta
  HermiteTable psi_;
};

struct CutoffReport {
  double alpha_at_t0 = 0.0;      // |alpha(t0) - 1/2|
  double symmetry = 0.0;         // max |alpha(t) - 1 + alpha(2 t0 - t)|
  double alpha_increase = 0.0;   // max alpha' (should be <= 0)
  double concavity = 0.0;        // max alpha'' for t < t0 + tau
  double convexity = 0.0;        // max -alpha'' for t > t0 - tau
  double alpha_range = 0.0;      // distance of alpha outside [0, 1]
  double zeta_increase = 0.0;    // max zeta(t_{i+1}) - zeta(t_i), tolerance 0
  double zeta_right = 0.0;       // max |zeta| for t >= log 1/2
  double psi_negative = 0.0;     // max -psi
  double normalization = 0.0;    // |int e^t psi dt - 1/2|
  double asymptote = 0.0;        // max |1 - zeta - kappa e^t| for t <= -c - w
  double lambda_readings = 0.0;  // |kappa / (2 lambda) - 1|
  double ode = 0.0;              // max |zeta' - zeta + alpha| relative
  int grid_points = 0;
};

/// Grid scan of the cutoff conditions on `n` points over [-c - 2, log(1/2) + 2].
CutoffReport check_cutoff(const Cutoff& cut, int n = 200001);

}  // namespace lagstat
