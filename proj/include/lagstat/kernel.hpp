#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "lagstat/cutoff.hpp"

namespace lagstat {

/// Everything the wave solution gives at one (t, theta).
struct KernelPoint {
  double eta = 0.0;  // 1/2 int J0 e^-mu zeta(mu + t) dmu
  double W = 0.0;    // e^-t eta_t = -int J0 psi(mu + t) dmu
  double F = 0.0;    // explicit formula (psi terms plus nonnegative kernel integral)
  double G = 0.0;    // from the alpha data: e^t times the solution with u0 = e^-t alpha
};

/// Direct evaluation by adaptive quadrature in mu = theta sin u (any sign of theta).
KernelPoint kernel_point(const Cutoff& cut, double t, double theta, double abs_tol = 1e-10, double rel_tol = 1e-12);

struct KernelGrid {
  double t_min = -93.0, t_max = 3.0;
  int nt = 800, ntheta = 400;  // theta nodes span [-pi/2, pi/2] inclusive

  static KernelGrid for_cutoff(double c, int nt = 800, int ntheta = 400) { return {-3.0 * c, 3.0, nt, ntheta}; }
  double ht() const { return (t_max - t_min) / (nt - 1); }
  double htheta() const { return M_PI / (ntheta - 1); }
  double t(int i) const { return i + 1 == nt ? t_max : t_min + i * ht(); }
  double theta(int j) const { return -M_PI / 2.0 + j * htheta(); }
};

/// Tables on the grid; rows are t, columns theta. Path (b) is the explicit formulas, path (a)
/// differentiates eta and W numerically in theta.
struct KernelTables {
  KernelGrid grid;
  CutoffSpec cutoff;
  Eigen::MatrixXd eta, W, F, G;  // F, G: path (b)
  Eigen::MatrixXd F_a, G_a;      // path (a)
  Eigen::VectorXd zeta, dzeta, psi;
  double path_deviation_F = 0.0;  // max |F_a - F| / max(|F| row max, tiny)
  double path_deviation_G = 0.0;
  double build_seconds = 0.0;     // informational only, never serialized into reports

  /// Bicubic (4-point Lagrange) interpolation of F; throws std::out_of_range outside the t range.
  double F_at(double t, double theta) const;
};

/// Builds the tables; eta, W, F, G are odd/even in theta so only theta > 0 is integrated.
/// Throws std::runtime_error when the two paths disagree by more than `path_tol`.
KernelTables build_kernel(const Cutoff& cut, const KernelGrid& grid, double path_tol = 1e-4);

struct WaveReport {
  double eta_residual = 0.0;        // max |eta_tt - eta_thth - 2 eta_t| / max |eta|, fourth-order differences
  double companion_residual = 0.0;  // same operator on 1 - G, relative to max |1 - G|
  double initial_value = 0.0;       // max |eta(t, 0)| and |eta_theta(t, 0) - zeta(t)|
  double companion_initial = 0.0;   // max |1 - G(t, 0) - alpha(2 t0 - t)|
  double far_left_eta = 0.0;        // max |eta - theta + 2 lambda e^t sin theta| for t < -c - pi/2
  double far_right_eta = 0.0;       // max |eta| for t > log(1/2) + pi/2
  double cosine_identity = 0.0;     // max |cos theta - 1 - 1/2 int d_theta J0|
  double exponential_identity = 0.0;
};
WaveReport check_wave(const Cutoff& cut, const KernelTables& tab);

struct MonotonicityReport {
  double min_F = 0.0;
  double min_G = 0.0, max_G = 0.0;
  double far_left_F = 0.0;   // max |F / lambda - 1|
  double far_left_G = 0.0;   // max |G - 1|
  double far_right = 0.0;    // max |F| / lambda and |G|
  double initial_F = 0.0;    // max |F(t, 0+) - psi(t)| / lambda
  int shift_steps = 0;  // smallest k0 with G(t - k h, .) >= G(t, .) - tol for k0 <= k <= far-left margin
  double theta0 = 0.0;       // e^(-k0 h / 2); 0 when no shift works
  bool shift_found = false;
  double excess_theta = 0.0;  // smallest |theta| with G > 1 + tol (infinity if none)
  // the same scan restricted to |theta| < excess_theta
  int band_shift_steps = 0;
  double band_theta0 = 0.0;
  bool band_shift_found = false;
  bool bounds_hold = false;  // F >= -tol and -tol <= G <= 1 + tol everywhere
};
MonotonicityReport certify_monotonicity(const Cutoff& cut, const KernelTables& tab, double tol = 1e-8);

}  // namespace lagstat
