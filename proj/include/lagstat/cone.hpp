#pragma once

#include <stdexcept>

#include "lagstat/curve.hpp"
#include "lagstat/immersion.hpp"

namespace lagstat {

/// (p, q, k) cone: the k-fold cover of the cone over the Legendrian (p, q) curve in S^3.
struct ConeSpec {
  int p = 1, q = 1, k = 1;

  /// Validates p, q > 0 coprime and k >= 1.
  static ConeSpec make(int p, int q, int k = 1);

  double a() const;               // (p - q) / (2 sqrt(pq))
  double length() const;          // 2 pi k sqrt(pq)
  double period() const;          // 2 pi sqrt(pq), one sheet
  int maslov() const { return p - q; }
  double density() const;         // k sqrt(pq)
  bool knotted_candidate() const { return p > 1 && q > 1; }
  double mean_curvature_scale() const;  // |q - p| / sqrt(pq), |H| at r = 1
};

struct CurveJet {
  Vec4d g, dg, ddg;
};

/// gamma(s) and its first two derivatives in closed form.
CurveJet cone_curve(const ConeSpec& spec, double s);

struct ConeLink {
  ConeSpec spec;
  SampledCurve curve;
  std::vector<double> beta;  // 2 a s
};

/// Samples gamma on [0, L] (endpoint included) with analytic velocities.
ConeLink make_cone(const ConeSpec& spec, int n_samples);

struct ValidationReport {
  double unit_norm = 0.0;
  double unit_speed = 0.0;
  double legendrian = 0.0;
  double ode = 0.0;
  double angle_identity = 0.0;
  double angle_slope = 0.0;   // |fitted slope - 2a|
  double fitted_slope = 0.0;
  double closure = 0.0;

  double worst() const;
};

ValidationReport validate_cone(const ConeLink& link);

struct ConeShape {
  Vec4d H, JH;
  Vec4d B11, B12, B22;  // frame e1 = gamma, e2 = gamma'
  double area_density = 0.0;  // r
};

ConeShape cone_shape(const ConeSpec& spec, double r, double s);

/// Area of the cone inside the ball of radius R.
double ball_area(const ConeSpec& spec, double R);

/// Immersion (r, s) -> r gamma(s). With `analytic` the jet is exact; otherwise derivatives are
/// finite-differenced from the points. A full sheet is periodic in s.
SampledImmersion cone_immersion(const ConeSpec& spec, const GridSpec& grid, bool analytic);

}  // namespace lagstat
