#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagstat/ambient.hpp"

namespace lagstat {

/// Curve samples s_0..s_N with the endpoint included. Closed curves repeat the first point
/// at s_N. Velocities are optional; when absent they are finite-differenced.
struct SampledCurve {
  std::vector<double> s;
  std::vector<Vec4d> points;
  std::vector<Vec4d> velocity;
  bool closed = false;
  bool unit_speed = false;

  std::size_t size() const { return points.size(); }
  /// Velocity at sample i, analytic when cached.
  Vec4d tangent(std::size_t i) const;
  /// Largest gap |point(s_N) - point(s_0)|.
  double closure_defect() const;
  /// max |1 - |gamma'||, using the cached or differenced velocity.
  double speed_defect() const;
};

class BranchError : public std::runtime_error {
 public:
  explicit BranchError(const std::string& what) : std::runtime_error(what) {}
};

class LagrangianError : public std::runtime_error {
 public:
  explicit LagrangianError(const std::string& what) : std::runtime_error(what) {}
};

struct Lift {
  std::vector<double> phi;         // phi(s) = int_0^s gamma^* eta
  std::optional<double> period;    // closed curves only
  bool exact = false;              // |period| <= tol

  double require_period() const {
    if (!period) throw std::invalid_argument("period requested for an open curve");
    return *period;
  }
};

/// Integrates eta along the curve. Requires uniformly spaced parameters and >= 8 samples.
Lift lift_and_period(const SampledCurve& curve, double tol = 1e-10);

/// Lagrangian angle of a field of tangent frames (t1, t2): continuous branch of arg det.
/// Throws LagrangianError if a frame is not unitary within tol, BranchError on a jump > pi/2.
std::vector<double> lagrangian_angle(const std::vector<Vec4d>& t1, const std::vector<Vec4d>& t2,
                                     double tol = 1e-8);

/// Angle along a curve in S^3 using the frame (gamma, gamma').
std::vector<double> lagrangian_angle(const SampledCurve& curve, double tol = 1e-8);

struct Winding {
  long index = 0;
  double raw = 0.0;  // (beta(end) - beta(0)) / 2pi
  double gap = 0.0;  // |raw - index|
};

Winding maslov_winding(const std::vector<double>& beta);
Winding maslov_winding(const SampledCurve& loop, double tol = 1e-8);

}  // namespace lagstat
