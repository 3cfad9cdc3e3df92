#include "lagstat/curve.hpp"

#include <cmath>
#include <sstream>

#include "lagstat/quadrature.hpp"

namespace lagstat {

Vec4d SampledCurve::tangent(std::size_t i) const {
  if (!velocity.empty()) return velocity[i];
  const std::size_t n = points.size();
  if (n < 3) throw std::invalid_argument("curve needs at least 3 samples to difference");
  if (closed && (i == 0 || i + 1 == n)) {
    // points[n-1] duplicates points[0]
    const double h = s[1] - s[0];
    return (points[1] - points[n - 2]) / (2.0 * h);
  }
  if (i == 0) return (-3.0 * points[0] + 4.0 * points[1] - points[2]) / (s[2] - s[0]);
  if (i + 1 == n) return (3.0 * points[n - 1] - 4.0 * points[n - 2] + points[n - 3]) / (s[n - 1] - s[n - 3]);
  // nonuniform-safe central difference
  const double hm = s[i] - s[i - 1], hp = s[i + 1] - s[i];
  return (hm * hm * points[i + 1] - hp * hp * points[i - 1] + (hp * hp - hm * hm) * points[i]) /
         (hm * hp * (hm + hp));
}

double SampledCurve::closure_defect() const {
  if (points.empty()) return 0.0;
  return (points.back() - points.front()).norm();
}

double SampledCurve::speed_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) worst = std::max(worst, std::abs(1.0 - tangent(i).norm()));
  return worst;
}

Lift lift_and_period(const SampledCurve& curve, double tol) {
  const std::size_t n = curve.size();
  if (n < 8) throw std::invalid_argument("lift needs at least 8 samples");
  if (curve.s.size() != n) throw std::invalid_argument("parameter and point counts differ");
  const double h = curve.s[1] - curve.s[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs((curve.s[i] - curve.s[i - 1]) - h) > 1e-9 * std::abs(h) + 1e-15) {
      throw std::invalid_argument("lift needs uniformly spaced parameters");
    }
  }
  std::vector<double> integrand(n);
  for (std::size_t i = 0; i < n; ++i) integrand[i] = eta(curve.points[i], curve.tangent(i));
  Lift out;
  out.phi = quad::cumulative(integrand, h);
  if (curve.closed) {
    out.period = out.phi.back() - out.phi.front();
    out.exact = std::abs(*out.period) <= tol;
  }
  return out;
}

std::vector<double> lagrangian_angle(const std::vector<Vec4d>& t1, const std::vector<Vec4d>& t2, double tol) {
  if (t1.size() != t2.size()) throw std::invalid_argument("frame columns differ in length");
  std::vector<double> beta(t1.size());
  for (std::size_t i = 0; i < t1.size(); ++i) {
    const double w = omega(t1[i], t2[i]);
    const double unitary = std::max({std::abs(t1[i].squaredNorm() - 1.0), std::abs(t2[i].squaredNorm() - 1.0),
                                     std::abs(t1[i].dot(t2[i]))});
    if (std::abs(w) > tol || unitary > tol) {
      std::ostringstream msg;
      msg << "frame " << i << " is not a unitary Lagrangian frame (|omega| = " << std::abs(w)
          << ", unitarity defect " << unitary << ")";
      throw LagrangianError(msg.str());
    }
    const double raw = std::arg(complex_det(t1[i], t2[i]));
    if (i == 0) {
      beta[i] = raw;
      continue;
    }
    const double prev = beta[i - 1];
    const double k = std::round((prev - raw) / (2.0 * M_PI));
    const double next = raw + 2.0 * M_PI * k;
    if (std::abs(next - prev) > M_PI / 2) {
      std::ostringstream msg;
      msg << "angle jumps by " << std::abs(next - prev) << " between samples " << i - 1 << " and " << i
          << "; refine the sampling";
      throw BranchError(msg.str());
    }
    beta[i] = next;
  }
  return beta;
}

std::vector<double> lagrangian_angle(const SampledCurve& curve, double tol) {
  std::vector<Vec4d> t1(curve.size()), t2(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    t1[i] = curve.points[i];
    t2[i] = curve.tangent(i);
    if (!curve.unit_speed) t2[i].normalize();
  }
  return lagrangian_angle(t1, t2, tol);
}

Winding maslov_winding(const std::vector<double>& beta) {
  Winding w;
  if (beta.empty()) return w;
  w.raw = (beta.back() - beta.front()) / (2.0 * M_PI);
  w.index = std::lround(w.raw);
  w.gap = std::abs(w.raw - static_cast<double>(w.index));
  return w;
}

Winding maslov_winding(const SampledCurve& loop, double tol) { return maslov_winding(lagrangian_angle(loop, tol)); }

}  // namespace lagstat
