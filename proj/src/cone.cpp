#include "lagstat/cone.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace lagstat {

ConeSpec ConeSpec::make(int p, int q, int k) {
  if (p <= 0 || q <= 0) throw std::invalid_argument("cone needs positive integers p and q");
  if (std::gcd(p, q) != 1) {
    std::ostringstream msg;
    msg << "(p, q) = (" << p << ", " << q << ") is not a relatively prime pair; the cone family is indexed by "
        << "coprime p and q (covers are expressed through k)";
    throw std::invalid_argument(msg.str());
  }
  if (k < 1) throw std::invalid_argument("cover multiplicity k must be at least 1");
  return ConeSpec{p, q, k};
}

double ConeSpec::a() const { return (p - q) / (2.0 * std::sqrt(static_cast<double>(p) * q)); }
double ConeSpec::period() const { return 2.0 * M_PI * std::sqrt(static_cast<double>(p) * q); }
double ConeSpec::length() const { return k * period(); }
double ConeSpec::density() const { return k * std::sqrt(static_cast<double>(p) * q); }
double ConeSpec::mean_curvature_scale() const {
  return std::abs(q - p) / std::sqrt(static_cast<double>(p) * q);
}

CurveJet cone_curve(const ConeSpec& spec, double s) {
  const double p = spec.p, q = spec.q;
  const double norm = 1.0 / std::sqrt(p + q);
  const double w1 = std::sqrt(p / q), w2 = std::sqrt(q / p);
  const Complex e1 = std::polar(1.0, w1 * s);
  const Complex e2 = std::polar(1.0, -w2 * s);
  const Complex I(0.0, 1.0);
  const Complex z1 = norm * std::sqrt(q) * e1;
  const Complex z2 = norm * I * std::sqrt(p) * e2;
  CurveJet j;
  j.g = from_complex(z1, z2);
  j.dg = from_complex(I * w1 * z1, -I * w2 * z2);
  j.ddg = from_complex(-w1 * w1 * z1, -w2 * w2 * z2);
  return j;
}

ConeLink make_cone(const ConeSpec& spec, int n_samples) {
  if (n_samples < 16) throw std::invalid_argument("cone link needs at least 16 samples");
  ConeLink link;
  link.spec = spec;
  const double L = spec.length();
  const double h = L / (n_samples - 1);
  const double two_a = 2.0 * spec.a();
  link.curve.closed = true;
  link.curve.unit_speed = true;
  for (int i = 0; i < n_samples; ++i) {
    const double s = (i + 1 == n_samples) ? L : i * h;
    const CurveJet j = cone_curve(spec, s);
    link.curve.s.push_back(s);
    link.curve.points.push_back(j.g);
    link.curve.velocity.push_back(j.dg);
    link.beta.push_back(two_a * s);
  }
  return link;
}

double ValidationReport::worst() const {
  return std::max({unit_norm, unit_speed, legendrian, ode, angle_identity, angle_slope, closure});
}

ValidationReport validate_cone(const ConeLink& link) {
  ValidationReport rep;
  const SampledCurve& c = link.curve;
  const double two_a = 2.0 * link.spec.a();
  // frames are only loosely screened here; the defects below measure the actual deviation
  std::vector<double> beta;
  try {
    beta = lagrangian_angle(c, 1e-2);
  } catch (const std::runtime_error&) {
    beta.assign(c.size(), std::numeric_limits<double>::quiet_NaN());
  }
  double st = 0, sb = 0, stt = 0, stb = 0;
  const double n = static_cast<double>(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec4d& g = c.points[i];
    const Vec4d v = c.tangent(i);
    const double s = c.s[i];
    rep.unit_norm = std::max(rep.unit_norm, std::abs(g.norm() - 1.0));
    rep.unit_speed = std::max(rep.unit_speed, std::abs(v.norm() - 1.0));
    rep.legendrian = std::max(rep.legendrian, std::abs(metric(apply_J(g), v)));
    const Complex phase = std::polar(1.0, two_a * s);
    const Complex r1 = z1_of(v) + phase * std::conj(z2_of(g));
    const Complex r2 = z2_of(v) - phase * std::conj(z1_of(g));
    rep.ode = std::max({rep.ode, std::abs(r1), std::abs(r2)});
    const Complex det = z1_of(g) * z2_of(v) - z2_of(g) * z1_of(v);
    rep.angle_identity = std::max(rep.angle_identity, std::abs(det - phase));
    st += s;
    sb += beta[i];
    stt += s * s;
    stb += s * beta[i];
  }
  rep.fitted_slope = (n * stb - st * sb) / (n * stt - st * st);
  rep.angle_slope = std::isnan(rep.fitted_slope) ? std::numeric_limits<double>::infinity()
                                                  : std::abs(rep.fitted_slope - two_a);
  rep.closure = c.closure_defect();
  return rep;
}

ConeShape cone_shape(const ConeSpec& spec, double r, double s) {
  if (!(r > 0.0)) throw std::domain_error("cone_shape needs r > 0; the vertex is singular");
  const CurveJet j = cone_curve(spec, s);
  ConeShape out;
  out.H = (j.ddg + j.g) / r;
  const double pq = static_cast<double>(spec.p) * spec.q;
  out.JH = ((spec.q - spec.p) / std::sqrt(pq)) * j.dg / r;
  out.B11 = Vec4d::Zero();
  out.B12 = Vec4d::Zero();
  out.B22 = out.H;
  out.area_density = r;
  return out;
}

double ball_area(const ConeSpec& spec, double R) {
  if (!(R > 0.0)) throw std::domain_error("ball radius must be positive");
  return 0.5 * spec.length() * R * R;
}

SampledImmersion cone_immersion(const ConeSpec& spec, const GridSpec& grid, bool analytic) {
  if (analytic) {
    return SampledImmersion::from_jet(grid, [&](double r, double s) {
      const CurveJet j = cone_curve(spec, s);
      return NodeJet{r * j.g, j.g, r * j.dg, Vec4d::Zero(), j.dg, r * j.ddg};
    });
  }
  std::vector<Vec4d> pts(grid.size());
  for (int i = 0; i < grid.nu; ++i)
    for (int j = 0; j < grid.nv; ++j) pts[grid.index(i, j)] = grid.u(i) * cone_curve(spec, grid.v(j)).g;
  return SampledImmersion::from_points(grid, std::move(pts));
}

}  // namespace lagstat
