#include <doctest.h>

#include <cmath>

#include "lagstat/ambient.hpp"
#include "lagstat/cone.hpp"
#include "lagstat/curve.hpp"
#include "lagstat/immersion.hpp"
#include "lagstat/stability.hpp"

using namespace lagstat;

namespace {

Vec4d random_vec(Uniform& u) { return Vec4d(u(-1, 1), u(-1, 1), u(-1, 1), u(-1, 1)); }

SampledCurve circle(int n, bool reverse = false, bool analytic = true) {
  SampledCurve c;
  c.closed = true;
  for (int i = 0; i < n; ++i) {
    const double s = 2.0 * M_PI * i / (n - 1);
    const double a = reverse ? -s : s;
    c.s.push_back(s);
    c.points.emplace_back(std::cos(a), std::sin(a), 0.0, 0.0);
    if (analytic) c.velocity.emplace_back(-std::sin(a) * (reverse ? -1 : 1), std::cos(a) * (reverse ? -1 : 1), 0, 0);
  }
  return c;
}

}  // namespace

TEST_CASE("ambient conventions") {
  const Vec4d dx1(1, 0, 0, 0), dy1(0, 1, 0, 0);
  CHECK(omega(dx1, dy1) == 1.0);
  const Vec4d v(1, 2, 3, 4);
  CHECK(omega(v, v) == 0.0);
  CHECK(apply_J(dx1) == dy1);
  CHECK(apply_J(dy1) == -dx1);

  Uniform u(11);
  for (int i = 0; i < 100; ++i) {
    const Vec4d a = random_vec(u), b = random_vec(u);
    CHECK(std::abs(omega(a, apply_J(b)) - metric(a, b)) <= 1e-14);
    CHECK(std::abs(omega(apply_J(a), apply_J(b)) - omega(a, b)) <= 1e-14);
    CHECK(std::abs(a.dot(omega_matrix() * b) - omega(a, b)) <= 1e-14);
    CHECK((complex_structure() * a - apply_J(a)).norm() == 0.0);
  }
  // d eta = 2 omega: eta_p(v) = p^T E v has exterior derivative (E - E^T)/... evaluated on basis planes
  const Mat4d E = eta_matrix();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const Vec4d ei = Vec4d::Unit(i), ej = Vec4d::Unit(j);
      // d eta(ei, ej) = d_i eta_j - d_j eta_i with eta_j(p) = (p^T E)_j
      const double d = E(i, j) - E(j, i);
      CHECK(d == doctest::Approx(2.0 * omega(ei, ej)));
    }
  CHECK(std::get<double>(pair<double>(dx1, dy1, Pairing::omega)) == 1.0);
  CHECK(std::get<Vec4d>(pair<double>(dx1, dy1, Pairing::j_apply)) == dy1);
}

TEST_CASE("period of curves") {
  const Lift c = lift_and_period(circle(513));
  CHECK(c.require_period() == doctest::Approx(2.0 * M_PI).epsilon(1e-8));
  const Lift r = lift_and_period(circle(513, true));
  CHECK(r.require_period() == doctest::Approx(-2.0 * M_PI).epsilon(1e-8));
  // differenced velocities are second order
  const double e1 = std::abs(lift_and_period(circle(257, false, false)).require_period() - 2.0 * M_PI);
  const double e2 = std::abs(lift_and_period(circle(513, false, false)).require_period() - 2.0 * M_PI);
  CHECK(e2 <= 2e-4);
  CHECK(std::log2(e1 / e2) >= 1.9);

  SampledCurve open = circle(64);
  open.closed = false;
  CHECK_THROWS_AS(lift_and_period(open).require_period(), std::invalid_argument);

  const ConeLink link = make_cone(ConeSpec::make(1, 2), 4096);
  const Lift lift = lift_and_period(link.curve);
  CHECK(lift.exact);
  double worst = 0.0;
  for (double v : lift.phi) worst = std::max(worst, std::abs(v));
  CHECK(worst <= 1e-10);
}

TEST_CASE("maslov winding") {
  CHECK(maslov_winding(make_cone(ConeSpec::make(1, 1), 256).curve).index == 0);
  const ConeLink l23 = make_cone(ConeSpec::make(2, 3), 8192);
  CHECK(maslov_winding(l23.curve).index == -1);

  // finite-differenced velocity, refined and reparameterized samplings give the same index
  SampledCurve fd = l23.curve;
  fd.velocity.clear();
  fd.unit_speed = false;
  CHECK(maslov_winding(fd, 1e-5).index == -1);

  const ConeSpec s35 = ConeSpec::make(3, 5);
  SampledCurve warped;
  warped.closed = true;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    const double s = s35.length() * (x + 0.05 * std::sin(2.0 * M_PI * x));
    warped.s.push_back(s);
    warped.points.push_back(cone_curve(s35, s).g);
  }
  CHECK(maslov_winding(warped, 1e-4).index == -2);
  CHECK(maslov_winding(make_cone(s35, 2 * n).curve).index == -2);

  // coarse sampling of a fast-turning angle fails loudly instead of aliasing
  SampledCurve coarse = make_cone(ConeSpec::make(1, 9), 16).curve;
  CHECK_THROWS_AS(lagrangian_angle(coarse), BranchError);
}

TEST_CASE("non-Lagrangian frame is rejected") {
  std::vector<Vec4d> t1{Vec4d(1, 0, 0, 0)}, t2{Vec4d(0, 1, 0, 0)};
  CHECK_THROWS_AS(lagrangian_angle(t1, t2), LagrangianError);
}

TEST_CASE("flat plane shape") {
  const GridSpec g = GridSpec::closed(21, -1, 1, 21, -1, 1);
  std::vector<Vec4d> pts(g.size());
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) pts[g.index(i, j)] = Vec4d(g.u(i), 0.0, g.v(j), 0.0);
  SampledImmersion imm = SampledImmersion::from_points(g, pts);
  imm.shape();
  for (int k = 0; k < g.size(); ++k) {
    CHECK(imm.H(k).norm() <= 1e-12);
    CHECK(imm.sigma_H().sigma[k].norm() <= 1e-12);
  }
  CHECK(imm.sigma_H().max_d(g) <= 1e-12);
  CHECK(imm.area() == doctest::Approx(4.0));
}

TEST_CASE("graph of a quadratic is an affine Lagrangian plane") {
  const double c = 0.7;
  const GridSpec g = GridSpec::closed(17, -1, 1, 17, -1, 1);
  std::vector<Vec4d> pts(g.size());
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) pts[g.index(i, j)] = Vec4d(g.u(i), c * g.u(i), g.v(j), c * g.v(j));
  SampledImmersion imm = SampledImmersion::from_points(g, pts);
  imm.shape();
  CHECK(imm.lagrangian_defect() <= 1e-14);
  for (int k = 0; k < g.size(); ++k) {
    CHECK(imm.H(k).norm() <= 1e-10);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int l = 0; l < 2; ++l) CHECK(std::abs(imm.h(k, a, b, l)) <= 1e-10);
  }
}

TEST_CASE("degenerate metric names the node") {
  const GridSpec g = GridSpec::closed(5, 0, 1, 5, 0, 1);
  std::vector<Vec4d> pts(g.size());
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) pts[g.index(i, j)] = Vec4d(g.u(i), 0, 0, 0);
  SampledImmersion imm = SampledImmersion::from_points(g, pts);
  try {
    imm.shape();
    FAIL("expected a degenerate-metric error");
  } catch (const DegenerateMetric& e) {
    CHECK(e.i == 0);
    CHECK(e.j == 0);
    CHECK(std::string(e.what()).find("(0, 0)") != std::string::npos);
  }
}

TEST_CASE("cone immersion shape and sigma sign") {
  const ConeSpec spec = ConeSpec::make(1, 2);
  const GridSpec g = GridSpec::closed(301, 0.5, 2.0, 41, 0.0, 0.2);
  SampledImmersion imm = cone_immersion(spec, g, false);
  imm.shape();
  double worst_h = 0.0, worst_tan = 0.0, worst_sym = 0.0, worst_sigma = 0.0;
  for (int i = 2; i < g.nu - 2; ++i) {
    for (int j = 2; j < g.nv - 2; ++j) {
      const int k = g.index(i, j);
      const ConeShape cs = cone_shape(spec, g.u(i), g.v(j));
      worst_h = std::max(worst_h, (imm.H(k) - cs.H).norm());
      worst_tan = std::max({worst_tan, std::abs(imm.H(k).dot(imm.e(k, 0))), std::abs(imm.H(k).dot(imm.e(k, 1)))});
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c) {
            worst_sym = std::max(worst_sym, std::abs(imm.h(k, a, b, c) - imm.h(k, a, c, b)));
            worst_sym = std::max(worst_sym, std::abs(imm.h(k, a, b, c) - imm.h(k, b, a, c)));
          }
      // sigma_H = -d beta with beta = 2as along the link: sigma(d_s) = -2a, sigma(d_r) = 0
      const Eigen::Vector2d sig = imm.sigma_H().sigma[k];
      worst_sigma = std::max({worst_sigma, std::abs(sig[0]), std::abs(sig[1] + 2.0 * spec.a())});
    }
  }
  CHECK(worst_h <= 1e-4);
  CHECK(worst_tan <= 1e-5);
  CHECK(worst_sym <= 1e-4);
  CHECK(worst_sigma <= 1e-4);
  CHECK(imm.sigma_H().max_d(g, 2) <= 1e-3);
}

TEST_CASE("straight-line second variation") {
  const GridSpec g = GridSpec::closed(41, -1, 1, 41, -1, 1);
  std::vector<Vec4d> pts(g.size());
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) {
      const double x = g.u(i), y = g.v(j);
      pts[g.index(i, j)] = Vec4d(x, 0.1 * x * y, y, 0.05 * (x * x - y * y));
    }
  SampledImmersion imm = SampledImmersion::from_points(g, pts);
  imm.shape();

  std::vector<Vec4d> constant(g.size(), Vec4d::Zero());
  CHECK(straight_line_second_variation(imm, constant) == 0.0);

  Uniform u(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec4d amp = random_vec(u);
    const double cx = u(-0.3, 0.3), cy = u(-0.3, 0.3), w = u(0.4, 0.6);
    std::vector<Vec4d> X(g.size());
    for (int i = 0; i < g.nu; ++i)
      for (int j = 0; j < g.nv; ++j) {
        const double bx = bump_jet((g.u(i) - cx) / w).z, by = bump_jet((g.v(j) - cy) / w).z;
        X[g.index(i, j)] = amp * bx * by * (1.0 + g.u(i) * g.v(j));
      }
    const double q = straight_line_second_variation(imm, X);
    const double t = 1e-3;
    const double fd =
        (displaced_area(g, pts, X, t) - 2.0 * displaced_area(g, pts, X, 0.0) + displaced_area(g, pts, X, -t)) /
        (t * t);
    CHECK(std::abs(q - fd) <= 1e-5 * std::max(1.0, std::abs(q)));
    std::vector<Vec4d> X3(X);
    for (auto& v : X3) v *= 3.0;
    CHECK(straight_line_second_variation(imm, X3) == doctest::Approx(9.0 * q).epsilon(1e-12));
  }

  std::vector<Vec4d> leak(g.size(), Vec4d(1, 0, 0, 0));
  CHECK_THROWS_AS(straight_line_second_variation(imm, leak), SupportError);
}
