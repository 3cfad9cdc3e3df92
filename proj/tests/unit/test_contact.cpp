#include <doctest.h>

#include <cmath>

#include "lagstat/contact.hpp"

using namespace lagstat;

TEST_CASE("Heisenberg coordinates") {
  const Vec4d x(0.3, -0.4, 1.2, 0.5);
  for (double phi : {-2.0, -0.1, 0.0, 0.7}) {
    const HeisenbergPoint h = HeisenbergPoint::at(x, phi);
    CHECK(h.s == doctest::Approx(0.5 * x.squaredNorm()));
    CHECK(std::abs(h.s_tilde - 0.5 * h.r0 * h.r0) <= 1e-14);
    CHECK(std::abs(h.theta) <= M_PI / 2.0);
    CHECK(std::exp(h.t) * std::cos(h.theta) == doctest::Approx(h.s));
    CHECK(std::exp(h.t) * std::sin(h.theta) == doctest::Approx(phi));
  }
  CHECK(HeisenbergPoint::at(Vec4d::Zero(), 1.0).theta == doctest::Approx(M_PI / 2.0));
}

TEST_CASE("contact fields of s, phi and constants") {
  const Vec5d p(0.3, -0.2, 0.5, 0.1, 0.4);
  const Vec4d x = p.head<4>();
  const Hamiltonian hs{[](const Vec5d& q) { return 0.5 * q.head<4>().squaredNorm(); }, nullptr};
  const Vec5d Xs = contact_field(hs, p);
  CHECK((Xs.head<4>() - apply_J(x)).norm() <= 1e-9);
  const Hamiltonian hf{[](const Vec5d& q) { return q[4]; }, nullptr};
  const Vec5d Xf = contact_field(hf, p);
  CHECK((Xf.head<4>() + x).norm() <= 1e-9);
  CHECK((Xf.head<4>() - apply_J(Xs.head<4>())).norm() <= 1e-9);
  const Hamiltonian one{[](const Vec5d&) { return 1.0; }, [](const Vec5d&) { return Vec5d::Zero().eval(); }};
  const Vec5d X1 = contact_field(one, p);
  CHECK(X1.head<4>().norm() == 0.0);
  CHECK(X1[4] == -2.0);
  // alpha(X_h) = -2h
  const Hamiltonian hg{[](const Vec5d& q) { return std::sin(q[0]) * q[4] * q[4] + q[1] * q[2]; }, nullptr};
  CHECK(contact_form(p, contact_field(hg, p)) == doctest::Approx(-2.0 * hg.value(p)).epsilon(1e-8));
}

TEST_CASE("Lie derivative of the contact form") {
  const Hamiltonian hg{
      [](const Vec5d& p) { return std::sin(p[0]) * p[4] * p[4] + p[1] * p[2] + 0.3 * p[4] * p[3]; },
      [](const Vec5d& p) {
        Vec5d g;
        g << std::cos(p[0]) * p[4] * p[4], p[2], p[1], 0.3 * p[4], 2.0 * std::sin(p[0]) * p[4] + 0.3 * p[3];
        return g;
      }};
  const Vec5d p(0.3, -0.2, 0.5, 0.1, 0.4);
  std::vector<Vec5d> vs;
  for (int k = 0; k < 5; ++k) vs.push_back(Vec5d::Unit(k));
  vs.push_back(Vec5d(0.3, 0.1, -0.2, 0.5, 0.7));
  const LieCheck c = lie_check(hg, p, vs, 0.2, 100);
  CHECK(c.rate <= 1e-6);
  CHECK(c.flow <= 1e-6);
  // pure dilation field, where the conformal factor is exp(-2T)
  const Hamiltonian phi{[](const Vec5d& q) { return q[4]; }, nullptr};
  CHECK(lie_check(phi, p, vs, 0.2, 50).flow <= 1e-6);

  const Hamiltonian kink{[](const Vec5d& q) { return std::abs(q[0]); }, nullptr};
  CHECK_THROWS_AS(contact_field(kink, Vec5d::Zero()), NonDifferentiable);
  const Hamiltonian bad{[](const Vec5d& q) { return std::log(q[0]); }, nullptr};
  CHECK_THROWS_AS(contact_field(bad, Vec5d::Zero()), NonDifferentiable);
}

namespace {

GridSpec cone_patch(double h) {
  const int nr = static_cast<int>(std::lround(1.0 / h)) + 1, ns = static_cast<int>(std::lround(0.04 / h)) + 1;
  return GridSpec::closed(nr, 0.5, 1.5, ns, 0.3, 0.3 + (ns - 1) * h);
}

LegendrianLift cubic_graph(double h) {
  const int n = static_cast<int>(std::lround(0.5 / h)) + 1;
  return graph_lift(
      GridSpec::closed(n, 0.5, 1.0, n, 0.2, 0.7), [](double a, double) { return 1e-2 * a * a * a; },
      [](double a, double) { return Eigen::Vector2d(3e-2 * a * a, 0.0); });
}

}  // namespace

TEST_CASE("tangential identities on cones") {
  for (auto [p, q] : {std::pair{1, 2}, std::pair{2, 5}}) {
    const LegendrianLift l = cone_lift(p, q, cone_patch(1e-3));
    const TangentialReport r = tangential_identities(l);
    CHECK(r.norm_identity <= 1e-5);
    CHECK(r.div_t <= 1e-5);
    CHECK(r.div_theta <= 1e-5);
    CHECK(r.div_s <= 1e-12);
    CHECK(r.legendrian <= 1e-5);
    // dilation leaves homogeneous residuals unchanged
    const TangentialReport r2 = tangential_identities(scaled(l, 2.0));
    CHECK(r2.norm_identity == doctest::Approx(r.norm_identity).epsilon(1e-6));
    CHECK(r2.div_theta == doctest::Approx(r.div_theta).epsilon(1e-6));
    CHECK(r2.scale == doctest::Approx(r.scale / 4.0).epsilon(1e-12));
  }
}

TEST_CASE("tangential identities on a lifted cubic graph") {
  const TangentialReport coarse = tangential_identities(cubic_graph(2e-3));
  const TangentialReport fine = tangential_identities(cubic_graph(1e-3));
  CHECK(fine.worst() <= 1e-4);
  CHECK(fine.legendrian <= 1e-6);
  CHECK(std::log2(coarse.norm_identity / fine.norm_identity) >= 1.8);
  CHECK(std::log2(coarse.div_theta / fine.div_theta) >= 1.8);
  CHECK(std::log2(coarse.div_t / fine.div_t) >= 1.8);

  // a surface through s = 0 is refused, and so is a lift with the wrong phi
  const GridSpec g = GridSpec::closed(21, -0.5, 0.5, 21, -0.5, 0.5);
  const LegendrianLift through = graph_lift(
      g, [](double, double) { return 0.0; }, [](double, double) { return Eigen::Vector2d::Zero().eval(); });
  CHECK_THROWS_AS(tangential_identities(through), SupportError);
  LegendrianLift wrong = cubic_graph(2e-3);
  for (double& f : wrong.phi) f *= 1.5;
  CHECK_THROWS_AS(tangential_identities(wrong), std::runtime_error);
}
