#include <doctest.h>

#include <cmath>

#include "lagstat/graph.hpp"
#include "lagstat/stability.hpp"

using namespace lagstat;

namespace {

void zero_band(const GraphGrid& g, Eigen::VectorXd& v) {
  for (int i = 0; i < g.n1(); ++i)
    for (int j = 0; j < g.n2(); ++j)
      if (g.fixed(i, j)) v[g.index(i, j)] = 0.0;
}

double sup_diff(const GraphField& a, const GraphField& b) { return (a.u - b.u).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("grid layout") {
  const GraphGrid g = GraphGrid::square(8);
  CHECK(g.size() == 100);
  CHECK(g.x(1) == doctest::Approx(-0.5 + 0.0625));
  CHECK(g.fixed(1, 5));
  CHECK(g.fixed(8, 5));
  CHECK_FALSE(g.fixed(2, 7));
  CHECK(g.halved().h == 0.5 * g.h);
  CHECK_THROWS_AS(GraphGrid::square(2), std::invalid_argument);
  GraphField bad{g, Eigen::VectorXd::Zero(7)};
  CHECK_THROWS_AS(area(bad), std::invalid_argument);
}

TEST_CASE("discrete area and its derivatives") {
  const GraphGrid g = GraphGrid::square(16, 0.0, 1.0);
  CHECK(area(GraphField::sample(g, [](double, double) { return 0.0; })) == 1.0);
  // constant Hessians: sqrt((1 + a^2)(1 + b^2)) per unit area, with no truncation error
  const GraphField q = GraphField::sample(g, [](double x, double y) { return 0.35 * (x * x + y * y); });
  CHECK(area(q) == doctest::Approx(1.49).epsilon(1e-14));
  CHECK(area_gradient(q).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(area(GraphField::sample(g, [](double x, double y) { return 0.15 * (x * x - y * y); })) ==
        doctest::Approx(1.09).epsilon(1e-14));

  Uniform rng(7);
  const GraphField r = GraphField::sample(
      g, [&](double x, double y) { return 0.3 * std::sin(3 * x + 2 * y) + 0.1 * x * y * y + 0.01 * rng(-1, 1); });
  const Eigen::VectorXd grad = area_gradient(r);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = rng(-1, 1);
    zero_band(g, v);
    const double t = 1e-6;
    GraphField a = r, b = r;
    a.u += t * v;
    b.u -= t * v;
    const double fd = (area(a) - area(b)) / (2.0 * t);
    worst = std::max(worst, std::abs(fd - grad.dot(v)) / std::abs(grad.dot(v)));
  }
  CHECK(worst <= 1e-6);

  // Hessian columns against differenced gradients
  const GraphGrid s = GraphGrid::square(8);
  const GraphField f = GraphField::sample(s, [](double x, double y) { return 0.2 * std::sin(2 * x) * std::cos(y) + x * x * y; });
  const Eigen::MatrixXd H(area_hessian(f));
  double hw = 0.0;
  for (int k = 0; k < s.size(); ++k) {
    if (s.fixed(k / s.n2(), k % s.n2())) continue;
    GraphField a = f, b = f;
    a.u[k] += 1e-5;
    b.u[k] -= 1e-5;
    Eigen::VectorXd col = (area_gradient(a) - area_gradient(b)) / 2e-5;
    for (int i = 0; i < s.size(); ++i)
      if (!s.fixed(i / s.n2(), i % s.n2())) hw = std::max(hw, std::abs(col[i] - H(i, k)));
  }
  CHECK(hw <= 1e-6 * H.cwiseAbs().maxCoeff());
}

TEST_CASE("minimizer basics") {
  const GraphGrid g = GraphGrid::square(32);
  auto quad = [](double x, double y) { return 0.4 * x * x - 0.2 * x * y + 0.3 * y * y; };
  const GraphField exact = GraphField::sample(g, quad);

  const MinimizerState already = minimize(exact);
  CHECK(already.iterations == 0);
  CHECK(already.converged);

  Uniform rng(11);
  GraphField u0 = exact;
  for (int i = 0; i < g.n1(); ++i)
    for (int j = 0; j < g.n2(); ++j)
      if (!g.fixed(i, j)) u0.u[g.index(i, j)] += 1e-2 * rng(-1, 1);
  const MinimizerState st = minimize(u0);
  CHECK(st.converged);
  CHECK(sup_diff(st.field, exact) <= 1e-12);
  for (std::size_t k = 1; k < st.excess_history.size(); ++k) CHECK(st.excess_history[k] <= st.excess_history[k - 1]);
  for (int i = 0; i < g.n1(); ++i)
    for (int j = 0; j < g.n2(); ++j)
      if (g.fixed(i, j)) CHECK(st.field.u[g.index(i, j)] == u0.u[g.index(i, j)]);
  CHECK(minimize(st.field).iterations == 0);

  MinimizerConfig capped;
  capped.max_iterations = 1;
  CHECK_FALSE(minimize(u0, capped).converged);
}

TEST_CASE("small band data") {
  const GraphGrid g = GraphGrid::square(32);
  // a harmonic cubic has traceless Hessian, on which the area is exactly |Omega| plus its quadratic part
  const GraphField harmonic = GraphField::sample(g, [](double x, double y) { return 1e-3 * (x * x * x - 3 * x * y * y); });
  CHECK(sup_diff(biharmonic_extension(harmonic), harmonic) <= 1e-16);
  CHECK(sup_diff(minimize(harmonic).field, harmonic) <= 1e-16);

  double prev_dev = 0.0, prev_el = 0.0;
  for (double e : {1e-3, 5e-4, 2.5e-4}) {
    const GraphField band = GraphField::sample(g, [e](double x, double y) { return e * (x * x * x + x * y * y + 0.5 * y * y * y); });
    const GraphField bh = biharmonic_extension(band);
    MinimizerConfig cfg;
    cfg.tol = 2e-8 * e;
    const MinimizerState st = minimize(band, cfg);
    CHECK(st.converged);
    const double dev = sup_diff(st.field, bh);
    const double el = el_residual(bh).variational_max;
    if (prev_dev > 0.0) {
      CHECK(std::log2(prev_dev / dev) >= 2.9);  // cubic in e, so quadratic relative to the data
      CHECK(std::log2(prev_el / el) >= 2.5);
    }
    prev_dev = dev;
    prev_el = el;
  }
}

TEST_CASE("residuals and angle fields") {
  const GraphGrid g = GraphGrid::square(16);
  const GraphField q = GraphField::sample(g, [](double x, double y) { return 0.5 * 0.8 * (x * x + y * y); });
  const ELResidual el = el_residual(q);
  CHECK(el.printed_max <= 1e-10);  // rounding of fourth differences
  CHECK(el.variational_max <= 1e-10);
  const AngleField an = lagrangian_angle_field(q);
  CHECK(an.beta.value[g.index(8, 8)] == doctest::Approx(2.0 * std::atan(0.8)).epsilon(1e-14));
  CHECK(an.laplacian_max <= 1e-10);
  CHECK_THROWS_AS(el_residual(GraphField::sample(GraphGrid::square(6), [](double, double) { return 0.0; })),
                  std::invalid_argument);

  auto smooth = [](double x, double y) { return 0.2 * std::sin(2 * x) * std::cos(y) + 0.1 * x * x * y; };
  const GraphGrid g2 = GraphGrid::square(32);
  const GraphField s = GraphField::sample(g2, smooth);
  const AngleConsistency ac = angle_consistency(s);
  CHECK(ac.lagrangian <= 1e-10);
  CHECK(ac.sigma_plus_dbeta <= 2e-3);
  const AngleConsistency fine = angle_consistency(GraphField::sample(g2.halved(), smooth), 6);
  CHECK(std::log2(ac.sigma_plus_dbeta / fine.sigma_plus_dbeta) >= 1.8);
  // beta is far from constant, so the agreement is not trivial
  const AngleField bs = lagrangian_angle_field(s);
  CHECK(bs.beta.max_abs() > 0.01);
}
