#include <doctest.h>

#include <cmath>

#include "lagstat/bessel.hpp"
#include "lagstat/cutoff.hpp"
#include "lagstat/kernel.hpp"

using namespace lagstat;

TEST_CASE("J0 series facts") {
  CHECK(bessel_j0(0.0) == 1.0);
  CHECK(bessel_j0_series(1.5).bound <= 1e-13);
  CHECK(bessel_j0(1.0) == doctest::Approx(0.7651976865579666).epsilon(1e-15));
  const double z = bessel_j0_first_zero();
  CHECK(z == doctest::Approx(2.404825557695773).epsilon(1e-13));
  CHECK(z >= M_PI / 2.0);
  CHECK_THROWS_AS(bessel_j0(4.5), std::domain_error);
  CHECK_THROWS_AS(bessel_j0(-0.1), std::domain_error);

  const int n = 10000;
  double prev_v = 0.0, ode = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = 0.5 * M_PI * i / n;
    const double j = bessel_j0(s);
    CHECK(j > 0.0);
    if (i > 0) CHECK(bessel_j0_prime(s) < 0.0);
    CHECK(bessel_j0_second(s) < 0.0);
    if (i < n) {
      const double v = j / std::cos(s);
      CHECK(v >= std::cos(s));
      if (i > 0) CHECK(v > prev_v);
      prev_v = v;
    }
    if (i > 0 && i < n) {
      const double h = 1e-4;
      const double dd = (bessel_j0(s + h) - 2.0 * j + bessel_j0(s - h)) / (h * h);
      const double d = (bessel_j0(s + h) - bessel_j0(s - h)) / (2.0 * h);
      ode = std::max(ode, std::abs(dd + d / s + j));
    }
  }
  CHECK(ode <= 1e-6);  // dominated by the differencing, not the series

  // analytic derivatives against the series
  for (double s : {0.3, 1.1, 2.9}) {
    CHECK(bessel_j0_second(s) == doctest::Approx(-bessel_j0_prime(s) / s - bessel_j0(s)).epsilon(1e-13));
    const KernelJet k = bessel_kernel(s * s);
    CHECK(k.k == doctest::Approx(bessel_j0(s)).epsilon(1e-14));
    CHECK(2.0 * s * k.dk == doctest::Approx(bessel_j0_prime(s)).epsilon(1e-13));
  }
}

TEST_CASE("cutoff construction") {
  CHECK(CutoffSpec::min_c() == doctest::Approx(2.0 * M_PI * std::exp(M_PI / 2.0) + std::log(2.0)));
  CHECK_THROWS_AS(CutoffSpec::make(20.0), std::invalid_argument);
  CHECK_NOTHROW(CutoffSpec::make(31.0));

  const Cutoff cut = Cutoff::build(31.0);
  const CutoffSpec& sp = cut.spec();
  CHECK(sp.tau == doctest::Approx(7.576713).epsilon(1e-6));
  CHECK(sp.tau > M_PI / 2.0);
  CHECK(sp.t0 == doctest::Approx(-15.846574).epsilon(1e-6));
  CHECK(sp.lambda == doctest::Approx(2.926083493e10).epsilon(1e-9));

  const CutoffReport r = check_cutoff(cut);
  CHECK(r.alpha_at_t0 <= 1e-14);
  CHECK(r.symmetry <= 1e-12);
  CHECK(r.alpha_increase <= 0.0);
  CHECK(r.concavity <= 0.0);
  CHECK(r.convexity <= 0.0);
  CHECK(r.alpha_range <= 0.0);
  CHECK(r.zeta_increase <= 0.0);
  CHECK(r.zeta_right == 0.0);
  CHECK(r.psi_negative <= 0.0);
  CHECK(r.normalization <= 1e-8);
  CHECK(r.asymptote <= 1e-10);
  CHECK(r.lambda_readings <= 1e-10);
  CHECK(r.ode <= 1e-10);

  CHECK(cut.zeta(1.0).v == 0.0);
  CHECK(cut.alpha(-40.0).v == 1.0);
  CHECK(cut.one_minus_zeta(-60.0) == doctest::Approx(sp.kappa * std::exp(-60.0)).epsilon(1e-12));

  // a larger c still builds and keeps the normalization
  const Cutoff big = Cutoff::build(62.0, 4096);
  CHECK(check_cutoff(big, 20001).normalization <= 1e-8);
}

TEST_CASE("kernel point formulas") {
  const Cutoff cut = Cutoff::build();
  const CutoffSpec& sp = cut.spec();
  const KernelPoint z = kernel_point(cut, -10.0, 0.0);
  CHECK(z.F == cut.psi(-10.0).v);
  CHECK(z.G == cut.alpha(-10.0).v);

  const KernelPoint a = kernel_point(cut, -12.0, 0.8), b = kernel_point(cut, -12.0, -0.8);
  CHECK(a.eta == -b.eta);
  CHECK(a.W == -b.W);
  CHECK(a.F == b.F);
  CHECK(a.G == b.G);

  // regimes
  const KernelPoint left = kernel_point(cut, -40.0, 1.2);
  CHECK(left.F / sp.lambda == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(left.G == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(left.eta == doctest::Approx(1.2 - 2.0 * sp.lambda * std::exp(-40.0) * std::sin(1.2)).epsilon(1e-10));
  const KernelPoint right = kernel_point(cut, 1.5, 1.2);
  CHECK(right.eta == 0.0);
  CHECK(right.F == 0.0);
  CHECK(std::abs(right.G) <= 1e-14);

  // G exceeds one near the left corner at the θ = ±π/2 edge; the value is frozen
  CHECK(kernel_point(cut, -26.9095, M_PI / 2.0).G == doctest::Approx(1.0071888427).epsilon(1e-9));
  CHECK(kernel_point(cut, -26.9095, 1.0).G <= 1.0);
}

TEST_CASE("kernel tables on a coarse grid") {
  const Cutoff cut = Cutoff::build();
  const KernelTables tab = build_kernel(cut, KernelGrid::for_cutoff(31.0, 200, 100));
  CHECK(tab.path_deviation_F <= 1e-4);
  CHECK(tab.path_deviation_G <= 1e-4);
  CHECK(tab.F(0, 0) == tab.F(0, 99));

  const WaveReport w = check_wave(cut, tab);
  CHECK(w.eta_residual <= 1e-3);
  CHECK(w.companion_residual <= 1e-3);
  CHECK(w.initial_value <= 1e-6);
  CHECK(w.companion_initial <= 1e-6);
  CHECK(w.far_left_eta <= 1e-6);
  CHECK(w.far_right_eta <= 1e-6);
  CHECK(w.cosine_identity <= 1e-8);
  CHECK(w.exponential_identity <= 1e-8);

  const MonotonicityReport p = certify_monotonicity(cut, tab);
  CHECK(p.min_F >= -1e-8);
  CHECK(p.min_G >= -1e-8);
  CHECK(p.max_G > 1.007);
  CHECK_FALSE(p.bounds_hold);
  CHECK(p.excess_theta > 1.2);
  CHECK(p.excess_theta < M_PI / 2.0);
  CHECK_FALSE(p.shift_found);
  CHECK(p.band_shift_found);
  CHECK(p.band_theta0 > 0.0);
  CHECK(p.band_theta0 < 1.0);
  CHECK(p.far_left_F <= 1e-6);
  CHECK(p.far_left_G <= 1e-6);
  CHECK(p.far_right <= 1e-6);

  // interpolation reproduces the nodes and a midpoint
  CHECK(tab.F_at(tab.grid.t(50), tab.grid.theta(30)) == doctest::Approx(tab.F(50, 30)).epsilon(1e-12));
  const double tm = 0.5 * (tab.grid.t(120) + tab.grid.t(121)), qm = 0.5 * (tab.grid.theta(40) + tab.grid.theta(41));
  CHECK(std::abs(tab.F_at(tm, qm) - kernel_point(cut, tm, qm).F) <= 1e-3 * cut.spec().lambda);
  CHECK_THROWS_AS(tab.F_at(10.0, 0.0), std::out_of_range);
}
