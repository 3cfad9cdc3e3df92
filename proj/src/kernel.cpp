#include "lagstat/kernel.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lagstat/bessel.hpp"
#include "lagstat/quadrature.hpp"

namespace lagstat {

namespace {

using Vec4a = Eigen::Array<double, 4, 1>;

// theta > 0; components: eta integral, W, F integral, G integral
// W and F scale like lambda; they are integrated in units of lambda so one absolute tolerance fits all four
Vec4a kernel_integrals(const Cutoff& cut, double t, double theta, double abs_tol, double rel_tol) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double inv = 1.0 / cut.spec().lambda;
  auto f = [&](double u) -> Vec4a {
    const double cu = std::cos(u);
    const double mu = theta * std::sin(u), jac = theta * cu;
    const KernelJet k = bessel_kernel(theta * theta * cu * cu);
    const double em = std::exp(-mu);
    const double ps = cut.psi(mu + t).v * inv;
    Vec4a v;
    v[0] = 0.5 * k.k * em * cut.zeta(mu + t).v;
    v[1] = -k.k * ps;
    v[2] = 0.5 * (st * k.k + ct * 2.0 * theta * k.dk) * ps;
    v[3] = theta * k.dk * em * cut.alpha(mu + t).v;
    return v * jac;
  };
  Vec4a v = quad::adaptive_vec<4>(f, -M_PI / 2.0, M_PI / 2.0, abs_tol, rel_tol);
  v[1] *= cut.spec().lambda;
  v[2] *= cut.spec().lambda;
  return v;
}

double d1(const double* f, double h) { return (f[-2] - 8.0 * f[-1] + 8.0 * f[1] - f[2]) / (12.0 * h); }
double d2(const double* f, double h) {
  return (-f[-2] + 16.0 * f[-1] - 30.0 * f[0] + 16.0 * f[1] - f[2]) / (12.0 * h * h);
}

}  // namespace

KernelPoint kernel_point(const Cutoff& cut, double t, double theta, double abs_tol, double rel_tol) {
  const double th = std::abs(theta);
  KernelPoint p;
  if (th == 0.0) {
    p.F = cut.psi(t).v;
    p.G = cut.alpha(t).v;
    return p;
  }
  const Vec4a v = kernel_integrals(cut, t, th, abs_tol, rel_tol);
  const double sgn = theta < 0.0 ? -1.0 : 1.0;
  p.eta = sgn * v[0];
  p.W = sgn * v[1];
  p.F = 0.5 * (cut.psi(t + th).v + cut.psi(t - th).v) * std::cos(th) + v[2];
  p.G = 0.5 * (std::exp(-th) * cut.alpha(t + th).v + std::exp(th) * cut.alpha(t - th).v) + v[3];
  return p;
}

KernelTables build_kernel(const Cutoff& cut, const KernelGrid& grid, double path_tol) {
  const auto start = std::chrono::steady_clock::now();
  if (grid.nt < 8 || grid.ntheta < 8) throw std::invalid_argument("kernel grid needs at least 8 nodes per axis");
  KernelTables tab;
  tab.grid = grid;
  tab.cutoff = cut.spec();
  const int nt = grid.nt, nq = grid.ntheta;
  const double hq = grid.htheta();
  // two ghost columns on each side for the theta differences of path (a)
  Eigen::MatrixXd eta_x(nt, nq + 4), w_x(nt, nq + 4);
  tab.F.resize(nt, nq);
  tab.G.resize(nt, nq);
  tab.zeta.resize(nt);
  tab.dzeta.resize(nt);
  tab.psi.resize(nt);
  for (int i = 0; i < nt; ++i) {
    const double t = grid.t(i);
    const Jet3 z = cut.zeta(t);
    tab.zeta[i] = z.v;
    tab.dzeta[i] = z.d;
    tab.psi[i] = cut.psi(t).v;
    for (int e = 0; e < nq + 4; ++e) {
      const int j = e - 2;
      const double theta = grid.theta(j);
      if (theta < 0.0 && j >= 0 && nq - 1 - j < nq && grid.theta(nq - 1 - j) > 0.0) continue;  // mirrored below
      if (j < 0) continue;
      const KernelPoint p = kernel_point(cut, t, theta);
      eta_x(i, e) = p.eta;
      w_x(i, e) = p.W;
      if (j < nq) {
        tab.F(i, j) = p.F;
        tab.G(i, j) = p.G;
      }
    }
    // mirror: theta_{nq-1-j} = -theta_j
    for (int e = 0; e < nq + 4; ++e) {
      const int j = e - 2;
      const double theta = grid.theta(j);
      if (theta >= 0.0) continue;
      const int m = nq - 1 - j;
      eta_x(i, e) = -eta_x(i, m + 2);
      w_x(i, e) = -w_x(i, m + 2);
      if (j >= 0) {
        tab.F(i, j) = tab.F(i, m);
        tab.G(i, j) = tab.G(i, m);
      }
    }
  }
  tab.eta = eta_x.middleCols(2, nq);
  tab.W = w_x.middleCols(2, nq);
  tab.F_a.resize(nt, nq);
  tab.G_a.resize(nt, nq);
  for (int i = 0; i < nt; ++i) {
    const double et = std::exp(grid.t(i));
    for (int j = 0; j < nq; ++j) {
      const double th = grid.theta(j);
      double wr[5], er[5];
      for (int k = 0; k < 5; ++k) {
        wr[k] = w_x(i, j + k);
        er[k] = eta_x(i, j + k);
      }
      const double dW = d1(wr + 2, hq), deta = d1(er + 2, hq);
      tab.F_a(i, j) = -0.5 * (dW * std::cos(th) + wr[2] * std::sin(th));
      tab.G_a(i, j) = deta - et * dW;
    }
  }
  const double fmax = tab.F.cwiseAbs().maxCoeff(), gmax = tab.G.cwiseAbs().maxCoeff();
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < nq; ++j) {
      const double sf = std::max({std::abs(tab.F(i, j)), std::abs(tab.F_a(i, j)), 1e-14 * fmax});
      tab.path_deviation_F = std::max(tab.path_deviation_F, std::abs(tab.F_a(i, j) - tab.F(i, j)) / sf);
      // G is O(1) and vanishes on the right, so its deviation is floored at the table scale
      const double sg = std::max({std::abs(tab.G(i, j)), std::abs(tab.G_a(i, j)), 1e-4 * gmax});
      tab.path_deviation_G = std::max(tab.path_deviation_G, std::abs(tab.G_a(i, j) - tab.G(i, j)) / sg);
    }
  tab.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (tab.path_deviation_F > path_tol || tab.path_deviation_G > path_tol) {
    std::ostringstream msg;
    msg << "F/G computation paths disagree: relative deviation F " << tab.path_deviation_F << ", G "
        << tab.path_deviation_G << " (tolerance " << path_tol << ")";
    throw std::runtime_error(msg.str());
  }
  return tab;
}

double KernelTables::F_at(double t, double theta) const {
  if (!(t >= grid.t_min && t <= grid.t_max) || std::abs(theta) > M_PI / 2.0 + 1e-12) {
    std::ostringstream msg;
    msg << "F lookup at (t, theta) = (" << t << ", " << theta << ") is outside the kernel table";
    throw std::out_of_range(msg.str());
  }
  auto stencil = [](double u, int n, int& base, double w[4]) {
    int i = static_cast<int>(std::floor(u));
    i = std::max(1, std::min(n - 3, i));
    base = i - 1;
    cubic_weights(u - i, w);
  };
  int bi, bj;
  double wt[4], wq[4];
  stencil((t - grid.t_min) / grid.ht(), grid.nt, bi, wt);
  stencil((theta + M_PI / 2.0) / grid.htheta(), grid.ntheta, bj, wq);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) acc += wt[a] * wq[b] * F(bi + a, bj + b);
  return acc;
}

WaveReport check_wave(const Cutoff& cut, const KernelTables& tab) {
  WaveReport rep;
  const KernelGrid& g = tab.grid;
  const CutoffSpec& sp = tab.cutoff;
  const double ht = g.ht(), hq = g.htheta();
  const double eta_max = tab.eta.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd u = Eigen::MatrixXd::Ones(g.nt, g.ntheta) - tab.G;
  const double u_max = u.cwiseAbs().maxCoeff();
  auto residual = [&](const Eigen::MatrixXd& f, int i, int j) {
    double col[5], row[5];
    for (int k = 0; k < 5; ++k) {
      col[k] = f(i + k - 2, j);
      row[k] = f(i, j + k - 2);
    }
    return d2(col + 2, ht) - d2(row + 2, hq) - 2.0 * d1(col + 2, ht);
  };
  for (int i = 2; i < g.nt - 2; ++i)
    for (int j = 2; j < g.ntheta - 2; ++j) {
      rep.eta_residual = std::max(rep.eta_residual, std::abs(residual(tab.eta, i, j)) / eta_max);
      rep.companion_residual = std::max(rep.companion_residual, std::abs(residual(u, i, j)) / u_max);
    }
  const double delta = 1e-5;
  for (int i = 0; i < g.nt; ++i) {
    const double t = g.t(i);
    const KernelPoint p = kernel_point(cut, t, delta);
    rep.initial_value = std::max(rep.initial_value, std::abs(p.eta / delta - tab.zeta[i]));
    rep.companion_initial =
        std::max(rep.companion_initial, std::abs(1.0 - p.G - cut.alpha(2.0 * sp.t0 - t).v));
    for (int j = 0; j < g.ntheta; ++j) {
      const double th = g.theta(j);
      if (t < -sp.c - M_PI / 2.0) {
        const double expect = th - 2.0 * sp.lambda * std::exp(t) * std::sin(th);
        rep.far_left_eta = std::max(rep.far_left_eta, std::abs(tab.eta(i, j) - expect));
      }
      if (t > sp.log_half + M_PI / 2.0) rep.far_right_eta = std::max(rep.far_right_eta, std::abs(tab.eta(i, j)));
    }
  }
  for (int k = 0; k <= 200; ++k) {
    const double th = 0.5 * M_PI * k / 200.0;
    auto kd = [th](double u, double weight_exp) {
      const double cu = std::cos(u), mu = th * std::sin(u);
      return 2.0 * th * bessel_kernel(th * th * cu * cu).dk * std::exp(-weight_exp * mu) * th * cu;
    };
    const double ic = quad::adaptive([&](double u) { return kd(u, 0.0); }, -M_PI / 2, M_PI / 2, 1e-14, 1e-14).value;
    const double ie = quad::adaptive([&](double u) { return kd(u, 1.0); }, -M_PI / 2, M_PI / 2, 1e-14, 1e-14).value;
    rep.cosine_identity = std::max(rep.cosine_identity, std::abs(std::cos(th) - 1.0 - 0.5 * ic));
    rep.exponential_identity =
        std::max(rep.exponential_identity, std::abs(1.0 - 0.5 * (std::exp(-th) + std::exp(th) + ie)));
  }
  return rep;
}

MonotonicityReport certify_monotonicity(const Cutoff& cut, const KernelTables& tab, double tol) {
  MonotonicityReport rep;
  const KernelGrid& g = tab.grid;
  const CutoffSpec& sp = tab.cutoff;
  rep.min_F = tab.F.minCoeff();
  rep.min_G = tab.G.minCoeff();
  rep.max_G = tab.G.maxCoeff();
  rep.bounds_hold = rep.min_F >= -tol && rep.min_G >= -tol && rep.max_G <= 1.0 + tol;
  for (int i = 0; i < g.nt; ++i) {
    const double t = g.t(i);
    for (int j = 0; j < g.ntheta; ++j) {
      if (t < -sp.c - M_PI / 2.0) {
        rep.far_left_F = std::max(rep.far_left_F, std::abs(tab.F(i, j) / sp.lambda - 1.0));
        rep.far_left_G = std::max(rep.far_left_G, std::abs(tab.G(i, j) - 1.0));
      }
      if (t > sp.log_half + M_PI / 2.0)
        rep.far_right = std::max({rep.far_right, std::abs(tab.F(i, j)) / sp.lambda, std::abs(tab.G(i, j))});
    }
    rep.initial_F = std::max(rep.initial_F, std::abs(kernel_point(cut, t, 1e-7).F - tab.psi[i]) / sp.lambda);
  }
  // smallest |theta| at which G exceeds one
  rep.excess_theta = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.nt; ++i)
    for (int j = 0; j < g.ntheta; ++j)
      if (tab.G(i, j) > 1.0 + tol) rep.excess_theta = std::min(rep.excess_theta, std::abs(g.theta(j)));
  // shift scan: k is admissible when G(t_i - k h) >= G(t_i) - tol for every i and every column in the band.
  // Shifts that push the transition zone off the left end compare nothing and are not counted.
  const int k_max = static_cast<int>(std::floor((-sp.c - sp.w - M_PI / 2.0 - g.t_min) / g.ht()));
  auto scan = [&](double band, int& steps, double& theta0) {
    int last_bad = 0;
    for (int k = 1; k <= k_max; ++k) {
      bool ok = true;
      for (int i = k; i < g.nt && ok; ++i)
        for (int j = 0; j < g.ntheta; ++j)
          if (std::abs(g.theta(j)) < band && tab.G(i - k, j) < tab.G(i, j) - tol) {
            ok = false;
            break;
          }
      if (!ok) last_bad = k;
    }
    if (last_bad >= k_max) {
      steps = 0;
      theta0 = 0.0;
      return false;
    }
    steps = last_bad + 1;
    theta0 = std::exp(-0.5 * steps * g.ht());
    return true;
  };
  rep.shift_found = scan(std::numeric_limits<double>::infinity(), rep.shift_steps, rep.theta0);
  if (std::isfinite(rep.excess_theta))
    rep.band_shift_found = scan(rep.excess_theta, rep.band_shift_steps, rep.band_theta0);
  else {
    rep.band_shift_found = rep.shift_found;
    rep.band_shift_steps = rep.shift_steps;
    rep.band_theta0 = rep.theta0;
  }
  return rep;
}

}  // namespace lagstat
