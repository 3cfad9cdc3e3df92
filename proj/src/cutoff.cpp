#include "lagstat/cutoff.hpp"

#include <cmath>
#include <sstream>

#include "lagstat/quadrature.hpp"

namespace lagstat {

namespace {

// C-infinity smoothstep on [0, 1]: e^(-1/s) / (e^(-1/s) + e^(-1/(1-s))), with two derivatives.
Jet3 smoothstep(double s) {
  if (s <= 0.0) return {0.0, 0.0, 0.0};
  if (s >= 1.0) return {1.0, 0.0, 0.0};
  const double e = 1.0 / s - 1.0 / (1.0 - s);
  const double g = 1.0 / (1.0 + std::exp(e));
  const double sc = 1.0 - s;
  const double a = 1.0 / (s * s) + 1.0 / (sc * sc);
  const double da = -2.0 / (s * s * s) + 2.0 / (sc * sc * sc);
  const double d = g * (1.0 - g) * a;
  return {g, d, (1.0 - 2.0 * g) * d * a + g * (1.0 - g) * da};
}

}  // namespace

double CutoffSpec::min_c() { return 2.0 * M_PI * std::exp(M_PI / 2.0) - std::log(0.5); }

CutoffSpec CutoffSpec::make(double c) {
  if (!(c > min_c())) {
    std::ostringstream msg;
    msg << "cutoff constant c = " << c << " needs c + log(1/2) > 2 pi e^(pi/2), i.e. c > " << min_c();
    throw std::invalid_argument(msg.str());
  }
  CutoffSpec s;
  s.c = c;
  s.log_half = std::log(0.5);
  s.tau = 0.25 * (c + s.log_half);
  s.t0 = -c + 2.0 * s.tau;
  s.w = 0.5 * s.tau;
  s.a1 = -c + s.w;
  s.a2 = s.log_half - s.w;
  s.slope = 1.0 / (s.a2 - s.a1);
  return s;
}

Cutoff Cutoff::build(double c, int cells) {
  Cutoff cut;
  cut.spec_ = CutoffSpec::make(c);
  const CutoffSpec& sp = cut.spec_;
  const double w = sp.w;

  // smoothed ramp Q(x) = int_{-w}^x P, P(x) = smoothstep((x + w) / 2w)
  auto P = [w](double x) { return smoothstep((x + w) / (2.0 * w)); };
  {
    const int n = 4096;
    const double h = 2.0 * w / n;
    std::vector<Jet3> q(n + 1);
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x = -w + i * h;
      if (i > 0) acc += quad::adaptive([&](double u) { return P(u).v; }, x - h, x, 1e-18, 1e-14).value;
      const Jet3 p = P(x);
      q[i] = {acc, p.v, p.d / (2.0 * w)};
    }
    cut.q_ = HermiteTable(-w, h, std::move(q));
  }

  const double L = sp.log_half, a = -sp.c;
  const double h = (L - a) / cells;
  std::vector<Jet3> s(cells + 1), ps(cells + 1);
  double acc_s = 0.0, acc_p = 0.0;
  for (int i = cells; i >= 0; --i) {
    const double t = (i == cells) ? L : a + i * h;
    if (i < cells) {
      const double hi = (i + 1 == cells) ? L : t + h;
      const double floor = 1e-17 * std::exp(-t) * h;
      acc_s += quad::adaptive([&](double u) { return std::exp(-u) * cut.alpha(u).v; }, t, hi, floor, 1e-14).value;
      acc_p += quad::adaptive([&](double u) { return -std::exp(-u) * cut.alpha(u).d; }, t, hi, floor, 1e-14).value;
    }
    const Jet3 al = cut.alpha(t);
    const double et = std::exp(-t);
    // (e^-t zeta)' = -e^-t alpha, psi' = e^-t alpha' / 2
    s[i] = {acc_s, -et * al.v, et * (al.v - al.d)};
    ps[i] = {0.5 * acc_p, 0.5 * et * al.d, 0.5 * et * (al.dd - al.d)};
  }
  cut.s_ = HermiteTable(a, h, std::move(s));
  cut.psi_ = HermiteTable(a, h, std::move(ps));
  cut.spec_.lambda = cut.psi_.samples().front().v;
  // e^-t (1 - zeta) = e^-L + int_t^L e^-u (1 - alpha) du for t <= -c: the integrating factor without cancellation
  cut.spec_.kappa = std::exp(-L) + quad::adaptive([&](double u) { return std::exp(-u) * (1.0 - cut.alpha(u).v); },
                                                  a, L, 1e-16 * std::exp(sp.c), 1e-15, 20000)
                                       .value;
  return cut;
}

Jet3 Cutoff::alpha(double t) const {
  const double k = spec_.slope, w = spec_.w;
  // value from the ramp table, derivatives straight from the smoothstep so their signs are exact
  auto ramp = [&](double x) -> Jet3 {
    if (x <= -w) return {0.0, 0.0, 0.0};
    if (x >= w) return {x, 1.0, 0.0};
    const Jet3 p = smoothstep((x + w) / (2.0 * w));
    return {q_(x).v, p.v, p.d / (2.0 * w)};
  };
  const Jet3 r1 = ramp(t - spec_.a1), r2 = ramp(t - spec_.a2);
  return {1.0 - k * (r1.v - r2.v), -k * (r1.d - r2.d), -k * (r1.dd - r2.dd)};
}

Jet3 Cutoff::zeta(double t) const {
  if (t >= spec_.log_half) return {};
  if (t <= -spec_.c) {
    const double e = spec_.kappa * std::exp(t);
    return {1.0 - e, -e, -e};
  }
  const Jet3 s = s_(t);
  const double et = std::exp(t);
  return {et * s.v, et * (s.v + s.d), et * (s.v + 2.0 * s.d + s.dd)};
}

double Cutoff::one_minus_zeta(double t) const {
  if (t <= -spec_.c) return spec_.kappa * std::exp(t);
  return 1.0 - zeta(t).v;
}

Jet3 Cutoff::psi(double t) const {
  if (t >= spec_.log_half) return {};
  if (t <= -spec_.c) return {spec_.lambda, 0.0, 0.0};
  return psi_(t);
}

CutoffReport check_cutoff(const Cutoff& cut, int n) {
  const CutoffSpec& sp = cut.spec();
  CutoffReport rep;
  rep.grid_points = n;
  rep.alpha_at_t0 = std::abs(cut.alpha(sp.t0).v - 0.5);
  const double lo = -sp.c - 2.0, hi = sp.log_half + 2.0;
  const double h = (hi - lo) / (n - 1);
  double prev_zeta = cut.zeta(lo).v;
  for (int i = 0; i < n; ++i) {
    const double t = lo + i * h;
    const Jet3 a = cut.alpha(t);
    rep.symmetry = std::max(rep.symmetry, std::abs(a.v - 1.0 + cut.alpha(2.0 * sp.t0 - t).v));
    rep.alpha_increase = std::max(rep.alpha_increase, a.d);
    if (t < sp.t0 + sp.tau) rep.concavity = std::max(rep.concavity, a.dd);
    if (t > sp.t0 - sp.tau) rep.convexity = std::max(rep.convexity, -a.dd);
    rep.alpha_range = std::max({rep.alpha_range, -a.v, a.v - 1.0});
    const Jet3 z = cut.zeta(t);
    if (i > 0) rep.zeta_increase = std::max(rep.zeta_increase, z.v - prev_zeta);
    prev_zeta = z.v;
    if (t >= sp.log_half) rep.zeta_right = std::max(rep.zeta_right, std::abs(z.v));
    rep.psi_negative = std::max(rep.psi_negative, -cut.psi(t).v);
    rep.ode = std::max(rep.ode, std::abs(z.d - z.v + a.v));
  }
  // asymptote straight from the integrating factor on [-c - w - 3, -c - w]
  for (int i = 0; i <= 1000; ++i) {
    const double t = -sp.c - sp.w - 3.0 * i / 1000.0;
    const double direct = std::exp(t) * (std::exp(-t) - std::exp(sp.c)) +
                          std::exp(t) * quad::adaptive([&](double u) { return std::exp(-u) * cut.alpha(u).v; },
                                                       -sp.c, sp.log_half, 1e-16 * std::exp(sp.c), 1e-14, 20000)
                                            .value;
    rep.asymptote = std::max(rep.asymptote, std::abs(1.0 - direct - sp.kappa * std::exp(t)));
  }
  const double body = quad::adaptive([&](double t) { return std::exp(t) * cut.psi(t).v; }, -sp.c, sp.log_half,
                                     1e-15, 1e-14, 20000)
                          .value;
  rep.normalization = std::abs(body + sp.lambda * std::exp(-sp.c) - 0.5);
  rep.lambda_readings = std::abs(sp.kappa / (2.0 * sp.lambda) - 1.0);
  return rep;
}

}  // namespace lagstat
