#include "lagstat/stability.hpp"

#include <cmath>
#include <sstream>

#include "lagstat/quadrature.hpp"

namespace lagstat {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

RadialProfile RadialProfile::sample(const RadialFunction& f, const std::vector<double>& breaks, int intervals) {
  if (breaks.size() < 2) throw std::invalid_argument("profile needs at least one panel");
  const int n = std::max(4, (intervals + 3) / 4 * 4);
  RadialProfile prof;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    Panel p;
    p.a = breaks[b];
    p.b = breaks[b + 1];
    if (!(p.b > p.a)) throw std::invalid_argument("profile breakpoints must increase");
    p.intervals = n;
    const double h = (p.b - p.a) / n;
    for (int i = 0; i <= n; ++i) {
      const double r = (i == n) ? p.b : p.a + i * h;
      p.r.push_back(r);
      p.jet.push_back(f(r));
    }
    prof.panels.push_back(std::move(p));
  }
  return prof;
}

std::vector<double> RadialProfile::geometric_breaks(double a, double b, double ratio) {
  std::vector<double> out{a};
  if (a <= 0.0) {
    out.push_back(b);
    return out;
  }
  double r = a;
  while (r * ratio < b * (1.0 - 1e-12)) {
    r *= ratio;
    out.push_back(r);
  }
  out.push_back(b);
  return out;
}

bool RadialProfile::unit_scale() const {
  for (const Panel& p : panels)
    if (p.log_scale != 0.0) return false;
  return true;
}

bool RadialProfile::admissible(double tol) const {
  const RadialJet& lo = panels.front().jet.front();
  const RadialJet& hi = panels.back().jet.back();
  return std::abs(lo.z) <= tol && std::abs(lo.dz) <= tol && std::abs(hi.z) <= tol && std::abs(hi.dz) <= tol;
}

RadialProfile RadialProfile::scaled(double c) const {
  RadialProfile out = *this;
  for (Panel& p : out.panels)
    for (RadialJet& j : p.jet) {
      j.z *= c;
      j.dz *= c;
      j.ddz *= c;
    }
  return out;
}

std::uint64_t RadialProfile::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Panel& p : panels) {
    h = fnv1a(&p.log_scale, sizeof(double), h);
    h = fnv1a(p.r.data(), p.r.size() * sizeof(double), h);
    for (const RadialJet& j : p.jet) h = fnv1a(&j.z, sizeof(double), h);
  }
  return h;
}

namespace {

struct PanelSum {
  double value = 0.0, error = 0.0;
};

// Simpson on a uniform panel with its 2h companion.
PanelSum simpson_pair(const std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size()) - 1;
  double s1 = f[0] + f[n], s2 = f[0] + f[n];
  for (int i = 1; i < n; ++i) s1 += (i % 2 ? 4.0 : 2.0) * f[i];
  for (int i = 2; i < n; i += 2) s2 += ((i / 2) % 2 ? 4.0 : 2.0) * f[i];
  s1 *= h / 3.0;
  s2 *= 2.0 * h / 3.0;
  return {s1, std::abs(s1 - s2) / 15.0};
}

double angular_prefactor(const ConeSpec& spec, const ModeSpec& mode) {
  const double full = spec.length();
  if (mode.ell.sign() == 0) return mode.parity == Parity::sin_mode ? 0.0 : full;
  return mode.parity == Parity::both ? full : 0.5 * full;
}

}  // namespace

LogCoefficients log_coefficients(int p, int q, double ell) {
  const double pq = static_cast<double>(p) * q;
  const double m = ell * ell / pq;
  const double n = static_cast<double>(q - p) * (q - p) * ell * ell / (pq * pq);
  return {2.0 + 2.0 * m, (1.0 - m) * (1.0 - m) - n};
}

FormValue mode_radial_form(const ConeSpec& spec, const ModeSpec& mode, const RadialProfile& profile) {
  if (!mode.admissible(spec.k)) {
    throw std::invalid_argument("mode " + mode.ell.str() + " is not periodic on the " + std::to_string(spec.k) +
                                "-fold cover");
  }
  const double pq = static_cast<double>(spec.p) * spec.q;
  const double ell = mode.ell.to_double();
  const double m = ell * ell / pq;
  const double n = static_cast<double>(spec.q - spec.p) * (spec.q - spec.p) * ell * ell / (pq * pq);
  FormValue out;
  for (const Panel& p : profile.panels) {
    std::vector<double> f(p.r.size()), pos(p.r.size());
    for (std::size_t i = 0; i < p.r.size(); ++i) {
      const double r = p.r[i];
      const RadialJet& j = p.jet[i];
      if (r == 0.0) {
        f[i] = pos[i] = 0.0;  // vertex-admissible profiles vanish to second order
        continue;
      }
      const double lap = j.ddz + j.dz / r - m * j.z / (r * r);
      pos[i] = lap * lap * r;
      f[i] = pos[i] - n * j.z * j.z / (r * r * r);
    }
    const double h = (p.b - p.a) / p.intervals;
    const PanelSum s = simpson_pair(f, h);
    out.value += s.value;
    out.error += s.error;
    out.scale += simpson_pair(pos, h).value;
  }
  out.prefactor = angular_prefactor(spec, mode);
  return out;
}

FormValue log_substitution_form(int p, int q, const Rational& ell, const RadialFunction& rho, double t0, double t1,
                                int intervals) {
  if (q != p + 1) throw std::invalid_argument("log substitution form requires q = p + 1");
  const LogCoefficients c = log_coefficients(p, q, ell.to_double());
  const int n = std::max(4, (intervals + 3) / 4 * 4);
  const double h = (t1 - t0) / n;
  std::vector<double> f(n + 1), pos(n + 1);
  for (int i = 0; i <= n; ++i) {
    const RadialJet j = rho(i == n ? t1 : t0 + i * h);
    pos[i] = j.ddz * j.ddz + c.first * j.dz * j.dz + std::max(0.0, c.mass) * j.z * j.z;
    f[i] = j.ddz * j.ddz + c.first * j.dz * j.dz + c.mass * j.z * j.z;
  }
  const PanelSum s = simpson_pair(f, h);
  FormValue out;
  out.value = s.value;
  out.error = s.error;
  out.scale = simpson_pair(pos, h).value;
  return out;
}

FormValue hamiltonian_second_variation(const ConeSpec& spec, const PolarField& f, const RadialProfile& radial,
                                       int n_s, double tol) {
  if (!radial.unit_scale()) throw std::invalid_argument("polar second variation needs unscaled radial panels");
  const double pq = static_cast<double>(spec.p) * spec.q;
  const double w = static_cast<double>(spec.q - spec.p) * (spec.q - spec.p) / pq;
  const double L = spec.length();
  const double hs = L / n_s;
  const double r_ends[2] = {radial.r_min(), radial.r_max()};
  for (double r : r_ends) {
    for (int j = 0; j < n_s; ++j) {
      const PolarJet v = f(r, j * hs);
      if (std::abs(v.f) > 1e-12 || std::abs(v.fr) > 1e-12) {
        std::ostringstream msg;
        msg << "potential is not compactly supported in r: f = " << v.f << ", f_r = " << v.fr << " at r = " << r;
        throw SupportError(msg.str());
      }
    }
  }
  FormValue out;
  for (const Panel& p : radial.panels) {
    std::vector<double> g(p.r.size()), pos(p.r.size());
    for (std::size_t i = 0; i < p.r.size(); ++i) {
      const double r = p.r[i];
      if (r == 0.0) {
        g[i] = pos[i] = 0.0;
        continue;
      }
      double acc = 0.0, acc_pos = 0.0;
      for (int j = 0; j < n_s; ++j) {
        const PolarJet v = f(r, j * hs);
        const double lap = v.frr + v.fr / r + v.fss / (r * r);
        acc_pos += lap * lap;
        acc += lap * lap - w * v.fs * v.fs / (r * r * r * r);
      }
      g[i] = acc * hs * r;
      pos[i] = acc_pos * hs * r;
    }
    const double h = (p.b - p.a) / p.intervals;
    const PanelSum s = simpson_pair(g, h);
    out.value += s.value;
    out.error += s.error;
    out.scale += simpson_pair(pos, h).value;
  }
  if (out.error > tol * std::max(std::abs(out.value), out.scale)) {
    std::ostringstream msg;
    msg << "grid too coarse: quadrature error estimate " << out.error << " for value " << out.value;
    throw std::runtime_error(msg.str());
  }
  out.prefactor = 1.0;
  return out;
}

Rational window_discriminant(int p, int q, const Rational& ell) {
  const Rational pq(static_cast<std::int64_t>(p) * q);
  const Rational d = pq - ell * ell;
  const Rational pmq(p - q);
  return d * d - ell * ell * pmq * pmq;
}

bool instability_window(int p, int q, const Rational& ell) {
  const Rational pq(static_cast<std::int64_t>(p) * q);
  const Rational d(std::abs(p - q));
  return ell * (ell - d) < pq && pq < ell * (ell + d);
}

std::optional<int> find_destabilizing_mode(int p, int q) {
  for (int ell = 1; ell <= p * q; ++ell) {
    if (instability_window(p, q, Rational(ell))) return ell;
  }
  return std::nullopt;
}

namespace {

// Inner taper D on [0, 1]: D = D' = D'' = 0 at 0; D = 1, D' = 1/2, D'' = 0 at 1.
RadialJet inner_taper(double x) {
  const double x2 = x * x, x3 = x2 * x;
  return {8.0 * x3 - 11.5 * x3 * x + 4.5 * x3 * x2, 24.0 * x2 - 46.0 * x3 + 22.5 * x2 * x2,
          48.0 * x - 138.0 * x2 + 90.0 * x3};
}

// Outer taper on [0, 1]: value 1, slope 1, curvature 0 at 0; flat zero at 1.
RadialJet outer_taper(double x) {
  const double x2 = x * x, x3 = x2 * x;
  return {1.0 + x - 16.0 * x3 + 23.0 * x3 * x - 9.0 * x3 * x2, 1.0 - 48.0 * x2 + 92.0 * x3 - 45.0 * x2 * x2,
          -96.0 * x + 276.0 * x2 - 180.0 * x3};
}

}  // namespace

RadialFunction destabilizing_function(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("taper width must satisfy 0 < eps < 1");
  return [eps](double r) -> RadialJet {
    if (r <= 0.5 * eps || r >= 2.0) return {};
    if (r < eps) {
      const double half = 0.5 * eps;
      const RadialJet d = inner_taper((r - half) / half);
      return {eps * d.z, 2.0 * d.dz, 4.0 * d.ddz / eps};
    }
    if (r <= 1.0) return {r, 1.0, 0.0};
    return outer_taper(r - 1.0);
  };
}

RadialProfile destabilizing_profile(double eps, int intervals) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("taper width must satisfy 0 < eps < 1");
  return destabilizing_profile_log(std::log(eps), intervals);
}

RadialProfile destabilizing_profile_log(double log_eps, int intervals) {
  if (!(log_eps < 0.0) || !std::isfinite(log_eps)) throw std::invalid_argument("taper width must satisfy 0 < eps < 1");
  RadialProfile prof;
  auto add = [&](const RadialFunction& f, double a, double b, double log_scale) {
    Panel p = std::move(RadialProfile::sample(f, {a, b}, intervals).panels.front());
    p.log_scale = log_scale;
    prof.panels.push_back(std::move(p));
  };
  // inner taper at eps = 1, on [1/2, 1]
  const RadialFunction inner = [](double r) -> RadialJet {
    const RadialJet d = inner_taper(2.0 * r - 1.0);
    return {d.z, 2.0 * d.dz, 4.0 * d.ddz};
  };
  const RadialFunction line = [](double r) -> RadialJet { return {r, 1.0, 0.0}; };
  add(inner, 0.5, 1.0, log_eps);
  // dyadic panels [eps 2^j, eps 2^(j+1)] while they fit below 1, then the remainder up to 1
  const double ln2 = std::log(2.0);
  double lo = log_eps;
  while (lo + ln2 < -1e-12) {
    add(line, 0.5, 1.0, lo + ln2);
    lo += ln2;
  }
  add(line, std::exp(lo), 1.0, 0.0);
  add(destabilizing_function(0.5), 1.0, 2.0, 0.0);
  return prof;
}

TaperBounds taper_bounds(double eps) {
  TaperBounds b;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    const RadialJet d = inner_taper(static_cast<double>(i) / n);
    b.max_d1 = std::max(b.max_d1, 2.0 * std::abs(d.dz));
    b.max_d2_eps = std::max(b.max_d2_eps, 4.0 * std::abs(d.ddz));
  }
  (void)eps;  // both bounds are scale-free in eps
  return b;
}

double middle_contribution(int p, int q, double ell, double eps) {
  return log_coefficients(p, q, ell).mass * std::log(1.0 / eps);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::negative_direction_found:
      return "negative-direction-found";
    case Verdict::nonnegative_on_bank:
      return "nonnegative-on-bank";
    case Verdict::window_empty:
      break;
  }
  return "window-empty";
}

std::string to_string(Parity p) {
  switch (p) {
    case Parity::cos_mode:
      return "cos";
    case Parity::sin_mode:
      return "sin";
    case Parity::both:
      break;
  }
  return "both";
}

bool StabilityCertificate::recheck(double margin) const {
  const FormValue v = mode_radial_form(spec, mode, profile);
  return v.value < -margin * v.error && v.value < 0.0;
}

StabilityCertificate certify_negative_mode(const ConeSpec& spec, const Rational& ell, double eps,
                                           double log_eps_floor, double margin) {
  StabilityCertificate cert;
  cert.spec = spec;
  cert.mode = ModeSpec{ell, Parity::both};
  if (window_discriminant(spec.p, spec.q, ell).sign() >= 0) {
    cert.verdict = Verdict::window_empty;
    cert.note = "mode " + ell.str() + " lies outside the open instability window";
    return cert;
  }
  auto evaluate = [&](double log_e, RadialProfile& prof) {
    prof = destabilizing_profile_log(log_e);
    return mode_radial_form(spec, cert.mode, prof);
  };
  auto certified = [&](const FormValue& v) { return v.value < 0.0 && v.value < -margin * v.error; };

  RadialProfile prof;
  double l_ok = std::log(eps), l_fail = 0.0;
  FormValue v = evaluate(l_ok, prof);
  double best = v.value;
  bool stepped = false;
  while (!certified(v)) {
    l_fail = l_ok;
    l_ok = std::min(2.0 * l_ok, l_ok - std::log(10.0));
    if (l_ok < log_eps_floor) {
      std::ostringstream msg;
      msg << "no certified negative direction for (" << spec.p << ", " << spec.q << ", k=" << spec.k
          << ") at mode " << ell.str() << " down to log eps = " << log_eps_floor << "; smallest value " << best;
      throw CertificationFailure(msg.str(), best);
    }
    v = evaluate(l_ok, prof);
    best = std::min(best, v.value);
    stepped = true;
  }
  if (stepped) {
    double lo = l_ok, hi = l_fail;
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      RadialProfile trial;
      const FormValue tv = evaluate(mid, trial);
      ++cert.bisection_steps;
      if (certified(tv)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    l_ok = lo;
    v = evaluate(l_ok, prof);
  }
  cert.log_eps = l_ok;
  cert.eps = std::exp(l_ok);
  cert.profile = std::move(prof);
  cert.value = v.value;
  cert.error_estimate = v.error;
  cert.prefactor = v.prefactor;
  cert.profile_hash = cert.profile.hash();
  cert.verdict = Verdict::negative_direction_found;
  return cert;
}

StabilityCertificate multicover_certificate(int p, int q, int k, double eps) {
  const ConeSpec spec = ConeSpec::make(p, q, k);
  if (k < 2) throw std::invalid_argument("multicover certificate needs k >= 2");
  if (!(q > p)) throw std::invalid_argument("multicover certificate is stated for q > p");
  const Rational ell = Rational(p) + Rational(1, k);
  const Rational disc = window_discriminant(p, q, ell);
  if (disc.sign() >= 0) {
    throw CertificationFailure("(pq - l^2)^2 - l^2 (p-q)^2 = " + disc.str() + " is not negative at l = " + ell.str() +
                                   "; this contradicts multi-cover instability",
                               disc.to_double());
  }
  StabilityCertificate cert = certify_negative_mode(spec, ell, eps);
  cert.note = "discriminant " + disc.str();
  return cert;
}

RadialJet bump_jet(double x) {
  const double u = 1.0 - x * x;
  if (u <= 0.0) return {};
  const double u6 = u * u * u * u * u * u, u7 = u6 * u;
  return {u7 * u, -16.0 * x * u7, -16.0 * u7 + 224.0 * x * x * u6};
}

RadialFunction random_log_profile(Uniform& u, double t0, double t1) {
  struct Term {
    double c, w, amp;
  };
  std::vector<Term> terms;
  const double span = t1 - t0;
  for (int i = 0; i < 3; ++i) {
    const double w = u(0.15, 0.4) * span;
    const double c = u(t0 + w, t1 - w);
    const double amp = u(-1.0, 1.0);
    terms.push_back({c, w, amp});
  }
  return [terms](double t) {
    RadialJet out;
    for (const Term& term : terms) {
      const RadialJet b = bump_jet((t - term.c) / term.w);
      out.z += term.amp * b.z;
      out.dz += term.amp * b.dz / term.w;
      out.ddz += term.amp * b.ddz / (term.w * term.w);
    }
    return out;
  };
}

RadialFunction from_log_profile(const RadialFunction& rho) {
  return [rho](double r) -> RadialJet {
    if (r <= 0.0) return {};
    const RadialJet j = rho(std::log(r));
    return {r * j.z, j.z + j.dz, (j.dz + j.ddz) / r};
  };
}

BankResult nonnegativity_bank(const ConeSpec& spec, int max_ell, int count, std::uint64_t seed, double tol) {
  BankResult res;
  Uniform u(seed);
  const double t0 = -3.0, t1 = 3.0;
  const std::vector<double> breaks = RadialProfile::geometric_breaks(std::exp(t0), std::exp(t1), 1.25);
  bool first = true;
  res.min_by_mode.assign(max_ell + 1, 0.0);
  for (int i = 0; i < count; ++i) {
    const RadialProfile prof = RadialProfile::sample(from_log_profile(random_log_profile(u, t0, t1)), breaks, 64);
    ++res.profiles;
    for (int ell = 0; ell <= max_ell; ++ell) {
      const FormValue v = mode_radial_form(spec, ModeSpec{Rational(ell), Parity::cos_mode}, prof);
      const double rel = v.value / v.scale;
      if (first || rel < res.min_value) res.min_value = rel;
      first = false;
      if (i == 0 || rel < res.min_by_mode[ell]) res.min_by_mode[ell] = rel;
      if (v.value < -tol * v.scale - 10.0 * v.error) res.nonnegative = false;
      if (i == 0) ++res.modes;
    }
  }
  return res;
}

}  // namespace lagstat
