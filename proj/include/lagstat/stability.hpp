#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lagstat/cone.hpp"
#include "lagstat/rational.hpp"

namespace lagstat {

/// Value and first two derivatives of a radial function at one point.
struct RadialJet {
  double z = 0.0, dz = 0.0, ddz = 0.0;
};
using RadialFunction = std::function<RadialJet(double)>;

/// A closed interval sampled uniformly; the interval count is a multiple of 4 so that
/// Simpson at h and 2h are both available.
/// Physical radius is e^log_scale * r and physical zeta is e^log_scale * z. The radial form is
/// invariant under that dilation, so panels are integrated in stored units and widths far
/// below the double range stay representable.
struct Panel {
  double a = 0.0, b = 0.0;
  int intervals = 64;
  double log_scale = 0.0;
  std::vector<double> r;
  std::vector<RadialJet> jet;
};

/// Radial test function sampled on consecutive uniform panels.
struct RadialProfile {
  std::vector<Panel> panels;

  double r_min() const { return panels.front().a * std::exp(panels.front().log_scale); }
  double r_max() const { return panels.back().b * std::exp(panels.back().log_scale); }
  double log_r_min() const { return std::log(panels.front().a) + panels.front().log_scale; }
  bool unit_scale() const;
  /// Samples f on the given breakpoints, `intervals` per panel (rounded up to a multiple of 4).
  static RadialProfile sample(const RadialFunction& f, const std::vector<double>& breaks, int intervals);
  /// Breakpoints on [a, b]: geometric with ratio `ratio` when a > 0.
  static std::vector<double> geometric_breaks(double a, double b, double ratio = 2.0);
  /// Checks zeta = zeta' = 0 at both ends (and at the vertex when r_min = 0).
  bool admissible(double tol = 1e-12) const;
  /// Multiplies every sample by c.
  RadialProfile scaled(double c) const;
  std::uint64_t hash() const;
};

enum class Parity { cos_mode, sin_mode, both };

struct ModeSpec {
  Rational ell{1};
  Parity parity = Parity::cos_mode;

  bool admissible(int k) const { return ell.sign() >= 0 && (ell * Rational(k)).is_integer(); }
};

struct FormValue {
  double value = 0.0;
  double error = 0.0;      // |S_h - S_2h| / 15 summed over panels
  double scale = 0.0;      // integral of the nonnegative part, for relative tolerances
  double prefactor = 0.0;  // pi k sqrt(pq) per single parity (doubled for ell = 0 or both parities)
};

/// Bracketed radial integral of the Fourier-reduced second variation, without the angular prefactor:
/// int [ (z'' + z'/r - (l^2/pq) z/r^2)^2 - r^-4 ((q-p)^2/(pq)^2) l^2 z^2 ] r dr.
FormValue mode_radial_form(const ConeSpec& spec, const ModeSpec& mode, const RadialProfile& profile);

/// The same form after r = e^t, zeta = e^t rho (requires q = p + 1):
/// int [rho''^2 + (2 + 2 l^2/pq) rho'^2 + ((pq - l^2)^2 - l^2)/(pq)^2 rho^2] dt.
/// rho is sampled uniformly on [t0, t1] with `intervals` Simpson intervals.
FormValue log_substitution_form(int p, int q, const Rational& ell, const RadialFunction& rho, double t0, double t1,
                                int intervals);

/// Coefficients of the log-substituted form for general (p, q): mass and first-derivative weights.
struct LogCoefficients {
  double first = 0.0;
  double mass = 0.0;
};
LogCoefficients log_coefficients(int p, int q, double ell);

/// Polar jet of a potential f(r, s) on the cone.
struct PolarJet {
  double f = 0.0, fr = 0.0, frr = 0.0, fs = 0.0, fss = 0.0;
};
using PolarField = std::function<PolarJet(double, double)>;

/// int [ (Lap f)^2 - r^-4 ((q-p)^2/pq) f_s^2 ] r dr ds with the flat cone metric dr^2 + r^2 ds^2.
/// r uses the panels of `radial` (Simpson, with a 2h error estimate); s is periodic over the cover
/// with n_s trapezoid nodes. Throws SupportError if f or f_r is nonzero at the r ends, and
/// std::runtime_error if the error estimate exceeds `tol` (relative).
FormValue hamiltonian_second_variation(const ConeSpec& spec, const PolarField& f, const RadialProfile& radial,
                                       int n_s, double tol = 1e-8);

/// l(l - |p-q|) < pq < l(l + |p-q|), decided exactly.
bool instability_window(int p, int q, const Rational& ell);
/// (pq - l^2)^2 - l^2 (p - q)^2 in exact arithmetic.
Rational window_discriminant(int p, int q, const Rational& ell);

/// Smallest integer l in 1..pq inside the open window.
std::optional<int> find_destabilizing_mode(int p, int q);

/// Three-piece profile: quintic inner taper on [eps/2, eps], zeta = r on [eps, 1], quintic outer taper on [1, 2].
/// The inner taper and the dyadic panels of the linear piece are stored at unit scale.
RadialProfile destabilizing_profile(double eps, int intervals = 64);
RadialProfile destabilizing_profile_log(double log_eps, int intervals = 64);
RadialFunction destabilizing_function(double eps);

struct TaperBounds {
  double max_d1 = 0.0;       // max |delta'| on [eps/2, eps]
  double max_d2_eps = 0.0;   // max |delta''| * eps
};
TaperBounds taper_bounds(double eps);

/// Closed-form middle-piece contribution: int_eps^1 [(pq - l^2)^2 - l^2(p-q)^2] / (pq)^2 dr / r.
double middle_contribution(int p, int q, double ell, double eps);

enum class Verdict { negative_direction_found, nonnegative_on_bank, window_empty };
std::string to_string(Verdict v);
std::string to_string(Parity p);

struct StabilityCertificate {
  ConeSpec spec;
  ModeSpec mode;
  RadialProfile profile;
  double eps = 0.0;      // exp(log_eps); underflows to 0 for the widest multi-cover thresholds
  double log_eps = 0.0;
  double value = 0.0;
  double error_estimate = 0.0;
  double prefactor = 0.0;
  Verdict verdict = Verdict::window_empty;
  std::uint64_t seed = 0;
  std::uint64_t profile_hash = 0;
  int bisection_steps = 0;
  std::string note;

  /// Recomputes the form and checks value < -margin * error.
  bool recheck(double margin = 10.0) const;
};

class CertificationFailure : public std::runtime_error {
 public:
  CertificationFailure(const std::string& what, double best_value)
      : std::runtime_error(what), best_value(best_value) {}
  double best_value;
};

/// Certifies a negative direction for mode l using the three-piece profile. Starts at eps;
/// if not certified, doubles ln(1/eps) until it is, then bisects in log eps (30 steps) for the
/// largest certified width, giving up below log_eps_floor. The taper energy is a fixed positive
/// constant while the middle piece only grows like ln(1/eps), so thresholds far below 1e-8 are normal.
StabilityCertificate certify_negative_mode(const ConeSpec& spec, const Rational& ell, double eps = 1e-3,
                                           double log_eps_floor = -1e4, double margin = 10.0);

/// k-fold cover: l = p + 1/k, exact discriminant check, then a numeric negative direction.
/// Requires k >= 2 and q > p.
StabilityCertificate multicover_certificate(int p, int q, int k, double eps = 1e-3);

/// Deterministic uniform doubles in [0, 1) from a 64-bit engine.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double operator()(double a, double b) { return a + (b - a) * (*this)(); }

 private:
  std::mt19937_64 rng_;
};

/// Smooth compactly supported bump (1 - x^2)^8 with derivatives, zero for |x| >= 1.
RadialJet bump_jet(double x);

/// Random rho(t): sum of three bumps with centers in [t0 + w, t1 - w].
RadialFunction random_log_profile(Uniform& u, double t0, double t1);
/// zeta(r) = r rho(log r), derivatives by the chain rule.
RadialFunction from_log_profile(const RadialFunction& rho);

struct BankResult {
  int profiles = 0;
  int modes = 0;
  double min_value = 0.0;      // over value / scale
  std::vector<double> min_by_mode;  // same minimum for each l
  bool nonnegative = true;
};

/// Checks mode_radial_form >= -tol * scale on `count` random profiles for integer l in 0..max_ell.
BankResult nonnegativity_bank(const ConeSpec& spec, int max_ell, int count, std::uint64_t seed, double tol = 1e-9);

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ULL);

}  // namespace lagstat
