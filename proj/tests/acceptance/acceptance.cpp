// One line per acceptance criterion. Exit status is nonzero when a criterion fails that was not
// named with --expect-fail, or when a named one unexpectedly passes.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "lagstat/bessel.hpp"
#include "lagstat/cone.hpp"
#include "lagstat/immersion.hpp"
#include "lagstat/pipelines.hpp"
#include "lagstat/quadrature.hpp"
#include "lagstat/stability.hpp"

using namespace lagstat;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void need(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!ok) notes.push_back(what);
  }
};

std::string num(double x) { return format_number(x); }

Outcome from_checks(const RunResult& r) {
  Outcome o;
  for (const Check& c : r.checks) o.need(c.pass, c.name + " (" + c.detail + ")");
  return o;
}

Outcome cone_catalog(const RunResult& cone) {
  Outcome o;
  for (const Check& c : cone.checks)
    if (c.name.rfind("catalog", 0) == 0 || c.name.rfind("cone", 0) == 0) o.need(c.pass, c.name + " (" + c.detail + ")");
  return o;
}

double shape_defect(const ConeSpec& spec, double h, bool b22_only) {
  const int nr = static_cast<int>(std::lround(1.5 / h)) + 1;
  const int ns = static_cast<int>(std::lround(0.04 / h)) + 1;
  const GridSpec g = GridSpec::closed(nr, 0.5, 2.0, ns, 0.3, 0.3 + (ns - 1) * h);
  SampledImmersion imm = cone_immersion(spec, g, false);
  imm.shape();
  double e = 0.0;
  for (int i = 1; i < g.nu - 1; ++i)
    for (int j = 1; j < g.nv - 1; ++j) {
      const int k = g.index(i, j);
      e = std::max(e, (imm.B_frame(k, 1, 1) - cone_shape(spec, g.u(i), g.v(j)).B22).norm());
      if (!b22_only) e = std::max({e, imm.B_frame(k, 0, 0).norm(), imm.B_frame(k, 0, 1).norm()});
    }
  return e;
}

Outcome shape_crosscheck() {
  Outcome o;
  for (auto [p, q] : {std::pair{1, 2}, std::pair{2, 3}, std::pair{2, 5}}) {
    const ConeSpec s = ConeSpec::make(p, q);
    const double fine = shape_defect(s, 1e-3, false);
    const double order = std::log2(shape_defect(s, 2e-3, true) / shape_defect(s, 1e-3, true));
    const std::string n = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
    o.need(fine <= 1e-5, n + " defect " + num(fine));
    o.need(order >= 1.8, n + " order " + num(order));
  }
  return o;
}

RadialFunction poly_bump(double a, double b) {
  return [a, b](double r) -> RadialJet {
    const double w = b - a, x = (r - a) / w;
    if (x <= 0.0 || x >= 1.0) return {};
    const double u = x * (1.0 - x), du = (1.0 - 2.0 * x) / w, ddu = -2.0 / (w * w);
    return {u * u * u * u, 4.0 * u * u * u * du, 12.0 * u * u * du * du + 4.0 * u * u * u * ddu};
  };
}

PolarField separable(const RadialFunction& z, double freq) {
  return [z, freq](double r, double s) {
    const RadialJet j = z(r);
    const double c = std::cos(freq * s), d = -freq * std::sin(freq * s);
    return PolarJet{j.z * c, j.dz * c, j.ddz * c, j.z * d, -freq * freq * j.z * c};
  };
}

Outcome second_variation_chain() {
  Outcome o;
  const RadialFunction z = poly_bump(0.6, 1.9);
  const RadialProfile prof = RadialProfile::sample(z, RadialProfile::geometric_breaks(0.5, 2.0, 1.1), 64);
  for (auto [p, q, k, l] : {std::tuple{1, 3, 1, 2}, std::tuple{2, 5, 1, 3}, std::tuple{1, 2, 2, 3}}) {
    const ConeSpec spec = ConeSpec::make(p, q, k);
    const Rational ell(l, k);
    const double freq = ell.to_double() / std::sqrt(static_cast<double>(p) * q);
    const FormValue m = mode_radial_form(spec, ModeSpec{ell, Parity::cos_mode}, prof);
    const double reduced = m.prefactor * m.value;
    const double polar = hamiltonian_second_variation(spec, separable(z, freq), prof, 256).value;
    const std::string n = "(" + std::to_string(p) + "," + std::to_string(q) + "," + std::to_string(k) + ";" + ell.str() + ")";
    const double r1 = std::abs(polar / reduced - 1.0);
    o.need(r1 <= 1e-6, n + " polar vs reduced " + num(r1));
    double oh[2];
    int idx = 0;
    for (int nr : {301, 601}) {
      const GridSpec g = GridSpec::periodic_in_v(nr, 0.5, 2.0, 2 * (nr - 1), 0.0, spec.length());
      SampledImmersion imm = cone_immersion(spec, g, true);
      imm.shape();
      std::vector<double> f(g.size());
      for (int i = 0; i < g.nu; ++i)
        for (int j = 0; j < g.nv; ++j) f[g.index(i, j)] = z(g.u(i)).z * std::cos(freq * g.v(j));
      oh[idx++] = oh_second_variation(imm, f);
    }
    const double r2 = std::abs(quad::richardson(oh[0], oh[1]) / polar - 1.0);
    o.need(r2 <= 1e-4, n + " immersed vs polar " + num(r2));
  }

  // straight-line evaluator against the differenced area on a curved graph
  const GridSpec g = GridSpec::closed(41, -1, 1, 41, -1, 1);
  std::vector<Vec4d> pts(g.size());
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) {
      const double x = g.u(i), y = g.v(j);
      pts[g.index(i, j)] = Vec4d(x, 0.1 * x * y, y, 0.05 * (x * x - y * y));
    }
  SampledImmersion imm = SampledImmersion::from_points(g, pts);
  imm.shape();
  Uniform u(5);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec4d amp(u(-1, 1), u(-1, 1), u(-1, 1), u(-1, 1));
    const double cx = u(-0.3, 0.3), cy = u(-0.3, 0.3), w = u(0.4, 0.6);
    std::vector<Vec4d> X(g.size());
    for (int i = 0; i < g.nu; ++i)
      for (int j = 0; j < g.nv; ++j)
        X[g.index(i, j)] = amp * bump_jet((g.u(i) - cx) / w).z * bump_jet((g.v(j) - cy) / w).z * (1.0 + g.u(i) * g.v(j));
    const double q = straight_line_second_variation(imm, X);
    const double t = 1e-3;
    const double fd =
        (displaced_area(g, pts, X, t) - 2.0 * displaced_area(g, pts, X, 0.0) + displaced_area(g, pts, X, -t)) / (t * t);
    worst = std::max(worst, std::abs(q - fd) / std::max(1.0, std::abs(q)));
  }
  o.need(worst <= 1e-5, "straight-line vs d2A/dt2 " + num(worst));
  return o;
}

Outcome substitution_identity() {
  Outcome o;
  Uniform u(2024);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const RadialFunction rho = random_log_profile(u, -2.5, 2.5);
    const RadialProfile prof = RadialProfile::sample(
        from_log_profile(rho), RadialProfile::geometric_breaks(std::exp(-2.5), std::exp(2.5), 1.1), 64);
    for (int p = 1; p <= 4; ++p)
      for (int l = 1; l <= 4; ++l) {
        const FormValue a = mode_radial_form(ConeSpec::make(p, p + 1), ModeSpec{Rational(l)}, prof);
        const FormValue b = log_substitution_form(p, p + 1, Rational(l), rho, -2.5, 2.5, 4096);
        worst = std::max(worst, std::abs(a.value - b.value) / std::max(std::abs(a.value), 1e-300));
      }
  }
  o.need(worst <= 1e-8, "relative " + num(worst));
  return o;
}

Outcome bessel_facts() {
  Outcome o;
  o.need(bessel_j0(0.0) == 1.0, "J0(0) != 1");
  const double z = bessel_j0_first_zero();
  o.need(std::abs(z - 2.404826) <= 5e-7 && z >= M_PI / 2.0, "first zero " + num(z));
  const int n = 10000;
  int bad = 0;
  double prev = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = 0.5 * M_PI * i / n;
    const double j = bessel_j0(s);
    if (!(j > 0.0) || !(bessel_j0_second(s) < 0.0) || (i > 0 && !(bessel_j0_prime(s) < 0.0))) ++bad;
    if (i < n) {
      const double v = j / std::cos(s);
      if (v < std::cos(s) || (i > 0 && !(v > prev))) ++bad;
      prev = v;
    }
  }
  o.need(bad == 0, std::to_string(bad) + " grid points violate the sign or monotonicity facts");
  return o;
}

Outcome determinism() {
  namespace fs = std::filesystem;
  Outcome o;
  const fs::path root = fs::temp_directory_path() / ("lagstat-accept-" + std::to_string(::getpid()));
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  RunParams cone;
  cone.p = 1;
  cone.q = 2;
  cone.pq_max = 8;
  RunParams stab;
  stab.pq_max = 6;
  stab.modes = 4;
  stab.seed = 3;
  RunParams graph;
  graph.grid = "16";
  for (auto [name, params] : {std::pair{"cone", cone}, std::pair{"stability", stab}, std::pair{"graph", graph}}) {
    const WrittenRun a = write_run(run_command(name, params), (root / "a").string(), 0.0);
    const WrittenRun b = write_run(run_command(name, params), (root / "b").string(), 1.0);
    o.need(fs::path(a.dir).filename() == fs::path(b.dir).filename(), std::string(name) + " directory names differ");
    for (const std::string& f : a.files) {
      if (f == "manifest.json") continue;
      o.need(slurp(fs::path(a.dir) / f) == slurp(fs::path(b.dir) / f), std::string(name) + "/" + f + " differs");
    }
  }
  fs::remove_all(root);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> expected;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--expect-fail") expected.insert(argv[++i]);

  struct Criterion {
    std::string key, title;
    std::function<Outcome()> run;
  };
  std::optional<RunResult> cone_run;
  auto cone = [&]() -> const RunResult& {
    if (!cone_run) cone_run = run_cone({});
    return *cone_run;
  };
  const std::vector<Criterion> criteria = {
      {"catalog", "cone catalog (p+q<=20, k<=3)", [&] { return cone_catalog(cone()); }},
      {"shape", "shape cross-check (h=1e-3, order>=1.8)", shape_crosscheck},
      {"stability", "stability trichotomy (p+q<=12)", [] { return from_checks(run_stability({})); }},
      {"chain", "second-variation consistency chain", second_variation_chain},
      {"substitution", "substitution identity (50 profiles)", substitution_identity},
      {"kernel", "monotonicity kernel (c=31, 800x400)", [] { return from_checks(run_kernel({})); }},
      {"bessel", "Bessel facts", bessel_facts},
      {"density", "density ratios", [] { return from_checks(run_density({})); }},
      {"graph", "graph minimizer", [] { return from_checks(run_graph({})); }},
      {"determinism", "determinism (byte-identical reports)", determinism},
  };

  int unexpected = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.need(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string detail;
    for (const std::string& n : o.notes) detail += (detail.empty() ? "" : "; ") + n;
    const bool known = expected.count(c.key) > 0;
    std::printf("%s  %-42s %6.1fs%s%s\n", o.pass ? "PASS" : "FAIL", c.title.c_str(), secs,
                detail.empty() ? "" : "  ", detail.c_str());
    if (o.pass == known) {
      ++unexpected;
      if (known) std::printf("      expected to fail but passed: %s\n", c.key.c_str());
    }
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
