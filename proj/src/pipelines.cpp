#include "lagstat/pipelines.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lagstat/cone.hpp"
#include "lagstat/cutoff.hpp"
#include "lagstat/density.hpp"
#include "lagstat/graph.hpp"
#include "lagstat/kernel.hpp"
#include "lagstat/stability.hpp"

namespace lagstat {

namespace {

std::string bound(double value, const char* op, double limit) {
  return "value " + format_number(value) + " " + op + " " + format_number(limit);
}

// JSON has no inf; the report keeps the spelled-out text instead of null
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(format_number(x)); }

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

}  // namespace

std::pair<int, int> parse_grid(const std::string& s) {
  const auto x = s.find('x');
  try {
    std::size_t used = 0;
    if (x == std::string::npos) {
      const int m = std::stoi(s, &used);
      if (used != s.size() || m <= 0) throw std::invalid_argument(s);
      return {m, m};
    }
    const int a = std::stoi(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(s);
    const std::string rest = s.substr(x + 1);
    const int b = std::stoi(rest, &used);
    if (used != rest.size() || a <= 0 || b <= 0) throw std::invalid_argument(s);
    return {a, b};
  } catch (const std::logic_error&) {
    throw std::invalid_argument("grid must look like 800x400 or 64, got '" + s + "'");
  }
}

RunResult run_cone(const RunParams& in) {
  RunResult r;
  r.command = "cone";
  const int p = in.p.value_or(2), q = in.q.value_or(3), k = in.k.value_or(1);
  const int pq_max = in.pq_max.value_or(20);
  const double tol = in.tol.value_or(1e-10);
  r.params = {{"p", p}, {"q", q}, {"k", k}, {"pq_max", pq_max}, {"tol", tol}};

  const ConeSpec spec = ConeSpec::make(p, q, k);
  const int n = 512 * (p + q) * k;
  const ConeLink link = make_cone(spec, n);
  const ValidationReport v = validate_cone(link);
  const Winding w = maslov_winding(make_cone(ConeSpec::make(p, q), 512 * (p + q)).curve);
  r.results["cone"] = {
      {"p", p},
      {"q", q},
      {"k", k},
      {"a", spec.a()},
      {"length", spec.length()},
      {"period", spec.period()},
      {"density", spec.density()},
      {"mean_curvature_scale", spec.mean_curvature_scale()},
      {"maslov", spec.maslov()},
      {"winding", {{"index", w.index}, {"raw", w.raw}, {"gap", w.gap}}},
      {"knotted_candidate", spec.knotted_candidate()},
      {"samples", n},
      {"validation",
       {{"unit_norm", v.unit_norm},
        {"unit_speed", v.unit_speed},
        {"legendrian", v.legendrian},
        {"ode", v.ode},
        {"angle_identity", v.angle_identity},
        {"angle_slope", v.angle_slope},
        {"fitted_slope", v.fitted_slope},
        {"closure", v.closure}}}};
  r.check("cone defects", v.worst() <= tol, bound(v.worst(), "<=", tol));
  r.check("cone maslov", w.index == p - q, "winding " + std::to_string(w.index) + ", p - q = " + std::to_string(p - q));
  const double len_err = std::abs(spec.length() - 2.0 * M_PI * k * std::sqrt(static_cast<double>(p) * q));
  r.check("cone length", len_err <= 1e-12, bound(len_err, "<=", 1e-12));

  Table link_csv{"link", {"s", "x1", "y1", "x2", "y2", "beta"}, {}};
  const int stride = std::max(1, n / 1024);
  for (int i = 0; i < n; i += stride) {
    const Vec4d& x = link.curve.points[i];
    link_csv.add({link.curve.s[i], x[0], x[1], x[2], x[3], link.beta[i]});
  }
  r.tables.push_back(std::move(link_csv));

  // catalog sweep
  Table cat{"catalog", {"p", "q", "k", "samples", "worst_defect", "winding", "winding_gap", "length", "length_error"}, {}};
  double worst = 0.0, worst_len = 0.0;
  int bad_winding = 0;
  for (int a = 1; a < pq_max; ++a)
    for (int b = 1; a + b <= pq_max; ++b) {
      if (std::gcd(a, b) != 1) continue;
      const Winding wa = maslov_winding(make_cone(ConeSpec::make(a, b), 512 * (a + b)).curve);
      if (wa.index != a - b) ++bad_winding;
      for (int kk = 1; kk <= 3; ++kk) {
        const ConeSpec s = ConeSpec::make(a, b, kk);
        const int ns = 512 * (a + b) * kk;
        const double d = validate_cone(make_cone(s, ns)).worst();
        const double le = std::abs(s.length() - 2.0 * M_PI * kk * std::sqrt(static_cast<double>(a) * b));
        worst = std::max(worst, d);
        worst_len = std::max(worst_len, le);
        cat.add({std::int64_t(a), std::int64_t(b), std::int64_t(kk), std::int64_t(ns), d, std::int64_t(wa.index), wa.gap,
                 s.length(), le});
      }
    }
  r.tables.push_back(std::move(cat));
  r.results["catalog"] = {{"pq_max", pq_max}, {"worst_defect", worst}, {"worst_length_error", worst_len},
                          {"winding_mismatches", bad_winding}};
  r.check("catalog defects", worst <= tol, bound(worst, "<=", tol));
  r.check("catalog maslov", bad_winding == 0, std::to_string(bad_winding) + " mismatches");
  r.check("catalog length", worst_len <= 1e-12, bound(worst_len, "<=", 1e-12));

  // discrete second fundamental form against the closed form
  const double coarse = shape_defect(ConeSpec::make(p, q), 2e-3, true);
  const double fine = shape_defect(ConeSpec::make(p, q), 1e-3, false);
  const double order = std::log2(coarse / shape_defect(ConeSpec::make(p, q), 1e-3, true));
  r.results["shape"] = {{"defect_h1e-3", fine}, {"b22_order", order}};
  r.check("shape defect", fine <= 1e-5, bound(fine, "<=", 1e-5));
  r.check("shape order", order >= 1.8, bound(order, ">=", 1.8));
  return r;
}

RunResult run_stability(const RunParams& in) {
  RunResult r;
  r.command = "stability";
  const int pq_max = in.pq_max.value_or(12), modes = in.modes.value_or(8);
  const std::uint64_t seed = in.seed.value_or(7);
  const double eps = in.eps.value_or(1e-3), tol = in.tol.value_or(1e-9);
  const int bank = 100;
  r.params = {{"pq_max", pq_max}, {"modes", modes}, {"seed", seed}, {"eps", eps}, {"tol", tol}, {"bank_profiles", bank}};

  Table t{"stability", {"p", "q", "k", "ell", "value", "verdict", "error", "log_eps"}, {}};
  int uncertified = 0, window_leaks = 0, bank_failures = 0, multicover_failures = 0, pairs = 0;
  for (int p = 1; p < pq_max; ++p)
    for (int q = 1; p + q <= pq_max; ++q) {
      if (std::gcd(p, q) != 1) continue;
      ++pairs;
      const ConeSpec spec = ConeSpec::make(p, q);
      const int d = std::abs(p - q);
      const BankResult b = nonnegativity_bank(spec, modes, bank, seed, tol);
      bool certified_one = false;
      for (int l = 0; l <= modes; ++l) {
        const Rational ell(l);
        if (l > 0 && instability_window(p, q, ell)) {
          if (d <= 1) ++window_leaks;
          try {
            const StabilityCertificate c = certify_negative_mode(spec, ell, eps);
            const bool ok = c.recheck();
            certified_one = certified_one || ok;
            t.add({std::int64_t(p), std::int64_t(q), std::int64_t(1), ell.str(), c.value, to_string(c.verdict),
                   c.error_estimate, c.log_eps});
          } catch (const CertificationFailure& e) {
            t.add({std::int64_t(p), std::int64_t(q), std::int64_t(1), ell.str(), e.best_value, std::string("uncertified"),
                   0.0, 0.0});
          }
          continue;
        }
        const double m = b.min_by_mode[l];
        const bool nonneg = m >= -tol;
        if (d <= 1 && !nonneg) ++bank_failures;
        t.add({std::int64_t(p), std::int64_t(q), std::int64_t(1), ell.str(), m,
               nonneg ? to_string(Verdict::nonnegative_on_bank) : std::string("negative_on_bank"), 0.0, 0.0});
      }
      if (d > 1 && !certified_one) ++uncertified;
      if (q == p + 1) {
        for (int k = 2; k <= 3; ++k) {
          const Rational ell(p * k + 1, k);
          const bool exact = window_discriminant(p, q, ell).sign() < 0;
          try {
            const StabilityCertificate c = multicover_certificate(p, q, k, eps);
            const bool ok = exact && c.recheck();
            if (!ok) ++multicover_failures;
            t.add({std::int64_t(p), std::int64_t(q), std::int64_t(k), ell.str(), c.value, to_string(c.verdict),
                   c.error_estimate, c.log_eps});
          } catch (const CertificationFailure& e) {
            ++multicover_failures;
            t.add({std::int64_t(p), std::int64_t(q), std::int64_t(k), ell.str(), e.best_value, std::string("uncertified"),
                   0.0, 0.0});
          }
        }
      }
    }
  r.tables.push_back(std::move(t));
  r.results = {{"pairs", pairs},
               {"uncertified_unstable_pairs", uncertified},
               {"window_modes_for_adjacent_pairs", window_leaks},
               {"bank_failures", bank_failures},
               {"multicover_failures", multicover_failures}};
  r.check("|p-q|>1 negative mode", uncertified == 0, std::to_string(uncertified) + " pairs without a certificate");
  r.check("|p-q|=1 window empty", window_leaks == 0, std::to_string(window_leaks) + " integer modes in the window");
  r.check("|p-q|<=1 bank nonnegative", bank_failures == 0, std::to_string(bank_failures) + " negative modes");
  r.check("multicover negative", multicover_failures == 0, std::to_string(multicover_failures) + " failures");
  return r;
}

RunResult run_kernel(const RunParams& in) {
  RunResult r;
  r.command = "kernel";
  const double c = in.c.value_or(31.0);
  const std::string grid = in.grid.value_or("800x400");
  const auto [nt, nth] = parse_grid(grid);
  const double tol = in.tol.value_or(1e-8);
  r.params = {{"c", c}, {"grid", grid}, {"tol", tol}};

  const Cutoff cut = Cutoff::build(c);
  const CutoffSpec& sp = cut.spec();
  const CutoffReport cr = check_cutoff(cut);
  const KernelTables tab = build_kernel(cut, KernelGrid::for_cutoff(c, nt, nth));
  const WaveReport w = check_wave(cut, tab);
  const MonotonicityReport p = certify_monotonicity(cut, tab, tol);

  r.results["cutoff"] = {{"c", sp.c},           {"tau", sp.tau},
                         {"t0", sp.t0},         {"lambda", sp.lambda},
                         {"kappa", sp.kappa},   {"normalization", cr.normalization},
                         {"asymptote", cr.asymptote}, {"lambda_readings", cr.lambda_readings},
                         {"symmetry", cr.symmetry},   {"alpha_increase", cr.alpha_increase},
                         {"concavity", cr.concavity}, {"convexity", cr.convexity},
                         {"zeta_increase", cr.zeta_increase}, {"psi_negative", cr.psi_negative},
                         {"ode", cr.ode}};
  r.results["wave"] = {{"eta_residual", w.eta_residual},     {"companion_residual", w.companion_residual},
                       {"initial_value", w.initial_value},   {"companion_initial", w.companion_initial},
                       {"far_left_eta", w.far_left_eta},     {"far_right_eta", w.far_right_eta},
                       {"cosine_identity", w.cosine_identity}, {"exponential_identity", w.exponential_identity}};
  r.results["certificate"] = {{"min_F", p.min_F},
                              {"min_G", p.min_G},
                              {"max_G", p.max_G},
                              {"far_left_F", p.far_left_F},
                              {"far_left_G", p.far_left_G},
                              {"far_right", p.far_right},
                              {"initial_F", p.initial_F},
                              {"bounds_hold", p.bounds_hold},
                              {"excess_theta", number(p.excess_theta)},
                              {"shift_found", p.shift_found},
                              {"shift_steps", p.shift_steps},
                              {"theta0", p.theta0},
                              {"band_shift_found", p.band_shift_found},
                              {"band_shift_steps", p.band_shift_steps},
                              {"band_theta0", p.band_theta0},
                              {"path_deviation_F", tab.path_deviation_F},
                              {"path_deviation_G", tab.path_deviation_G}};

  const bool cutoff_ok = cr.alpha_increase <= 0 && cr.concavity <= 0 && cr.convexity <= 0 && cr.alpha_range <= 0 &&
                         cr.zeta_increase <= 0 && cr.psi_negative <= 0 && cr.symmetry <= 1e-12;
  r.check("cutoff conditions", cutoff_ok, "monotone, concave/convex halves, symmetric, psi >= 0");
  r.check("normalization", cr.normalization <= 1e-8, bound(cr.normalization, "<=", 1e-8));
  r.check("F >= -tol", p.min_F >= -tol, bound(p.min_F, ">=", -tol));
  r.check("G >= -tol", p.min_G >= -tol, bound(p.min_G, ">=", -tol));
  r.check("G <= 1 + tol", p.max_G <= 1.0 + tol, bound(p.max_G, "<=", 1.0 + tol));
  r.check("shift theta0 in (0,1)", p.shift_found && p.theta0 > 0.0 && p.theta0 < 1.0,
          p.shift_found ? "theta0 " + format_number(p.theta0) : "no shift works up to the far-left margin");
  const double regime = std::max({p.far_left_F, p.far_left_G, p.far_right});
  r.check("regime values", regime <= 1e-6, bound(regime, "<=", 1e-6));
  const double wave = std::max(w.eta_residual, w.companion_residual);
  r.check("wave residual", wave <= 1e-3, bound(wave, "<=", 1e-3));
  const double path = std::max(tab.path_deviation_F, tab.path_deviation_G);
  r.check("F/G paths agree", path <= 1e-4, bound(path, "<=", 1e-4));

  Table cut_csv{"cutoff", {"t", "alpha", "zeta", "psi"}, {}};
  for (int i = 0; i <= 2000; ++i) {
    const double t = -c - 3.0 + (c + 3.0 + std::log(0.5) + 3.0) * i / 2000.0;
    cut_csv.add({t, cut.alpha(t).v, cut.zeta(t).v, cut.psi(t).v});
  }
  r.tables.push_back(std::move(cut_csv));
  Table k_csv{"kernel", {"t", "theta", "F", "G"}, {}};
  for (int i = 0; i < tab.grid.nt; ++i)
    for (int j = 0; j < tab.grid.ntheta; ++j) k_csv.add({tab.grid.t(i), tab.grid.theta(j), tab.F(i, j), tab.G(i, j)});
  r.tables.push_back(std::move(k_csv));
  return r;
}

RunResult run_density(const RunParams& in) {
  RunResult r;
  r.command = "density";
  const double c = in.c.value_or(31.0);
  const std::string grid = in.grid.value_or("400x100");
  const auto [nt, nth] = parse_grid(grid);
  const double tol = in.tol.value_or(1e-3);
  r.params = {{"c", c}, {"grid", grid}, {"tol", tol}};
  std::vector<ConeSpec> specs{ConeSpec::make(1, 1), ConeSpec::make(1, 2), ConeSpec::make(2, 3)};
  if (in.p || in.q || in.k) specs.push_back(ConeSpec::make(in.p.value_or(1), in.q.value_or(2), in.k.value_or(1)));
  r.params["specs"] = Json::array();
  for (const ConeSpec& s : specs) r.params["specs"].push_back({s.p, s.q, s.k});

  const Cutoff cut = Cutoff::build(c);
  const KernelTables tab = build_kernel(cut, KernelGrid::for_cutoff(c, nt, nth));
  Table t{"density", {"p", "q", "k", "a", "ratio", "expected", "inner_tail", "outer_edge"}, {}};
  Json list = Json::array();
  for (const ConeSpec& s : specs) {
    double lo = 1e300, hi = -1e300, worst = 0.0;
    for (double a : {0.25, 0.5, 1.0}) {
      const DensityResult d = cone_density(tab, s, a);
      lo = std::min(lo, d.ratio);
      hi = std::max(hi, d.ratio);
      worst = std::max(worst, std::abs(d.ratio - s.density()));
      t.add({std::int64_t(s.p), std::int64_t(s.q), std::int64_t(s.k), a, d.ratio, s.density(), d.inner_tail, d.outer_edge});
    }
    const double spread = (hi - lo) / s.density();
    const std::string name = "(" + std::to_string(s.p) + "," + std::to_string(s.q) + "," + std::to_string(s.k) + ")";
    list.push_back({{"spec", name}, {"expected", s.density()}, {"worst_error", worst}, {"relative_spread", spread}});
    r.check("density " + name, worst <= tol, bound(worst, "<=", tol));
    r.check("constancy " + name, spread <= 1e-3, bound(spread, "<=", 1e-3));
  }
  r.results["cones"] = list;
  r.tables.push_back(std::move(t));
  return r;
}

RunResult run_graph(const RunParams& in) {
  RunResult r;
  r.command = "graph";
  const std::string grid = in.grid.value_or("32");
  const int m0 = parse_grid(grid).first;
  const double eps = in.eps.value_or(1e-3);
  const double tol = in.tol.value_or(1e-10);
  const std::uint64_t seed = in.seed.value_or(7);
  r.params = {{"grid", grid}, {"eps", eps}, {"tol", tol}, {"seed", seed}, {"levels", 4}};
  if (m0 < 16) throw std::invalid_argument("graph grid must be at least 16");
  MinimizerConfig cfg;
  cfg.tol = tol;

  // quadratic fields are exactly stationary
  const GraphGrid g0 = GraphGrid::square(m0);
  const GraphField quad = GraphField::sample(g0, [](double x, double y) { return 0.4 * x * x - 0.2 * x * y + 0.3 * y * y; });
  const double quad_grad = area_gradient(quad).cwiseAbs().maxCoeff() / (g0.h * g0.h);
  const double quad_el = el_residual(quad).variational_max;
  r.check("quadratic stationary", quad_grad <= 1e-8 && quad_el <= 1e-8,
          "gradient " + format_number(quad_grad) + ", residual " + format_number(quad_el) + " <= 1e-8");

  // seeded directional derivatives
  Uniform rng(seed);
  const GraphField rough = GraphField::sample(
      g0, [&](double x, double y) { return 0.3 * std::sin(3 * x + 2 * y) + 0.1 * x * y * y + 0.01 * rng(-1, 1); });
  const Eigen::VectorXd grad = area_gradient(rough);
  double dir = 0.0;
  for (int n = 0; n < 20; ++n) {
    Eigen::VectorXd v(g0.size());
    for (int i = 0; i < g0.n1(); ++i)
      for (int j = 0; j < g0.n2(); ++j) v[g0.index(i, j)] = g0.fixed(i, j) ? 0.0 : rng(-1, 1);
    // central differences extrapolated in the step; the plain quotient is truncation-limited on rough data
    auto central = [&](double t) {
      GraphField a = rough, b = rough;
      a.u += t * v;
      b.u -= t * v;
      return (area_excess(a) - area_excess(b)) / (2.0 * t);
    };
    const double fd = (4.0 * central(5e-6) - central(1e-5)) / 3.0;
    dir = std::max(dir, std::abs(fd - grad.dot(v)) / std::abs(grad.dot(v)));
  }
  r.check("directional derivatives", dir <= 1e-6, bound(dir, "<=", 1e-6));

  // small band data against the biharmonic extension
  Table et{"graph_eps", {"eps", "deviation", "relative_deviation", "el_at_biharmonic", "iterations"}, {}};
  std::vector<double> devs;
  for (int n = 0; n < 3; ++n) {
    const double e = eps / (1 << n);
    const GraphField band =
        GraphField::sample(g0, [e](double x, double y) { return e * (x * x * x + x * y * y + 0.5 * y * y * y); });
    const GraphField bh = biharmonic_extension(band);
    MinimizerConfig ce = cfg;
    ce.tol = std::min(tol, 2e-8 * e);
    const MinimizerState st = minimize(band, ce);
    const double dev = (st.field.u - bh.u).cwiseAbs().maxCoeff();
    devs.push_back(dev / e);
    et.add({e, dev, dev / e, el_residual(bh).variational_max, std::int64_t(st.iterations)});
  }
  const double eps_slope = std::log2(devs[1] / devs[2]);
  r.results["eps_relative_slope"] = eps_slope;
  r.check("eps^2 relative deviation", eps_slope >= 1.8, bound(eps_slope, ">=", 1.8));
  r.tables.push_back(std::move(et));

  // refinement on the central square [-1/4, 1/4]^2
  auto ub = [](double x, double y) { return 0.09 * (x * x * x - 3 * x * y * y) + 0.06 * std::sin(2 * x) * std::cos(y); };
  Table rt{"graph_refinement",
           {"m", "iterations", "converged", "area", "el_variational", "el_printed", "laplacian_beta", "sigma_plus_dbeta",
            "d_sigma", "lagrangian"},
           {}};
  std::vector<double> el, lb, ds;
  bool all_converged = true;
  for (int level = 0, m = m0; level < 4; ++level, m *= 2) {
    const GraphGrid g = GraphGrid::square(m);
    const MinimizerState st = minimize(GraphField::sample(g, ub), cfg);
    all_converged = all_converged && st.converged;
    const ELResidual e = el_residual(st.field, m / 4);
    const AngleField a = lagrangian_angle_field(st.field, m / 4);
    const AngleConsistency ac = angle_consistency(st.field, 3 + m / 4);
    el.push_back(e.variational_max);
    lb.push_back(a.laplacian_max);
    ds.push_back(ac.d_sigma);
    rt.add({std::int64_t(m), std::int64_t(st.iterations), std::int64_t(st.converged), st.area, e.variational_max,
            e.printed_max, a.laplacian_max, ac.sigma_plus_dbeta, ac.d_sigma, ac.lagrangian});
  }
  r.tables.push_back(std::move(rt));
  const std::size_t last = el.size() - 1;
  const double o_el = std::log2(el[last - 1] / el[last]);
  const double o_lb = std::log2(lb[last - 1] / lb[last]);
  const double o_ds = std::log2(ds[last - 1] / ds[last]);
  r.results["refinement_orders"] = {{"el_variational", o_el}, {"laplacian_beta", o_lb}, {"d_sigma", o_ds}};
  r.check("minimizer converged", all_converged, all_converged ? "all levels" : "some level stopped early");
  r.check("EL order", o_el >= 1.5, bound(o_el, ">=", 1.5));
  r.check("laplacian beta order", o_lb >= 1.5, bound(o_lb, ">=", 1.5));
  r.check("d sigma order", o_ds >= 1.5, bound(o_ds, ">=", 1.5));
  return r;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"cone", "stability", "kernel", "density", "graph"};
  return names;
}

RunResult run_command(const std::string& command, const RunParams& in) {
  if (command == "cone") return run_cone(in);
  if (command == "stability") return run_stability(in);
  if (command == "kernel") return run_kernel(in);
  if (command == "density") return run_density(in);
  if (command == "graph") return run_graph(in);
  throw std::invalid_argument("unknown command '" + command + "'");
}

}  // namespace lagstat
