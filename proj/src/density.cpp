#include "lagstat/density.hpp"

#include <cmath>
#include <sstream>

#include "lagstat/contact.hpp"

namespace lagstat {

DensityResult density_ratio(const KernelTables& tab, const SampledImmersion& imm, const std::vector<double>& phi,
                            double a) {
  if (!(a > 0.0)) throw std::invalid_argument("density radius must be positive");
  const GridSpec& g = imm.grid();
  if (static_cast<int>(phi.size()) != g.size()) throw std::invalid_argument("phi samples do not match the grid");
  const double shift = 2.0 * std::log(a);
  std::vector<double> f(g.size());
  for (int n = 0; n < g.size(); ++n) {
    const HeisenbergPoint h = HeisenbergPoint::at(imm.points()[n], phi[n]);
    const double t = h.t - shift;
    if (h.r0 >= 2.0 * a || t < tab.grid.t_min) {
      std::ostringstream msg;
      msg << "node " << n << " at r0 = " << h.r0 << " (t - 2 log a = " << t << ") is outside the kernel support: need r0 < "
          << 2.0 * a << " and t - 2 log a >= " << tab.grid.t_min;
      throw SupportError(msg.str());
    }
    const Vec4d &xu = imm.Xu(n), &xv = imm.Xv(n);
    const double da = std::sqrt(std::max(0.0, xu.squaredNorm() * xv.squaredNorm() - xu.dot(xv) * xu.dot(xv)));
    f[n] = tab.F_at(t, h.theta) * da;
  }
  DensityResult out;
  out.a = a;
  out.nodes = g.size();
  const double norm = 1.0 / (M_PI * a * a);
  out.ratio = norm * integrate(g, f);
  const double lambda = tab.cutoff.lambda;
  for (int j = 0; j < g.nv; ++j) {
    const int in = g.index(0, j), last = g.index(g.nu - 1, j);
    const HeisenbergPoint hi = HeisenbergPoint::at(imm.points()[in], phi[in]);
    const HeisenbergPoint ho = HeisenbergPoint::at(imm.points()[last], phi[last]);
    // the area inside the first row, taken as the cone over it
    out.inner_tail += norm * g.hv * 0.5 * imm.points()[in].norm() * imm.Xv(in).norm() *
                      tab.F_at(hi.t - shift, hi.theta);
    out.outer_edge = std::max(out.outer_edge, std::abs(tab.F_at(ho.t - shift, ho.theta)) / lambda);
  }
  return out;
}

SampledImmersion cone_log_immersion(const ConeSpec& spec, double rho0, double rho1, int nrho, int ns) {
  const GridSpec g = GridSpec::periodic_in_v(nrho, rho0, rho1, ns, 0.0, spec.length());
  return SampledImmersion::from_jet(g, [&](double rho, double s) {
    const CurveJet j = cone_curve(spec, s);
    const double r = std::exp(rho);
    return NodeJet{r * j.g, r * j.g, r * j.dg, r * j.g, r * j.dg, r * j.ddg};
  });
}

DensityResult cone_density(const KernelTables& tab, const ConeSpec& spec, double a, double depth, int nrho, int ns) {
  const double la = std::log(a);
  const SampledImmersion imm = cone_log_immersion(spec, la - depth, la + std::log(1.9), nrho, ns);
  return density_ratio(tab, imm, std::vector<double>(imm.size(), 0.0), a);
}

}  // namespace lagstat
