#include "lagstat/contact.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lagstat/cone.hpp"

namespace lagstat {

namespace {

Vec4d head(const Vec5d& p) { return p.head<4>(); }

double alpha_of(const Vec5d& p, const Vec5d& v) { return v[4] - omega(head(p), head(v)); }

// 5x5 Jacobian of X_h by central differences
Eigen::Matrix<double, 5, 5> field_jacobian(const Hamiltonian& h, const Vec5d& p) {
  Eigen::Matrix<double, 5, 5> J;
  for (int k = 0; k < 5; ++k) {
    const double d = 1e-5 * std::max(1.0, std::abs(p[k]));
    Vec5d a = p, b = p;
    a[k] += d;
    b[k] -= d;
    J.col(k) = (contact_field(h, a) - contact_field(h, b)) / (2.0 * d);
  }
  return J;
}

}  // namespace

HeisenbergPoint HeisenbergPoint::at(const Vec4d& xy, double phi) {
  HeisenbergPoint h;
  h.s = 0.5 * xy.squaredNorm();
  h.s_tilde = std::hypot(h.s, phi);
  h.t = std::log(h.s_tilde);
  h.theta = std::atan2(phi, h.s);
  h.r0 = std::sqrt(2.0 * h.s_tilde);
  return h;
}

Vec5d hamiltonian_gradient(const Hamiltonian& h, const Vec5d& p, double step) {
  if (h.gradient) {
    const Vec5d g = h.gradient(p);
    if (!g.allFinite()) throw NonDifferentiable("hamiltonian gradient is not finite");
    return g;
  }
  const double h0 = h.value(p);
  if (!std::isfinite(h0)) throw NonDifferentiable("hamiltonian value is not finite");
  Vec5d g;
  for (int k = 0; k < 5; ++k) {
    const double d = step * std::max(1.0, std::abs(p[k]));
    Vec5d a = p, b = p;
    a[k] += d;
    b[k] -= d;
    const double fa = h.value(a), fb = h.value(b);
    if (!std::isfinite(fa) || !std::isfinite(fb)) throw NonDifferentiable("hamiltonian is not finite near the point");
    const double fwd = (fa - h0) / d, bwd = (h0 - fb) / d;
    // smooth h: the quotients differ by d h''; a kink leaves an O(1) jump
    if (std::abs(fwd - bwd) > 1e-3 * (1.0 + std::abs(fwd) + std::abs(bwd))) {
      std::ostringstream msg;
      msg << "hamiltonian is not differentiable in coordinate " << k << ": one-sided slopes " << bwd << " and " << fwd;
      throw NonDifferentiable(msg.str());
    }
    g[k] = 0.5 * (fwd + bwd);
  }
  return g;
}

double contact_form(const Vec5d& p, const Vec5d& v) { return alpha_of(p, v); }

Vec5d contact_field(const Hamiltonian& h, const Vec5d& p) {
  const Vec5d g = hamiltonian_gradient(h, p);
  const double hp = g[4];
  Vec5d X;
  double radial = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double x = p[2 * j], y = p[2 * j + 1], hx = g[2 * j], hy = g[2 * j + 1];
    X[2 * j] = -hy - hp * x;
    X[2 * j + 1] = hx - hp * y;
    radial += x * hx + y * hy;
  }
  X[4] = -2.0 * h.value(p) + radial;
  return X;
}

LieCheck lie_check(const Hamiltonian& h, const Vec5d& p0, const std::vector<Vec5d>& vectors, double T, int steps) {
  if (steps < 1 || !(T > 0.0)) throw std::invalid_argument("lie_check needs T > 0 and at least one step");
  const int m = static_cast<int>(vectors.size());
  const int n = 5 + 5 * m + 1;
  using State = Eigen::VectorXd;
  auto rhs = [&](const State& y) {
    State d(n);
    const Vec5d p = y.head<5>();
    d.head<5>() = contact_field(h, p);
    const Eigen::Matrix<double, 5, 5> J = field_jacobian(h, p);
    for (int k = 0; k < m; ++k) d.segment<5>(5 + 5 * k) = J * y.segment<5>(5 + 5 * k);
    d[n - 1] = hamiltonian_gradient(h, p)[4];
    return d;
  };
  State y(n);
  y.head<5>() = p0;
  for (int k = 0; k < m; ++k) y.segment<5>(5 + 5 * k) = vectors[k];
  y[n - 1] = 0.0;

  LieCheck out;
  out.steps = steps;
  out.T = T;
  {
    const Vec5d X = contact_field(h, p0);
    const Eigen::Matrix<double, 5, 5> J = field_jacobian(h, p0);
    const double hp = hamiltonian_gradient(h, p0)[4];
    for (const Vec5d& v : vectors) {
      const Vec5d Jv = J * v;
      const double a0 = alpha_of(p0, v);
      const double rate = Jv[4] - omega(head(X), head(v)) - omega(head(p0), head(Jv));
      const double scale = std::max(std::abs(a0), v.norm() * (1.0 + p0.norm()));
      out.rate = std::max(out.rate, std::abs(rate + 2.0 * hp * a0) / scale);
    }
  }
  const double dt = T / steps;
  for (int s = 0; s < steps; ++s) {
    const State k1 = rhs(y);
    const State k2 = rhs(y + 0.5 * dt * k1);
    const State k3 = rhs(y + 0.5 * dt * k2);
    const State k4 = rhs(y + dt * k3);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const Vec5d pT = y.head<5>();
  const double factor = std::exp(-2.0 * y[n - 1]);
  for (int k = 0; k < m; ++k) {
    const Vec5d vT = y.segment<5>(5 + 5 * k);
    const double a0 = alpha_of(p0, vectors[k]);
    const double scale = std::max(std::abs(a0), vectors[k].norm() * (1.0 + p0.norm()));
    out.flow = std::max(out.flow, std::abs(alpha_of(pT, vT) - factor * a0) / scale);
  }
  return out;
}

LegendrianLift graph_lift(const GridSpec& grid, const std::function<double(double, double)>& u,
                          const std::function<Eigen::Vector2d(double, double)>& grad_u) {
  LegendrianLift l;
  l.grid = grid;
  l.points.resize(grid.size());
  l.phi.resize(grid.size());
  for (int i = 0; i < grid.nu; ++i)
    for (int j = 0; j < grid.nv; ++j) {
      const double x1 = grid.u(i), x2 = grid.v(j);
      const Eigen::Vector2d g = grad_u(x1, x2);
      const int k = grid.index(i, j);
      l.points[k] = Vec4d(x1, g[0], x2, g[1]);
      l.phi[k] = x1 * g[0] + x2 * g[1] - 2.0 * u(x1, x2);
    }
  return l;
}

LegendrianLift cone_lift(int p, int q, const GridSpec& grid) {
  const ConeSpec spec = ConeSpec::make(p, q);
  LegendrianLift l;
  l.grid = grid;
  l.points.resize(grid.size());
  l.phi.assign(grid.size(), 0.0);
  for (int i = 0; i < grid.nu; ++i)
    for (int j = 0; j < grid.nv; ++j) l.points[grid.index(i, j)] = grid.u(i) * cone_curve(spec, grid.v(j)).g;
  return l;
}

LegendrianLift scaled(const LegendrianLift& lift, double k) {
  LegendrianLift l = lift;
  for (Vec4d& x : l.points) x *= k;
  for (double& f : l.phi) f *= k * k;
  return l;
}

double TangentialReport::worst() const { return std::max({norm_identity, div_theta, div_t, div_s}); }

TangentialReport tangential_identities(const LegendrianLift& lift, int margin, double legendrian_tol, double s_floor) {
  const GridSpec& g = lift.grid;
  const int n = g.size();
  if (static_cast<int>(lift.points.size()) != n || static_cast<int>(lift.phi.size()) != n)
    throw std::invalid_argument("lift samples do not match the grid");
  TangentialReport rep;
  rep.min_s = std::numeric_limits<double>::infinity();
  std::vector<double> t(n), th(n);
  std::vector<Vec4d> Xt(n), Xth(n), Xs(n);
  for (int k = 0; k < n; ++k) {
    const Vec4d& x = lift.points[k];
    const HeisenbergPoint hp = HeisenbergPoint::at(x, lift.phi[k]);
    rep.min_s = std::min(rep.min_s, hp.s);
    if (hp.s <= s_floor) {
      std::ostringstream msg;
      msg << "surface reaches s = " << hp.s << " at node " << k << "; the identities need s > 0";
      throw SupportError(msg.str());
    }
    t[k] = hp.t;
    th[k] = hp.theta;
    const double st2 = hp.s_tilde * hp.s_tilde;
    const Vec4d Jx = apply_J(x);
    // X_h ~ h_s J x - h_phi x for h = h(s, phi)
    Xt[k] = (hp.s / st2) * Jx - (lift.phi[k] / st2) * x;
    Xth[k] = (-lift.phi[k] / st2) * Jx - (hp.s / st2) * x;
    Xs[k] = Jx;
  }
  const auto Pu = field_diff_u(g, lift.points), Pv = field_diff_v(g, lift.points);
  const auto fu = field_diff_u(g, lift.phi), fv = field_diff_v(g, lift.phi);
  const auto tu = field_diff_u(g, t), tv = field_diff_v(g, t);
  const auto qu = field_diff_u(g, th), qv = field_diff_v(g, th);
  const auto Xtu = field_diff_u(g, Xt), Xtv = field_diff_v(g, Xt);
  const auto Xqu = field_diff_u(g, Xth), Xqv = field_diff_v(g, Xth);
  const auto Xsu = field_diff_u(g, Xs), Xsv = field_diff_v(g, Xs);
  for (int i = 0; i < g.nu; ++i) {
    if (!g.periodic_u && (i < margin || i >= g.nu - margin)) continue;
    for (int j = 0; j < g.nv; ++j) {
      if (!g.periodic_v && (j < margin || j >= g.nv - margin)) continue;
      const int k = g.index(i, j);
      const Vec4d& x = lift.points[k];
      rep.legendrian = std::max({rep.legendrian, std::abs(fu[k] - omega(x, Pu[k])), std::abs(fv[k] - omega(x, Pv[k]))});
      Eigen::Matrix2d m;
      m << Pu[k].dot(Pu[k]), Pu[k].dot(Pv[k]), Pu[k].dot(Pv[k]), Pv[k].dot(Pv[k]);
      const Eigen::Matrix2d gi = m.inverse();
      const Eigen::Vector2d dt(tu[k], tv[k]), dq(qu[k], qv[k]);
      const double tt = dt.dot(gi * dt), qq = dq.dot(gi * dq), tq = dt.dot(gi * dq);
      auto div = [&](const Vec4d& a, const Vec4d& b) {
        Eigen::Matrix2d d;
        d << a.dot(Pu[k]), a.dot(Pv[k]), b.dot(Pu[k]), b.dot(Pv[k]);
        return (gi * d).trace();
      };
      const HeisenbergPoint hp = HeisenbergPoint::at(x, lift.phi[k]);
      // every term is homogeneous of degree -2 under dilation; residuals are measured against 2 / s_tilde
      const double unit = 0.5 * hp.s_tilde;
      rep.scale = std::max(rep.scale, 2.0 / hp.s_tilde);
      rep.norm_identity =
          std::max(rep.norm_identity, unit * std::abs(tt + qq - 2.0 * std::cos(hp.theta) / hp.s_tilde));
      rep.div_theta = std::max(rep.div_theta, unit * std::abs(div(Xqu[k], Xqv[k]) + 2.0 * qq));
      rep.div_t = std::max(
          rep.div_t, unit * std::abs(div(Xtu[k], Xtv[k]) + 2.0 * std::sin(hp.theta) / hp.s_tilde + 2.0 * tq));
      rep.div_s = std::max(rep.div_s, unit * std::abs(div(Xsu[k], Xsv[k])));
      ++rep.nodes;
    }
  }
  if (rep.legendrian > legendrian_tol) {
    std::ostringstream msg;
    msg << "lift is not Legendrian: max |dphi - eta| = " << rep.legendrian << " exceeds " << legendrian_tol;
    throw std::runtime_error(msg.str());
  }
  return rep;
}

}  // namespace lagstat
