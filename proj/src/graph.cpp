#include "lagstat/graph.hpp"

#include <cmath>
#include <limits>
#include <array>
#include <sstream>

#include <Eigen/SparseCholesky>

namespace lagstat {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct CellTerms {
  double excess = 0.0;            // sqrt D - 1
  double d11 = 0.0, d22 = 0.0, d12 = 0.0;  // derivatives of sqrt D in u11, u22 and the single u12
};

// D = det(I + M^2) = (1 - det M)^2 + (tr M)^2
CellTerms cell_terms(const Hessian2& m) {
  const double pm1 = m.u12 * m.u12 - m.u11 * m.u22;  // (1 - det M) - 1
  const double P = 1.0 + pm1, T = m.u11 + m.u22;
  const double Dm1 = pm1 * (P + 1.0) + T * T;
  const double root = std::sqrt(1.0 + Dm1);
  CellTerms c;
  c.excess = Dm1 / (root + 1.0);
  c.d11 = (-P * m.u22 + T) / root;
  c.d22 = (-P * m.u11 + T) / root;
  c.d12 = 2.0 * P * m.u12 / root;
  return c;
}

// 3x3 Hessian of sqrt D in (u11, u22, u12)
Eigen::Matrix3d cell_hessian(const Hessian2& m) {
  const double P = 1.0 - m.u11 * m.u22 + m.u12 * m.u12, T = m.u11 + m.u22;
  const double D = P * P + T * T, R = std::sqrt(D);
  const Eigen::Vector3d dP(-m.u22, -m.u11, 2.0 * m.u12), dT(1.0, 1.0, 0.0);
  Eigen::Matrix3d ddP;
  ddP << 0, -1, 0, -1, 0, 0, 0, 0, 2;
  const Eigen::Vector3d dD = 2.0 * P * dP + 2.0 * T * dT;
  const Eigen::Matrix3d ddD = 2.0 * dP * dP.transpose() + 2.0 * P * ddP + 2.0 * dT * dT.transpose();
  return ddD / (2.0 * R) - dD * dD.transpose() / (4.0 * R * R * R);
}

// the three stencils of one cell, scaled so that (u11, u22, u12) = sum of weight * u / h^2
using Stencil = std::vector<std::pair<int, double>>;
std::array<Stencil, 3> cell_stencils(const GraphGrid& g, int i, int j) {
  const int c = g.index(i, j);
  return {Stencil{{g.index(i + 1, j), 1.0}, {c, -2.0}, {g.index(i - 1, j), 1.0}},
          Stencil{{g.index(i, j + 1), 1.0}, {c, -2.0}, {g.index(i, j - 1), 1.0}},
          Stencil{{g.index(i + 1, j + 1), 0.25},
                  {g.index(i + 1, j - 1), -0.25},
                  {g.index(i - 1, j + 1), -0.25},
                  {g.index(i - 1, j - 1), 0.25}}};
}

void check_size(const GraphField& f) {
  if (f.grid.m1 < 3 || f.grid.m2 < 3) throw std::invalid_argument("graph grid needs at least 5x5 nodes");
  if (f.u.size() != f.grid.size()) throw std::invalid_argument("graph field size does not match its grid");
}

// node fields on [1, m] from the compact Hessian
struct MetricData {
  std::vector<Hessian2> M;
  std::vector<Eigen::Matrix2d> mu, mu_inv;
  std::vector<double> root;  // sqrt det mu
};

MetricData metric_data(const GraphField& f) {
  const GraphGrid& g = f.grid;
  MetricData d;
  d.M.resize(g.size());
  d.mu.resize(g.size());
  d.mu_inv.resize(g.size());
  d.root.assign(g.size(), 0.0);
  for (int i = 1; i <= g.m1; ++i)
    for (int j = 1; j <= g.m2; ++j) {
      const int k = g.index(i, j);
      const Hessian2 m = discrete_hessian(f, i, j);
      Eigen::Matrix2d M;
      M << m.u11, m.u12, m.u12, m.u22;
      const Eigen::Matrix2d mu = Eigen::Matrix2d::Identity() + M * M;
      const double det = mu.determinant();
      if (!(det >= 1e-12)) throw DegenerateMetric(i, j, det);
      d.M[k] = m;
      d.mu[k] = mu;
      d.mu_inv[k] = mu.inverse();
      d.root[k] = std::sqrt(det);
    }
  return d;
}

NodeField node_field(const GraphGrid& g, int margin) {
  NodeField f;
  f.grid = g;
  f.value = Eigen::VectorXd::Zero(g.size());
  f.margin = margin;
  return f;
}

double d1(const GraphGrid& g, const Eigen::VectorXd& v, int i, int j, int axis) {
  if (axis == 0) return (v[g.index(i + 1, j)] - v[g.index(i - 1, j)]) / (2.0 * g.h);
  return (v[g.index(i, j + 1)] - v[g.index(i, j - 1)]) / (2.0 * g.h);
}

}  // namespace

GraphGrid GraphGrid::square(int m, double lo, double hi) {
  if (m < 3) throw std::invalid_argument("graph grid needs at least 3 cells per side");
  return GraphGrid{m, m, (hi - lo) / m, lo, lo};
}

GraphGrid GraphGrid::halved() const { return GraphGrid{2 * m1, 2 * m2, 0.5 * h, x0, y0}; }

double NodeField::max_abs(int extra_margin) const {
  const int lo = margin + extra_margin;
  double out = 0.0;
  for (int i = lo; i <= grid.m1 + 1 - lo; ++i)
    for (int j = lo; j <= grid.m2 + 1 - lo; ++j) out = std::max(out, std::abs(value[grid.index(i, j)]));
  return out;
}

GraphField GraphField::sample(const GraphGrid& g, const std::function<double(double, double)>& f) {
  GraphField out;
  out.grid = g;
  out.u.resize(g.size());
  for (int i = 0; i < g.n1(); ++i)
    for (int j = 0; j < g.n2(); ++j) out.u[g.index(i, j)] = f(g.x(i), g.y(j));
  return out;
}

Hessian2 discrete_hessian(const GraphField& f, int i, int j) {
  const GraphGrid& g = f.grid;
  const Eigen::VectorXd& u = f.u;
  const double h2 = g.h * g.h;
  const double c = u[g.index(i, j)];
  Hessian2 m;
  m.u11 = (u[g.index(i + 1, j)] - 2.0 * c + u[g.index(i - 1, j)]) / h2;
  m.u22 = (u[g.index(i, j + 1)] - 2.0 * c + u[g.index(i, j - 1)]) / h2;
  m.u12 = (u[g.index(i + 1, j + 1)] - u[g.index(i + 1, j - 1)] - u[g.index(i - 1, j + 1)] + u[g.index(i - 1, j - 1)]) /
          (4.0 * h2);
  return m;
}

double area_excess(const GraphField& f) {
  check_size(f);
  const GraphGrid& g = f.grid;
  double sum = 0.0;
  for (int i = 1; i <= g.m1; ++i)
    for (int j = 1; j <= g.m2; ++j) sum += cell_terms(discrete_hessian(f, i, j)).excess;
  return sum * g.h * g.h;
}

double area(const GraphField& f) { return f.grid.area() + area_excess(f); }

Eigen::VectorXd area_gradient(const GraphField& f) {
  check_size(f);
  const GraphGrid& g = f.grid;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(g.size());
  // h^2 weight times 1/h^2 from the stencils
  for (int i = 1; i <= g.m1; ++i)
    for (int j = 1; j <= g.m2; ++j) {
      const CellTerms c = cell_terms(discrete_hessian(f, i, j));
      grad[g.index(i + 1, j)] += c.d11;
      grad[g.index(i - 1, j)] += c.d11;
      grad[g.index(i, j + 1)] += c.d22;
      grad[g.index(i, j - 1)] += c.d22;
      grad[g.index(i, j)] -= 2.0 * (c.d11 + c.d22);
      const double q = 0.25 * c.d12;
      grad[g.index(i + 1, j + 1)] += q;
      grad[g.index(i - 1, j - 1)] += q;
      grad[g.index(i + 1, j - 1)] -= q;
      grad[g.index(i - 1, j + 1)] -= q;
    }
  for (int i = 0; i < g.n1(); ++i)
    for (int j = 0; j < g.n2(); ++j)
      if (g.fixed(i, j)) grad[g.index(i, j)] = 0.0;
  return grad;
}

Eigen::SparseMatrix<double> quadratic_operator(const GraphGrid& g) {
  Triplets t;
  const double inv = 1.0 / (g.h * g.h);
  const double w[3] = {inv, inv, 2.0 * inv};
  for (int i = 1; i <= g.m1; ++i)
    for (int j = 1; j <= g.m2; ++j) {
      const auto st = cell_stencils(g, i, j);
      for (int a = 0; a < 3; ++a)
        for (const auto& x : st[a])
          for (const auto& y : st[a]) t.emplace_back(x.first, y.first, w[a] * x.second * y.second);
    }
  Eigen::SparseMatrix<double> B(g.size(), g.size());
  B.setFromTriplets(t.begin(), t.end());
  return B;
}

Eigen::SparseMatrix<double> area_hessian(const GraphField& f) {
  check_size(f);
  const GraphGrid& g = f.grid;
  Triplets t;
  const double inv = 1.0 / (g.h * g.h);
  for (int i = 1; i <= g.m1; ++i)
    for (int j = 1; j <= g.m2; ++j) {
      const Eigen::Matrix3d H = cell_hessian(discrete_hessian(f, i, j)) * inv;
      const auto st = cell_stencils(g, i, j);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (const auto& x : st[a])
            for (const auto& y : st[b]) t.emplace_back(x.first, y.first, H(a, b) * x.second * y.second);
    }
  Eigen::SparseMatrix<double> A(g.size(), g.size());
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

namespace {

struct FreeSystem {
  std::vector<int> free;
  std::vector<int> fixed;
  Eigen::SparseMatrix<double> Bff, Bfb;
};

FreeSystem free_system(const GraphGrid& g) {
  FreeSystem s;
  std::vector<int> pos(g.size(), -1), bpos(g.size(), -1);
  for (int i = 0; i < g.n1(); ++i)
    for (int j = 0; j < g.n2(); ++j) {
      const int k = g.index(i, j);
      if (g.fixed(i, j)) {
        bpos[k] = static_cast<int>(s.fixed.size());
        s.fixed.push_back(k);
      } else {
        pos[k] = static_cast<int>(s.free.size());
        s.free.push_back(k);
      }
    }
  const Eigen::SparseMatrix<double> B = quadratic_operator(g);
  Triplets ff, fb;
  for (int col = 0; col < B.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(B, col); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (pos[r] < 0) continue;
      if (pos[c] >= 0)
        ff.emplace_back(pos[r], pos[c], it.value());
      else
        fb.emplace_back(pos[r], bpos[c], it.value());
    }
  s.Bff.resize(static_cast<int>(s.free.size()), static_cast<int>(s.free.size()));
  s.Bff.setFromTriplets(ff.begin(), ff.end());
  s.Bfb.resize(static_cast<int>(s.free.size()), static_cast<int>(s.fixed.size()));
  s.Bfb.setFromTriplets(fb.begin(), fb.end());
  return s;
}

Eigen::SparseMatrix<double> restrict_free(const Eigen::SparseMatrix<double>& A, const GraphGrid& g,
                                          const std::vector<int>& free) {
  std::vector<int> pos(g.size(), -1);
  for (std::size_t k = 0; k < free.size(); ++k) pos[free[k]] = static_cast<int>(k);
  Triplets t;
  for (int col = 0; col < A.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
      const int r = pos[it.row()], c = pos[it.col()];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  const int n = static_cast<int>(free.size());
  Eigen::SparseMatrix<double> out(n, n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<int>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<int>(k)] = v[idx[k]];
  return out;
}

}  // namespace

GraphField biharmonic_extension(const GraphField& band) {
  check_size(band);
  const FreeSystem s = free_system(band.grid);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(s.Bff);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("quadratic operator factorization failed");
  const Eigen::VectorXd x = ldlt.solve(-(s.Bfb * gather(band.u, s.fixed)));
  GraphField out = band;
  for (std::size_t k = 0; k < s.free.size(); ++k) out.u[s.free[k]] = x[static_cast<int>(k)];
  return out;
}

MinimizerState minimize(const GraphField& u0, const MinimizerConfig& cfg) {
  check_size(u0);
  const GraphGrid& g = u0.grid;
  const FreeSystem s = free_system(g);
  const double scale = 1.0 / (g.h * g.h);

  MinimizerState st;
  st.field = u0;
  st.excess = area_excess(st.field);
  st.excess_history.push_back(st.excess);
  Eigen::VectorXd grad = gather(area_gradient(st.field), s.free);
  st.gradient_norm = grad.cwiseAbs().maxCoeff() * scale;
  // rounding in u alone moves gradient / h^2 by about eps |u| / h^4
  st.gradient_floor = 32.0 * std::numeric_limits<double>::epsilon() * u0.u.cwiseAbs().maxCoeff() * scale * scale;
  const double target = std::max(cfg.tol, st.gradient_floor);
  auto finish = [&] {
    st.area = g.area() + st.excess;
    return st;
  };
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  while (st.gradient_norm > target) {
    if (st.iterations >= cfg.max_iterations) return finish();
    // Newton direction; an indefinite Hessian is shifted towards the quadratic operator until it factors
    const Eigen::SparseMatrix<double> H = restrict_free(area_hessian(st.field), g, s.free);
    Eigen::VectorXd d;
    double shift = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
      const Eigen::SparseMatrix<double> K = shift == 0.0 ? H : Eigen::SparseMatrix<double>(H + shift * s.Bff);
      ldlt.compute(K);
      if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
        d = -ldlt.solve(grad);
        break;
      }
      shift = shift == 0.0 ? 1e-4 : 4.0 * shift;
    }
    if (d.size() == 0) {
      ldlt.compute(s.Bff);
      d = -ldlt.solve(grad);
    }
    const double slope = grad.dot(d);
    if (!(slope < 0.0)) {
      st.stalled = true;
      break;
    }
    double step = 1.0;
    GraphField trial = st.field;
    double f_new = 0.0;
    while (true) {
      for (std::size_t k = 0; k < s.free.size(); ++k)
        trial.u[s.free[k]] = st.field.u[s.free[k]] + step * d[static_cast<int>(k)];
      f_new = area_excess(trial);
      if (f_new <= st.excess + cfg.armijo * step * slope) break;
      step *= 0.5;
      if (step < cfg.min_step) {
        std::ostringstream msg;
        msg << "line search failed after " << st.iterations << " iterations: step below " << cfg.min_step
            << ", gradient norm " << st.gradient_norm;
        finish();
        throw LineSearchFailure(msg.str(), st);
      }
    }
    // an accepted step that does not lower the area means only rounding is left
    if (f_new >= st.excess) {
      st.stalled = true;
      break;
    }
    st.field = std::move(trial);
    st.excess = f_new;
    st.excess_history.push_back(f_new);
    grad = gather(area_gradient(st.field), s.free);
    st.gradient_norm = grad.cwiseAbs().maxCoeff() * scale;
    ++st.iterations;
  }
  // a stall close to the floor is rounding-limited, not a failure
  st.converged = st.gradient_norm <= (st.stalled ? 8.0 * target : target);
  return finish();
}

ELResidual el_residual(const GraphField& f, int extra_margin) {
  check_size(f);
  const GraphGrid& g = f.grid;
  if (g.m1 < 8 || g.m2 < 8) throw std::invalid_argument("EL residual needs at least 8 cells per side");
  const MetricData md = metric_data(f);
  // N_ik = sqrt(mu) (mu^-1 M)_ik on [1, m]
  std::vector<Eigen::Matrix2d> N(g.size(), Eigen::Matrix2d::Zero());
  for (int i = 1; i <= g.m1; ++i)
    for (int j = 1; j <= g.m2; ++j) {
      const int k = g.index(i, j);
      Eigen::Matrix2d M;
      M << md.M[k].u11, md.M[k].u12, md.M[k].u12, md.M[k].u22;
      N[k] = md.root[k] * md.mu_inv[k] * M;
    }
  // V_k = sum_i D_i N_ik = sqrt(mu) Delta_mu u_k on [2, m - 1]
  Eigen::VectorXd V1 = Eigen::VectorXd::Zero(g.size()), V2 = V1, P1 = V1, P2 = V1;
  for (int i = 2; i <= g.m1 - 1; ++i)
    for (int j = 2; j <= g.m2 - 1; ++j) {
      const int k = g.index(i, j);
      const double h2 = 2.0 * g.h;
      for (int c = 0; c < 2; ++c) {
        const double v = (N[g.index(i + 1, j)](0, c) - N[g.index(i - 1, j)](0, c)) / h2 +
                         (N[g.index(i, j + 1)](1, c) - N[g.index(i, j - 1)](1, c)) / h2;
        (c == 0 ? V1 : V2)[k] = v;
        (c == 0 ? P1 : P2)[k] = v / md.root[k];
      }
    }
  ELResidual out;
  out.printed = node_field(g, 3);
  out.variational = node_field(g, 3);
  for (int i = 3; i <= g.m1 - 2; ++i)
    for (int j = 3; j <= g.m2 - 2; ++j) {
      const int k = g.index(i, j);
      out.variational.value[k] = d1(g, V1, i, j, 0) + d1(g, V2, i, j, 1);
      out.printed.value[k] = d1(g, P1, i, j, 0) + d1(g, P2, i, j, 1);
    }
  out.printed_max = out.printed.max_abs(extra_margin);
  out.variational_max = out.variational.max_abs(extra_margin);
  return out;
}

AngleField lagrangian_angle_field(const GraphField& f, int extra_margin) {
  check_size(f);
  const GraphGrid& g = f.grid;
  const MetricData md = metric_data(f);
  AngleField out;
  out.beta = node_field(g, 1);
  for (int i = 1; i <= g.m1; ++i)
    for (int j = 1; j <= g.m2; ++j) {
      const Hessian2& m = md.M[g.index(i, j)];
      // arg det(I + iM) = arctan l1 + arctan l2, continuous while |beta| < pi
      out.beta.value[g.index(i, j)] = std::atan2(m.u11 + m.u22, 1.0 - (m.u11 * m.u22 - m.u12 * m.u12));
    }
  const Eigen::VectorXd& b = out.beta.value;
  Eigen::VectorXd q1 = Eigen::VectorXd::Zero(g.size()), q2 = q1;
  for (int i = 2; i <= g.m1 - 1; ++i)
    for (int j = 2; j <= g.m2 - 1; ++j) {
      const int k = g.index(i, j);
      const Eigen::Vector2d db(d1(g, b, i, j, 0), d1(g, b, i, j, 1));
      const Eigen::Vector2d q = md.root[k] * (md.mu_inv[k] * db);
      q1[k] = q[0];
      q2[k] = q[1];
    }
  out.laplacian = node_field(g, 3);
  if (g.m1 >= 6 && g.m2 >= 6)
    for (int i = 3; i <= g.m1 - 2; ++i)
      for (int j = 3; j <= g.m2 - 2; ++j) {
        const int k = g.index(i, j);
        out.laplacian.value[k] = (d1(g, q1, i, j, 0) + d1(g, q2, i, j, 1)) / md.root[k];
      }
  out.laplacian_max = out.laplacian.max_abs(extra_margin);
  return out;
}

SampledImmersion graph_immersion(const GraphField& f) {
  check_size(f);
  const GraphGrid& g = f.grid;
  const GridSpec spec = GridSpec::closed(g.m1, g.x(1), g.x(g.m1), g.m2, g.y(1), g.y(g.m2));
  std::vector<Vec4d> pts(spec.size());
  for (int i = 1; i <= g.m1; ++i)
    for (int j = 1; j <= g.m2; ++j)
      pts[spec.index(i - 1, j - 1)] = Vec4d(g.x(i), d1(g, f.u, i, j, 0), g.y(j), d1(g, f.u, i, j, 1));
  return SampledImmersion::from_points(spec, std::move(pts));
}

AngleConsistency angle_consistency(const GraphField& f, int margin) {
  const GraphGrid& g = f.grid;
  SampledImmersion imm = graph_immersion(f);
  imm.shape();
  const AngleField a = lagrangian_angle_field(f);
  const GridSpec& s = imm.grid();
  AngleConsistency out;
  for (int i = margin; i < s.nu - margin; ++i)
    for (int j = margin; j < s.nv - margin; ++j) {
      const int n = s.index(i, j);
      const int gi = i + 1, gj = j + 1;
      const Eigen::Vector2d db(d1(g, a.beta.value, gi, gj, 0), d1(g, a.beta.value, gi, gj, 1));
      out.sigma_plus_dbeta = std::max(out.sigma_plus_dbeta, (imm.sigma_H().sigma[n] + db).cwiseAbs().maxCoeff());
      out.d_sigma = std::max(out.d_sigma, std::abs(imm.sigma_H().d[n]));
    }
  out.lagrangian = imm.lagrangian_defect(margin);
  return out;
}

}  // namespace lagstat
