#include "lagstat/immersion.hpp"

#include <cmath>
#include <sstream>

#include "lagstat/curve.hpp"
#include "lagstat/quadrature.hpp"

namespace lagstat {

GridSpec GridSpec::closed(int nu, double ua, double ub, int nv, double va, double vb) {
  GridSpec g;
  g.nu = nu;
  g.nv = nv;
  g.u0 = ua;
  g.hu = (ub - ua) / (nu - 1);
  g.v0 = va;
  g.hv = (vb - va) / (nv - 1);
  return g;
}

GridSpec GridSpec::periodic_in_v(int nu, double ua, double ub, int nv, double va, double period) {
  GridSpec g = closed(nu, ua, ub, 2, 0.0, 1.0);
  g.nv = nv;
  g.v0 = va;
  g.hv = period / nv;
  g.periodic_v = true;
  return g;
}

GridSpec GridSpec::halved() const {
  GridSpec g = *this;
  g.hu *= 0.5;
  g.hv *= 0.5;
  g.nu = periodic_u ? 2 * nu : 2 * nu - 1;
  g.nv = periodic_v ? 2 * nv : 2 * nv - 1;
  return g;
}

std::vector<double> grid_weights(const GridSpec& g) {
  const Eigen::VectorXd wu =
      g.periodic_u ? quad::periodic_weights(g.nu, g.hu) : quad::simpson_weights(g.nu, g.hu);
  const Eigen::VectorXd wv =
      g.periodic_v ? quad::periodic_weights(g.nv, g.hv) : quad::simpson_weights(g.nv, g.hv);
  std::vector<double> w(g.size());
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) w[g.index(i, j)] = wu[i] * wv[j];
  return w;
}

double integrate(const GridSpec& g, const std::vector<double>& values) {
  const std::vector<double> w = grid_weights(g);
  double sum = 0.0;
  for (std::size_t n = 0; n < values.size(); ++n) sum += w[n] * values[n];
  return sum;
}

DegenerateMetric::DegenerateMetric(int i_, int j_, double det_)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "degenerate induced metric at node (" << i_ << ", " << j_ << "): det g = " << det_;
        return msg.str();
      }()),
      i(i_),
      j(j_),
      det(det_) {}

OneFormField OneFormField::with_derivative(const GridSpec& g, std::vector<Eigen::Vector2d> sigma) {
  OneFormField f;
  f.sigma = std::move(sigma);
  f.d.resize(f.sigma.size());
  for (int i = 0; i < g.nu; ++i) {
    for (int j = 0; j < g.nv; ++j) {
      const Eigen::Vector2d du = diff_u(g, f.sigma, i, j);
      const Eigen::Vector2d dv = diff_v(g, f.sigma, i, j);
      f.d[g.index(i, j)] = du[1] - dv[0];
    }
  }
  return f;
}

double OneFormField::max_d(const GridSpec& g, int margin) const {
  double worst = 0.0;
  for (int i = 0; i < g.nu; ++i) {
    if (!g.periodic_u && (i < margin || i >= g.nu - margin)) continue;
    for (int j = 0; j < g.nv; ++j) {
      if (!g.periodic_v && (j < margin || j >= g.nv - margin)) continue;
      worst = std::max(worst, std::abs(d[g.index(i, j)]));
    }
  }
  return worst;
}

SampledImmersion SampledImmersion::from_points(const GridSpec& grid, std::vector<Vec4d> points) {
  if (static_cast<int>(points.size()) != grid.size()) throw std::invalid_argument("point count does not match grid");
  if ((!grid.periodic_u && grid.nu < 4) || (!grid.periodic_v && grid.nv < 4)) {
    throw std::invalid_argument("closed grid directions need at least 4 samples");
  }
  SampledImmersion imm;
  imm.grid_ = grid;
  imm.X_ = std::move(points);
  imm.Xu_ = field_diff_u(grid, imm.X_);
  imm.Xv_ = field_diff_v(grid, imm.X_);
  imm.Xuu_.resize(imm.X_.size());
  imm.Xvv_.resize(imm.X_.size());
  for (int i = 0; i < grid.nu; ++i) {
    for (int j = 0; j < grid.nv; ++j) {
      imm.Xuu_[grid.index(i, j)] = diff_uu(grid, imm.X_, i, j);
      imm.Xvv_[grid.index(i, j)] = diff_vv(grid, imm.X_, i, j);
    }
  }
  imm.Xuv_ = field_diff_v(grid, imm.Xu_);
  return imm;
}

SampledImmersion SampledImmersion::from_jet(const GridSpec& grid, const std::function<NodeJet(double, double)>& jet) {
  SampledImmersion imm;
  imm.grid_ = grid;
  const int n = grid.size();
  for (auto* v : {&imm.X_, &imm.Xu_, &imm.Xv_, &imm.Xuu_, &imm.Xuv_, &imm.Xvv_}) v->resize(n);
  for (int i = 0; i < grid.nu; ++i) {
    for (int j = 0; j < grid.nv; ++j) {
      const NodeJet d = jet(grid.u(i), grid.v(j));
      const int k = grid.index(i, j);
      imm.X_[k] = d.X;
      imm.Xu_[k] = d.Xu;
      imm.Xv_[k] = d.Xv;
      imm.Xuu_[k] = d.Xuu;
      imm.Xuv_[k] = d.Xuv;
      imm.Xvv_[k] = d.Xvv;
    }
  }
  return imm;
}

bool SampledImmersion::one_sided(int i, int j) const {
  return (!grid_.periodic_u && (i == 0 || i == grid_.nu - 1)) || (!grid_.periodic_v && (j == 0 || j == grid_.nv - 1));
}

Vec4d SampledImmersion::tangent_part(int n, const Vec4d& v) const {
  return v.dot(e1_[n]) * e1_[n] + v.dot(e2_[n]) * e2_[n];
}

Vec4d SampledImmersion::normal_part(int n, const Vec4d& v) const {
  return v.dot(n1_[n]) * n1_[n] + v.dot(n2_[n]) * n2_[n];
}

Vec4d SampledImmersion::B_frame(int n, int a, int b) const {
  // e_a = c_a^u Xu + c_a^v Xv, from the Gram-Schmidt coefficients.
  const Eigen::Matrix2d& gi = ginv_[n];
  Eigen::Matrix<double, 2, 2> c;  // columns: coefficients of e1, e2 in (Xu, Xv)
  Eigen::Matrix<double, 4, 2> T;
  T << Xu_[n], Xv_[n];
  Eigen::Matrix<double, 4, 2> E;
  E << e1_[n], e2_[n];
  c = gi * T.transpose() * E;
  const Vec4d* Bn = &B_[3 * n];
  const auto Bab = [&](int x, int y) -> const Vec4d& { return Bn[x + y]; };
  Vec4d out = Vec4d::Zero();
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) out += c(x, a) * c(y, b) * Bab(x, y);
  return out;
}

void SampledImmersion::shape(double degeneracy) {
  const int n = size();
  g_.resize(n);
  ginv_.resize(n);
  e1_.resize(n);
  e2_.resize(n);
  n1_.resize(n);
  n2_.resize(n);
  B_.resize(3 * n);
  H_.resize(n);
  h_.resize(8 * n);
  std::vector<Eigen::Vector2d> sigma(n);
  for (int i = 0; i < grid_.nu; ++i) {
    for (int j = 0; j < grid_.nv; ++j) {
      const int k = grid_.index(i, j);
      const Vec4d& a = Xu_[k];
      const Vec4d& b = Xv_[k];
      Eigen::Matrix2d g;
      g << a.dot(a), a.dot(b), a.dot(b), b.dot(b);
      const double det = g.determinant();
      if (!(det >= degeneracy)) throw DegenerateMetric(i, j, det);
      g_[k] = g;
      ginv_[k] = g.inverse();

      e1_[k] = a.normalized();
      e2_[k] = (b - b.dot(e1_[k]) * e1_[k]).normalized();
      Vec4d f1 = apply_J(e1_[k]);
      f1 -= f1.dot(e1_[k]) * e1_[k] + f1.dot(e2_[k]) * e2_[k];
      f1.normalize();
      Vec4d f2 = apply_J(e2_[k]);
      f2 -= f2.dot(e1_[k]) * e1_[k] + f2.dot(e2_[k]) * e2_[k] + f2.dot(f1) * f1;
      f2.normalize();
      n1_[k] = f1;
      n2_[k] = f2;

      B_[3 * k + 0] = normal_part(k, Xuu_[k]);
      B_[3 * k + 1] = normal_part(k, Xuv_[k]);
      B_[3 * k + 2] = normal_part(k, Xvv_[k]);
      const Eigen::Matrix2d& gi = ginv_[k];
      H_[k] = gi(0, 0) * B_[3 * k] + 2.0 * gi(0, 1) * B_[3 * k + 1] + gi(1, 1) * B_[3 * k + 2];

      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          const Vec4d Bxy = B_frame(k, x, y);
          for (int jj = 0; jj < 2; ++jj) h_[8 * k + 4 * jj + 2 * x + y] = Bxy.dot(apply_J(e(k, jj)));
        }
      }
      sigma[k] = Eigen::Vector2d(omega(H_[k], a), omega(H_[k], b));
    }
  }
  sigma_ = OneFormField::with_derivative(grid_, std::move(sigma));
}

double SampledImmersion::lagrangian_defect(int margin) const {
  double worst = 0.0;
  for (int i = 0; i < grid_.nu; ++i) {
    if (!grid_.periodic_u && (i < margin || i >= grid_.nu - margin)) continue;
    for (int j = 0; j < grid_.nv; ++j) {
      if (!grid_.periodic_v && (j < margin || j >= grid_.nv - margin)) continue;
      const int k = grid_.index(i, j);
      worst = std::max(worst, std::abs(omega(Xu_[k], Xv_[k])) / (Xu_[k].norm() * Xv_[k].norm()));
    }
  }
  return worst;
}

double SampledImmersion::area() const {
  std::vector<double> da(size());
  for (int k = 0; k < size(); ++k) {
    const Vec4d& a = Xu_[k];
    const Vec4d& b = Xv_[k];
    da[k] = std::sqrt(std::max(0.0, a.dot(a) * b.dot(b) - a.dot(b) * a.dot(b)));
  }
  return integrate(grid_, da);
}

namespace {

template <typename T>
void check_support(const GridSpec& g, const std::vector<T>& f, int band, double tol, const char* what) {
  auto mag = [](const T& v) {
    if constexpr (std::is_same_v<T, double>) {
      return std::abs(v);
    } else {
      return v.norm();
    }
  };
  for (int i = 0; i < g.nu; ++i) {
    for (int j = 0; j < g.nv; ++j) {
      const bool edge = (!g.periodic_u && (i < band || i >= g.nu - band)) ||
                        (!g.periodic_v && (j < band || j >= g.nv - band));
      if (edge && mag(f[g.index(i, j)]) > tol) {
        std::ostringstream msg;
        msg << what << " is not compactly supported: value " << mag(f[g.index(i, j)]) << " at node (" << i << ", "
            << j << ")";
        throw SupportError(msg.str());
      }
    }
  }
}

}  // namespace

double straight_line_second_variation(const SampledImmersion& imm, const std::vector<Vec4d>& X, int band,
                                      double support_tol) {
  if (!imm.has_shape()) throw std::logic_error("shape() must run before evaluating the second variation");
  const GridSpec& g = imm.grid();
  check_support(g, X, band, support_tol, "variation field");
  const std::vector<Vec4d> Xu = field_diff_u(g, X);
  const std::vector<Vec4d> Xv = field_diff_v(g, X);
  std::vector<double> integrand(g.size());
  for (int k = 0; k < g.size(); ++k) {
    const Eigen::Matrix2d& G = imm.metric_inverse(k);
    const Vec4d* D[2] = {&Xu[k], &Xv[k]};
    const Vec4d* L[2] = {&imm.Xu(k), &imm.Xv(k)};
    Eigen::Matrix2d P;
    Eigen::Matrix2d Nn;
    Vec4d perp[2];
    for (int a = 0; a < 2; ++a) perp[a] = *D[a] - imm.tangent_part(k, *D[a]);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        P(a, b) = D[a]->dot(*L[b]);
        Nn(a, b) = perp[a].dot(perp[b]);
      }
    }
    const Eigen::Matrix2d GP = G * P;
    const double val = (G.cwiseProduct(Nn)).sum() - (GP * GP).trace() + GP.trace() * GP.trace();
    integrand[k] = val * imm.area_element(k);
  }
  return integrate(g, integrand);
}

double oh_second_variation(const SampledImmersion& imm, const std::vector<double>& f, int band, double support_tol,
                           double lagrangian_tol) {
  if (!imm.has_shape()) throw std::logic_error("shape() must run before evaluating the second variation");
  const GridSpec& g = imm.grid();
  const double defect = imm.lagrangian_defect();
  if (defect > lagrangian_tol) {
    std::ostringstream msg;
    msg << "immersion is not Lagrangian: max |omega(e1,e2)| = " << defect;
    throw LagrangianError(msg.str());
  }
  check_support(g, f, band, support_tol, "hamiltonian potential");
  const std::vector<double> fu = field_diff_u(g, f);
  const std::vector<double> fv = field_diff_v(g, f);
  // W = J X = -grad f, tangent.
  std::vector<Vec4d> W(g.size());
  for (int k = 0; k < g.size(); ++k) {
    const Eigen::Vector2d up = imm.metric_inverse(k) * Eigen::Vector2d(fu[k], fv[k]);
    W[k] = -(up[0] * imm.Xu(k) + up[1] * imm.Xv(k));
  }
  const std::vector<Vec4d> Wu = field_diff_u(g, W);
  const std::vector<Vec4d> Wv = field_diff_v(g, W);
  std::vector<double> integrand(g.size());
  for (int k = 0; k < g.size(); ++k) {
    const Eigen::Matrix2d& G = imm.metric_inverse(k);
    const Vec4d X = -apply_J(W[k]);  // J grad f
    const Vec4d T[2] = {imm.tangent_part(k, Wu[k]), imm.tangent_part(k, Wv[k])};
    Eigen::Matrix2d TT, M;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        TT(a, b) = T[a].dot(T[b]);
        M(a, b) = X.dot(imm.B(k, a + b));
      }
    const double grad_term = G.cwiseProduct(TT).sum();
    const double xh = X.dot(imm.H(k));
    const Eigen::Matrix2d GM = G * M;
    const double bb = (GM * GM).trace();
    const Vec4d JH = apply_J(imm.H(k));
    const Eigen::Vector2d Ua = G * Eigen::Vector2d(JH.dot(imm.Xu(k)), JH.dot(imm.Xv(k)));
    const Eigen::Vector2d Wa = G * Eigen::Vector2d(W[k].dot(imm.Xu(k)), W[k].dot(imm.Xv(k)));
    double cross = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) cross += Ua[a] * Wa[b] * M(a, b);
    integrand[k] = (grad_term + xh * xh - bb - cross) * imm.area_element(k);
  }
  return integrate(g, integrand);
}

double displaced_area(const GridSpec& grid, const std::vector<Vec4d>& points, const std::vector<Vec4d>& X, double t) {
  std::vector<Vec4d> moved(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) moved[k] = points[k] + t * X[k];
  const std::vector<Vec4d> a = field_diff_u(grid, moved);
  const std::vector<Vec4d> b = field_diff_v(grid, moved);
  std::vector<double> da(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    da[k] = std::sqrt(std::max(0.0, a[k].dot(a[k]) * b[k].dot(b[k]) - a[k].dot(b[k]) * a[k].dot(b[k])));
  }
  return integrate(grid, da);
}

}  // namespace lagstat
