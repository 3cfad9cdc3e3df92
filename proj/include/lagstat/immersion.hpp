#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagstat/ambient.hpp"

namespace lagstat {

/// Uniform parameter grid. A periodic direction stores n samples of one period
/// (the repeated endpoint is dropped).
struct GridSpec {
  int nu = 0, nv = 0;
  double u0 = 0.0, hu = 1.0;
  double v0 = 0.0, hv = 1.0;
  bool periodic_u = false, periodic_v = false;

  static GridSpec closed(int nu, double ua, double ub, int nv, double va, double vb);
  /// u closed on [ua, ub]; v periodic with period `period` starting at va.
  static GridSpec periodic_in_v(int nu, double ua, double ub, int nv, double va, double period);

  double u(int i) const { return u0 + i * hu; }
  double v(int j) const { return v0 + j * hv; }
  int size() const { return nu * nv; }
  int index(int i, int j) const { return i * nv + j; }
  GridSpec halved() const;
};

/// Per-direction stencil; central in the interior (or across a periodic seam),
/// one-sided second order at an edge.
template <typename T>
T diff_u(const GridSpec& g, const std::vector<T>& f, int i, int j) {
  if (g.periodic_u || (i > 0 && i + 1 < g.nu)) {
    const int ip = (i + 1) % g.nu, im = (i - 1 + g.nu) % g.nu;
    return (f[g.index(ip, j)] - f[g.index(im, j)]) / (2.0 * g.hu);
  }
  if (i == 0) return (-3.0 * f[g.index(0, j)] + 4.0 * f[g.index(1, j)] - f[g.index(2, j)]) / (2.0 * g.hu);
  const int n = g.nu - 1;
  return (3.0 * f[g.index(n, j)] - 4.0 * f[g.index(n - 1, j)] + f[g.index(n - 2, j)]) / (2.0 * g.hu);
}

template <typename T>
T diff_v(const GridSpec& g, const std::vector<T>& f, int i, int j) {
  if (g.periodic_v || (j > 0 && j + 1 < g.nv)) {
    const int jp = (j + 1) % g.nv, jm = (j - 1 + g.nv) % g.nv;
    return (f[g.index(i, jp)] - f[g.index(i, jm)]) / (2.0 * g.hv);
  }
  if (j == 0) return (-3.0 * f[g.index(i, 0)] + 4.0 * f[g.index(i, 1)] - f[g.index(i, 2)]) / (2.0 * g.hv);
  const int n = g.nv - 1;
  return (3.0 * f[g.index(i, n)] - 4.0 * f[g.index(i, n - 1)] + f[g.index(i, n - 2)]) / (2.0 * g.hv);
}

template <typename T>
T diff_uu(const GridSpec& g, const std::vector<T>& f, int i, int j) {
  const double h2 = g.hu * g.hu;
  if (g.periodic_u || (i > 0 && i + 1 < g.nu)) {
    const int ip = (i + 1) % g.nu, im = (i - 1 + g.nu) % g.nu;
    return (f[g.index(ip, j)] - 2.0 * f[g.index(i, j)] + f[g.index(im, j)]) / h2;
  }
  const int s = i == 0 ? 1 : -1;
  return (2.0 * f[g.index(i, j)] - 5.0 * f[g.index(i + s, j)] + 4.0 * f[g.index(i + 2 * s, j)] -
          f[g.index(i + 3 * s, j)]) /
         h2;
}

template <typename T>
T diff_vv(const GridSpec& g, const std::vector<T>& f, int i, int j) {
  const double h2 = g.hv * g.hv;
  if (g.periodic_v || (j > 0 && j + 1 < g.nv)) {
    const int jp = (j + 1) % g.nv, jm = (j - 1 + g.nv) % g.nv;
    return (f[g.index(i, jp)] - 2.0 * f[g.index(i, j)] + f[g.index(i, jm)]) / h2;
  }
  const int s = j == 0 ? 1 : -1;
  return (2.0 * f[g.index(i, j)] - 5.0 * f[g.index(i, j + s)] + 4.0 * f[g.index(i, j + 2 * s)] -
          f[g.index(i, j + 3 * s)]) /
         h2;
}

/// Fields of u- and v-derivatives of a gridded field.
template <typename T>
std::vector<T> field_diff_u(const GridSpec& g, const std::vector<T>& f) {
  std::vector<T> out(f.size());
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) out[g.index(i, j)] = diff_u(g, f, i, j);
  return out;
}
template <typename T>
std::vector<T> field_diff_v(const GridSpec& g, const std::vector<T>& f) {
  std::vector<T> out(f.size());
  for (int i = 0; i < g.nu; ++i)
    for (int j = 0; j < g.nv; ++j) out[g.index(i, j)] = diff_v(g, f, i, j);
  return out;
}

/// Quadrature weights on the grid: Simpson (3/8 closing) in closed directions, trapezoid in periodic ones.
std::vector<double> grid_weights(const GridSpec& g);
double integrate(const GridSpec& g, const std::vector<double>& values);

class DegenerateMetric : public std::runtime_error {
 public:
  DegenerateMetric(int i, int j, double det);
  int i, j;
  double det;
};

class SupportError : public std::runtime_error {
 public:
  explicit SupportError(const std::string& what) : std::runtime_error(what) {}
};

/// sigma = sigma_u du + sigma_v dv on the grid, with d sigma = (d_u sigma_v - d_v sigma_u) du^dv.
struct OneFormField {
  std::vector<Eigen::Vector2d> sigma;
  std::vector<double> d;

  static OneFormField with_derivative(const GridSpec& g, std::vector<Eigen::Vector2d> sigma);
  /// max |d sigma| over nodes at least `margin` away from a closed edge.
  double max_d(const GridSpec& g, int margin = 1) const;
};

/// Position and parameter derivatives at one node.
struct NodeJet {
  Vec4d X, Xu, Xv, Xuu, Xuv, Xvv;
};

/// Sampled parametrized surface in R^4. After shape() the caches are filled and read-only.
class SampledImmersion {
 public:
  /// Derivatives by finite differences of the points.
  static SampledImmersion from_points(const GridSpec& grid, std::vector<Vec4d> points);
  /// Analytic derivatives supplied per node.
  static SampledImmersion from_jet(const GridSpec& grid, const std::function<NodeJet(double, double)>& jet);

  const GridSpec& grid() const { return grid_; }
  int size() const { return grid_.size(); }
  const std::vector<Vec4d>& points() const { return X_; }
  const Vec4d& point(int i, int j) const { return X_[grid_.index(i, j)]; }

  /// Populate frames, metric, second fundamental form, H, sigma_H and d sigma_H.
  /// Throws DegenerateMetric at the first node whose metric determinant is below `degeneracy`.
  void shape(double degeneracy = 1e-12);
  bool has_shape() const { return !g_.empty(); }

  // Cached quantities, indexed by node.
  const Vec4d& Xu(int n) const { return Xu_[n]; }
  const Vec4d& Xv(int n) const { return Xv_[n]; }
  const Eigen::Matrix2d& metric(int n) const { return g_[n]; }
  const Eigen::Matrix2d& metric_inverse(int n) const { return ginv_[n]; }
  double area_element(int n) const { return std::sqrt(g_[n].determinant()); }
  /// Orthonormal tangent frame e1, e2 (Gram-Schmidt of Xu, Xv).
  const Vec4d& e(int n, int k) const { return k == 0 ? e1_[n] : e2_[n]; }
  /// Orthonormal normal frame from J e1, J e2.
  const Vec4d& normal(int n, int k) const { return k == 0 ? n1_[n] : n2_[n]; }
  /// Normal parts of the coordinate second derivatives; ab = 0 (uu), 1 (uv), 2 (vv).
  const Vec4d& B(int n, int ab) const { return B_[3 * n + ab]; }
  const Vec4d& H(int n) const { return H_[n]; }
  /// h_{jkl} = <B(e_k, e_l), J e_j>, orthonormal frame.
  double h(int n, int j, int k, int l) const { return h_[8 * n + 4 * j + 2 * k + l]; }
  const OneFormField& sigma_H() const { return sigma_; }
  bool one_sided(int i, int j) const;

  Vec4d normal_part(int n, const Vec4d& v) const;
  Vec4d tangent_part(int n, const Vec4d& v) const;
  /// B on orthonormal frame vectors: B(e_a, e_b).
  Vec4d B_frame(int n, int a, int b) const;

  /// max |omega(e1,e2)| at nodes away from a closed edge.
  double lagrangian_defect(int margin = 0) const;
  double area() const;

 private:
  GridSpec grid_;
  std::vector<Vec4d> X_, Xu_, Xv_, Xuu_, Xuv_, Xvv_;
  std::vector<Eigen::Matrix2d> g_, ginv_;
  std::vector<Vec4d> e1_, e2_, n1_, n2_, B_, H_;
  std::vector<double> h_;
  OneFormField sigma_;
};

/// Second-variation integrand for a straight-line variation of a flat-space immersion:
/// integral of sum |(D_ei X)^perp|^2 - sum <D_ej X, ei><D_ei X, ej> + (div X)^2.
/// X must vanish on the outer `band` layers of every closed edge.
double straight_line_second_variation(const SampledImmersion& imm, const std::vector<Vec4d>& X, int band = 2,
                                      double support_tol = 1e-14);

/// Hamiltonian second variation of the Lagrangian immersion along X = J grad f (flat ambient):
/// |grad JX|^2 + <X,H>^2 - sum <X, B_ij>^2 - <X, B(JH, JX)>.
double oh_second_variation(const SampledImmersion& imm, const std::vector<double>& f, int band = 2,
                           double support_tol = 1e-14, double lagrangian_tol = 1e-6);

/// Discrete area of a displaced immersion, built with finite-difference tangents.
double displaced_area(const GridSpec& grid, const std::vector<Vec4d>& points, const std::vector<Vec4d>& X, double t);

}  // namespace lagstat
