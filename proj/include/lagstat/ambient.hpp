#pragma once

#include <complex>
#include <variant>

#include <Eigen/Dense>

// Flat C^2 = R^4 with coordinates ordered (x1, y1, x2, y2), z_j = x_j + i y_j.
//   omega = dx1^dy1 + dx2^dy2,  J(d/dx_j) = d/dy_j,  g = Euclidean,
//   eta   = sum_j (x_j dy_j - y_j dx_j)  (so d eta = 2 omega),
//   contact form on R^5 = R^4 x R_phi:  alpha = dphi - eta.
namespace lagstat {

template <typename Scalar>
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
template <typename Scalar>
using Vec5 = Eigen::Matrix<Scalar, 5, 1>;
template <typename Scalar>
using Mat4 = Eigen::Matrix<Scalar, 4, 4>;

using Vec4d = Vec4<double>;
using Vec5d = Vec5<double>;
using Mat4d = Mat4<double>;
using Complex = std::complex<double>;

template <typename Scalar = double>
Mat4<Scalar> omega_matrix() {
  Mat4<Scalar> m = Mat4<Scalar>::Zero();
  m(0, 1) = 1;
  m(1, 0) = -1;
  m(2, 3) = 1;
  m(3, 2) = -1;
  return m;
}

template <typename Scalar = double>
Mat4<Scalar> complex_structure() {
  Mat4<Scalar> m = Mat4<Scalar>::Zero();
  m(1, 0) = 1;
  m(0, 1) = -1;
  m(3, 2) = 1;
  m(2, 3) = -1;
  return m;
}

template <typename D1, typename D2>
typename D1::Scalar omega(const Eigen::MatrixBase<D1>& v, const Eigen::MatrixBase<D2>& w) {
  return v[0] * w[1] - v[1] * w[0] + v[2] * w[3] - v[3] * w[2];
}

template <typename D1, typename D2>
typename D1::Scalar metric(const Eigen::MatrixBase<D1>& v, const Eigen::MatrixBase<D2>& w) {
  return v.dot(w);
}

template <typename Derived>
Vec4<typename Derived::Scalar> apply_J(const Eigen::MatrixBase<Derived>& v) {
  return Vec4<typename Derived::Scalar>(-v[1], v[0], -v[3], v[2]);
}

/// The primitive eta evaluated at `point` on the tangent vector `v`.
template <typename D1, typename D2>
typename D1::Scalar eta(const Eigen::MatrixBase<D1>& point, const Eigen::MatrixBase<D2>& v) {
  return omega(point, v);
}

/// Coefficients of eta: eta_p(v) = p^T E v.
template <typename Scalar = double>
Mat4<Scalar> eta_matrix() {
  return omega_matrix<Scalar>();
}

enum class Pairing { omega, metric, j_apply };

template <typename Scalar>
using PairResult = std::variant<Scalar, Vec4<Scalar>>;

template <typename Scalar>
PairResult<Scalar> pair(const Vec4<Scalar>& v, const Vec4<Scalar>& w, Pairing which) {
  switch (which) {
    case Pairing::omega:
      return omega(v, w);
    case Pairing::metric:
      return metric(v, w);
    case Pairing::j_apply:
      break;
  }
  return apply_J(v);
}

inline Vec4d from_complex(Complex z1, Complex z2) {
  return {z1.real(), z1.imag(), z2.real(), z2.imag()};
}
inline Complex z1_of(const Vec4d& v) { return {v[0], v[1]}; }
inline Complex z2_of(const Vec4d& v) { return {v[2], v[3]}; }

/// Complex determinant of the 2x2 matrix with columns a, b.
inline Complex complex_det(const Vec4d& a, const Vec4d& b) {
  return z1_of(a) * z2_of(b) - z2_of(a) * z1_of(b);
}

/// Hermitian product sum_j conj(a_j) b_j; its real part is g, its imaginary part omega.
inline Complex hermitian(const Vec4d& a, const Vec4d& b) {
  return std::conj(z1_of(a)) * z1_of(b) + std::conj(z2_of(a)) * z2_of(b);
}

/// Real 4x4 form of the unitary map (z1, z2) -> U (z1, z2).
inline Mat4d realify(const Eigen::Matrix2cd& u) {
  Mat4d m;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const Complex a = u(r, c);
      m(2 * r, 2 * c) = a.real();
      m(2 * r, 2 * c + 1) = -a.imag();
      m(2 * r + 1, 2 * c) = a.imag();
      m(2 * r + 1, 2 * c + 1) = a.real();
    }
  }
  return m;
}

}  // namespace lagstat
