#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lagstat {

/// Value with first and second derivative.
struct Jet3 {
  double v = 0.0, d = 0.0, dd = 0.0;
};

/// Quintic Hermite interpolation on a uniform grid from samples of f, f', f''.
class HermiteTable {
 public:
  HermiteTable() = default;
  HermiteTable(double x0, double h, std::vector<Jet3> samples) : x0_(x0), h_(h), s_(std::move(samples)) {
    if (s_.size() < 2 || !(h_ > 0.0)) throw std::invalid_argument("Hermite table needs two samples and h > 0");
  }

  double x0() const { return x0_; }
  double x1() const { return x0_ + h_ * (s_.size() - 1); }
  double h() const { return h_; }
  const std::vector<Jet3>& samples() const { return s_; }

  /// Clamps to the end samples outside the table (callers handle the constant regimes).
  Jet3 operator()(double x) const {
    const double u = (x - x0_) / h_;
    const int last = static_cast<int>(s_.size()) - 2;
    int i = static_cast<int>(std::floor(u));
    if (i < 0) i = 0;
    if (i > last) i = last;
    const double s = std::min(1.0, std::max(0.0, u - i));
    const Jet3 &a = s_[i], &b = s_[i + 1];
    const double c0 = a.v, c1 = h_ * a.d, c2 = 0.5 * h_ * h_ * a.dd;
    const double F = b.v - (c0 + c1 + c2), D = h_ * b.d - (c1 + 2.0 * c2), E = h_ * h_ * b.dd - 2.0 * c2;
    const double c3 = 10.0 * F - 4.0 * D + 0.5 * E;
    const double c4 = -15.0 * F + 7.0 * D - E;
    const double c5 = 6.0 * F - 3.0 * D + 0.5 * E;
    Jet3 out;
    out.v = c0 + s * (c1 + s * (c2 + s * (c3 + s * (c4 + s * c5))));
    out.d = (c1 + s * (2.0 * c2 + s * (3.0 * c3 + s * (4.0 * c4 + s * 5.0 * c5)))) / h_;
    out.dd = (2.0 * c2 + s * (6.0 * c3 + s * (12.0 * c4 + s * 20.0 * c5))) / (h_ * h_);
    return out;
  }

 private:
  double x0_ = 0.0, h_ = 1.0;
  std::vector<Jet3> s_;
};

/// Four-point Lagrange weights at fractional offset s in [0, 1] between nodes 1 and 2 of (0, 1, 2, 3).
inline void cubic_weights(double s, double w[4]) {
  w[0] = -s * (s - 1.0) * (s - 2.0) / 6.0;
  w[1] = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
  w[2] = -(s + 1.0) * s * (s - 2.0) / 2.0;
  w[3] = (s + 1.0) * s * (s - 1.0) / 6.0;
}

}  // namespace lagstat
