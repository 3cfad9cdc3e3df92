#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lagstat::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
inline Rule gauss_legendre(int n) {
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

/// Composite Gauss-Legendre rule on [a, b] with `panels` equal panels.
inline Rule composite_gauss(double a, double b, int panels, int order) {
  const Rule base = gauss_legendre(order);
  Rule out;
  out.nodes.reserve(panels * order);
  out.weights.reserve(panels * order);
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (int i = 0; i < order; ++i) {
      out.nodes.push_back(mid + 0.5 * width * base.nodes[i]);
      out.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return out;
}

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {
// Gauss-Kronrod 7/15 abscissae and weights.
inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
Estimate gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}
}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) with bisection of the worst interval.
/// Deterministic: the subdivision sequence depends only on f, a, b and the tolerances.
template <class F>
Estimate adaptive(const F& f, double a, double b, double abs_tol = 1e-12, double rel_tol = 1e-12,
                  int max_intervals = 4000) {
  if (a == b) return {};
  struct Piece {
    double a, b;
    Estimate e;
  };
  std::vector<Piece> pieces;
  pieces.push_back({a, b, detail::gk15(f, a, b)});
  while (true) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      total += pieces[i].e.value;
      err += pieces[i].e.error;
      if (pieces[i].e.error > pieces[worst].e.error) worst = i;
    }
    if (err <= std::max(abs_tol, rel_tol * std::abs(total))) return {total, err};
    if (static_cast<int>(pieces.size()) >= max_intervals) {
      throw std::runtime_error("adaptive quadrature did not converge");
    }
    const Piece p = pieces[worst];
    const double m = 0.5 * (p.a + p.b);
    pieces[worst] = {p.a, m, detail::gk15(f, p.a, m)};
    pieces.push_back({m, p.b, detail::gk15(f, m, p.b)});
  }
}

/// Vector-valued adaptive Gauss-Kronrod (7/15): f returns Eigen::Array<double, N, 1>. Converged when every
/// component's error is below max(abs_tol, rel_tol * |value|).
template <int N, class F>
Eigen::Array<double, N, 1> adaptive_vec(const F& f, double a, double b, double abs_tol, double rel_tol,
                                        int max_intervals = 2000, Eigen::Array<double, N, 1>* error = nullptr) {
  using V = Eigen::Array<double, N, 1>;
  struct Piece {
    double a, b;
    V value, error;
  };
  auto gk = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const V fc = f(c);
    V kron = fc * detail::kWgk[7], gauss = fc * detail::kWg[3];
    for (int j = 0; j < 7; ++j) {
      const double dx = h * detail::kXgk[j];
      const V s = f(c - dx) + f(c + dx);
      kron += detail::kWgk[j] * s;
      if (j % 2 == 1) gauss += detail::kWg[j / 2] * s;
    }
    return Piece{lo, hi, kron * h, ((kron - gauss) * h).abs()};
  };
  if (a == b) {
    if (error) error->setZero();
    return V::Zero();
  }
  std::vector<Piece> pieces{gk(a, b)};
  while (true) {
    V total = V::Zero(), err = V::Zero();
    std::size_t worst = 0;
    double worst_ratio = -1.0;
    for (const Piece& p : pieces) {
      total += p.value;
      err += p.error;
    }
    const V allowed = (rel_tol * total.abs()).max(abs_tol);
    if ((err <= allowed).all()) {
      if (error) *error = err;
      return total;
    }
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const double r = (pieces[i].error / allowed).maxCoeff();
      if (r > worst_ratio) {
        worst_ratio = r;
        worst = i;
      }
    }
    if (static_cast<int>(pieces.size()) >= max_intervals) {
      throw std::runtime_error("adaptive quadrature did not converge");
    }
    const Piece p = pieces[worst];
    const double m = 0.5 * (p.a + p.b);
    pieces[worst] = gk(p.a, m);
    pieces.push_back(gk(m, p.b));
  }
}

/// Composite Simpson weights for n uniformly spaced samples with spacing h.
/// An odd number of intervals closes with a 3/8 panel.
inline Eigen::VectorXd simpson_weights(int n, double h) {
  if (n < 3) throw std::invalid_argument("Simpson rule needs at least 3 samples");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  int intervals = n - 1;
  int simpson_end = (intervals % 2 == 0) ? n - 1 : n - 4;
  for (int i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (intervals % 2 == 1) {
    if (intervals < 3) throw std::invalid_argument("Simpson rule needs at least 3 intervals when odd");
    const int s = n - 4;
    w[s] += 3.0 * h / 8.0;
    w[s + 1] += 9.0 * h / 8.0;
    w[s + 2] += 9.0 * h / 8.0;
    w[s + 3] += 3.0 * h / 8.0;
  }
  return w;
}

/// Periodic trapezoid weights (samples exclude the repeated endpoint).
inline Eigen::VectorXd periodic_weights(int n, double h) { return Eigen::VectorXd::Constant(n, h); }

/// Running integral of uniformly sampled values, fourth-order accurate at every node.
inline std::vector<double> cumulative(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 3) {
    for (std::size_t i = 1; i < n; ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (i % 2 == 0) {
      out[i] = out[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    } else if (i + 1 < n) {
      out[i] = out[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
    } else {
      out[i] = out[i - 1] + h / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
    }
  }
  return out;
}

/// Richardson combination of a coarse and a once-halved result for an error of order h^p.
inline double richardson(double coarse, double fine, int order = 2) {
  const double f = std::pow(2.0, order);
  return (f * fine - coarse) / (f - 1.0);
}

}  // namespace lagstat::quad
