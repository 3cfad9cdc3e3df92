#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "lagstat/ambient.hpp"
#include "lagstat/immersion.hpp"

// Points of R^5 are (x1, y1, x2, y2, phi); alpha = dphi - sum (x_j dy_j - y_j dx_j).
namespace lagstat {

/// Heisenberg-type polar data of a point: t + i theta = log(s + i phi).
struct HeisenbergPoint {
  double s = 0.0;        // (|x|^2 + |y|^2) / 2
  double s_tilde = 0.0;  // sqrt(s^2 + phi^2)
  double t = 0.0;        // log s_tilde
  double theta = 0.0;    // atan(phi / s), in [-pi/2, pi/2]
  double r0 = 0.0;       // sqrt 2 (s^2 + phi^2)^(1/4), so s_tilde = r0^2 / 2

  static HeisenbergPoint at(const Vec4d& xy, double phi);
};

class NonDifferentiable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// h(x, y, phi) with an optional analytic gradient; otherwise the gradient is finite-differenced.
struct Hamiltonian {
  std::function<double(const Vec5d&)> value;
  std::function<Vec5d(const Vec5d&)> gradient;
};

/// Gradient of h, analytic if supplied. The difference fallback compares forward and backward
/// quotients and throws NonDifferentiable where they disagree (kinks) or where h is not finite.
Vec5d hamiltonian_gradient(const Hamiltonian& h, const Vec5d& p, double step = 1e-5);

/// alpha_p(v).
double contact_form(const Vec5d& p, const Vec5d& v);

/// X_h = h_x d_y - h_y d_x - h_phi (x d_x + y d_y) + (-2h + x h_x + y h_y) d_phi.
Vec5d contact_field(const Hamiltonian& h, const Vec5d& p);

struct LieCheck {
  double rate = 0.0;  // max |d/dT (F_T^* alpha)(v) - (-2 h_phi)(F_T^* alpha)(v)| at T = 0, relative
  double flow = 0.0;  // max |(F_T^* alpha)(v) - exp(-2 int h_phi) alpha(v)| at the end time, relative
  int steps = 0;
  double T = 0.0;
};

/// RK4 flow of X_h together with its linearization (difference Jacobian of X_h) applied to the test vectors.
LieCheck lie_check(const Hamiltonian& h, const Vec5d& p, const std::vector<Vec5d>& vectors, double T = 0.1,
                   int steps = 200);

/// Sampled surface in R^4 with the phi coordinate of its lift.
struct LegendrianLift {
  GridSpec grid;
  std::vector<Vec4d> points;
  std::vector<double> phi;
};

/// phi = x . grad u - 2u lifts the graph y = grad u; here u = u(x1, x2) is given with its gradient.
LegendrianLift graph_lift(const GridSpec& grid, const std::function<double(double, double)>& u,
                          const std::function<Eigen::Vector2d(double, double)>& grad_u);

/// The (p, q)-cone family over a closed (r, s) patch, phi = 0.
LegendrianLift cone_lift(int p, int q, const GridSpec& grid);

/// Residuals are pointwise relative to 2 / s_tilde, the common size of the terms, so they do not change under
/// dilation of the surface.
struct TangentialReport {
  double norm_identity = 0.0;  // | |grad t|^2 + |grad theta|^2 - 2 cos theta / s_tilde |
  double div_theta = 0.0;      // | div0 X_theta + 2 |grad theta|^2 |
  double div_t = 0.0;          // | div0 X_t + 2 sin theta / s_tilde + 2 grad theta . grad t |
  double div_s = 0.0;          // | div0 X_s |, which vanishes for any Lagrangian surface
  double legendrian = 0.0;     // max |dphi - eta| along the lift
  double min_s = 0.0;
  double scale = 0.0;          // max 2 / s_tilde, the size of the terms
  int nodes = 0;

  double worst() const;
};

/// Difference evaluation of the tangential identities at nodes `margin` away from closed edges.
/// Throws SupportError if the surface comes within `s_floor` of s = 0, std::runtime_error if the lift
/// fails dphi = eta by more than `legendrian_tol`.
TangentialReport tangential_identities(const LegendrianLift& lift, int margin = 1, double legendrian_tol = 1e-4,
                                       double s_floor = 1e-10);

/// Dilation x -> k x, phi -> k^2 phi.
LegendrianLift scaled(const LegendrianLift& lift, double k);

}  // namespace lagstat
