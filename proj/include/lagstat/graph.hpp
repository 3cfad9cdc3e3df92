#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "lagstat/immersion.hpp"

namespace lagstat {

/// Cell-centred grid over the rectangle [x0, x0 + m1 h] x [y0, y0 + m2 h], with one ghost layer of cells
/// outside it. Node (i, j), 0 <= i <= m1 + 1, sits at x0 + (i - 1/2) h. The two outermost node layers
/// (the ghosts and the first ring of cells) form the fixed band.
struct GraphGrid {
  int m1 = 16, m2 = 16;
  double h = 1.0 / 16.0;
  double x0 = 0.0, y0 = 0.0;

  static GraphGrid square(int m, double lo = -0.5, double hi = 0.5);
  int n1() const { return m1 + 2; }
  int n2() const { return m2 + 2; }
  int size() const { return n1() * n2(); }
  int index(int i, int j) const { return i * n2() + j; }
  double x(int i) const { return x0 + (i - 0.5) * h; }
  double y(int j) const { return y0 + (j - 0.5) * h; }
  bool fixed(int i, int j) const { return i < 2 || j < 2 || i > m1 - 1 || j > m2 - 1; }
  double area() const { return m1 * m2 * h * h; }
  GraphGrid halved() const;
};

/// Potential u on the grid; the Lagrangian graph is y = grad u.
struct GraphField {
  GraphGrid grid;
  Eigen::VectorXd u;

  static GraphField sample(const GraphGrid& g, const std::function<double(double, double)>& f);
};

struct Hessian2 {
  double u11 = 0.0, u12 = 0.0, u22 = 0.0;
};
/// Compact central differences at node (i, j), 1 <= i <= m1, 1 <= j <= m2.
Hessian2 discrete_hessian(const GraphField& f, int i, int j);

/// Sum over the cells of Omega of h^2 sqrt det(I + (D^2 u)^2).
double area(const GraphField& f);
/// area - |Omega|, summed without cancellation.
double area_excess(const GraphField& f);
/// Exact gradient of `area` with respect to every node value; zero on the fixed band.
Eigen::VectorXd area_gradient(const GraphField& f);

/// Exact Hessian of `area` on all nodes (band rows included).
Eigen::SparseMatrix<double> area_hessian(const GraphField& f);

/// Hessian of the quadratic part h^2/2 sum |D^2 u|^2, i.e. of `area` at u = 0, on all nodes.
Eigen::SparseMatrix<double> quadratic_operator(const GraphGrid& g);

/// Minimizer of the quadratic part with the band of `band` fixed: the discrete biharmonic extension.
GraphField biharmonic_extension(const GraphField& band);

struct MinimizerConfig {
  double tol = 1e-10;  // on max |gradient| / h^2
  int max_iterations = 200;
  double armijo = 1e-4;
  double min_step = 1e-20;
};

struct MinimizerState {
  GraphField field;
  double area = 0.0;
  double excess = 0.0;
  double gradient_norm = 0.0;       // max |gradient| / h^2 over free nodes
  double gradient_floor = 0.0;      // rounding level of gradient_norm; tol below it is raised to it
  std::vector<double> excess_history;  // one entry per accepted iterate, starting with u0
  int iterations = 0;
  bool converged = false;
  bool stalled = false;  // a descent step failed to lower the area; converged if within 8x the floor
};

class LineSearchFailure : public std::runtime_error {
 public:
  LineSearchFailure(const std::string& what, MinimizerState state)
      : std::runtime_error(what), state(std::move(state)) {}
  MinimizerState state;
};

/// Damped Newton with backtracking: each accepted step satisfies the sufficient-decrease condition, so the
/// area never increases. Where the area Hessian is indefinite it is shifted by multiples of the quadratic
/// operator until it factors.
MinimizerState minimize(const GraphField& u0, const MinimizerConfig& cfg = {});

/// Node field on the grid with a validity margin (nodes closer than `margin` to the outer layer are unset).
struct NodeField {
  GraphGrid grid;
  Eigen::VectorXd value;
  int margin = 0;
  double max_abs(int extra_margin = 0) const;
};

struct ELResidual {
  NodeField printed;      // sum_k D_k (Delta_mu u_k)
  NodeField variational;  // sum_k D_k (sqrt(mu) Delta_mu u_k), the first variation of the area
  double printed_max = 0.0, variational_max = 0.0;
};
/// Both forms of the fourth-order operator in divergence form with central differences.
/// Needs m1, m2 >= 8. Throws DegenerateMetric if the induced metric degenerates.
ELResidual el_residual(const GraphField& f, int extra_margin = 0);

struct AngleField {
  NodeField beta;       // arctan(l1) + arctan(l2)
  NodeField laplacian;  // Delta_mu beta
  double laplacian_max = 0.0;
};
AngleField lagrangian_angle_field(const GraphField& f, int extra_margin = 0);

/// Sampled immersion x -> (x1, u_1, x2, u_2) over the Omega cells, with grad u by central differences.
SampledImmersion graph_immersion(const GraphField& f);

struct AngleConsistency {
  double sigma_plus_dbeta = 0.0;  // max |sigma_H + d beta| over interior nodes
  double d_sigma = 0.0;           // max |d sigma_H|
  double lagrangian = 0.0;        // max |omega(e1, e2)|
};
/// sigma_H of graph_immersion against d beta (sigma_H = -d beta in these conventions).
AngleConsistency angle_consistency(const GraphField& f, int margin = 3);

}  // namespace lagstat
