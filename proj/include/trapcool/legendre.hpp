#pragma once

// Legendre-Gauss-Lobatto grids, the LGL differentiation matrix and Lagrange
// interpolation on LGL nodes.

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace trapcool {

struct LegendrePair {
  double value;       ///< L_N(t)
  double derivative;  ///< L_N'(t)
};

/// L_N(t) and L_N'(t) by the Bonnet recurrence.
LegendrePair legendre_pair(int n, double t);

/// Endpoints plus the roots of L_N', sorted ascending. Throws RangeError for
/// N < 2, NumericError if Newton polishing fails to converge.
std::vector<double> lgl_nodes(int n);

/// D_ik = L_N(t_i) / (L_N(t_k) (t_i - t_k)) off the diagonal, -N(N+1)/4 and
/// +N(N+1)/4 in the corners, zero elsewhere on the diagonal.
Eigen::MatrixXd differentiation_matrix(std::span<const double> nodes);

struct LGLGrid {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> legendre_at_nodes;  ///< L_N(t_k)
  Eigen::MatrixXd D;

  static LGLGrid make(int n);
  std::size_t size() const { return nodes.size(); }
};

/// Lagrange interpolant through (grid.nodes, values) at t in [-1, 1], using
/// l_k(t) = (t^2 - 1) L_N'(t) / (N(N+1) L_N(t_k) (t - t_k)).
double interpolate(const LGLGrid& grid, std::span<const double> values,
                   double t);

/// Barycentric Lagrange interpolation on arbitrary distinct nodes.
double barycentric_interpolate(std::span<const double> nodes,
                               std::span<const double> values, double t);

struct RungeRow {
  int n;
  double max_error_uniform;
  double max_error_lgl;
};

/// Max interpolation error of 1/(16x^2 + 1) on a 2001-point probe grid for
/// equispaced and LGL nodes of order N. Throws RangeError for N < 4.
RungeRow runge_demo(int n);

}  // namespace trapcool
