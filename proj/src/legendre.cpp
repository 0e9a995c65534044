#include "trapcool/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trapcool/errors.hpp"

namespace trapcool {

LegendrePair legendre_pair(int n, double t) {
  if (n < 0) throw RangeError("Legendre order must be non-negative");
  if (n == 0) return {1.0, 0.0};
  double p_prev = 1.0;  // L_{k-1}
  double p = t;         // L_k
  double dp_prev = 0.0;
  double dp = 1.0;
  for (int k = 1; k < n; ++k) {
    const double p_next = ((2.0 * k + 1.0) * t * p - k * p_prev) / (k + 1.0);
    // L'_{k+1} = L'_{k-1} + (2k+1) L_k
    const double dp_next = dp_prev + (2.0 * k + 1.0) * p;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  return {p, dp};
}

std::vector<double> lgl_nodes(int n) {
  if (n < 2) throw RangeError("LGL grid order must be >= 2");
  std::vector<double> nodes(static_cast<std::size_t>(n) + 1);
  nodes.front() = -1.0;
  nodes.back() = 1.0;
  const double nn1 = n * (n + 1.0);

  // Roots of L_N' are symmetric; solve the negative half and mirror.
  for (int i = 1; i <= n / 2; ++i) {
    // Brackets from the neighbouring Chebyshev-Gauss-Lobatto points.
    double lo = -std::cos(std::numbers::pi * (i - 0.5) / n);
    double hi = -std::cos(std::numbers::pi * (i + 0.5) / n);
    if (2 * i == n) hi = 0.0;
    double x = -std::cos(std::numbers::pi * i / n);
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      const LegendrePair lp = legendre_pair(n, x);
      // Legendre ODE: (1 - x^2) L'' = 2x L' - N(N+1) L
      const double d2 = (2.0 * x * lp.derivative - nn1 * lp.value) /
                        (1.0 - x * x);
      double step = lp.derivative / d2;
      double next = x - step;
      if (!(next > lo && next < hi)) {
        // Keep the sign-bracket tight and bisect.
        const double f_lo = legendre_pair(n, lo).derivative;
        if ((f_lo < 0.0) == (lp.derivative < 0.0)) {
          lo = x;
        } else {
          hi = x;
        }
        next = 0.5 * (lo + hi);
        step = x - next;
      }
      x = next;
      if (std::abs(step) < 1e-16 ||
          std::abs(legendre_pair(n, x).derivative) < 1e-14 * nn1) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NumericError("LGL node polishing did not converge");
    }
    nodes[i] = x;
    nodes[n - i] = -x;
  }
  if (n % 2 == 0) nodes[n / 2] = 0.0;
  return nodes;
}

Eigen::MatrixXd differentiation_matrix(std::span<const double> nodes) {
  const int n = static_cast<int>(nodes.size()) - 1;
  std::vector<double> ln(nodes.size());
  for (int k = 0; k <= n; ++k) ln[k] = legendre_pair(n, nodes[k]).value;

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    for (int k = 0; k <= n; ++k) {
      if (i != k) d(i, k) = ln[i] / (ln[k] * (nodes[i] - nodes[k]));
    }
  }
  d(0, 0) = -n * (n + 1.0) / 4.0;
  d(n, n) = n * (n + 1.0) / 4.0;
  return d;
}

LGLGrid LGLGrid::make(int n) {
  LGLGrid grid;
  grid.order = n;
  grid.nodes = lgl_nodes(n);
  grid.legendre_at_nodes.resize(grid.nodes.size());
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
    grid.legendre_at_nodes[k] = legendre_pair(n, grid.nodes[k]).value;
  }
  grid.D = differentiation_matrix(grid.nodes);
  return grid;
}

double interpolate(const LGLGrid& grid, std::span<const double> values,
                   double t) {
  const int n = grid.order;
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
    if (t == grid.nodes[k]) return values[k];
  }
  // The closed-form prefactor (t^2-1) L_N'(t) / (N(N+1)) equals
  // 1 / sum_k 1/(L_N(t_k)(t - t_k)); dividing by that sum instead keeps the
  // cancellation near a node from leaking into the result.
  (void)n;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
    const double c = 1.0 / (grid.legendre_at_nodes[k] * (t - grid.nodes[k]));
    num += c * values[k];
    den += c;
  }
  return num / den;
}

double barycentric_interpolate(std::span<const double> nodes,
                               std::span<const double> values, double t) {
  const std::size_t m = nodes.size();
  std::vector<double> w(m, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      if (k != j) w[j] /= (nodes[j] - nodes[k]);
    }
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (t == nodes[j]) return values[j];
    const double c = w[j] / (t - nodes[j]);
    num += c * values[j];
    den += c;
  }
  return num / den;
}

RungeRow runge_demo(int n) {
  if (n < 4) throw RangeError("runge_demo requires N >= 4");
  auto f = [](double x) { return 1.0 / (16.0 * x * x + 1.0); };

  std::vector<double> uniform(static_cast<std::size_t>(n) + 1);
  std::vector<double> f_uniform(uniform.size());
  for (int i = 0; i <= n; ++i) {
    uniform[i] = -1.0 + 2.0 * i / n;
    f_uniform[i] = f(uniform[i]);
  }
  const LGLGrid grid = LGLGrid::make(n);
  std::vector<double> f_lgl(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) f_lgl[i] = f(grid.nodes[i]);

  RungeRow row{n, 0.0, 0.0};
  constexpr int kProbe = 2001;
  for (int p = 0; p < kProbe; ++p) {
    const double x = -1.0 + 2.0 * p / (kProbe - 1);
    row.max_error_uniform =
        std::max(row.max_error_uniform,
                 std::abs(barycentric_interpolate(uniform, f_uniform, x) - f(x)));
    row.max_error_lgl = std::max(row.max_error_lgl,
                                 std::abs(interpolate(grid, f_lgl, x) - f(x)));
  }
  return row;
}

}  // namespace trapcool
