#pragma once

// LGL pseudospectral transcription of the minimum-time expansion problem.
//
// Decision vector z = (t_f, x1_0..x1_N, x2_0..x2_N, u_0..u_N) on the LGL grid
// over tau in [-1, 1]. At every node
//
//   sum_k D_ik x1_k = (t_f/2) x2_i
//   sum_k D_ik x2_k = (t_f/2) (-u_i x1_i + 1/x1_i^3)
//
// with boundary rows pinned through equal bounds, -v1 <= u_i <= v2,
// x1_i >= 1e-2, and optionally |u_{i+1} - u_i| <= M (tau_{i+1} - tau_i).

#include <optional>
#include <string>
#include <vector>

#include "trapcool/augmented_lagrangian.hpp"
#include "trapcool/core_model.hpp"
#include "trapcool/legendre.hpp"
#include "trapcool/schedule.hpp"
#include "trapcool/simulator.hpp"

namespace trapcool {

/// Lower bound on x1 inside the NLP.
inline constexpr double kCollocationX1Floor = 1e-2;

class CollocationProblem {
 public:
  /// Throws RangeError for N < 8 or non-positive M.
  CollocationProblem(const ProblemSpec& spec, int n,
                     std::optional<double> slope_limit);

  const ProblemSpec& spec() const { return spec_; }
  const LGLGrid& grid() const { return grid_; }
  std::optional<double> slope_limit() const { return slope_limit_; }
  int order() const { return grid_.order; }

  int num_variables() const { return 3 * nodes() + 1; }
  int num_dynamics_constraints() const { return 2 * nodes(); }
  /// One two-sided slope constraint per adjacent node pair, 0 if unbounded.
  int num_slope_constraints() const {
    return slope_limit_ ? grid_.order : 0;
  }

  // Layout of z.
  int tf_index() const { return 0; }
  int x1_index(int i) const { return 1 + i; }
  int x2_index(int i) const { return 1 + nodes() + i; }
  int u_index(int i) const { return 1 + 2 * nodes() + i; }

  /// Defects of the dynamics rows, length 2(N+1): x1 rows then x2 rows.
  void dynamics_residuals(const optim::Vec& z, optim::Vec& r,
                          optim::Mat* jac) const;
  /// |u_{i+1} - u_i| - M dtau_i written as 2N one-sided rows (<= 0).
  void slope_residuals(const optim::Vec& z, optim::Vec& g,
                       optim::Mat* jac) const;

  /// sum_j w_j hess(r_j) over the dynamics rows (the slope rows are linear
  /// and the objective is t_f, so nothing else contributes).
  void dynamics_hessian(const optim::Vec& z, const optim::Vec& w,
                        optim::Mat& h) const;

  optim::Vec lower_bounds() const;
  optim::Vec upper_bounds() const;

  /// The generic NLP description consumed by a solver.
  optim::Nlp nlp() const;

 private:
  int nodes() const { return static_cast<int>(grid_.size()); }

  ProblemSpec spec_;
  LGLGrid grid_;
  std::optional<double> slope_limit_;
};

struct CollocationGuess {
  double t_f = 1.0;
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> u;
};

struct CollocationSolution {
  LGLGrid grid;
  std::optional<double> slope_limit;
  double t_f = 0.0;
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> u;
  double objective = 0.0;
  double residual = 0.0;      ///< max dynamics/slope/bound violation
  double stationarity = 0.0;  ///< projected Lagrangian gradient
  int iterations = 0;         ///< inner iterations, summed over seeds tried
  bool converged = false;
  std::string seed;  ///< which initial guess produced this solution

  /// Physical time of node i: (tau_i + 1) t_f / 2.
  double node_time(std::size_t i) const {
    return 0.5 * (grid.nodes[i] + 1.0) * t_f;
  }
  /// Lagrange interpolant of u at physical time t in [0, t_f].
  double control_at(double t) const;
};

/// Plan-seeded guess samples the simulated plan at the mapped nodes and
/// limits the control slope to M; otherwise states and u are linear between
/// the boundary values and t_f comes from asymptotic_min_time.
CollocationGuess initial_guess(const ProblemSpec& spec, int n,
                               const Schedule* plan,
                               std::optional<double> slope_limit = {});

/// Deterministic perturbation of the linear guess, clipped to the bounds.
CollocationGuess perturbed_guess(const ProblemSpec& spec, int n,
                                 std::optional<double> slope_limit,
                                 unsigned seed);

/// Solves from a single guess.
CollocationSolution solve(const CollocationProblem& problem,
                          const CollocationGuess& init,
                          const optim::NlpSolver& solver);

struct CollocationOptions {
  optim::SolverOptions solver;
  unsigned perturbation_seed = 20240611u;
  bool parallel = true;
};

/// Multistart: one seed per feasible bang-bang plan (one-switch, optimal
/// two-switch), the linear guess and a perturbed linear guess. Returns the
/// converged solution with the smallest t_f (or the least infeasible one when
/// none converges).
CollocationSolution solve_multistart(const CollocationProblem& problem,
                                     const CollocationOptions& options = {});

/// Forward-integrates the interpolated control with RK4 over [0, t_f].
Trajectory resimulate(const CollocationSolution& sol, int steps = 20000);

}  // namespace trapcool
