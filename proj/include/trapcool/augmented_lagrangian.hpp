#pragma once

// Dense augmented-Lagrangian solver for small smooth NLPs:
//
//   minimise f(x)  subject to  c(x) = 0,  g(x) <= 0,  lower <= x <= upper.
//
// Outer loop: Powell-Hestenes-Rockafellar multiplier updates with penalty
// growth on stalled feasibility. Inner loop: projected Newton on the
// augmented Lagrangian when the NLP supplies second derivatives, otherwise
// limited-memory BFGS on the free variables; both project onto the box.

#include <Eigen/Dense>

#include <functional>

namespace trapcool::optim {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Nlp {
  Vec lower;
  Vec upper;
  /// Returns f(x) and writes its gradient.
  std::function<double(const Vec& x, Vec& grad)> objective;
  int num_equalities = 0;
  /// Writes c(x) and, if jac is non-null, its Jacobian.
  std::function<void(const Vec& x, Vec& c, Mat* jac)> equalities;
  int num_inequalities = 0;
  /// Writes g(x) (feasible when g <= 0) and optionally its Jacobian.
  std::function<void(const Vec& x, Vec& g, Mat* jac)> inequalities;
  /// Optional. Writes hess(f) + sum_j w_eq[j] hess(c_j) + sum_j w_in[j]
  /// hess(g_j).
  std::function<void(const Vec& x, const Vec& w_eq, const Vec& w_in, Mat& h)>
      lagrangian_hessian;

  int num_variables() const { return static_cast<int>(lower.size()); }
};

struct SolverOptions {
  int max_outer = 80;
  int max_inner = 3000;
  double feasibility_tol = 1e-9;
  double stationarity_tol = 1e-6;
  double initial_penalty = 10.0;
  double max_penalty = 1e12;
  int lbfgs_memory = 12;
};

struct SolverResult {
  Vec x;
  double objective = 0.0;
  double max_violation = 0.0;  ///< max |c_i|, max(g_j, 0)
  double stationarity = 0.0;   ///< projected gradient of the Lagrangian, inf-norm
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
  Vec equality_multipliers;
  Vec inequality_multipliers;
};

/// Seam for alternative NLP engines.
class NlpSolver {
 public:
  virtual ~NlpSolver() = default;
  virtual SolverResult solve(const Nlp& nlp, const Vec& x0) const = 0;
};

class AugmentedLagrangianSolver final : public NlpSolver {
 public:
  explicit AugmentedLagrangianSolver(SolverOptions options = {})
      : options_(options) {}

  SolverResult solve(const Nlp& nlp, const Vec& x0) const override;
  const SolverOptions& options() const { return options_; }

 private:
  SolverOptions options_;
};

struct BoxMinimizerResult {
  Vec x;
  double value = 0.0;
  double projected_gradient = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(const Vec&, Vec&)>;
using Hessian = std::function<void(const Vec&, Mat&)>;

/// Projected L-BFGS on lower <= x <= upper.
BoxMinimizerResult minimize_box(const Objective& f, const Vec& lower,
                                const Vec& upper, Vec x0, double tol,
                                int max_iterations, int memory);

/// Projected Newton (two-metric projection) on lower <= x <= upper. The
/// reduced Hessian is shifted towards the identity until it factors.
BoxMinimizerResult minimize_box_newton(const Objective& f, const Hessian& h,
                                       const Vec& lower, const Vec& upper,
                                       Vec x0, double tol, int max_iterations);

}  // namespace trapcool::optim
