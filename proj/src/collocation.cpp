#include "trapcool/collocation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

#include "trapcool/bangbang.hpp"
#include "trapcool/errors.hpp"

namespace trapcool {

using optim::Mat;
using optim::Vec;

CollocationProblem::CollocationProblem(const ProblemSpec& spec, int n,
                                       std::optional<double> slope_limit)
    : spec_(spec), grid_(), slope_limit_(slope_limit) {
  if (n < 8) throw RangeError("collocation order N must be >= 8");
  if (slope_limit_ && !(*slope_limit_ > 0.0)) {
    throw RangeError("slope limit M must be positive");
  }
  if (slope_limit_ && std::isinf(*slope_limit_)) slope_limit_.reset();
  grid_ = LGLGrid::make(n);
}

void CollocationProblem::dynamics_residuals(const Vec& z, Vec& r,
                                            Mat* jac) const {
  const int m = nodes();
  const double half_tf = 0.5 * z[tf_index()];
  const auto x1 = z.segment(x1_index(0), m);
  const auto x2 = z.segment(x2_index(0), m);
  const auto u = z.segment(u_index(0), m);

  r.resize(2 * m);
  r.head(m).noalias() = grid_.D * x1;
  r.tail(m).noalias() = grid_.D * x2;
  for (int i = 0; i < m; ++i) {
    const double inv3 = 1.0 / (x1[i] * x1[i] * x1[i]);
    r[i] -= half_tf * x2[i];
    r[m + i] -= half_tf * (-u[i] * x1[i] + inv3);
  }
  if (jac == nullptr) return;

  Mat& j = *jac;
  j.setZero(2 * m, num_variables());
  j.block(0, x1_index(0), m, m) = grid_.D;
  j.block(m, x2_index(0), m, m) = grid_.D;
  for (int i = 0; i < m; ++i) {
    const double inv3 = 1.0 / (x1[i] * x1[i] * x1[i]);
    const double inv4 = inv3 / x1[i];
    j(i, x2_index(i)) -= half_tf;
    j(i, tf_index()) = -0.5 * x2[i];
    j(m + i, x1_index(i)) += half_tf * (u[i] + 3.0 * inv4);
    j(m + i, u_index(i)) = half_tf * x1[i];
    j(m + i, tf_index()) = -0.5 * (-u[i] * x1[i] + inv3);
  }
}

void CollocationProblem::slope_residuals(const Vec& z, Vec& g,
                                         Mat* jac) const {
  const int n = grid_.order;
  if (!slope_limit_) {
    g.resize(0);
    if (jac) jac->resize(0, num_variables());
    return;
  }
  const double m_lim = *slope_limit_;
  g.resize(2 * n);
  if (jac) jac->setZero(2 * n, num_variables());
  for (int i = 0; i < n; ++i) {
    const double du = z[u_index(i + 1)] - z[u_index(i)];
    const double bound = m_lim * (grid_.nodes[i + 1] - grid_.nodes[i]);
    g[2 * i] = du - bound;
    g[2 * i + 1] = -du - bound;
    if (jac) {
      (*jac)(2 * i, u_index(i + 1)) = 1.0;
      (*jac)(2 * i, u_index(i)) = -1.0;
      (*jac)(2 * i + 1, u_index(i + 1)) = -1.0;
      (*jac)(2 * i + 1, u_index(i)) = 1.0;
    }
  }
}

void CollocationProblem::dynamics_hessian(const Vec& z, const Vec& w,
                                          Mat& h) const {
  const int m = nodes();
  const double tf = z[tf_index()];
  h.setZero(num_variables(), num_variables());
  auto add_sym = [&h](int a, int b, double v) {
    h(a, b) += v;
    if (a != b) h(b, a) += v;
  };
  for (int i = 0; i < m; ++i) {
    const double x1 = z[x1_index(i)];
    const double u = z[u_index(i)];
    const double inv4 = 1.0 / (x1 * x1 * x1 * x1);
    const double inv5 = inv4 / x1;
    // r1_i = (D x1)_i - (tf/2) x2_i
    add_sym(tf_index(), x2_index(i), -0.5 * w[i]);
    // r2_i = (D x2)_i + (tf/2) u_i x1_i - (tf/2) x1_i^-3
    const double wi = w[m + i];
    add_sym(tf_index(), u_index(i), 0.5 * x1 * wi);
    add_sym(tf_index(), x1_index(i), (0.5 * u + 1.5 * inv4) * wi);
    add_sym(u_index(i), x1_index(i), 0.5 * tf * wi);
    add_sym(x1_index(i), x1_index(i), -6.0 * tf * inv5 * wi);
  }
}

Vec CollocationProblem::lower_bounds() const {
  const int m = nodes();
  Vec lo(num_variables());
  lo[tf_index()] = 1e-3;
  for (int i = 0; i < m; ++i) {
    lo[x1_index(i)] = kCollocationX1Floor;
    lo[x2_index(i)] = -1e6;
    lo[u_index(i)] = -spec_.v1();
  }
  lo[x1_index(0)] = 1.0;
  lo[x2_index(0)] = 0.0;
  lo[u_index(0)] = spec_.u_initial();
  lo[x1_index(m - 1)] = spec_.gamma();
  lo[x2_index(m - 1)] = 0.0;
  lo[u_index(m - 1)] = spec_.u_final();
  return lo;
}

Vec CollocationProblem::upper_bounds() const {
  const int m = nodes();
  Vec hi(num_variables());
  hi[tf_index()] = 1e3;
  for (int i = 0; i < m; ++i) {
    hi[x1_index(i)] = 1e6;
    hi[x2_index(i)] = 1e6;
    hi[u_index(i)] = spec_.v2();
  }
  hi[x1_index(0)] = 1.0;
  hi[x2_index(0)] = 0.0;
  hi[u_index(0)] = spec_.u_initial();
  hi[x1_index(m - 1)] = spec_.gamma();
  hi[x2_index(m - 1)] = 0.0;
  hi[u_index(m - 1)] = spec_.u_final();
  return hi;
}

optim::Nlp CollocationProblem::nlp() const {
  optim::Nlp nlp;
  nlp.lower = lower_bounds();
  nlp.upper = upper_bounds();
  const int tf = tf_index();
  nlp.objective = [tf](const Vec& z, Vec& grad) {
    grad.setZero(z.size());
    grad[tf] = 1.0;
    return z[tf];
  };
  nlp.num_equalities = num_dynamics_constraints();
  nlp.equalities = [this](const Vec& z, Vec& c, Mat* jac) {
    dynamics_residuals(z, c, jac);
  };
  nlp.lagrangian_hessian = [this](const Vec& z, const Vec& w_eq,
                                  const Vec& /*w_in*/, Mat& h) {
    dynamics_hessian(z, w_eq, h);
  };
  nlp.num_inequalities = 2 * num_slope_constraints();
  nlp.inequalities = [this](const Vec& z, Vec& g, Mat* jac) {
    slope_residuals(z, g, jac);
  };
  return nlp;
}

double CollocationSolution::control_at(double t) const {
  const double tau = std::clamp(2.0 * t / t_f - 1.0, -1.0, 1.0);
  return interpolate(grid, u, tau);
}

namespace {

// Clamps u into the intersection of the bounds and the slope cones that
// start at u_0 and end at u_N, sweeping left to right.
void limit_slope(std::vector<double>& u, const std::vector<double>& nodes,
                 const ProblemSpec& spec, std::optional<double> slope_limit) {
  const std::size_t last = u.size() - 1;
  u.front() = spec.u_initial();
  u.back() = spec.u_final();
  for (std::size_t i = 1; i < last; ++i) {
    double lo = -spec.v1();
    double hi = spec.v2();
    if (slope_limit) {
      const double m = *slope_limit;
      const double from_prev = m * (nodes[i] - nodes[i - 1]);
      const double to_end = m * (nodes[last] - nodes[i]);
      lo = std::max({lo, u[i - 1] - from_prev, spec.u_final() - to_end});
      hi = std::min({hi, u[i - 1] + from_prev, spec.u_final() + to_end});
    }
    u[i] = std::clamp(u[i], lo, hi);
  }
}

}  // namespace

CollocationGuess initial_guess(const ProblemSpec& spec, int n,
                               const Schedule* plan,
                               std::optional<double> slope_limit) {
  const std::vector<double> nodes = lgl_nodes(n);
  CollocationGuess guess;
  const std::size_t m = nodes.size();
  guess.x1.resize(m);
  guess.x2.resize(m);
  guess.u.resize(m);

  if (plan != nullptr && !plan->segments.empty()) {
    guess.t_f = plan->total_time();
    for (std::size_t i = 0; i < m; ++i) {
      const double t = 0.5 * (nodes[i] + 1.0) * guess.t_f;
      const State s = state_along(*plan, t);
      guess.x1[i] = s.x1;
      guess.x2[i] = s.x2;
      guess.u[i] = plan->control_at(t);
    }
  } else {
    guess.t_f = asymptotic_min_time(spec.gamma(), 1, spec.v2());
    for (std::size_t i = 0; i < m; ++i) {
      const double s = 0.5 * (nodes[i] + 1.0);
      guess.x1[i] = 1.0 + (spec.gamma() - 1.0) * s;
      guess.x2[i] = 0.0;
      guess.u[i] = spec.u_initial() + (spec.u_final() - spec.u_initial()) * s;
    }
  }
  limit_slope(guess.u, nodes, spec, slope_limit);
  return guess;
}

CollocationGuess perturbed_guess(const ProblemSpec& spec, int n,
                                 std::optional<double> slope_limit,
                                 unsigned seed) {
  CollocationGuess guess = initial_guess(spec, n, nullptr, slope_limit);
  const std::vector<double> nodes = lgl_nodes(n);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const std::size_t last = guess.x1.size() - 1;
  for (std::size_t i = 1; i < last; ++i) {
    guess.x1[i] = std::max(guess.x1[i] * (1.0 + 0.2 * unit(rng)),
                           2.0 * kCollocationX1Floor);
    guess.x2[i] += 0.5 * unit(rng);
    guess.u[i] += 0.5 * (spec.v1() + spec.v2()) * unit(rng);
  }
  limit_slope(guess.u, nodes, spec, slope_limit);
  return guess;
}

CollocationSolution solve(const CollocationProblem& problem,
                          const CollocationGuess& init,
                          const optim::NlpSolver& solver) {
  const int m = static_cast<int>(problem.grid().size());
  if (static_cast<int>(init.x1.size()) != m ||
      static_cast<int>(init.x2.size()) != m ||
      static_cast<int>(init.u.size()) != m) {
    throw PreconditionError("initial guess does not match the grid size");
  }
  Vec z(problem.num_variables());
  z[problem.tf_index()] = init.t_f;
  for (int i = 0; i < m; ++i) {
    z[problem.x1_index(i)] = init.x1[i];
    z[problem.x2_index(i)] = init.x2[i];
    z[problem.u_index(i)] = init.u[i];
  }

  const optim::Nlp nlp = problem.nlp();
  const optim::SolverResult res = solver.solve(nlp, z);

  CollocationSolution sol;
  sol.grid = problem.grid();
  sol.slope_limit = problem.slope_limit();
  sol.t_f = res.x[problem.tf_index()];
  sol.x1.resize(m);
  sol.x2.resize(m);
  sol.u.resize(m);
  for (int i = 0; i < m; ++i) {
    sol.x1[i] = res.x[problem.x1_index(i)];
    sol.x2[i] = res.x[problem.x2_index(i)];
    sol.u[i] = res.x[problem.u_index(i)];
  }
  sol.objective = res.objective;
  sol.residual = res.max_violation;
  sol.stationarity = res.stationarity;
  sol.iterations = res.inner_iterations;
  sol.converged = res.converged && res.max_violation < 1e-6;
  return sol;
}

CollocationSolution solve_multistart(const CollocationProblem& problem,
                                     const CollocationOptions& options) {
  const ProblemSpec& spec = problem.spec();
  const int n = problem.order();
  const auto m_lim = problem.slope_limit();

  std::vector<std::pair<std::string, CollocationGuess>> seeds;
  if (spec.gamma() > 1.0) {
    try {
      const Schedule one = one_switch(spec);
      seeds.emplace_back("one-switch", initial_guess(spec, n, &one, m_lim));
    } catch (const InfeasibleSpecError&) {
    }
    try {
      const TwoSwitchSearch search = two_switch_search(spec);
      if (search.t1 > 0.0) {
        const Schedule two = two_switch_optimal(spec);
        seeds.emplace_back("two-switch", initial_guess(spec, n, &two, m_lim));
      }
    } catch (const InfeasibleSpecError&) {
    }
  }
  seeds.emplace_back("linear", initial_guess(spec, n, nullptr, m_lim));
  seeds.emplace_back("perturbed",
                     perturbed_guess(spec, n, m_lim, options.perturbation_seed));

  const optim::AugmentedLagrangianSolver solver(options.solver);
  std::vector<CollocationSolution> results(seeds.size());
  if (options.parallel) {
    std::vector<std::future<CollocationSolution>> jobs;
    for (const auto& seed : seeds) {
      jobs.push_back(std::async(std::launch::async, [&, guess = seed.second] {
        return solve(problem, guess, solver);
      }));
    }
    for (std::size_t k = 0; k < jobs.size(); ++k) results[k] = jobs[k].get();
  } else {
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      results[k] = solve(problem, seeds[k].second, solver);
    }
  }

  int total_iterations = 0;
  std::size_t best = 0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    results[k].seed = seeds[k].first;
    total_iterations += results[k].iterations;
    const auto& cand = results[k];
    const auto& cur = results[best];
    if (cand.converged != cur.converged) {
      if (cand.converged) best = k;
    } else if (cand.converged ? cand.t_f < cur.t_f
                              : cand.residual < cur.residual) {
      best = k;
    }
  }
  CollocationSolution out = results[best];
  out.iterations = total_iterations;
  return out;
}

Trajectory resimulate(const CollocationSolution& sol, int steps) {
  return integrate(State{1.0, 0.0},
                   [&sol](double t) { return sol.control_at(t); }, sol.t_f,
                   steps);
}

}  // namespace trapcool
