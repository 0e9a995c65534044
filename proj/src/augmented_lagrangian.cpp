#include "trapcool/augmented_lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace trapcool::optim {

namespace {

Vec project(const Vec& x, const Vec& lower, const Vec& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

double projected_gradient_norm(const Vec& x, const Vec& grad, const Vec& lower,
                               const Vec& upper) {
  return (project(x - grad, lower, upper) - x).lpNorm<Eigen::Infinity>();
}

// Variables held at a bound by a gradient pointing outward.
std::vector<bool> active_set(const Vec& x, const Vec& grad, const Vec& lower,
                             const Vec& upper) {
  std::vector<bool> active(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double eps = 1e-12 * std::max(1.0, std::abs(x[i]));
    const bool at_lower = x[i] <= lower[i] + eps && grad[i] > 0.0;
    const bool at_upper = x[i] >= upper[i] - eps && grad[i] < 0.0;
    active[i] = lower[i] == upper[i] || at_lower || at_upper;
  }
  return active;
}

}  // namespace

BoxMinimizerResult minimize_box(const Objective& f, const Vec& lower,
                                const Vec& upper, Vec x0, double tol,
                                int max_iterations, int memory) {
  const Eigen::Index n = x0.size();
  BoxMinimizerResult out;
  Vec x = project(x0, lower, upper);
  Vec grad(n);
  double fx = f(x, grad);

  std::deque<Vec> s_hist;
  std::deque<Vec> y_hist;
  Vec x_new(n);
  Vec grad_new(n);

  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    out.projected_gradient = projected_gradient_norm(x, grad, lower, upper);
    if (out.projected_gradient < tol) {
      out.converged = true;
      break;
    }
    const std::vector<bool> active = active_set(x, grad, lower, upper);
    auto mask = [&](Vec v) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (active[i]) v[i] = 0.0;
      }
      return v;
    };

    // Two-loop recursion on the free subspace.
    Vec q = mask(grad);
    const std::size_t m = s_hist.size();
    std::vector<double> alpha(m);
    std::vector<double> rho(m);
    for (std::size_t k = m; k-- > 0;) {
      const Vec s = mask(s_hist[k]);
      const Vec y = mask(y_hist[k]);
      const double sy = s.dot(y);
      rho[k] = sy > 1e-300 ? 1.0 / sy : 0.0;
      alpha[k] = rho[k] * s.dot(q);
      q -= alpha[k] * y;
    }
    if (m > 0) {
      const Vec y = mask(y_hist.back());
      const Vec s = mask(s_hist.back());
      const double yy = y.squaredNorm();
      if (yy > 0.0 && s.dot(y) > 0.0) q *= s.dot(y) / yy;
    }
    for (std::size_t k = 0; k < m; ++k) {
      const Vec s = mask(s_hist[k]);
      const Vec y = mask(y_hist[k]);
      const double beta = rho[k] * y.dot(q);
      q += (alpha[k] - beta) * s;
    }
    Vec dir = mask(-q);
    if (!(dir.dot(grad) < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      dir = mask(-grad);
      const double scale = dir.lpNorm<Eigen::Infinity>();
      if (scale > 1.0) dir /= scale;
    }

    // Projected backtracking (Armijo along the projection arc).
    double step = 1.0;
    if (s_hist.empty()) {
      const double dn = dir.lpNorm<Eigen::Infinity>();
      if (dn > 1.0) step = 1.0 / dn;
    }
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = project(x + step * dir, lower, upper);
      f_new = f(x_new, grad_new);
      if (std::isfinite(f_new) &&
          f_new <= fx + 1e-4 * grad.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (s_hist.empty()) break;  // steepest descent also failed
      s_hist.clear();
      y_hist.clear();
      continue;
    }

    const Vec s = x_new - x;
    const Vec y = grad_new - grad;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      if (static_cast<int>(s_hist.size()) > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    const double f_old = fx;
    x = x_new;
    grad = grad_new;
    fx = f_new;
    if (std::abs(f_old - fx) <= 1e-16 * std::max(1.0, std::abs(fx)) &&
        s.lpNorm<Eigen::Infinity>() <= 1e-16 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
      break;
    }
  }
  out.x = x;
  out.value = fx;
  out.iterations = iter;
  out.projected_gradient = projected_gradient_norm(x, grad, lower, upper);
  out.converged = out.converged || out.projected_gradient < tol;
  return out;
}

BoxMinimizerResult minimize_box_newton(const Objective& f, const Hessian& h,
                                       const Vec& lower, const Vec& upper,
                                       Vec x0, double tol, int max_iterations) {
  const Eigen::Index n = x0.size();
  BoxMinimizerResult out;
  Vec x = project(x0, lower, upper);
  Vec grad(n);
  Vec grad_new(n);
  double fx = f(x, grad);
  Mat hess(n, n);
  Vec x_new(n);

  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    out.projected_gradient = projected_gradient_norm(x, grad, lower, upper);
    if (out.projected_gradient < tol) {
      out.converged = true;
      break;
    }
    // Bertsekas' epsilon-active set: variables within eps of a bound whose
    // gradient pushes outward are moved by projected gradient only.
    const double eps = std::min(1e-3, out.projected_gradient);
    std::vector<Eigen::Index> free_idx;
    std::vector<bool> active(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool pinned = lower[i] == upper[i];
      const bool at_lower = x[i] <= lower[i] + eps && grad[i] > 0.0;
      const bool at_upper = x[i] >= upper[i] - eps && grad[i] < 0.0;
      active[i] = pinned || at_lower || at_upper;
      if (!active[i]) free_idx.push_back(i);
    }

    h(x, hess);
    Vec dir = Vec::Zero(n);
    const auto nf = static_cast<Eigen::Index>(free_idx.size());
    if (nf > 0) {
      Mat hf(nf, nf);
      Vec gf(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        gf[a] = grad[free_idx[a]];
        for (Eigen::Index b = 0; b < nf; ++b) {
          hf(a, b) = hess(free_idx[a], free_idx[b]);
        }
      }
      const double scale = std::max(1.0, hf.diagonal().cwiseAbs().maxCoeff());
      double shift = 0.0;
      Vec df;
      for (int attempt = 0; attempt < 60; ++attempt) {
        Eigen::LLT<Mat> llt(hf + shift * Mat::Identity(nf, nf));
        if (llt.info() == Eigen::Success) {
          df = -llt.solve(gf);
          if (df.allFinite()) break;
        }
        shift = shift == 0.0 ? 1e-10 * scale : shift * 10.0;
      }
      if (df.size() != nf || !df.allFinite()) df = -gf;
      for (Eigen::Index a = 0; a < nf; ++a) dir[free_idx[a]] = df[a];
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active[i] && lower[i] != upper[i]) {
        const double curv = std::max(std::abs(hess(i, i)), 1e-12);
        dir[i] = -grad[i] / curv;
      }
    }

    double step = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = project(x + step * dir, lower, upper);
      f_new = f(x_new, grad_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * grad.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double change = (x_new - x).lpNorm<Eigen::Infinity>();
    x = x_new;
    grad = grad_new;
    fx = f_new;
    if (change <= 1e-15 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) break;
  }
  out.x = x;
  out.value = fx;
  out.iterations = iter;
  out.projected_gradient = projected_gradient_norm(x, grad, lower, upper);
  out.converged = out.converged || out.projected_gradient < tol;
  return out;
}

SolverResult AugmentedLagrangianSolver::solve(const Nlp& nlp,
                                              const Vec& x0) const {
  const int n = nlp.num_variables();
  const int me = nlp.num_equalities;
  const int mi = nlp.num_inequalities;
  Vec lambda = Vec::Zero(me);
  Vec mu = Vec::Zero(mi);
  double penalty = options_.initial_penalty;

  Vec c(me);
  Vec g(mi);
  Mat jc(me, n);
  Mat jg(mi, n);
  Vec grad_f(n);

  // L_A = f + lambda.c + (rho/2)|c|^2
  //       + (1/(2 rho)) sum( max(0, mu + rho g)^2 - mu^2 )
  auto lagrangian = [&](const Vec& x, Vec& grad) {
    double value = nlp.objective(x, grad_f);
    grad = grad_f;
    if (me > 0) {
      nlp.equalities(x, c, &jc);
      const Vec weight = lambda + penalty * c;
      value += lambda.dot(c) + 0.5 * penalty * c.squaredNorm();
      grad.noalias() += jc.transpose() * weight;
    }
    if (mi > 0) {
      nlp.inequalities(x, g, &jg);
      const Vec shifted = (mu + penalty * g).cwiseMax(0.0);
      value += (shifted.squaredNorm() - mu.squaredNorm()) / (2.0 * penalty);
      grad.noalias() += jg.transpose() * shifted;
    }
    return value;
  };

  // hess(L_A) = hess(f) + sum (lambda + rho c) hess(c) + rho Jc^T Jc
  //           + sum_{active} [shifted hess(g) + rho grad g grad g^T]
  Mat hess_jc(me, n);
  Mat hess_jg(mi, n);
  Vec hess_c(me);
  Vec hess_g(mi);
  auto hessian = [&](const Vec& x, Mat& h) {
    Vec w_eq = Vec::Zero(me);
    Vec w_in = Vec::Zero(mi);
    if (me > 0) {
      nlp.equalities(x, hess_c, &hess_jc);
      w_eq = lambda + penalty * hess_c;
    }
    if (mi > 0) {
      nlp.inequalities(x, hess_g, &hess_jg);
      w_in = (mu + penalty * hess_g).cwiseMax(0.0);
    }
    nlp.lagrangian_hessian(x, w_eq, w_in, h);
    if (me > 0) h.noalias() += penalty * hess_jc.transpose() * hess_jc;
    for (int j = 0; j < mi; ++j) {
      if (w_in[j] > 0.0) {
        h.noalias() += penalty * hess_jg.row(j).transpose() * hess_jg.row(j);
      }
    }
  };

  auto violation = [&](const Vec& x) {
    double v = 0.0;
    if (me > 0) {
      nlp.equalities(x, c, nullptr);
      v = std::max(v, c.lpNorm<Eigen::Infinity>());
    }
    if (mi > 0) {
      nlp.inequalities(x, g, nullptr);
      v = std::max(v, g.maxCoeff() > 0.0 ? g.maxCoeff() : 0.0);
    }
    return v;
  };

  SolverResult result;
  Vec x = project(x0, nlp.lower, nlp.upper);
  double last_violation = violation(x);
  double inner_tol = 1e-2;

  for (int outer = 0; outer < options_.max_outer; ++outer) {
    const BoxMinimizerResult inner =
        nlp.lagrangian_hessian
            ? minimize_box_newton(lagrangian, hessian, nlp.lower, nlp.upper, x,
                                  inner_tol, options_.max_inner)
            : minimize_box(lagrangian, nlp.lower, nlp.upper, x, inner_tol,
                           options_.max_inner, options_.lbfgs_memory);
    x = inner.x;
    result.inner_iterations += inner.iterations;
    result.outer_iterations = outer + 1;

    // Multiplier update, then first-order stationarity of the ordinary
    // Lagrangian at the new multipliers.
    Vec grad(n);
    nlp.objective(x, grad);
    if (me > 0) {
      nlp.equalities(x, c, &jc);
      lambda += penalty * c;
      grad.noalias() += jc.transpose() * lambda;
    }
    if (mi > 0) {
      nlp.inequalities(x, g, &jg);
      mu = (mu + penalty * g).cwiseMax(0.0);
      grad.noalias() += jg.transpose() * mu;
    }
    const double v = violation(x);
    result.stationarity =
        projected_gradient_norm(x, grad, nlp.lower, nlp.upper);

    if (v < options_.feasibility_tol &&
        result.stationarity < options_.stationarity_tol) {
      result.converged = true;
      last_violation = v;
      break;
    }
    if (v > 0.25 * last_violation) {
      penalty = std::min(penalty * 10.0, options_.max_penalty);
    }
    last_violation = v;
    inner_tol = std::max(0.1 * inner_tol, 0.1 * options_.stationarity_tol);
  }

  result.x = x;
  result.objective = nlp.objective(x, grad_f);
  result.max_violation = violation(x);
  result.equality_multipliers = lambda;
  result.inequality_multipliers = mu;
  return result;
}

}  // namespace trapcool::optim
