#include "trapcool/bangbang.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "trapcool/errors.hpp"
#include "trapcool/golden.hpp"
#include "trapcool/simulator.hpp"

namespace trapcool {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// Arguments of asin may exceed 1 by roundoff at the edge of the domain.
constexpr double kDomainSlack = 1e-12;

double checked_sqrt(double radicand, const char* planner,
                    const char* inequality) {
  if (!(radicand >= 0.0)) throw InfeasibleSpecError(planner, inequality);
  return std::sqrt(radicand);
}

double checked_asin(double arg, const char* planner, const char* inequality) {
  if (!(arg <= 1.0 + kDomainSlack)) {
    throw InfeasibleSpecError(planner, inequality);
  }
  return std::asin(std::min(arg, 1.0));
}

double quarter_period(double v2) { return kPi / (2.0 * std::sqrt(v2)); }

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::OneSwitch:
      return "one";
    case Strategy::TwoSwitchIntuitive:
      return "two-intuitive";
    case Strategy::TwoSwitchOptimal:
      return "two-optimal";
    case Strategy::MultiSwitch:
      return "multi";
  }
  return "unknown";
}

Schedule one_switch(const ProblemSpec& spec) {
  const double v1 = spec.v1();
  const double v2 = spec.v2();
  const double g2 = spec.gamma() * spec.gamma();
  constexpr const char* kName = "one_switch";
  if (!(g2 * v2 > 1.0)) throw InfeasibleSpecError(kName, "gamma^2*v2 > 1");

  const double r1 = checked_sqrt(
      v1 * (g2 - 1.0) * (g2 * v2 - 1.0) / (g2 * (v1 + v2) * (v1 + 1.0)), kName,
      "gamma >= 1");
  const double t1 = std::asinh(r1) / std::sqrt(v1);
  const double r2 =
      checked_sqrt(v2 * (g2 - 1.0) * (g2 * v1 + 1.0) /
                       ((v1 + v2) * (g2 * g2 * v2 - 1.0)),
                   kName, "gamma^4*v2 > 1");
  const double t2 =
      checked_asin(r2, kName,
                   "v2(gamma^2-1)(gamma^2 v1+1) <= (v1+v2)(gamma^4 v2-1)") /
      std::sqrt(v2);
  return make_schedule({{t1, -v1}, {t2, v2}});
}

double meeting_point(const ProblemSpec& spec) {
  const double v1 = spec.v1();
  const double v2 = spec.v2();
  const double g2 = spec.gamma() * spec.gamma();
  return std::sqrt((g2 * v1 + 1.0 + g2 * (g2 * v2 - 1.0)) / (g2 * (v1 + v2)));
}

Schedule two_switch_intuitive(const ProblemSpec& spec) {
  const double v1 = spec.v1();
  const double v2 = spec.v2();
  const double g2 = spec.gamma() * spec.gamma();
  constexpr const char* kName = "two_switch_intuitive";
  if (!(spec.gamma() > 1.0)) throw InfeasibleSpecError(kName, "gamma > 1");
  if (!(g2 * v2 > 1.0)) throw InfeasibleSpecError(kName, "gamma^2*v2 > 1");

  const double t1 = quarter_period(v2);
  const double r2 = checked_sqrt(v1 * v2 * (g2 - 1.0) * (g2 * v2 - 1.0) /
                                     (g2 * (v1 + v2) * (v1 + v2 * v2)),
                                 kName, "gamma > 1");
  const double t2 = std::asinh(r2) / std::sqrt(v1);
  const double r3 = checked_sqrt((g2 * v2 - 1.0) * (v2 + g2 * v1) /
                                     ((v1 + v2) * (g2 * g2 * v2 - 1.0)),
                                 kName, "gamma^4*v2 > 1");
  const double t3 =
      checked_asin(r3, kName,
                   "(gamma^2 v2-1)(v2+gamma^2 v1) <= (v1+v2)(gamma^4 v2-1)") /
      std::sqrt(v2);
  return make_schedule({{t1, v2}, {t2, -v1}, {t3, v2}});
}

double TwoSwitchTimes::total() const {
  return feasible ? first_arc + expulsive_arc + final_arc : kInf;
}

TwoSwitchTimes arc_matching_times(const ProblemSpec& spec, double beta_from,
                                  double beta_to, double first_arc) {
  const double v1 = spec.v1();
  const double v2 = spec.v2();
  TwoSwitchTimes out;
  out.first_arc = first_arc;

  State a{beta_from, 0.0};
  if (first_arc > 0.0) a = propagate_constant(a, v2, first_arc);

  // Invariants of the expulsive arc through A and the final arc through
  // (beta_to, 0); their difference fixes the meeting radius.
  const double c1 = segment_invariant(a, -v1);
  const double c2 = v2 * beta_to * beta_to + 1.0 / (beta_to * beta_to);
  const double y_meet = (c2 - c1) / (v1 + v2);

  // Expulsive arc: x1^2 = m + R cosh(w t + phi).
  const double w1 = 2.0 * std::sqrt(v1);
  const double m1 = -c1 / (2.0 * v1);
  const double big_a = a.x1 * a.x1 - m1;
  const double big_b = 2.0 * a.x1 * a.x2 / w1;
  const double r1 = std::sqrt(big_a * big_a - big_b * big_b);
  const double phi = std::atanh(big_b / big_a);
  const double ratio1 = (y_meet - m1) / r1;
  if (!(ratio1 >= 1.0)) return out;
  out.expulsive_arc = (std::acosh(ratio1) - phi) / w1;
  if (!(out.expulsive_arc >= 0.0)) return out;

  // Final arc: x1^2 = m + R cos(w tau), tau = time left until the apex.
  const double w2 = 2.0 * std::sqrt(v2);
  const double m2 = c2 / (2.0 * v2);
  const double r2 = beta_to * beta_to - m2;
  if (!(r2 > 0.0)) return out;
  const double ratio2 = (y_meet - m2) / r2;
  if (!(ratio2 <= 1.0 + kDomainSlack && ratio2 >= -1.0 - kDomainSlack)) {
    return out;
  }
  out.final_arc = std::acos(std::clamp(ratio2, -1.0, 1.0)) / w2;
  out.feasible = std::isfinite(out.expulsive_arc) && std::isfinite(out.final_arc);
  return out;
}

TwoSwitchTimes two_switch_times(const ProblemSpec& spec, double first_arc) {
  return arc_matching_times(spec, 1.0, spec.gamma(), first_arc);
}

TwoSwitchSearch two_switch_search(const ProblemSpec& spec) {
  const double q = quarter_period(spec.v2());
  auto cost = [&](double t1) { return two_switch_times(spec, t1).total(); };

  TwoSwitchSearch out;
  // Interior basin: scan (0, q], then refine.
  constexpr int kGrid = 64;
  const Minimum1D interior =
      scan_then_golden(cost, q / kGrid, q, kGrid - 1, 1e-10);
  out.interior_t1 = interior.x;
  out.interior_total = interior.f;

  double one = kInf;
  try {
    one = one_switch(spec).total_time();
  } catch (const InfeasibleSpecError&) {
    one = cost(0.0);
  }
  if (one <= interior.f) {
    out.t1 = 0.0;
    out.total = one;
  } else {
    out.t1 = interior.x;
    out.total = interior.f;
  }
  return out;
}

Schedule two_switch_optimal(const ProblemSpec& spec) {
  const TwoSwitchSearch best = two_switch_search(spec);
  if (!std::isfinite(best.total)) {
    throw InfeasibleSpecError("two_switch_optimal",
                              "a feasible first-arc duration");
  }
  if (best.t1 == 0.0) return one_switch(spec);
  const TwoSwitchTimes t = two_switch_times(spec, best.t1);
  return make_schedule({{t.first_arc, spec.v2()},
                        {t.expulsive_arc, -spec.v1()},
                        {t.final_arc, spec.v2()}});
}

namespace {

struct SegmentArcs {
  double quarter;
  double expulsive;
  double final;
};

SegmentArcs segment_arcs(double beta_prev, double beta_next,
                         const ProblemSpec& spec) {
  constexpr const char* kName = "segment_time";
  if (!(beta_prev >= 1.0 && beta_next > beta_prev)) {
    throw PreconditionError("segment_time requires 1 <= beta_prev < beta_next");
  }
  const double v1 = spec.v1();
  const double v2 = spec.v2();
  if (!(beta_prev * beta_prev * v2 >= 1.0)) {
    throw InfeasibleSpecError(kName, "beta_prev^2*v2 >= 1");
  }
  // alpha is the inner apex reached after the quarter period.
  const double alpha = 1.0 / (beta_prev * std::sqrt(v2));
  const double a2 = alpha * alpha;
  const double b2 = beta_next * beta_next;

  const double r1 = checked_sqrt(v1 * (b2 - a2) * (a2 * b2 * v2 - 1.0) /
                                     (b2 * (v1 + v2) * (a2 * a2 * v1 + 1.0)),
                                 kName, "alpha^2*beta^2*v2 >= 1");
  const double r2 = checked_sqrt(v2 * (b2 - a2) * (a2 * b2 * v1 + 1.0) /
                                     (a2 * (v1 + v2) * (b2 * b2 * v2 - 1.0)),
                                 kName, "beta^4*v2 > 1");
  return {quarter_period(v2), std::asinh(r1) / std::sqrt(v1),
          checked_asin(r2, kName, "meeting point on the final v2 arc") /
              std::sqrt(v2)};
}

}  // namespace

double segment_time(double beta_prev, double beta_next,
                    const ProblemSpec& spec) {
  const SegmentArcs arcs = segment_arcs(beta_prev, beta_next, spec);
  return arcs.quarter + arcs.expulsive + arcs.final;
}

double segment_time_limit(double beta_prev, double beta_next, double v2) {
  const double ratio = beta_next / beta_prev;
  return (kPi / 2.0 + std::sqrt(ratio * ratio - 1.0) + std::asin(1.0 / ratio)) /
         std::sqrt(v2);
}

namespace {

void check_betas(const ProblemSpec& spec, const std::vector<double>& betas) {
  if (betas.size() < 2) {
    throw PreconditionError("betas need at least the endpoints 1 and gamma");
  }
  if (std::abs(betas.front() - 1.0) > 1e-12) {
    throw PreconditionError("betas must start at 1");
  }
  if (std::abs(betas.back() - spec.gamma()) > 1e-12 * spec.gamma()) {
    throw PreconditionError("betas must end at gamma");
  }
  for (std::size_t i = 1; i < betas.size(); ++i) {
    if (!(betas[i] > betas[i - 1])) {
      throw PreconditionError("betas must be strictly increasing");
    }
  }
}

}  // namespace

MultiSwitchPlan multi_switch(const ProblemSpec& spec,
                             const std::vector<double>& betas) {
  check_betas(spec, betas);
  MultiSwitchPlan plan;
  plan.strategy = Strategy::MultiSwitch;
  plan.betas = betas;
  plan.betas.front() = 1.0;
  plan.betas.back() = spec.gamma();
  plan.n = static_cast<int>(betas.size()) - 1;

  std::vector<Segment> pieces;
  for (int i = 1; i <= plan.n; ++i) {
    const SegmentArcs arcs =
        segment_arcs(plan.betas[i - 1], plan.betas[i], spec);
    pieces.push_back({arcs.quarter, spec.v2()});
    pieces.push_back({arcs.expulsive, -spec.v1()});
    pieces.push_back({arcs.final, spec.v2()});
    plan.total_time += arcs.quarter + arcs.expulsive + arcs.final;
  }
  plan.schedule = make_schedule(pieces);
  return plan;
}

std::vector<double> optimal_betas_asymptotic(double gamma, int n) {
  if (n < 1) throw PreconditionError("segment count n must be >= 1");
  std::vector<double> betas(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    betas[i] = std::pow(gamma, static_cast<double>(i) / n);
  }
  betas.front() = 1.0;
  betas.back() = gamma;
  return betas;
}

double asymptotic_min_time(double gamma, int n, double v2) {
  if (n < 1) throw PreconditionError("segment count n must be >= 1");
  const double root = std::pow(gamma, 1.0 / n);
  return n / std::sqrt(v2) *
         (kPi / 2.0 + std::sqrt(root * root - 1.0) + std::asin(1.0 / root));
}

std::vector<double> refine_betas(const ProblemSpec& spec, int n) {
  std::vector<double> betas = optimal_betas_asymptotic(spec.gamma(), n);
  auto pair_cost = [&](std::size_t i, double beta) {
    try {
      return segment_time(betas[i - 1], beta, spec) +
             segment_time(beta, betas[i + 1], spec);
    } catch (const std::exception&) {
      return kInf;
    }
  };
  for (int sweep = 0; sweep < 200; ++sweep) {
    double max_change = 0.0;
    for (std::size_t i = 1; i + 1 < betas.size(); ++i) {
      const double lo = betas[i - 1];
      const double hi = betas[i + 1];
      const double margin = 1e-9 * (hi - lo);
      auto f = [&](double beta) { return pair_cost(i, beta); };
      const Minimum1D m =
          scan_then_golden(f, lo + margin, hi - margin, 32, 1e-12 * hi);
      if (m.f < f(betas[i])) {
        max_change = std::max(max_change, std::abs(m.x - betas[i]));
        betas[i] = m.x;
      }
    }
    if (max_change < 1e-11 * spec.gamma()) break;
  }
  return betas;
}

MultiSwitchPlan best_plan(const ProblemSpec& spec, int n_max) {
  if (n_max < 1) throw PreconditionError("n_max must be >= 1");
  MultiSwitchPlan best;
  best.total_time = kInf;
  std::vector<std::string> notes;

  auto consider = [&](MultiSwitchPlan candidate) {
    if (candidate.total_time < best.total_time) {
      candidate.diagnostics = {};
      best = std::move(candidate);
    }
  };

  try {
    MultiSwitchPlan p;
    p.strategy = Strategy::OneSwitch;
    p.betas = {1.0, spec.gamma()};
    p.n = 1;
    p.schedule = one_switch(spec);
    p.total_time = p.schedule.total_time();
    consider(std::move(p));
  } catch (const InfeasibleSpecError& e) {
    notes.emplace_back(e.what());
  }

  if (spec.gamma() > 1.0) {
    try {
      MultiSwitchPlan p;
      p.strategy = Strategy::TwoSwitchOptimal;
      p.betas = {1.0, spec.gamma()};
      p.n = 1;
      p.schedule = two_switch_optimal(spec);
      p.total_time = p.schedule.total_time();
      consider(std::move(p));
    } catch (const InfeasibleSpecError& e) {
      notes.emplace_back(e.what());
    }

    for (int n = 2; n <= n_max; ++n) {
      try {
        consider(multi_switch(spec, refine_betas(spec, n)));
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "multi_switch n=" << n << " skipped: " << e.what();
        notes.push_back(msg.str());
      }
    }
  }
  if (!std::isfinite(best.total_time)) {
    if (spec.gamma() == 1.0) {
      best.strategy = Strategy::OneSwitch;
      best.betas = {1.0, 1.0};
      best.n = 0;
      best.total_time = 0.0;
    } else {
      throw InfeasibleSpecError("best_plan", "at least one feasible strategy");
    }
  }
  best.diagnostics = std::move(notes);
  return best;
}

double planner_time(const PlannerChoice& choice, const ProblemSpec& spec) {
  try {
    switch (choice.strategy) {
      case Strategy::OneSwitch:
        return one_switch(spec).total_time();
      case Strategy::TwoSwitchIntuitive:
        return two_switch_intuitive(spec).total_time();
      case Strategy::TwoSwitchOptimal:
        return two_switch_search(spec).total;
      case Strategy::MultiSwitch: {
        const auto betas = choice.refine
                               ? refine_betas(spec, choice.n)
                               : optimal_betas_asymptotic(spec.gamma(), choice.n);
        return multi_switch(spec, betas).total_time;
      }
    }
  } catch (const InfeasibleSpecError&) {
  }
  return kInf;
}

double crossing_threshold(const std::function<double(double)>& time_a,
                          const std::function<double(double)>& time_b,
                          double v2_lo, double v2_hi) {
  auto b_faster = [&](double v2) { return time_a(v2) - time_b(v2) > 0.0; };
  bool lo_state = b_faster(v2_lo);
  const bool hi_state = b_faster(v2_hi);
  if (lo_state == hi_state) {
    std::ostringstream msg;
    msg << "no sign change of time difference on [" << v2_lo << ", " << v2_hi
        << "]";
    throw BracketError(msg.str());
  }
  while (v2_hi - v2_lo > 1e-10 * std::max(1.0, v2_hi)) {
    const double mid = 0.5 * (v2_lo + v2_hi);
    if (b_faster(mid) == lo_state) {
      v2_lo = mid;
    } else {
      v2_hi = mid;
    }
  }
  return 0.5 * (v2_lo + v2_hi);
}

double crossing_threshold(double v1, double gamma, const PlannerChoice& a,
                          const PlannerChoice& b, double v2_lo, double v2_hi) {
  auto timer = [v1, gamma](const PlannerChoice& choice) {
    return [v1, gamma, choice](double v2) {
      return planner_time(choice, ProblemSpec::make(v1, v2, gamma));
    };
  };
  return crossing_threshold(timer(a), timer(b), v2_lo, v2_hi);
}

}  // namespace trapcool
