#pragma once

// Bang-bang planners for the minimum-time expansion problem. Every interior
// segment uses one of the extreme controls -v1 (expulsive) or v2.

#include <functional>
#include <string>
#include <vector>

#include "trapcool/core_model.hpp"
#include "trapcool/schedule.hpp"

namespace trapcool {

enum class Strategy {
  OneSwitch,           ///< -v1, v2
  TwoSwitchIntuitive,  ///< v2 quarter period, -v1, v2
  TwoSwitchOptimal,    ///< v2, -v1, v2 with numerically optimal first arc
  MultiSwitch,         ///< n chained two-switch segments (2n switchings)
};

std::string to_string(Strategy s);

struct MultiSwitchPlan {
  Strategy strategy = Strategy::MultiSwitch;
  std::vector<double> betas;  ///< apex coordinates 1 = b_0 < ... < b_n = gamma
  int n = 0;                  ///< number of two-switch segments
  Schedule schedule;
  double total_time = 0.0;
  std::vector<std::string> diagnostics;
};

/// Switching time for -v1 followed by v2. Throws InfeasibleSpecError when the
/// closed-form arguments leave their domains. gamma == 1 gives an empty plan.
Schedule one_switch(const ProblemSpec& spec);

/// x1 where the -v1 curve through (1, 0) meets the v2 curve through (gamma, 0).
double meeting_point(const ProblemSpec& spec);

/// v2 for a quarter period (to the inner apex), then -v1, then v2.
/// Throws InfeasibleSpecError for gamma == 1 or out-of-domain arguments.
Schedule two_switch_intuitive(const ProblemSpec& spec);

/// v2 for `first_arc`, then the -v1 and v2 arcs that reach (gamma, 0).
/// Durations come from matching the segment invariants. Returns an empty
/// optional-like result (empty schedule, +inf total) when the arcs cannot
/// meet. first_arc == 0 reproduces the one-switch geometry.
struct TwoSwitchTimes {
  double first_arc = 0.0;
  double expulsive_arc = 0.0;
  double final_arc = 0.0;
  bool feasible = false;
  double total() const;
};
TwoSwitchTimes two_switch_times(const ProblemSpec& spec, double first_arc);

/// Generalisation of two_switch_times between apexes (beta_from, 0) and
/// (beta_to, 0), used to cross-check the segment-time closed form.
TwoSwitchTimes arc_matching_times(const ProblemSpec& spec, double beta_from,
                                  double beta_to, double first_arc);

struct TwoSwitchSearch {
  double t1 = 0.0;     ///< optimal first-arc duration (0 = one-switch)
  double total = 0.0;  ///< optimal transfer time
  double interior_t1 = 0.0;
  double interior_total = 0.0;  ///< best local minimum with t1 > 0
};

/// Minimises the transfer time over t1 in [0, pi/(2 sqrt(v2))]. The cost is
/// bimodal (a minimum at t1 = 0 competing with one near the quarter
/// period), so a grid scan locates the interior basin before golden-section
/// refinement.
TwoSwitchSearch two_switch_search(const ProblemSpec& spec);

/// Schedule of the two_switch_search optimum. When t1 = 0 wins this is
/// exactly one_switch(spec).
Schedule two_switch_optimal(const ProblemSpec& spec);

/// Exact time of one two-switch segment from (beta_prev, 0) to
/// (beta_next, 0), including the leading quarter period.
double segment_time(double beta_prev, double beta_next,
                    const ProblemSpec& spec);

/// v2 -> infinity limit of segment_time (scaled back by 1/sqrt(v2)).
double segment_time_limit(double beta_prev, double beta_next, double v2);

/// Chains n = betas.size() - 1 two-switch segments. Throws PreconditionError
/// unless betas are strictly increasing from 1 to gamma.
MultiSwitchPlan multi_switch(const ProblemSpec& spec,
                             const std::vector<double>& betas);

/// Geometric progression gamma^(i/n), i = 0..n.
std::vector<double> optimal_betas_asymptotic(double gamma, int n);

/// (n / sqrt(v2)) [pi/2 + sqrt(gamma^(2/n) - 1) + asin(gamma^(-1/n))].
double asymptotic_min_time(double gamma, int n, double v2);

/// Exact-v2 refinement of the interior betas by cyclic coordinate descent,
/// seeded at gamma^(i/n).
std::vector<double> refine_betas(const ProblemSpec& spec, int n);

/// Best plan among one-switch, optimal two-switch and 2n-switch plans for
/// n = 2..n_max. Infeasible candidates are skipped and noted in diagnostics.
MultiSwitchPlan best_plan(const ProblemSpec& spec, int n_max);

/// Transfer time of a planner family member, +inf when infeasible.
struct PlannerChoice {
  Strategy strategy = Strategy::OneSwitch;
  int n = 1;            ///< segments for MultiSwitch
  bool refine = false;  ///< MultiSwitch: optimise betas instead of gamma^(i/n)
};
double planner_time(const PlannerChoice& choice, const ProblemSpec& spec);

/// v2 where time_a - time_b changes sign (time_b strictly faster above),
/// bisected to 1e-10 in v2 on [v2_lo, v2_hi]. Throws BracketError when the
/// bracket has no sign change.
double crossing_threshold(const std::function<double(double)>& time_a,
                          const std::function<double(double)>& time_b,
                          double v2_lo, double v2_hi);

double crossing_threshold(double v1, double gamma, const PlannerChoice& a,
                          const PlannerChoice& b, double v2_lo, double v2_hi);

}  // namespace trapcool
