#pragma once

#include <functional>
#include <string>
#include <vector>

#include "trapcool/core_model.hpp"
#include "trapcool/schedule.hpp"

namespace trapcool {

struct Sample {
  double t;
  double x1;
  double x2;
  double u;  ///< control acting on the interval that starts at t
};

/// Time-ordered samples, t strictly increasing from 0.
struct Trajectory {
  std::vector<Sample> samples;

  State final_state() const;
  double final_time() const;
};

/// Exact state after dt under constant u. Works on x1^2, which obeys the
/// linear equation (x1^2)'' = 2c - 4u x1^2, so the trigonometric (u > 0),
/// hyperbolic (u < 0) and polynomial (u = 0) branches share one formula.
/// Throws RangeError if dt <= 0, DomainError if s0.x1 <= 0.
State propagate_constant(const State& s0, double u, double dt);

using Control = std::function<double(double t)>;

/// Fixed-step classical RK4 of the scaled dynamics over [0, t_f] starting at
/// s0. Emits steps + 1 samples. Throws RangeError if steps < 100 or
/// t_f <= 0, SingularityError if x1 drops below 1e-6.
Trajectory integrate(const State& s0, const Control& control, double t_f,
                     int steps);

/// Same as above, starting from (1, 0).
Trajectory integrate(const ProblemSpec& spec, const Control& control,
                     double t_f, int steps);

/// RK4 segment by segment so switch instants fall on step boundaries.
Trajectory integrate_schedule(const Schedule& plan, int steps_per_segment,
                              const State& s0 = {});

/// Chains propagate_constant across the plan, at least `samples_per_segment`
/// samples per segment. An empty plan yields the single sample (0, 1, 0, 1).
Trajectory simulate_schedule(const ProblemSpec& spec, const Schedule& plan,
                             int samples_per_segment = 50);

/// State at time t along the plan, t in [0, total_time].
State state_along(const Schedule& plan, double t, const State& s0 = {});

struct VerificationReport {
  double endpoint_error_x1 = 0.0;
  double endpoint_error_x2 = 0.0;
  double max_invariant_drift = 0.0;  ///< relative, over constant-u runs
  bool feasible = false;
  std::vector<std::string> violations;
};

/// Checks endpoint against (gamma, 0), control bounds, x1 > 0 and invariant
/// drift within runs of identical u. Never throws on bad trajectories.
VerificationReport verify(const Trajectory& traj, const ProblemSpec& spec,
                          double tol);

}  // namespace trapcool
