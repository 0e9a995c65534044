#include "trapcool/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trapcool/errors.hpp"

namespace trapcool {

double Schedule::total_time() const {
  double total = 0.0;
  for (const auto& seg : segments) total += seg.duration;
  return total;
}

double Schedule::control_at(double t) const {
  if (segments.empty()) return 1.0;
  double start = 0.0;
  for (const auto& seg : segments) {
    if (t < start + seg.duration) return seg.u;
    start += seg.duration;
  }
  return segments.back().u;
}

Schedule make_schedule(const std::vector<Segment>& pieces) {
  Schedule plan;
  for (const auto& piece : pieces) {
    if (!(piece.duration > 0.0)) continue;
    if (!plan.segments.empty() && plan.segments.back().u == piece.u) {
      plan.segments.back().duration += piece.duration;
    } else {
      plan.segments.push_back(piece);
    }
  }
  return plan;
}

void validate_schedule(const Schedule& plan, const ProblemSpec& spec) {
  for (std::size_t i = 0; i < plan.segments.size(); ++i) {
    const auto& seg = plan.segments[i];
    std::ostringstream where;
    where << "segment " << i << ": ";
    if (!(seg.duration > 0.0) || !std::isfinite(seg.duration)) {
      throw PreconditionError(where.str() + "duration must be positive");
    }
    if (seg.u != -spec.v1() && seg.u != spec.v2()) {
      throw PreconditionError(where.str() + "control must be -v1 or v2");
    }
    if (i > 0 && plan.segments[i - 1].u == seg.u) {
      throw PreconditionError(where.str() + "repeats the previous control");
    }
  }
}

State Trajectory::final_state() const {
  const auto& last = samples.back();
  return {last.x1, last.x2};
}

double Trajectory::final_time() const { return samples.back().t; }

State propagate_constant(const State& s0, double u, double dt) {
  if (!(dt > 0.0)) {
    throw RangeError("propagation interval must be positive");
  }
  const double c = segment_invariant(s0, u);
  const double y0 = s0.x1 * s0.x1;
  const double dy0 = 2.0 * s0.x1 * s0.x2;
  const double a = std::sqrt(std::abs(u));
  const double w = 2.0 * a;

  // y = x1^2 = y0 C(wt) + dy0 S(wt)/w + c Q(t), with Q -> t^2 as u -> 0,
  // written without c/u so small |u| stays well conditioned.
  double y = 0.0;
  double dy = 0.0;
  if (u > 0.0) {
    const double sa = std::sin(a * dt) / a;
    y = y0 * std::cos(w * dt) + dy0 * std::sin(w * dt) / w + c * sa * sa;
    dy = -y0 * w * std::sin(w * dt) + dy0 * std::cos(w * dt) +
         c * std::sin(w * dt) / a;
  } else if (u < 0.0) {
    const double sa = std::sinh(a * dt) / a;
    y = y0 * std::cosh(w * dt) + dy0 * std::sinh(w * dt) / w + c * sa * sa;
    dy = y0 * w * std::sinh(w * dt) + dy0 * std::cosh(w * dt) +
         c * std::sinh(w * dt) / a;
  } else {
    y = y0 + dy0 * dt + c * dt * dt;
    dy = dy0 + 2.0 * c * dt;
  }
  const double x1 = std::sqrt(y);
  return {x1, dy / (2.0 * x1)};
}

namespace {

constexpr double kSingularityEps = 1e-6;

State rk4_step(const State& s, double t, double h, const Control& control) {
  auto f = [&](const State& x, double time) {
    if (x.x1 <= kSingularityEps) {
      std::ostringstream msg;
      msg << "integration approached x1 = 0 (x1 = " << x.x1 << " at t = "
          << time << ")";
      throw SingularityError(msg.str());
    }
    return dynamics(x, control(time));
  };
  const StateRate k1 = f(s, t);
  const StateRate k2 =
      f({s.x1 + 0.5 * h * k1.dx1, s.x2 + 0.5 * h * k1.dx2}, t + 0.5 * h);
  const StateRate k3 =
      f({s.x1 + 0.5 * h * k2.dx1, s.x2 + 0.5 * h * k2.dx2}, t + 0.5 * h);
  const StateRate k4 = f({s.x1 + h * k3.dx1, s.x2 + h * k3.dx2}, t + h);
  return {s.x1 + h / 6.0 * (k1.dx1 + 2.0 * k2.dx1 + 2.0 * k3.dx1 + k4.dx1),
          s.x2 + h / 6.0 * (k1.dx2 + 2.0 * k2.dx2 + 2.0 * k3.dx2 + k4.dx2)};
}

// Appends `steps` RK4 steps of length duration/steps starting at t0.
void rk4_run(std::vector<Sample>& out, State s, double t0, double duration,
             int steps, const Control& control) {
  const double h = duration / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = t0 + h * i;
    s = rk4_step(s, t, h, control);
    if (!(s.x1 > kSingularityEps)) {
      std::ostringstream msg;
      msg << "integration approached x1 = 0 (x1 = " << s.x1 << " at t = "
          << t + h << ")";
      throw SingularityError(msg.str());
    }
    const double t_next = (i + 1 == steps) ? t0 + duration : t + h;
    out.push_back({t_next, s.x1, s.x2, control(t_next)});
  }
}

}  // namespace

Trajectory integrate(const State& s0, const Control& control, double t_f,
                     int steps) {
  if (steps < 100) throw RangeError("integrate requires at least 100 steps");
  if (!(t_f > 0.0)) throw RangeError("integration horizon must be positive");
  Trajectory traj;
  traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
  traj.samples.push_back({0.0, s0.x1, s0.x2, control(0.0)});
  rk4_run(traj.samples, s0, 0.0, t_f, steps, control);
  return traj;
}

Trajectory integrate(const ProblemSpec& /*spec*/, const Control& control,
                     double t_f, int steps) {
  return integrate(State{1.0, 0.0}, control, t_f, steps);
}

Trajectory integrate_schedule(const Schedule& plan, int steps_per_segment,
                              const State& s0) {
  if (steps_per_segment < 1) {
    throw RangeError("steps_per_segment must be positive");
  }
  Trajectory traj;
  const double u0 = plan.segments.empty() ? 1.0 : plan.segments.front().u;
  traj.samples.push_back({0.0, s0.x1, s0.x2, u0});
  double t = 0.0;
  for (const auto& seg : plan.segments) {
    const double u = seg.u;
    const State start = traj.final_state();
    rk4_run(traj.samples, start, t, seg.duration, steps_per_segment,
            [u](double) { return u; });
    t += seg.duration;
  }
  return traj;
}

Trajectory simulate_schedule(const ProblemSpec& spec, const Schedule& plan,
                             int samples_per_segment) {
  validate_schedule(plan, spec);
  samples_per_segment = std::max(samples_per_segment, 1);
  Trajectory traj;
  State s{1.0, 0.0};
  const double u0 = plan.segments.empty() ? 1.0 : plan.segments.front().u;
  traj.samples.push_back({0.0, s.x1, s.x2, u0});
  double t = 0.0;
  for (std::size_t k = 0; k < plan.segments.size(); ++k) {
    const auto& seg = plan.segments[k];
    // Samples inside the segment are propagated from its start state so the
    // closed form is applied once per sample, not accumulated.
    for (int i = 1; i <= samples_per_segment; ++i) {
      const double dt = seg.duration * i / samples_per_segment;
      const State si = propagate_constant(s, seg.u, dt);
      const bool last = (i == samples_per_segment);
      const double u_next = (last && k + 1 < plan.segments.size())
                                ? plan.segments[k + 1].u
                                : seg.u;
      traj.samples.push_back({t + dt, si.x1, si.x2, u_next});
    }
    s = traj.final_state();
    t += seg.duration;
  }
  return traj;
}

State state_along(const Schedule& plan, double t, const State& s0) {
  State s = s0;
  double elapsed = 0.0;
  for (const auto& seg : plan.segments) {
    const double remaining = t - elapsed;
    if (remaining <= 0.0) break;
    const double dt = std::min(remaining, seg.duration);
    s = propagate_constant(s, seg.u, dt);
    elapsed += seg.duration;
  }
  return s;
}

VerificationReport verify(const Trajectory& traj, const ProblemSpec& spec,
                          double tol) {
  VerificationReport report;
  if (traj.samples.empty()) {
    report.violations.emplace_back("empty trajectory");
    return report;
  }
  const Sample& last = traj.samples.back();
  report.endpoint_error_x1 = std::abs(last.x1 - spec.gamma());
  report.endpoint_error_x2 = std::abs(last.x2);
  if (!(report.endpoint_error_x1 < tol) || !(report.endpoint_error_x2 < tol)) {
    std::ostringstream msg;
    msg << "endpoint (" << last.x1 << ", " << last.x2 << ") misses ("
        << spec.gamma() << ", 0) by more than " << tol;
    report.violations.push_back(msg.str());
  }

  bool bounds_ok = true;
  bool positive = true;
  for (const auto& smp : traj.samples) {
    if (smp.u < -spec.v1() || smp.u > spec.v2()) {
      if (bounds_ok) {
        std::ostringstream msg;
        msg << "control " << smp.u << " at t = " << smp.t << " outside ["
            << -spec.v1() << ", " << spec.v2() << "]";
        report.violations.push_back(msg.str());
      }
      bounds_ok = false;
    }
    if (!(smp.x1 > 0.0)) {
      if (positive) {
        std::ostringstream msg;
        msg << "x1 = " << smp.x1 << " at t = " << smp.t;
        report.violations.push_back(msg.str());
      }
      positive = false;
    }
  }

  // Sample k's u governs (t_k, t_{k+1}); a run of equal u therefore spans
  // samples [first, end] inclusive of the closing sample.
  if (positive) {
    std::size_t first = 0;
    while (first + 1 < traj.samples.size()) {
      const double u = traj.samples[first].u;
      const double c0 = segment_invariant(
          {traj.samples[first].x1, traj.samples[first].x2}, u);
      std::size_t k = first;
      while (k + 1 < traj.samples.size()) {
        const auto& next = traj.samples[k + 1];
        const double c = segment_invariant({next.x1, next.x2}, u);
        report.max_invariant_drift =
            std::max(report.max_invariant_drift,
                     std::abs(c - c0) / std::max(1.0, std::abs(c0)));
        ++k;
        if (next.u != u) break;
      }
      first = k;
    }
  }

  report.feasible = report.violations.empty();
  return report;
}

}  // namespace trapcool
