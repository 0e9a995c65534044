#include <doctest.h>

#include <cmath>

#include "properties.hpp"
#include "trapcool/bangbang.hpp"
#include "trapcool/errors.hpp"
#include "trapcool/simulator.hpp"

using namespace trapcool;
using doctest::Approx;

TEST_SUITE("simulator") {

TEST_CASE("expulsive arc from rest matches the sinh closed form") {
  for (double v1 : {0.5, 1.0, 2.0}) {
    for (double t : {0.1, 1.0, 2.5}) {
      const State s = propagate_constant({1.0, 0.0}, -v1, t);
      const double sh = std::sinh(std::sqrt(v1) * t);
      CHECK(s.x1 == Approx(std::sqrt(1.0 + (v1 + 1.0) / v1 * sh * sh))
                        .epsilon(1e-13));
    }
  }
}

TEST_CASE("propagate_constant basics") {
  const State eq = propagate_constant({1.0, 0.0}, 1.0, 3.7);
  CHECK(eq.x1 == Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(eq.x2) < 1e-15);
  CHECK_THROWS_AS(propagate_constant({1.0, 0.0}, 1.0, 0.0), RangeError);
  CHECK_THROWS_AS(propagate_constant({1.0, 0.0}, 1.0, -1.0), RangeError);
  CHECK_THROWS_AS(propagate_constant({0.0, 0.0}, 1.0, 1.0), DomainError);

  // free flight: x1^2 = 1 + c t^2 with c = 1 from rest at x1 = 1
  const State free = propagate_constant({1.0, 0.0}, 0.0, 2.0);
  CHECK(free.x1 == Approx(std::sqrt(5.0)).epsilon(1e-15));
  // tiny |u| continuous with u = 0
  const State near = propagate_constant({1.3, -0.2}, 1e-14, 2.0);
  const State zero = propagate_constant({1.3, -0.2}, 0.0, 2.0);
  CHECK(near.x1 == Approx(zero.x1).epsilon(1e-12));
  CHECK(near.x2 == Approx(zero.x2).epsilon(1e-12));
}

TEST_CASE("quarter period under v2 = 8 reaches the inner apex") {
  // u x^4 - c x^2 + 1 = 0 with c = 9: smaller root x^2 = (9 - 7)/16
  const double q = M_PI / (2.0 * std::sqrt(8.0));
  const State apex = propagate_constant({1.0, 0.0}, 8.0, q);
  CHECK(apex.x1 == Approx(std::sqrt(0.125)).epsilon(1e-12));
  CHECK(std::abs(apex.x2) < 1e-12);
  // independent high-accuracy integration value
  CHECK(apex.x1 == Approx(0.353553391).epsilon(1e-8));
  const State rk =
      integrate(State{}, props::constant(8.0), q, 20000).final_state();
  CHECK(std::abs(rk.x1 - apex.x1) < 1e-9);
  CHECK(std::abs(rk.x2 - apex.x2) < 1e-9);
}

TEST_CASE("integrate contract") {
  const Trajectory tr = integrate(State{}, props::constant(1.0), 5.0, 100);
  CHECK(tr.samples.size() == 101);
  CHECK(tr.samples.front().t == 0.0);
  CHECK(tr.final_time() == Approx(5.0).epsilon(1e-15));
  for (const auto& s : tr.samples) {
    CHECK(std::abs(s.x1 - 1.0) < 1e-12);
    CHECK(std::abs(s.x2) < 1e-12);
  }
  CHECK_THROWS_AS(integrate(State{}, props::constant(1.0), 1.0, 99),
                  RangeError);
  CHECK_THROWS_AS(integrate(State{}, props::constant(1.0), 0.0, 100),
                  RangeError);
  // strongly confining start with inward speed collapses towards x1 = 0
  CHECK_THROWS_AS(integrate(State{1.0, -1e4}, props::constant(0.0), 1.0, 100),
                  SingularityError);
}

TEST_CASE("RK4 on a schedule matches the closed-form chain") {
  const auto spec = ProblemSpec::make(1.0, 3.0, 10.0);
  const Schedule plan = one_switch(spec);
  const State exact = simulate_schedule(spec, plan).final_state();
  const Control u = [&](double t) { return plan.control_at(t); };
  const State piecewise = integrate_schedule(plan, 20000).final_state();
  CHECK(std::abs(piecewise.x1 - exact.x1) < 1e-8);
  CHECK(std::abs(piecewise.x2 - exact.x2) < 1e-8);
  const State state_t = state_along(plan, plan.total_time());
  CHECK(std::abs(state_t.x1 - exact.x1) < 1e-12);
  // generic integrator with the discontinuity inside a step is first order
  const State generic =
      integrate(spec, u, plan.total_time(), 200000).final_state();
  CHECK(std::abs(generic.x1 - exact.x1) < 1e-4);
}

TEST_CASE("simulate_schedule on the one-switch plan") {
  const auto spec = ProblemSpec::make(1.0, 3.0, 10.0);
  const Schedule plan = one_switch(spec);
  const Trajectory tr = simulate_schedule(spec, plan);
  CHECK(tr.samples.size() >= 100);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) {
    CHECK(tr.samples[i].t > tr.samples[i - 1].t);
  }
  const State sw = state_along(plan, plan.segments[0].duration);
  CHECK(sw.x1 == Approx(meeting_point(spec)).epsilon(1e-12));
  const VerificationReport rep = verify(tr, spec, 1e-6);
  CHECK(rep.feasible);
  CHECK(rep.violations.empty());
  CHECK(rep.endpoint_error_x1 < 1e-6);
  CHECK(rep.endpoint_error_x2 < 1e-6);
  CHECK(rep.max_invariant_drift < 1e-10);
}

TEST_CASE("intuitive two-switch trajectory slingshots") {
  const auto spec = ProblemSpec::make(1.0, 8.0, 10.0);
  const Trajectory tr = simulate_schedule(spec, two_switch_intuitive(spec));
  double min_x1 = 1.0;
  std::size_t apex = 0;
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    if (tr.samples[i].x1 < min_x1) {
      min_x1 = tr.samples[i].x1;
      apex = i;
    }
  }
  CHECK(min_x1 < 1.0);
  double max_x2_after = 0.0;
  for (std::size_t i = apex; i < tr.samples.size(); ++i) {
    max_x2_after = std::max(max_x2_after, tr.samples[i].x2);
  }
  CHECK(max_x2_after > 0.0);
  CHECK(verify(tr, spec, 1e-6).feasible);
}

TEST_CASE("empty schedule at gamma = 1") {
  const auto spec = ProblemSpec::make(1.0, 3.0, 1.0);
  const Trajectory tr = simulate_schedule(spec, Schedule{});
  REQUIRE(tr.samples.size() == 1);
  CHECK(tr.samples[0].t == 0.0);
  CHECK(tr.samples[0].x1 == 1.0);
  CHECK(tr.samples[0].x2 == 0.0);
  CHECK(verify(tr, spec, 1e-12).feasible);
}

TEST_CASE("schedule helpers") {
  const Schedule s = make_schedule({{0.5, 8.0}, {0.0, -1.0}, {0.25, 8.0},
                                    {1.0, -1.0}});
  REQUIRE(s.segments.size() == 2);
  CHECK(s.segments[0].duration == 0.75);
  CHECK(s.switchings() == 1);
  CHECK(s.total_time() == 1.75);
  CHECK(s.control_at(0.0) == 8.0);
  CHECK(s.control_at(0.8) == -1.0);
  const auto spec = ProblemSpec::make(1.0, 8.0, 10.0);
  CHECK_NOTHROW(validate_schedule(s, spec));
  CHECK_THROWS_AS(validate_schedule(Schedule{{{1.0, 3.0}}}, spec),
                  PreconditionError);
  CHECK_THROWS_AS(validate_schedule(Schedule{{{1.0, 8.0}, {1.0, 8.0}}}, spec),
                  PreconditionError);
  CHECK_THROWS_AS(validate_schedule(Schedule{{{-1.0, 8.0}}}, spec),
                  PreconditionError);
  CHECK_THROWS_AS(simulate_schedule(spec, Schedule{{{1.0, 2.0}}}),
                  PreconditionError);
}

TEST_CASE("verify flags truncation and bound violations") {
  const auto spec = ProblemSpec::make(1.0, 3.0, 10.0);
  Trajectory tr = simulate_schedule(spec, one_switch(spec));

  Trajectory half = tr;
  half.samples.resize(tr.samples.size() / 2);
  const auto rep_half = verify(half, spec, 1e-6);
  CHECK_FALSE(rep_half.feasible);
  CHECK(rep_half.endpoint_error_x1 > 1e-3);
  CHECK(rep_half.violations.size() == 1);

  Trajectory bad = tr;
  bad.samples[3].u = spec.v2() + 0.1;
  const auto rep_bad = verify(bad, spec, 1e-6);
  CHECK_FALSE(rep_bad.feasible);
  bool saw_bound = false;
  for (const auto& v : rep_bad.violations) {
    saw_bound = saw_bound || v.find("outside") != std::string::npos;
  }
  CHECK(saw_bound);

  CHECK_FALSE(verify(Trajectory{}, spec, 1e-6).feasible);
}

TEST_CASE("time reversal") {
  for (const auto& r : props::random_segments(200, 1.0, 8.0, 7u)) {
    const State fwd = propagate_constant(r.s0, r.u, r.dt);
    const State back = propagate_constant({fwd.x1, -fwd.x2}, r.u, r.dt);
    CHECK(back.x1 == Approx(r.s0.x1).epsilon(1e-9));
    CHECK(std::abs(back.x2 + r.s0.x2) < 1e-9 * std::max(1.0, std::abs(r.s0.x2)));
  }
}

TEST_CASE("invariant conservation under RK4") {
  // h <= 7.5e-5; slingshot arcs with v2 = 8 need that to stay under 1e-9.
  const auto segs = props::random_segments(200, 1.0, 8.0, 11u);
  CHECK(props::invariant_drift(segs, 40000) < 1e-9);
}

TEST_CASE("closed form agrees with RK4 on random segments") {
  // 10^4 steps resolve every arc reachable with u in [-1, 3].
  const auto segs = props::random_segments(1000, 1.0, 3.0, 2024u);
  CHECK(props::closed_form_vs_rk4(segs, 10000) < 1e-8);
  // Deep slingshots with u up to 8 dip to x1 ~ 0.1 and need a finer step.
  const auto fast = props::random_segments(1000, 1.0, 8.0, 2024u);
  CHECK(props::closed_form_vs_rk4(fast, 40000) < 1e-8);
}

TEST_CASE("RK4 converges at fourth order") {
  CHECK(std::abs(props::rk4_invariant_slope() + 4.0) <= 0.3);
  CHECK(std::abs(props::rk4_endpoint_slope() + 4.0) <= 0.3);
}

}  // TEST_SUITE
