#include <doctest.h>

#include <cmath>

#include "trapcool/bangbang.hpp"
#include "trapcool/errors.hpp"
#include "trapcool/simulator.hpp"

using namespace trapcool;
using doctest::Approx;

namespace {

// Independent shooting values (high-order adaptive integration plus Newton
// on the switching times).
constexpr double kOneT1 = 2.50531209;
constexpr double kOneT2 = 0.30228878;
constexpr double kOneTotal = 2.8076008736488673;
constexpr double kMeeting = 8.66039837420889;
constexpr double kIntuitiveT2 = 1.90606622;
constexpr double kIntuitiveT3 = 0.12498574;
constexpr double kIntuitiveTotal = 2.5864123245761825;
constexpr double kOptimalT1 = 0.5363095696596459;
constexpr double kOptimalTotal = 2.585087922965024;

void check_reaches_target(const ProblemSpec& spec, const Schedule& plan) {
  const State end = simulate_schedule(spec, plan).final_state();
  CHECK(std::abs(end.x1 - spec.gamma()) < 1e-6);
  CHECK(std::abs(end.x2) < 1e-6);
}

}  // namespace

TEST_SUITE("bangbang") {

TEST_CASE("one switch at v1=1, v2=3, gamma=10") {
  const auto spec = ProblemSpec::make(1.0, 3.0, 10.0);
  const Schedule plan = one_switch(spec);
  REQUIRE(plan.segments.size() == 2);
  CHECK(plan.segments[0].u == -1.0);
  CHECK(plan.segments[1].u == 3.0);
  CHECK(plan.segments[0].duration == Approx(kOneT1).epsilon(1e-8));
  CHECK(plan.segments[1].duration == Approx(kOneT2).epsilon(1e-7));
  CHECK(std::abs(plan.total_time() - kOneTotal) < 1e-10);
  check_reaches_target(spec, plan);
}

TEST_CASE("one switch degenerates as gamma -> 1") {
  const Schedule near = one_switch(ProblemSpec::make(1.0, 3.0, 1.0 + 1e-9));
  CHECK(near.total_time() < 1e-3);
  CHECK(one_switch(ProblemSpec::make(1.0, 3.0, 1.0)).segments.empty());
}

TEST_CASE("one switch limit for large v2 is asinh(sqrt(49.5))") {
  const double limit = std::asinh(std::sqrt(99.0 / 2.0));
  CHECK(limit == Approx(2.649146).epsilon(1e-6));
  const double t = one_switch(ProblemSpec::make(1.0, 1e10, 10.0)).total_time();
  CHECK(std::abs(t - limit) < 1e-4);
}

TEST_CASE("meeting point") {
  CHECK(meeting_point(ProblemSpec::make(1.0, 3.0, 10.0)) ==
        Approx(kMeeting).epsilon(1e-12));
  CHECK(meeting_point(ProblemSpec::make(2.0, 5.0, 1.0)) ==
        Approx(1.0).epsilon(1e-15));
  const double g = 1e4;
  const double xb = meeting_point(ProblemSpec::make(2.0, 2.0, g));
  CHECK(xb / (g * std::sqrt(0.5)) == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("intuitive two switch at v1=1, v2=8, gamma=10") {
  const auto spec = ProblemSpec::make(1.0, 8.0, 10.0);
  const Schedule plan = two_switch_intuitive(spec);
  REQUIRE(plan.segments.size() == 3);
  CHECK(plan.segments[0].duration ==
        Approx(M_PI / (2.0 * std::sqrt(8.0))).epsilon(1e-15));
  CHECK(plan.segments[0].u == 8.0);
  CHECK(plan.segments[1].u == -1.0);
  CHECK(plan.segments[1].duration == Approx(kIntuitiveT2).epsilon(1e-7));
  CHECK(plan.segments[2].duration == Approx(kIntuitiveT3).epsilon(1e-6));
  CHECK(std::abs(plan.total_time() - kIntuitiveTotal) < 1e-10);
  check_reaches_target(spec, plan);
}

TEST_CASE("intuitive two switch vanishes as v2 grows") {
  double prev = two_switch_intuitive(ProblemSpec::make(1, 1e2, 10))
                    .total_time();
  for (double v2 : {1e4, 1e6, 1e8}) {
    const double t =
        two_switch_intuitive(ProblemSpec::make(1, v2, 10)).total_time();
    CHECK(t < prev);
    prev = t;
  }
  CHECK(prev < 2e-3);
}

TEST_CASE("intuitive two switch rejects gamma = 1") {
  try {
    two_switch_intuitive(ProblemSpec::make(1.0, 8.0, 1.0));
    FAIL("expected InfeasibleSpecError");
  } catch (const InfeasibleSpecError& e) {
    CHECK(e.planner() == "two_switch_intuitive");
    CHECK(e.inequality() == "gamma > 1");
  }
}

TEST_CASE("optimal two switch at v2=8 jumps before the apex") {
  const auto spec = ProblemSpec::make(1.0, 8.0, 10.0);
  const TwoSwitchSearch s = two_switch_search(spec);
  CHECK(s.t1 == Approx(kOptimalT1).epsilon(1e-6));
  CHECK(std::abs(s.total - kOptimalTotal) < 1e-10);
  CHECK(s.t1 < M_PI / (2.0 * std::sqrt(8.0)));
  const Schedule plan = two_switch_optimal(spec);
  CHECK(plan.total_time() < kIntuitiveTotal);
  CHECK(plan.total_time() == Approx(s.total).epsilon(1e-14));
  check_reaches_target(spec, plan);
}

TEST_CASE("optimal two switch collapses to one switch at v2=3") {
  const auto spec = ProblemSpec::make(1.0, 3.0, 10.0);
  const TwoSwitchSearch s = two_switch_search(spec);
  CHECK(s.t1 == 0.0);
  CHECK(s.interior_total > s.total);
  CHECK(two_switch_optimal(spec) == one_switch(spec));
}

TEST_CASE("optimal two switch never loses to its two references") {
  for (double v2 = 1.5; v2 <= 60.0; v2 *= 1.37) {
    const auto spec = ProblemSpec::make(1.0, v2, 10.0);
    const double opt = two_switch_optimal(spec).total_time();
    CHECK(opt <= one_switch(spec).total_time() + 1e-8);
    CHECK(opt <= two_switch_intuitive(spec).total_time() + 1e-8);
  }
}

TEST_CASE("t1 = 0 reproduces the one-switch geometry") {
  const auto spec = ProblemSpec::make(1.0, 5.0, 7.0);
  const TwoSwitchTimes t = two_switch_times(spec, 0.0);
  REQUIRE(t.feasible);
  const Schedule one = one_switch(spec);
  CHECK(t.expulsive_arc == Approx(one.segments[0].duration).epsilon(1e-12));
  CHECK(t.final_arc == Approx(one.segments[1].duration).epsilon(1e-10));
}

TEST_CASE("segment time") {
  const auto spec = ProblemSpec::make(1.0, 8.0, 10.0);
  CHECK(std::abs(segment_time(1.0, 10.0, spec) -
                 two_switch_intuitive(spec).total_time()) < 1e-10);
  // arc matching between apexes agrees with the closed form
  const double q = M_PI / (2.0 * std::sqrt(8.0));
  const TwoSwitchTimes m = arc_matching_times(spec, 2.0, 5.0, q);
  REQUIRE(m.feasible);
  CHECK(m.total() == Approx(segment_time(2.0, 5.0, spec)).epsilon(1e-10));

  const auto wide = ProblemSpec::make(1.0, 1e12, 10.0);
  for (auto [a, b] : {std::pair{1.0, 10.0}, {1.0, 3.0}, {2.0, 7.0}}) {
    CHECK(segment_time(a, b, wide) ==
          Approx(segment_time_limit(a, b, 1e12)).epsilon(1e-5));
  }
  CHECK_THROWS_AS(segment_time(2.0, 2.0, spec), PreconditionError);
  CHECK_THROWS_AS(segment_time(3.0, 2.0, spec), PreconditionError);
  CHECK_THROWS_AS(segment_time(0.5, 2.0, spec), PreconditionError);
}

TEST_CASE("multi switch") {
  const auto spec = ProblemSpec::make(1.0, 8.0, 10.0);
  const MultiSwitchPlan one = multi_switch(spec, {1.0, 10.0});
  CHECK(one.n == 1);
  const Schedule ref = two_switch_intuitive(spec);
  REQUIRE(one.schedule.segments.size() == ref.segments.size());
  for (std::size_t i = 0; i < ref.segments.size(); ++i) {
    CHECK(one.schedule.segments[i].u == ref.segments[i].u);
    CHECK(one.schedule.segments[i].duration ==
          Approx(ref.segments[i].duration).epsilon(1e-12));
  }

  const MultiSwitchPlan two = multi_switch(spec, {1.0, std::sqrt(10.0), 10.0});
  CHECK(two.schedule.switchings() == 4);
  CHECK(two.total_time ==
        Approx(segment_time(1.0, std::sqrt(10.0), spec) +
               segment_time(std::sqrt(10.0), 10.0, spec))
            .epsilon(1e-14));
  check_reaches_target(spec, two.schedule);

  const double v2 = 1e8;
  const auto big = ProblemSpec::make(1.0, v2, 10.0);
  const double expected =
      2.0 / std::sqrt(v2) *
      (M_PI / 2.0 + 3.0 + std::asin(1.0 / std::sqrt(10.0)));
  CHECK(multi_switch(big, {1.0, std::sqrt(10.0), 10.0}).total_time ==
        Approx(expected).epsilon(1e-4));

  CHECK_THROWS_AS(multi_switch(spec, {1.0, 5.0, 3.0, 10.0}), PreconditionError);
  CHECK_THROWS_AS(multi_switch(spec, {1.0, 5.0, 5.0, 10.0}), PreconditionError);
  CHECK_THROWS_AS(multi_switch(spec, {1.5, 10.0}), PreconditionError);
  CHECK_THROWS_AS(multi_switch(spec, {1.0, 9.0}), PreconditionError);
  CHECK_THROWS_AS(multi_switch(spec, {10.0}), PreconditionError);
}

TEST_CASE("geometric betas") {
  const auto b2 = optimal_betas_asymptotic(10.0, 2);
  REQUIRE(b2.size() == 3);
  CHECK(b2[0] == 1.0);
  CHECK(b2[1] == Approx(std::sqrt(10.0)).epsilon(1e-15));
  CHECK(b2[2] == 10.0);
  CHECK(optimal_betas_asymptotic(3.3, 1) == std::vector<double>{1.0, 3.3});
  const auto b4 = optimal_betas_asymptotic(10.0, 4);
  for (int i = 0; i <= 4; ++i) {
    CHECK(b4[i] == Approx(std::pow(10.0, i / 4.0)).epsilon(1e-15));
  }
}

TEST_CASE("geometric betas are stationary for the limit cost") {
  for (int n : {2, 3, 4}) {
    const auto betas = optimal_betas_asymptotic(10.0, n);
    auto cost = [](const std::vector<double>& b) {
      double s = 0.0;
      for (std::size_t i = 1; i < b.size(); ++i) {
        s += segment_time_limit(b[i - 1], b[i], 1.0);
      }
      return s;
    };
    const double base = cost(betas);
    for (int i = 1; i < n; ++i) {
      for (double f : {0.99, 1.01}) {
        auto moved = betas;
        moved[i] *= f;
        CHECK(cost(moved) > base);
      }
    }
    // equal traversal time per segment
    for (int i = 1; i <= n; ++i) {
      CHECK(segment_time_limit(betas[i - 1], betas[i], 1.0) ==
            Approx(base / n).epsilon(1e-12));
    }
  }
}

TEST_CASE("asymptotic minimum time") {
  CHECK(asymptotic_min_time(10.0, 2, 1.0) ==
        Approx(2.0 * (M_PI / 2.0 + 3.0 + std::asin(1.0 / std::sqrt(10.0))))
            .epsilon(1e-14));
  CHECK(asymptotic_min_time(10.0, 2, 1.0) == Approx(9.785).epsilon(1e-4));
  CHECK(asymptotic_min_time(10.0, 2, 4.0) ==
        Approx(asymptotic_min_time(10.0, 2, 1.0) / 2.0).epsilon(1e-15));

  auto argmin = [](double gamma) {
    int best = 1;
    for (int n = 2; n <= 10; ++n) {
      if (asymptotic_min_time(gamma, n, 1.0) <
          asymptotic_min_time(gamma, best, 1.0)) {
        best = n;
      }
    }
    return best;
  };
  CHECK(argmin(10.0) == 2);
  CHECK(argmin(50.0) > argmin(10.0));
}

TEST_CASE("best plan") {
  const MultiSwitchPlan fifty = best_plan(ProblemSpec::make(1.0, 50.0, 10.0), 3);
  CHECK(fifty.strategy == Strategy::MultiSwitch);
  CHECK(fifty.n == 2);
  CHECK(fifty.schedule.switchings() == 4);
  CHECK(fifty.total_time <
        two_switch_optimal(ProblemSpec::make(1.0, 50.0, 10.0)).total_time());

  const MultiSwitchPlan three = best_plan(ProblemSpec::make(1.0, 3.0, 10.0), 3);
  CHECK(three.strategy == Strategy::OneSwitch);
  CHECK(three.total_time == Approx(kOneTotal).epsilon(1e-12));

  const auto twenty = ProblemSpec::make(1.0, 20.0, 10.0);
  double prev = best_plan(twenty, 1).total_time;
  for (int n = 2; n <= 4; ++n) {
    const double t = best_plan(twenty, n).total_time;
    CHECK(t <= prev);
    prev = t;
  }
  CHECK(best_plan(ProblemSpec::make(1.0, 3.0, 1.0), 3).total_time == 0.0);
  CHECK_THROWS_AS(best_plan(twenty, 0), PreconditionError);
}

TEST_CASE("refined betas beat the geometric ones at finite v2") {
  const auto spec = ProblemSpec::make(1.0, 50.0, 10.0);
  const auto refined = refine_betas(spec, 2);
  const auto geometric = optimal_betas_asymptotic(10.0, 2);
  CHECK(multi_switch(spec, refined).total_time <=
        multi_switch(spec, geometric).total_time);
  CHECK(refined[1] == Approx(geometric[1]).epsilon(0.1));
}

TEST_CASE("every planner output reaches the target") {
  for (double v2 : {1.0, 2.0, 3.0, 8.0, 20.0, 50.0}) {
    for (double g : {1.5, 10.0, 30.0}) {
      const auto spec = ProblemSpec::make(1.3, v2, g);
      check_reaches_target(spec, one_switch(spec));
      check_reaches_target(spec, two_switch_intuitive(spec));
      check_reaches_target(spec, two_switch_optimal(spec));
      check_reaches_target(spec, best_plan(spec, 3).schedule);
    }
  }
}

TEST_CASE("one switch monotone in v2 and gamma") {
  double prev = one_switch(ProblemSpec::make(1.0, 1.0, 10.0)).total_time();
  for (double v2 = 1.25; v2 < 100.0; v2 *= 1.25) {
    const double t = one_switch(ProblemSpec::make(1.0, v2, 10.0)).total_time();
    CHECK(t < prev);
    prev = t;
  }
  prev = 0.0;
  for (double g = 1.1; g < 100.0; g *= 1.3) {
    const double t = one_switch(ProblemSpec::make(1.0, 3.0, g)).total_time();
    CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("strategy crossings") {
  const PlannerChoice one{Strategy::OneSwitch, 1, false};
  const PlannerChoice intuitive{Strategy::TwoSwitchIntuitive, 1, false};
  const PlannerChoice optimal{Strategy::TwoSwitchOptimal, 1, false};
  const PlannerChoice two_seg{Strategy::MultiSwitch, 1, false};
  const PlannerChoice four{Strategy::MultiSwitch, 2, false};

  const double v_a = crossing_threshold(1.0, 10.0, one, intuitive, 3.0, 20.0);
  CHECK(v_a == Approx(6.786030).epsilon(1e-6));
  const auto at = ProblemSpec::make(1.0, v_a, 10.0);
  CHECK(std::abs(planner_time(one, at) - planner_time(intuitive, at)) < 1e-6);

  const double v_b = crossing_threshold(1.0, 10.0, one, optimal, 3.0, 20.0);
  CHECK(v_b == Approx(6.76570).epsilon(1e-5));
  CHECK(two_switch_search(ProblemSpec::make(1.0, v_b - 1e-3, 10.0)).t1 == 0.0);
  CHECK(two_switch_search(ProblemSpec::make(1.0, v_b + 1e-3, 10.0)).t1 > 0.0);

  const double v_c = crossing_threshold(1.0, 10.0, two_seg, four, 10.0, 100.0);
  CHECK(v_c == Approx(43.31808).epsilon(1e-6));

  CHECK_THROWS_AS(crossing_threshold(1.0, 10.0, one, intuitive, 8.0, 20.0),
                  BracketError);
}

TEST_CASE("planner time is infinite when infeasible") {
  const auto spec = ProblemSpec::make(1.0, 8.0, 1.0);
  CHECK(std::isinf(planner_time({Strategy::TwoSwitchIntuitive, 1, false}, spec)));
  CHECK(to_string(Strategy::TwoSwitchOptimal) == "two-optimal");
}

}  // TEST_SUITE
