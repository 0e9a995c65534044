#pragma once

// CSV and JSON writers for schedules, trajectories and collocation results.
// CSV numbers use 17 significant digits so files round-trip exactly.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "trapcool/bangbang.hpp"
#include "trapcool/collocation.hpp"
#include "trapcool/schedule.hpp"
#include "trapcool/simulator.hpp"

namespace trapcool {

/// printf("%.17g").
std::string format_number(double x);

/// Header segment_index,duration,u.
void write_schedule_csv(std::ostream& os, const Schedule& plan);

/// {"spec", "strategy", "total_time", "switchings", "segments", ["betas"]}.
nlohmann::json plan_to_json(const ProblemSpec& spec, const std::string& strategy,
                            const Schedule& plan,
                            const std::vector<double>& betas = {});

/// Inverse of plan_to_json for the spec and segments. Throws
/// InvalidSpecError on malformed documents.
struct PlanDocument {
  ProblemSpec spec;
  Schedule schedule;
};
PlanDocument plan_from_json(const nlohmann::json& j);

/// Header t,x1,x2,u.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Header node,t_mapped,x1,x2,u.
void write_collocation_csv(std::ostream& os, const CollocationSolution& sol);

/// {"t_f", "N", "M", "residuals", "converged", "iterations", ...}. M is null
/// when unbounded.
nlohmann::json collocation_sidecar(const CollocationSolution& sol);

}  // namespace trapcool
