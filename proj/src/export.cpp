#include "trapcool/export.hpp"

#include <cstdio>
#include <ostream>

#include "trapcool/errors.hpp"

namespace trapcool {

using nlohmann::json;

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_schedule_csv(std::ostream& os, const Schedule& plan) {
  os << "segment_index,duration,u\n";
  for (std::size_t i = 0; i < plan.segments.size(); ++i) {
    const Segment& s = plan.segments[i];
    os << i << ',' << format_number(s.duration) << ',' << format_number(s.u)
       << '\n';
  }
}

json plan_to_json(const ProblemSpec& spec, const std::string& strategy,
                  const Schedule& plan, const std::vector<double>& betas) {
  json segs = json::array();
  for (const Segment& s : plan.segments) {
    segs.push_back({{"duration", s.duration}, {"u", s.u}});
  }
  json j = {{"spec", spec_to_json(spec)},
            {"strategy", strategy},
            {"total_time", plan.total_time()},
            {"switchings", plan.switchings()},
            {"segments", segs}};
  if (!betas.empty()) j["betas"] = betas;
  return j;
}

PlanDocument plan_from_json(const json& j) {
  if (!j.is_object() || !j.contains("spec") || !j.contains("segments") ||
      !j["segments"].is_array()) {
    throw InvalidSpecError("plan document needs \"spec\" and \"segments\"");
  }
  ProblemSpec spec = spec_from_json(j["spec"]);
  std::vector<Segment> pieces;
  for (const json& s : j["segments"]) {
    if (!s.is_object() || !s.contains("duration") || !s.contains("u") ||
        !s["duration"].is_number() || !s["u"].is_number()) {
      throw InvalidSpecError("segment needs numeric \"duration\" and \"u\"");
    }
    pieces.push_back({s["duration"].get<double>(), s["u"].get<double>()});
  }
  Schedule plan;
  plan.segments = std::move(pieces);
  return {spec, plan};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x1,x2,u\n";
  for (const Sample& s : traj.samples) {
    os << format_number(s.t) << ',' << format_number(s.x1) << ','
       << format_number(s.x2) << ',' << format_number(s.u) << '\n';
  }
}

void write_collocation_csv(std::ostream& os, const CollocationSolution& sol) {
  os << "node,t_mapped,x1,x2,u\n";
  for (std::size_t i = 0; i < sol.x1.size(); ++i) {
    os << i << ',' << format_number(sol.node_time(i)) << ','
       << format_number(sol.x1[i]) << ',' << format_number(sol.x2[i]) << ','
       << format_number(sol.u[i]) << '\n';
  }
}

json collocation_sidecar(const CollocationSolution& sol) {
  json j = {{"t_f", sol.t_f},
            {"N", sol.grid.order},
            {"M", nullptr},
            {"residuals", {{"max_violation", sol.residual},
                           {"stationarity", sol.stationarity}}},
            {"converged", sol.converged},
            {"iterations", sol.iterations},
            {"seed", sol.seed}};
  if (sol.slope_limit) j["M"] = *sol.slope_limit;
  return j;
}

}  // namespace trapcool
