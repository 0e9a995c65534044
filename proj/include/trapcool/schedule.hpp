#pragma once

#include <vector>

#include "trapcool/core_model.hpp"

namespace trapcool {

/// Constant-control piece of a bang-bang plan.
struct Segment {
  double duration = 0.0;
  double u = 0.0;

  bool operator==(const Segment&) const = default;
};

/// Ordered bang-bang segments. The instantaneous boundary jumps (u = 1 at
/// t = 0, u = 1/gamma^4 at t_f) are implied and not stored.
struct Schedule {
  std::vector<Segment> segments;

  double total_time() const;
  std::size_t switchings() const {
    return segments.empty() ? 0 : segments.size() - 1;
  }
  /// Control acting at time t (left-continuous at switch instants past 0).
  double control_at(double t) const;

  bool operator==(const Schedule&) const = default;
};

/// Builds a schedule from raw pieces: drops zero-length pieces and merges
/// neighbours that carry the same control.
Schedule make_schedule(const std::vector<Segment>& pieces);

/// Throws PreconditionError unless every segment has positive duration, a
/// control in {-v1, v2} and differs from its neighbour.
void validate_schedule(const Schedule& plan, const ProblemSpec& spec);

}  // namespace trapcool
