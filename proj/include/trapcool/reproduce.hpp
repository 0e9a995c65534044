#pragma once

// Named reproduction cases. Each one recomputes a headline number and
// compares it with its reference value.

#include <iosfwd>
#include <string>
#include <vector>

namespace trapcool {

struct CaseResult {
  std::string id;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string source;  ///< "published" or "computed"
  std::string detail;  ///< extra measurements, human readable
  bool passed = false;
};

/// fig3-crossing, opt-crossing, fig7c-argmin, fig7d-crossing, fig8, fig9,
/// runge.
const std::vector<std::string>& reproduce_case_ids();

/// Throws InvalidSpecError for an unknown id.
CaseResult reproduce(const std::string& id);

/// One line: id, measured, expected (source), tolerance, PASS/FAIL.
void print_case(std::ostream& os, const CaseResult& r);

}  // namespace trapcool
