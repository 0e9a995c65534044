#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trapcool/bangbang.hpp"

namespace trapcool::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInfeasible = 2,
  kNotConverged = 3,
};

/// one | two-intuitive | two-optimal | multi:n | best:n
struct StrategyChoice {
  enum Kind { One, TwoIntuitive, TwoOptimal, Multi, Best } kind = Best;
  int n = 3;

  std::string name() const;
};

/// Throws InvalidSpecError on unknown names or n < 1.
StrategyChoice parse_strategy(const std::string& text);

/// start:stop:step. Points start + k step for k = 0, 1, ... while k step does
/// not exceed stop - start by more than half a step. Throws InvalidSpecError
/// on malformed input or step <= 0.
std::vector<double> parse_range(const std::string& text);

struct RunConfig {
  std::string command;
  std::optional<double> v1;
  std::optional<double> v2;
  std::optional<double> gamma;
  std::string strategy = "best:3";
  int N = 24;
  std::optional<double> M;  ///< unset = unbounded
  int steps = 50;
  std::string output_path;  ///< empty = standard output
  std::string format;       ///< csv or json; empty = command default
  int jobs = 1;
  int max_outer = 80;  ///< collocation solver outer iteration cap
  std::string v2_range;
  std::string strategies = "one,two-intuitive,two-optimal";
  std::string plan_path;
  std::string case_id = "all";
};

/// Reads a JSON document with the RunConfig field names ("command", "spec",
/// "strategy", "N", "M", "steps", "output_path", "format", "jobs",
/// "v2_range", "strategies", "plan", "case", "max_outer"). Unknown keys throw.
RunConfig config_from_json(const nlohmann::json& j);

/// Executes a parsed configuration.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (argv[0] is the program name) and executes.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace trapcool::cli
