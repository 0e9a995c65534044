#include "trapcool/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <sstream>

#include "trapcool/collocation.hpp"
#include "trapcool/errors.hpp"
#include "trapcool/export.hpp"
#include "trapcool/legendre.hpp"
#include "trapcool/reproduce.hpp"
#include "trapcool/simulator.hpp"

namespace trapcool::cli {

using nlohmann::json;

namespace {

constexpr double kVerifyTol = 1e-6;

// Collocation result that did not meet the solver tolerances.
struct NotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ProblemSpec require_spec(const RunConfig& c) {
  if (!c.v1 || !c.v2 || !c.gamma) {
    throw InvalidSpecError(c.command + " needs --v1, --v2 and --gamma");
  }
  return ProblemSpec::make(*c.v1, *c.v2, *c.gamma);
}

std::string require_format(const RunConfig& c, const std::string& fallback) {
  const std::string f = c.format.empty() ? fallback : c.format;
  if (f != "csv" && f != "json") {
    throw InvalidSpecError("--format must be csv or json");
  }
  return f;
}

// Runs `body` against the requested output stream.
template <typename F>
void with_output(const RunConfig& c, std::ostream& out, F&& body) {
  if (c.output_path.empty() || c.output_path == "-") {
    body(out);
    return;
  }
  std::ofstream file(c.output_path);
  if (!file) throw InvalidSpecError("cannot open " + c.output_path);
  body(file);
}

struct PlanOutcome {
  std::string strategy;
  Schedule schedule;
  std::vector<double> betas;
};

PlanOutcome make_plan(const ProblemSpec& spec, const StrategyChoice& s) {
  switch (s.kind) {
    case StrategyChoice::One:
      return {s.name(), one_switch(spec), {}};
    case StrategyChoice::TwoIntuitive:
      return {s.name(), two_switch_intuitive(spec), {}};
    case StrategyChoice::TwoOptimal:
      return {s.name(), two_switch_optimal(spec), {}};
    case StrategyChoice::Multi: {
      if (spec.gamma() == 1.0) return {s.name(), Schedule{}, {}};
      MultiSwitchPlan p = multi_switch(spec, refine_betas(spec, s.n));
      return {s.name(), p.schedule, p.betas};
    }
    case StrategyChoice::Best: {
      MultiSwitchPlan p = best_plan(spec, s.n);
      std::string name = to_string(p.strategy);
      if (p.strategy == Strategy::MultiSwitch) {
        name += ":" + std::to_string(p.n);
      }
      return {name, p.schedule, p.betas};
    }
  }
  return {};
}

double strategy_time(const ProblemSpec& spec, const StrategyChoice& s) {
  try {
    switch (s.kind) {
      case StrategyChoice::One:
        return planner_time({Strategy::OneSwitch, 1, false}, spec);
      case StrategyChoice::TwoIntuitive:
        return planner_time({Strategy::TwoSwitchIntuitive, 1, false}, spec);
      case StrategyChoice::TwoOptimal:
        return planner_time({Strategy::TwoSwitchOptimal, 1, false}, spec);
      case StrategyChoice::Multi:
        return planner_time({Strategy::MultiSwitch, s.n, true}, spec);
      case StrategyChoice::Best:
        return best_plan(spec, s.n).total_time;
    }
  } catch (const InfeasibleSpecError&) {
  }
  return std::numeric_limits<double>::infinity();
}

int cmd_plan(const RunConfig& c, std::ostream& out) {
  const ProblemSpec spec = require_spec(c);
  const std::string fmt = require_format(c, "json");
  const PlanOutcome p = make_plan(spec, parse_strategy(c.strategy));
  with_output(c, out, [&](std::ostream& os) {
    if (fmt == "csv") {
      write_schedule_csv(os, p.schedule);
    } else {
      os << plan_to_json(spec, p.strategy, p.schedule, p.betas).dump(2)
         << '\n';
    }
  });
  return kOk;
}

PlanDocument load_plan(const std::string& path) {
  json j;
  try {
    if (path == "-") {
      j = json::parse(std::cin);
    } else {
      std::ifstream in(path);
      if (!in) throw InvalidSpecError("cannot open " + path);
      j = json::parse(in);
    }
  } catch (const json::parse_error& e) {
    throw InvalidSpecError(std::string("plan is not valid JSON: ") + e.what());
  }
  return plan_from_json(j);
}

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const std::string fmt = require_format(c, "csv");
  if (c.steps < 1) throw InvalidSpecError("--steps must be >= 1");
  PlanDocument doc = c.plan_path.empty()
                         ? PlanDocument{require_spec(c), {}}
                         : load_plan(c.plan_path);
  if (c.plan_path.empty()) {
    doc.schedule = make_plan(doc.spec, parse_strategy(c.strategy)).schedule;
  }
  const Trajectory traj = simulate_schedule(doc.spec, doc.schedule, c.steps);
  const VerificationReport rep = verify(traj, doc.spec, kVerifyTol);

  with_output(c, out, [&](std::ostream& os) {
    if (fmt == "csv") {
      write_trajectory_csv(os, traj);
      return;
    }
    json samples = json::array();
    for (const Sample& s : traj.samples) {
      samples.push_back({s.t, s.x1, s.x2, s.u});
    }
    os << json{{"spec", spec_to_json(doc.spec)},
               {"columns", {"t", "x1", "x2", "u"}},
               {"samples", samples},
               {"verification",
                {{"endpoint_error_x1", rep.endpoint_error_x1},
                 {"endpoint_error_x2", rep.endpoint_error_x2},
                 {"max_invariant_drift", rep.max_invariant_drift},
                 {"feasible", rep.feasible}}}}
              .dump(2)
       << '\n';
  });

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "endpoint error x1=%.3g x2=%.3g, invariant drift %.3g, %s\n",
                rep.endpoint_error_x1, rep.endpoint_error_x2,
                rep.max_invariant_drift, rep.feasible ? "ok" : "FAILED");
  err << buf;
  for (const auto& v : rep.violations) err << "  " << v << '\n';
  return rep.feasible ? kOk : kInfeasible;
}

int cmd_collocate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ProblemSpec spec = require_spec(c);
  const std::string fmt = require_format(c, "csv");
  if (c.max_outer < 1) throw InvalidSpecError("--max-outer must be >= 1");
  CollocationProblem problem(spec, c.N, c.M);
  CollocationOptions opts;
  opts.parallel = c.jobs > 1;
  opts.solver.max_outer = c.max_outer;
  const CollocationSolution sol = solve_multistart(problem, opts);
  const json side = collocation_sidecar(sol);

  const bool to_file = !c.output_path.empty() && c.output_path != "-";
  with_output(c, out, [&](std::ostream& os) {
    if (fmt == "csv") {
      write_collocation_csv(os, sol);
      return;
    }
    json j = side;
    json nodes = json::array();
    for (std::size_t i = 0; i < sol.x1.size(); ++i) {
      nodes.push_back({sol.node_time(i), sol.x1[i], sol.x2[i], sol.u[i]});
    }
    j["columns"] = {"t_mapped", "x1", "x2", "u"};
    j["nodes"] = nodes;
    os << j.dump(2) << '\n';
  });
  if (fmt == "csv") {
    if (to_file) {
      std::ofstream sidecar(c.output_path + ".json");
      sidecar << side.dump(2) << '\n';
    } else {
      err << side.dump() << '\n';
    }
  }
  if (!sol.converged) {
    throw NotConverged("collocation did not converge (max violation " +
                       format_number(sol.residual) + ")");
  }
  return kOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  if (!c.v1 || !c.gamma) throw InvalidSpecError("sweep needs --v1 and --gamma");
  if (c.v2_range.empty()) throw InvalidSpecError("sweep needs --v2-range");
  const std::string fmt = require_format(c, "csv");
  const std::vector<double> grid = parse_range(c.v2_range);

  std::vector<StrategyChoice> strategies;
  std::stringstream list(c.strategies);
  for (std::string item; std::getline(list, item, ',');) {
    strategies.push_back(parse_strategy(item));
  }
  if (strategies.empty()) throw InvalidSpecError("--strategies is empty");
  // Validates v1 and gamma once before fanning out.
  ProblemSpec::make(*c.v1, std::max(grid.front(), 1.0), *c.gamma);

  std::vector<std::vector<double>> rows(grid.size());
  auto fill = [&](std::size_t i) {
    const ProblemSpec spec = ProblemSpec::make(*c.v1, grid[i], *c.gamma);
    for (const auto& s : strategies) rows[i].push_back(strategy_time(spec, s));
  };
  const std::size_t jobs = static_cast<std::size_t>(std::max(c.jobs, 1));
  std::vector<std::future<void>> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < grid.size(); i += jobs) fill(i);
    }));
  }
  for (auto& f : workers) f.get();

  with_output(c, out, [&](std::ostream& os) {
    if (fmt == "csv") {
      os << "v2";
      for (const auto& s : strategies) os << ',' << s.name();
      os << '\n';
      for (std::size_t i = 0; i < grid.size(); ++i) {
        os << format_number(grid[i]);
        for (double t : rows[i]) os << ',' << format_number(t);
        os << '\n';
      }
      return;
    }
    json arr = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      json row = {{"v2", grid[i]}};
      for (std::size_t k = 0; k < strategies.size(); ++k) {
        const double t = rows[i][k];
        row[strategies[k].name()] = std::isfinite(t) ? json(t) : json(nullptr);
      }
      arr.push_back(row);
    }
    os << json{{"v1", *c.v1}, {"gamma", *c.gamma}, {"rows", arr}}.dump(2)
       << '\n';
  });
  return kOk;
}

int cmd_runge(const RunConfig& c, std::ostream& out) {
  const std::string fmt = require_format(c, "csv");
  if (c.N < 4) throw RangeError("runge-demo needs --N >= 4");
  std::vector<RungeRow> rows;
  for (int n = 4; n <= c.N; n += 2) rows.push_back(runge_demo(n));
  if (c.N % 2 == 1) rows.push_back(runge_demo(c.N));

  with_output(c, out, [&](std::ostream& os) {
    if (fmt == "csv") {
      os << "N,max_error_uniform,max_error_lgl,ratio\n";
      for (const auto& r : rows) {
        os << r.n << ',' << format_number(r.max_error_uniform) << ','
           << format_number(r.max_error_lgl) << ','
           << format_number(r.max_error_uniform / r.max_error_lgl) << '\n';
      }
      return;
    }
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"N", r.n},
                     {"max_error_uniform", r.max_error_uniform},
                     {"max_error_lgl", r.max_error_lgl}});
    }
    os << arr.dump(2) << '\n';
  });
  return kOk;
}

int cmd_reproduce(const RunConfig& c, std::ostream& out) {
  std::vector<std::string> ids;
  if (c.case_id == "all") {
    ids = reproduce_case_ids();
  } else {
    bool known = false;
    for (const auto& id : reproduce_case_ids()) known = known || id == c.case_id;
    if (!known) throw InvalidSpecError("unknown case id: " + c.case_id);
    ids.push_back(c.case_id);
  }
  with_output(c, out, [&](std::ostream& os) {
    for (const auto& id : ids) print_case(os, reproduce(id));
  });
  return kOk;
}

std::optional<double> parse_slope(const std::string& text) {
  if (text.empty() || text == "inf" || text == "unbounded") return std::nullopt;
  try {
    std::size_t used = 0;
    const double m = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    if (std::isinf(m)) return std::nullopt;
    return m;
  } catch (const std::logic_error&) {
    throw InvalidSpecError("--M must be a number or 'inf'");
  }
}

}  // namespace

std::string StrategyChoice::name() const {
  switch (kind) {
    case One:
      return "one";
    case TwoIntuitive:
      return "two-intuitive";
    case TwoOptimal:
      return "two-optimal";
    case Multi:
      return "multi:" + std::to_string(n);
    case Best:
      return "best:" + std::to_string(n);
  }
  return {};
}

StrategyChoice parse_strategy(const std::string& text) {
  if (text == "one") return {StrategyChoice::One, 1};
  if (text == "two-intuitive") return {StrategyChoice::TwoIntuitive, 1};
  if (text == "two-optimal") return {StrategyChoice::TwoOptimal, 1};
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    const std::string tail = text.substr(colon + 1);
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(tail, &used);
      if (used != tail.size()) n = 0;
    } catch (const std::logic_error&) {
      n = 0;
    }
    if (n >= 1 && head == "multi") return {StrategyChoice::Multi, n};
    if (n >= 1 && head == "best") return {StrategyChoice::Best, n};
  }
  throw InvalidSpecError("unknown strategy '" + text +
                         "' (one, two-intuitive, two-optimal, multi:n, best:n)");
}

std::vector<double> parse_range(const std::string& text) {
  double v[3];
  std::stringstream ss(text);
  std::string part;
  int k = 0;
  try {
    while (std::getline(ss, part, ':')) {
      if (k == 3) throw std::invalid_argument(text);
      std::size_t used = 0;
      v[k++] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw InvalidSpecError("range must be start:stop:step, got '" + text + "'");
  }
  if (k != 3) {
    throw InvalidSpecError("range must be start:stop:step, got '" + text + "'");
  }
  const auto [start, stop, step] = std::tuple{v[0], v[1], v[2]};
  if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop) ||
      stop < start) {
    throw InvalidSpecError("range needs finite start <= stop and step > 0");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((stop - start) / step + 0.5)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + step * i;
  return out;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidSpecError("config must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "command") {
        c.command = value.get<std::string>();
      } else if (key == "spec") {
        const ProblemSpec spec = spec_from_json(value);
        c.v1 = spec.v1();
        c.v2 = spec.v2();
        c.gamma = spec.gamma();
      } else if (key == "v1") {
        c.v1 = value.get<double>();
      } else if (key == "v2") {
        c.v2 = value.get<double>();
      } else if (key == "gamma") {
        c.gamma = value.get<double>();
      } else if (key == "strategy") {
        c.strategy = value.get<std::string>();
      } else if (key == "N") {
        c.N = value.get<int>();
      } else if (key == "M") {
        if (!value.is_null()) c.M = value.get<double>();
      } else if (key == "steps") {
        c.steps = value.get<int>();
      } else if (key == "output_path") {
        c.output_path = value.get<std::string>();
      } else if (key == "format") {
        c.format = value.get<std::string>();
      } else if (key == "jobs") {
        c.jobs = value.get<int>();
      } else if (key == "v2_range") {
        c.v2_range = value.get<std::string>();
      } else if (key == "strategies") {
        c.strategies = value.get<std::string>();
      } else if (key == "plan") {
        c.plan_path = value.get<std::string>();
      } else if (key == "max_outer") {
        c.max_outer = value.get<int>();
      } else if (key == "case") {
        c.case_id = value.get<std::string>();
      } else {
        throw InvalidSpecError("unknown config key \"" + key + "\"");
      }
    } catch (const json::type_error&) {
      throw InvalidSpecError("config key \"" + key + "\" has the wrong type");
    }
  }
  return c;
}

int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == "plan") return cmd_plan(c, out);
    if (c.command == "simulate") return cmd_simulate(c, out, err);
    if (c.command == "collocate") return cmd_collocate(c, out, err);
    if (c.command == "sweep") return cmd_sweep(c, out);
    if (c.command == "runge-demo") return cmd_runge(c, out);
    if (c.command == "reproduce") return cmd_reproduce(c, out);
    err << "error: unknown command '" << c.command << "'\n";
    return kUsage;
  } catch (const InfeasibleSpecError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const NotConverged& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  }
}

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Time-optimal frictionless trap expansion"};
  app.require_subcommand(0, 1);

  RunConfig c;
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON run configuration (replaces the subcommand)");

  double v1 = 0, v2 = 0, gamma = 0;
  std::string slope;
  auto add_spec = [&](CLI::App* sub, bool with_v2) {
    sub->add_option("--v1", v1, "expulsive bound, u >= -v1");
    if (with_v2) sub->add_option("--v2", v2, "confining bound, u <= v2");
    sub->add_option("--gamma", gamma, "final width ratio");
  };
  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--out", c.output_path, "output file (default stdout)");
    sub->add_option("--format", c.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto* plan = app.add_subcommand("plan", "bang-bang schedule as JSON or CSV");
  add_spec(plan, true);
  add_io(plan);
  plan->add_option("--strategy", c.strategy,
                   "one, two-intuitive, two-optimal, multi:n, best:n");

  auto* sim = app.add_subcommand("simulate", "propagate a plan exactly");
  add_spec(sim, true);
  add_io(sim);
  sim->add_option("--strategy", c.strategy, "planner when no --plan is given");
  sim->add_option("--plan", c.plan_path, "plan JSON file, - for stdin");
  sim->add_option("--steps", c.steps, "samples per segment");

  auto* coll = app.add_subcommand("collocate", "LGL pseudospectral solve");
  add_spec(coll, true);
  add_io(coll);
  coll->add_option("--N", c.N, "LGL order");
  coll->add_option("--M", slope, "slope limit on u, inf for none");
  coll->add_option("--jobs", c.jobs, "solve multistart seeds in parallel");
  coll->add_option("--max-outer", c.max_outer, "solver outer iteration cap");

  auto* sweep = app.add_subcommand("sweep", "transfer time against v2");
  add_spec(sweep, false);
  add_io(sweep);
  sweep->add_option("--v2-range", c.v2_range, "start:stop:step")->required();
  sweep->add_option("--strategies", c.strategies, "comma separated list");
  sweep->add_option("--jobs", c.jobs, "worker threads");

  auto* runge = app.add_subcommand("runge-demo", "uniform vs LGL interpolation");
  add_io(runge);
  int runge_n = 16;
  runge->add_option("--N", runge_n, "largest interpolation order");

  auto* repro = app.add_subcommand("reproduce", "rerun a reference case");
  add_io(repro);
  repro->add_option("case", c.case_id,
                    "fig3-crossing, opt-crossing, fig7c-argmin, "
                    "fig7d-crossing, fig8, fig9, runge or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  if (!config_path.empty()) {
    if (!app.get_subcommands().empty()) {
      err << "error: --config replaces the subcommand\n";
      return kUsage;
    }
    try {
      std::ifstream in(config_path);
      if (!in) throw InvalidSpecError("cannot open " + config_path);
      return execute(config_from_json(json::parse(in)), out, err);
    } catch (const json::parse_error& e) {
      err << "error: config is not valid JSON: " << e.what() << '\n';
      return kUsage;
    } catch (const InvalidSpecError& e) {
      err << "error: " << e.what() << '\n';
      return kUsage;
    }
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  c.command = sub->get_name();
  auto given = [&](const char* flag) {
    const CLI::Option* o = sub->get_option_no_throw(flag);
    return o != nullptr && o->count() > 0;
  };
  if (given("--v1")) c.v1 = v1;
  if (given("--v2")) c.v2 = v2;
  if (given("--gamma")) c.gamma = gamma;
  if (c.command == "runge-demo") c.N = runge_n;
  if (c.command == "collocate") {
    try {
      c.M = parse_slope(slope);
    } catch (const InvalidSpecError& e) {
      err << "error: " << e.what() << '\n';
      return kUsage;
    }
  }
  return execute(c, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("trapcool");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace trapcool::cli
