#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "trapcool/bangbang.hpp"
#include "trapcool/cli.hpp"
#include "trapcool/errors.hpp"

using namespace trapcool;
using nlohmann::json;
using doctest::Approx;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Runs a shell pipeline with the built executable substituted for @.
Outcome shell(const std::string& pipeline) {
  std::string cmd;
  for (char ch : pipeline) {
    if (ch == '@') {
      cmd += TRAPCOOL_CLI_PATH;
    } else {
      cmd += ch;
    }
  }
  cmd += " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out, {}};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("trapcool_test_" + name);
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("strategy and range parsing") {
  CHECK(cli::parse_strategy("one").kind == cli::StrategyChoice::One);
  CHECK(cli::parse_strategy("multi:3").n == 3);
  CHECK(cli::parse_strategy("best:2").name() == "best:2");
  CHECK_THROWS_AS(cli::parse_strategy("multi:0"), InvalidSpecError);
  CHECK_THROWS_AS(cli::parse_strategy("multi:2x"), InvalidSpecError);
  CHECK_THROWS_AS(cli::parse_strategy("three"), InvalidSpecError);

  CHECK(cli::parse_range("2:50:0.05").size() == 961);
  const auto r = cli::parse_range("0:1:0.3");
  REQUIRE(r.size() == 4);
  CHECK(r.back() == Approx(0.9));
  CHECK(cli::parse_range("0:1:0.45").size() == 3);
  CHECK(cli::parse_range("5:5:1") == std::vector<double>{5.0});
  CHECK_THROWS_AS(cli::parse_range("1:2"), InvalidSpecError);
  CHECK_THROWS_AS(cli::parse_range("1:2:0"), InvalidSpecError);
  CHECK_THROWS_AS(cli::parse_range("3:2:1"), InvalidSpecError);
  CHECK_THROWS_AS(cli::parse_range("a:2:1"), InvalidSpecError);
}

TEST_CASE("plan prints a JSON plan with its total time") {
  const Outcome o = run_cli({"plan", "--v1", "1", "--v2", "8", "--gamma", "10",
                             "--strategy", "two-optimal"});
  REQUIRE(o.code == 0);
  const json j = json::parse(o.out);
  CHECK(j["strategy"] == "two-optimal");
  CHECK(j["spec"]["v2"] == 8.0);
  CHECK(j["switchings"] == 2);
  CHECK(j["segments"].size() == 3);
  CHECK(j["total_time"].get<double>() ==
        two_switch_optimal(ProblemSpec::make(1, 8, 10)).total_time());

  const Outcome best = run_cli({"plan", "--v1", "1", "--v2", "50", "--gamma",
                                "10", "--strategy", "best:3"});
  CHECK(json::parse(best.out)["strategy"] == "multi:2");
  CHECK(json::parse(best.out)["betas"].size() == 3);

  const Outcome csv = run_cli({"plan", "--v1", "1", "--v2", "3", "--gamma",
                               "10", "--strategy", "one", "--format", "csv"});
  CHECK(csv.out.rfind("segment_index,duration,u\n0,", 0) == 0);
  CHECK(count_lines(csv.out) == 3);
}

TEST_CASE("every plan passes simulate and verify") {
  const auto path = temp_path("plan.json");
  for (const char* strategy :
       {"one", "two-intuitive", "two-optimal", "multi:2", "best:3"}) {
    for (const char* v2 : {"3", "8", "50"}) {
      Outcome p = run_cli({"plan", "--v1", "1", "--v2", v2, "--gamma", "10",
                           "--strategy", strategy, "--out", path.string()});
      REQUIRE(p.code == 0);
      Outcome s = run_cli({"simulate", "--plan", path.string()});
      CHECK(s.code == 0);
      CHECK(s.err.find(", ok") != std::string::npos);
      CHECK(s.out.rfind("t,x1,x2,u\n", 0) == 0);
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("plan piped into simulate through standard input") {
  const Outcome o = shell(
      "@ plan --v1 1 --v2 8 --gamma 10 --strategy best:3 | "
      "@ simulate --plan - --format json");
  REQUIRE(o.code == 0);
  const json j = json::parse(o.out);
  CHECK(j["verification"]["feasible"] == true);
  CHECK(j["verification"]["endpoint_error_x1"].get<double>() < 1e-6);
}

TEST_CASE("simulate rejects a tampered plan") {
  const auto path = temp_path("bad.json");
  std::ofstream(path) << R"({"spec":{"v1":1,"v2":3,"gamma":10},
                              "segments":[{"duration":1.0,"u":-1}]})";
  const Outcome o = run_cli({"simulate", "--plan", path.string()});
  CHECK(o.code == cli::kInfeasible);
  CHECK(o.err.find("FAILED") != std::string::npos);

  std::ofstream(path) << R"({"spec":{"v1":1,"v2":3,"gamma":10},
                              "segments":[{"duration":1.0,"u":2}]})";
  CHECK(run_cli({"simulate", "--plan", path.string()}).code == cli::kUsage);
  std::ofstream(path) << "not json";
  CHECK(run_cli({"simulate", "--plan", path.string()}).code == cli::kUsage);
  std::filesystem::remove(path);
}

TEST_CASE("sweep writes deterministic CSV") {
  const std::vector<std::string> args = {
      "sweep",      "--v1", "1", "--gamma", "10", "--v2-range", "2:50:0.05",
      "--strategies", "one,two-optimal,multi:2"};
  const Outcome a = run_cli(args);
  REQUIRE(a.code == 0);
  CHECK(count_lines(a.out) == 962);
  CHECK(a.out.rfind("v2,one,two-optimal,multi:2\n2,", 0) == 0);

  auto parallel = args;
  parallel.insert(parallel.end(), {"--jobs", "3"});
  CHECK(run_cli(parallel).out == a.out);
  CHECK(run_cli(args).out == a.out);

  // rows past the crossing favour the optimal two-switch plan
  std::istringstream in(a.out);
  std::string line;
  std::getline(in, line);
  int faster_two = 0;
  while (std::getline(in, line)) {
    double v2, one, two, four;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &v2, &one, &two,
                        &four) == 4);
    CHECK(two <= one + 1e-12);
    if (v2 < 6.75) CHECK(two == one);
    if (v2 > 6.78) faster_two += two < one;
    if (v2 > 43.4) CHECK(four < two);
    if (v2 < 43.2) CHECK(four > two);
  }
  CHECK(faster_two > 0);

  const Outcome j = run_cli({"sweep", "--v1", "1", "--gamma", "10",
                             "--v2-range", "2:4:1", "--format", "json"});
  CHECK(json::parse(j.out)["rows"].size() == 3);
}

TEST_CASE("runge demo table") {
  const Outcome o = run_cli({"runge-demo", "--N", "16"});
  REQUIRE(o.code == 0);
  CHECK(o.out.rfind("N,max_error_uniform,max_error_lgl,ratio\n", 0) == 0);
  CHECK(o.out.find("\n16,5.91324141164") != std::string::npos);
  CHECK(run_cli({"runge-demo", "--N", "3"}).code == cli::kUsage);
}

TEST_CASE("reproduce cases") {
  const Outcome o = run_cli({"reproduce", "fig7c-argmin"});
  REQUIRE(o.code == 0);
  CHECK(o.out.find("PASS") != std::string::npos);
  CHECK(o.out.find("published") != std::string::npos);
  const Outcome r = run_cli({"reproduce", "runge"});
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(run_cli({"reproduce", "fig99"}).code == cli::kUsage);
}

TEST_CASE("collocate writes CSV and sidecar") {
  const auto path = temp_path("coll.csv");
  const Outcome o = run_cli({"collocate", "--v1", "1", "--v2", "3", "--gamma",
                             "10", "--N", "16", "--M", "10", "--out",
                             path.string()});
  REQUIRE(o.code == 0);
  std::ifstream csv(path);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "node,t_mapped,x1,x2,u");
  std::ifstream side(path.string() + ".json");
  const json j = json::parse(side);
  CHECK(j["N"] == 16);
  CHECK(j["M"] == 10.0);
  CHECK(j["converged"] == true);
  CHECK(j.contains("iterations"));
  CHECK(j["residuals"]["max_violation"].get<double>() < 1e-6);
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".json");

  const Outcome inf = run_cli({"collocate", "--v1", "1", "--v2", "3", "--gamma",
                               "10", "--N", "12", "--M", "inf", "--format",
                               "json"});
  REQUIRE(inf.code == 0);
  CHECK(json::parse(inf.out)["M"].is_null());
  CHECK(json::parse(inf.out)["nodes"].size() == 13);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({"plan", "--v2", "3"}).code == cli::kUsage);
  CHECK(run_cli({"plan", "--v1", "1", "--v2", "0.5", "--gamma", "10"}).code ==
        cli::kUsage);
  CHECK(run_cli({"plan", "--v1", "1", "--v2", "3", "--gamma", "10",
                 "--strategy", "bogus"})
            .code == cli::kUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kUsage);
  CHECK(run_cli({}).code == cli::kUsage);
  CHECK(run_cli({"--help"}).code == cli::kOk);
  CHECK(run_cli({"collocate", "--v1", "1", "--v2", "3", "--gamma", "10",
                 "--M", "-1"})
            .code == cli::kUsage);

  const Outcome inf = run_cli({"plan", "--v1", "1", "--v2", "8", "--gamma",
                               "1", "--strategy", "two-intuitive"});
  CHECK(inf.code == cli::kInfeasible);
  CHECK(inf.err.find("gamma > 1") != std::string::npos);

  const Outcome stalled =
      run_cli({"collocate", "--v1", "1", "--v2", "8", "--gamma", "10", "--N",
               "16", "--max-outer", "1"});
  CHECK(stalled.code == cli::kNotConverged);
}

TEST_CASE("JSON configuration file") {
  const auto path = temp_path("config.json");
  std::ofstream(path) << R"({"command": "plan",
                             "spec": {"v1": 1, "v2": 8, "gamma": 10},
                             "strategy": "two-optimal"})";
  const Outcome c = run_cli({"--config", path.string()});
  REQUIRE(c.code == 0);
  const Outcome f = run_cli({"plan", "--v1", "1", "--v2", "8", "--gamma", "10",
                             "--strategy", "two-optimal"});
  CHECK(c.out == f.out);

  std::ofstream(path) << R"({"command": "plan", "colour": "red"})";
  CHECK(run_cli({"--config", path.string()}).code == cli::kUsage);
  std::ofstream(path) << R"({"command": "plan", "N": "many"})";
  CHECK(run_cli({"--config", path.string()}).code == cli::kUsage);
  CHECK(run_cli({"--config", path.string(), "plan"}).code == cli::kUsage);
  std::filesystem::remove(path);

  const cli::RunConfig cfg = cli::config_from_json(
      {{"command", "collocate"}, {"spec", {{"v1", 1}, {"v2", 3}, {"gamma", 10}}},
       {"N", 20}, {"M", nullptr}, {"format", "json"}});
  CHECK(cfg.N == 20);
  CHECK_FALSE(cfg.M.has_value());
  CHECK(*cfg.v2 == 3.0);
}

}  // TEST_SUITE
