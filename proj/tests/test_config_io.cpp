#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "optexec/problem.hpp"
#include "optexec/runner.hpp"

using namespace optexec;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_SUITE("config_io") {

TEST_CASE("defaults text parses back to the default spec") {
  const ProblemSpec parsed = parse_config_text(default_config_text());
  const ProblemSpec d;
  CHECK(parsed.gamma == d.gamma);
  CHECK(parsed.delta == d.delta);
  CHECK(parsed.grid.N == d.grid.N);
  CHECK(parsed.solver == d.solver);
  CHECK(parsed.starts == d.starts);
  CHECK(parsed.seed == d.seed);
}

TEST_CASE("unknown keys are hard errors naming the key") {
  const std::string cfg = "[problem]\ngamma = 0.5\nbogus_knob = 3\n";
  CHECK_THROWS_WITH_AS(parse_config_text(cfg),
                       "config: unknown key 'problem.bogus_knob'",
                       std::invalid_argument);
}

TEST_CASE("malformed values are rejected") {
  CHECK_THROWS_AS(parse_config_text("[problem]\ngamma = fast\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("[solver]\ntype = annealing\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("[problem]\ngamma\n"), std::invalid_argument);
}

TEST_CASE("parameter-region validation cites the bound") {
  ProblemSpec spec;
  spec.gamma = 0.3;
  spec.delta = 0.8;
  try {
    spec.validate();
    FAIL("expected rejection outside the admissible region");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("0.415") != std::string::npos);
    CHECK(msg.find("gamma + delta") != std::string::npos);
  }
  spec.allow_manipulation_region = true;
  CHECK_NOTHROW(spec.validate());

  ProblemSpec sum_violation;
  sum_violation.gamma = 0.45;
  sum_violation.delta = 0.5;
  CHECK_THROWS_AS(sum_violation.validate(), std::invalid_argument);
}

TEST_CASE("report json round trip reproduces the cost") {
  ProblemSpec spec;
  spec.gamma = 0.5;
  spec.delta = 0.5;
  spec.grid = {30, 1.0, 0.1};
  spec.solver = SolverKind::multistart;
  spec.starts = 5;
  spec.seed = 77;

  const RunOutcome outcome = run_problem(spec);
  const std::string path = temp_path("optexec_report_test.json");
  save_report_json(path, spec, outcome.report);

  const LoadedReport loaded = load_report_json(path);
  CHECK(loaded.report.cost == outcome.report.cost);
  const CostModel model = loaded.spec.make_model();
  const double re_evaluated = expected_cost(model, loaded.report.strategy.rates);
  CHECK(re_evaluated == doctest::Approx(loaded.report.cost).epsilon(1e-12));
  std::remove(path.c_str());
}

TEST_CASE("profile CSV is byte-identical across worker counts") {
  ProblemSpec spec;
  spec.gamma = 0.45;
  spec.delta = 0.55;
  spec.grid = {25, 1.0, 0.1};
  spec.starts = 8;
  spec.seed = 4242;
  spec.out_profile = temp_path("optexec_profile_w1.csv");
  spec.workers = 1;
  CHECK(run_to_files(spec) == 0);
  spec.out_profile = temp_path("optexec_profile_w4.csv");
  spec.workers = 4;
  CHECK(run_to_files(spec) == 0);
  CHECK(slurp(temp_path("optexec_profile_w1.csv")) ==
        slurp(temp_path("optexec_profile_w4.csv")));
  std::remove(temp_path("optexec_profile_w1.csv").c_str());
  std::remove(temp_path("optexec_profile_w4.csv").c_str());
}

TEST_CASE("solver dispatch covers every kind") {
  ProblemSpec spec;
  spec.grid = {16, 1.0, 0.1};
  spec.gamma = 0.5;
  spec.delta = 0.9;

  spec.solver = SolverKind::dham;
  spec.hbar_count = 40;
  CHECK(run_problem(spec).report.solver == "dham");

  spec.solver = SolverKind::dang;
  CHECK(run_problem(spec).report.solver == "dang");

  spec.solver = SolverKind::perturbative;
  CHECK(run_problem(spec).report.solver == "perturbative");

  spec.solver = SolverKind::multistart;
  spec.starts = 3;
  CHECK(run_problem(spec).report.solver == "sqp");

  spec.solver = SolverKind::monotone;
  CHECK(run_problem(spec).report.solver == "direct_search");
}

TEST_CASE("incompatible solver and regularization combinations are rejected") {
  ProblemSpec spec;
  spec.solver = SolverKind::dang;
  spec.regularization = RegularizationKind::spread;
  spec.spread_ratio = 0.1;
  CHECK_THROWS_AS(run_problem(spec), std::invalid_argument);

  spec.regularization = RegularizationKind::concave_convex;
  spec.cc_d = 0.5;
  CHECK_THROWS_AS(run_problem(spec), std::invalid_argument);
}

}  // TEST_SUITE
