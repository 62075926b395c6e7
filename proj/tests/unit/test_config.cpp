#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"
#include "fkpde/errors.hpp"
#include "fkpde/problems.hpp"

using namespace fkpde;
using namespace fkpde::cli;
using nlohmann::json;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fkpde_test_config_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Restores FKPDE_SEED on scope exit.
struct SeedEnvGuard {
  std::optional<std::string> saved;
  SeedEnvGuard() {
    if (const char* v = std::getenv("FKPDE_SEED")) saved = v;
  }
  ~SeedEnvGuard() {
    if (saved) {
      setenv("FKPDE_SEED", saved->c_str(), 1);
    } else {
      unsetenv("FKPDE_SEED");
    }
  }
};

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_config(json::object());
  CHECK(c.problem == "tc1");
  CHECK(c.solver == SolverKind::AdaptivePerturbed);
  CHECK(c.seed == 0);
  CHECK(c.scv.K == 30);
  CHECK(c.scv.n_s == 5);
  CHECK(c.adaptive.theta == 0.5);
  CHECK(c.error_samples == 100000);
  CHECK_FALSE(c.timing);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_AS(parse_config(json{{"problme", "tc1"}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"scv", {{"Dt", 1e-3}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"adaptive", {{"theta", 0.5}, {"bulk", 1}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"index_set", {{"size", 3}}}}), ConfigError);
  try {
    parse_config(json{{"scv", {{"Dt", 1e-3}}}});
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("Dt") != std::string::npos);
  }
}

TEST_CASE("values out of range or of the wrong type are rejected") {
  const json bad[] = {
      {{"adaptive", {{"theta", 1.5}}}},   {{"adaptive", {{"theta", 0.0}}}}, {{"adaptive", {{"eps", -1.0}}}},
      {{"adaptive", {{"N", 0}}}},         {{"scv", {{"K", 0}}}},            {{"scv", {{"M", 0}}}},
      {{"scv", {{"M", 1.5}}}},            {{"scv", {{"dt", -1e-3}}}},       {{"scv", {{"dt", "small"}}}},
      {{"scv", {{"eps_tol", 0.0}}}},      {{"scv", {{"max_steps", 0}}}},    {{"seed", -3}},
      {{"seed", "7"}},                    {{"solver", "newton"}},           {{"point_family", "chebyshev"}},
      {{"error_samples", 0}},             {{"index_set", {{"kind", "x"}}}}, {{"index_set", {{"card", 0}}}},
      {{"index_set", {{"kind", "file"}}}}, {{"preset", "tc9-desk"}},         {{"preset", 3}},
      {{"initial", "u.expansion"}},
  };
  for (const auto& doc : bad) {
    CAPTURE(doc.dump());
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
  }
  CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
  // Integral doubles count as integers.
  CHECK(parse_config(json{{"scv", {{"M", 500.0}}}}).scv.M == 500);
}

TEST_CASE("presets merge underneath explicit keys") {
  const auto names = preset_names();
  for (const char* n : {"tc1-desk", "tc2-desk", "tc3-desk", "tc1-paper", "tc2-paper", "tc3-paper"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
  const auto desk = parse_config(json{{"preset", "tc1-desk"}});
  CHECK(desk.problem == "tc1");
  CHECK(desk.scv.euler.dt == 1e-3);
  CHECK(desk.scv.M == 1000);
  CHECK(desk.adaptive.theta == 0.5);
  CHECK(desk.adaptive.eps == 1e-15);
  const auto tc3 = parse_config(json{{"preset", "tc3-desk"}});
  CHECK(tc3.scv.euler.dt == 2.5e-3);
  CHECK(tc3.scv.M == 500);
  const auto paper = parse_config(json{{"preset", "tc2-paper"}});
  CHECK(paper.problem == "tc2");
  CHECK(paper.scv.euler.dt == 1e-4);
  CHECK(paper.scv.M == 1000);

  const auto merged = parse_config(json{{"preset", "tc1-desk"}, {"scv", {{"M", 20}}}, {"solver", "scv-fixed"}});
  CHECK(merged.scv.M == 20);
  CHECK(merged.scv.euler.dt == 1e-3);
  CHECK(merged.solver == SolverKind::ScvFixed);
  CHECK(merged.adaptive.eps == 1e-15);
}

TEST_CASE("the echoed config parses back to the same config") {
  const auto c = parse_config(json{{"preset", "tc2-desk"},
                                   {"seed", 123456789012345ULL},
                                   {"point_family", "leja"},
                                   {"timing", true},
                                   {"index_set", {{"kind", "tensor"}, {"degree", 3}}},
                                   {"adaptive", {{"n_inner", 4}, {"degree_cap", 12}}}});
  const json echo = to_json(c);
  const auto back = parse_config(echo);
  CHECK(to_json(back) == echo);
  CHECK(back.seed == 123456789012345ULL);
  CHECK(back.family == PointFamily::Leja);
  CHECK(back.index_set.kind == "tensor");
  CHECK(back.adaptive.n_inner == 4);
  CHECK_FALSE(echo.contains("preset"));
}

TEST_CASE("config files may contain comments") {
  const auto dir = scratch_dir("comments");
  write_file(dir / "c.json", "{\n  // desk run\n  \"preset\": \"tc1-desk\", /* small */ \"seed\": 4\n}\n");
  const auto c = load_config((dir / "c.json").string());
  CHECK(c.seed == 4);
  write_file(dir / "broken.json", "{ \"seed\": ");
  CHECK_THROWS_AS(load_config((dir / "broken.json").string()), ConfigError);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("seed precedence: config, then FKPDE_SEED, then the command line") {
  SeedEnvGuard guard;
  auto c = parse_config(json{{"seed", 1}});
  unsetenv("FKPDE_SEED");
  apply_seed_overrides(c, std::nullopt);
  CHECK(c.seed == 1);
  setenv("FKPDE_SEED", "2", 1);
  apply_seed_overrides(c, std::nullopt);
  CHECK(c.seed == 2);
  apply_seed_overrides(c, 3);
  CHECK(c.seed == 3);
  setenv("FKPDE_SEED", "not-a-number", 1);
  CHECK_THROWS_AS(apply_seed_overrides(c, std::nullopt), ConfigError);
}

TEST_CASE("trace format") {
  SolverReport report;
  StepRecord a;
  a.step = 1;
  a.card_lambda = 6;
  a.epsilon_n = 0.1;
  a.path_steps = 42;
  a.wall_ms = 12.5;
  StepRecord b = a;
  b.step = 2;
  b.stagnation = std::numeric_limits<double>::infinity();
  b.l2_error = 1.0 / 3.0;
  report.records = {a, b};
  std::ostringstream plain, timed;
  write_trace(plain, report, false);
  write_trace(timed, report, true);
  CHECK(plain.str() == std::string(kTraceHeader) +
                           "\n1,6,0.10000000000000001,nan,nan,nan,42,0\n"
                           "2,6,0.10000000000000001,inf,0.33333333333333331,nan,42,0\n");
  CHECK(timed.str().find(",42,12.5\n") != std::string::npos);

  const auto dir = scratch_dir("trace");
  write_file(dir / "t.csv", plain.str());
  const auto t = read_trace((dir / "t.csv").string());
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][4] == 1.0 / 3.0);
  CHECK(std::isinf(t.rows[1][3]));
  CHECK(std::isnan(t.rows[0][3]));
  write_file(dir / "bad.csv", "step,oops\n1,2\n");
  CHECK_THROWS_AS(read_trace((dir / "bad.csv").string()), InvalidArgument);
  write_file(dir / "short.csv", std::string(kTraceHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(read_trace((dir / "short.csv").string()), InvalidArgument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("compare aligns traces and reports differences") {
  const auto dir = scratch_dir("compare");
  const std::string h = std::string(kTraceHeader) + "\n";
  write_file(dir / "a.csv", h + "1,1,0.5,nan,1,2,0,0\n2,3,0.25,nan,0.5,1,0,0\n3,5,0.125,nan,0.25,0.5,0,0\n");
  write_file(dir / "b.csv", h + "1,1,0.5,nan,1.5,2,0,0\n2,4,0.5,nan,0.5,1,0,0\n3,5,0.25,nan,0.5,0.5,0,0\n");
  const std::string a = (dir / "a.csv").string();
  const std::string b = (dir / "b.csv").string();

  std::ostringstream out, diag;
  compare({a, a}, "step", out, diag);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line ==
        "step,t1_epsilon_n,t1_stagnation,t1_l2_error,t1_linf_error,t2_epsilon_n,t2_stagnation,t2_l2_error,"
        "t2_linf_error,d2_epsilon_n,d2_l2_error,d2_linf_error");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(line.substr(line.size() - 6) == ",0,0,0");
  }
  CHECK(rows == 3);

  std::ostringstream out2, diag2;
  compare({a, b}, "card_lambda", out2, diag2);
  CHECK(out2.str().find("\n1,0.5,nan,1,2,0.5,nan,1.5,2,0,0.5,0\n") != std::string::npos);
  CHECK(out2.str().find("\n5,") != std::string::npos);
  CHECK(out2.str().find("\n3,") == std::string::npos);
  CHECK(diag2.str().find("dropped") != std::string::npos);

  std::ostringstream sink;
  CHECK_THROWS_AS(compare({a}, "step", sink, sink), InvalidArgument);
  CHECK_THROWS_AS(compare({a, b}, "wall_ms", sink, sink), InvalidArgument);
  write_file(dir / "c.csv", h + "9,99,0.5,nan,1,2,0,0\n");
  CHECK_THROWS_AS(compare({a, (dir / "c.csv").string()}, "step", sink, sink), InvalidArgument);
  write_file(dir / "dup.csv", h + "1,5,0.5,nan,1,2,0,0\n2,5,0.5,nan,1,2,0,0\n");
  CHECK_THROWS_AS(compare({a, (dir / "dup.csv").string()}, "card_lambda", sink, sink), InvalidArgument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("index set resolution") {
  const auto problem = tc1();
  RunConfig c;
  c.index_set.kind = "total-degree";
  c.index_set.degree = 2;
  CHECK(resolve_index_set(c, problem) == MultiIndexSet::total_degree(5, 2));
  c.index_set.kind = "tensor";
  c.index_set.degree = 1;
  CHECK(resolve_index_set(c, problem).size() == 32);
  c.index_set.kind = "adaptive";
  c.index_set.card = 26;
  const auto adaptive = resolve_index_set(c, problem);
  CHECK(adaptive.size() <= 26);
  CHECK(adaptive.size() >= 20);
  CHECK(is_downward_closed(adaptive));

  const auto dir = scratch_dir("index");
  write_file(dir / "ok.txt", "0 0 0 0 0\n1 0 0 0 0\n");
  write_file(dir / "holes.txt", "0 0 0 0 0\n2 0 0 0 0\n");
  c.index_set.kind = "file";
  c.index_set.path = (dir / "ok.txt").string();
  CHECK(resolve_index_set(c, problem).size() == 2);
  c.index_set.path = (dir / "holes.txt").string();
  CHECK_THROWS_AS(resolve_index_set(c, problem), InvalidArgument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("a run writes its outputs and its echo reproduces it") {
  const auto dir = scratch_dir("run");
  auto c = parse_config(json{{"problem", "tc1"},
                             {"solver", "adaptive-exact"},
                             {"seed", 5},
                             {"error_samples", 2000},
                             {"adaptive", {{"N", 6}, {"eps", 0.0}}},
                             {"output", (dir / "first").string()}});
  const auto report = run(c);
  CHECK(report.records.size() == 6);
  for (const char* f : {"trace.csv", "solution.expansion", "run.json"}) {
    CHECK(std::filesystem::exists(dir / "first" / f));
  }
  auto echoed = load_config((dir / "first" / "run.json").string());
  CHECK(echoed.seed == 5);
  echoed.output = (dir / "second").string();
  run(echoed);
  CHECK(slurp(dir / "first" / "trace.csv") == slurp(dir / "second" / "trace.csv"));
  CHECK(slurp(dir / "first" / "solution.expansion") == slurp(dir / "second" / "solution.expansion"));
  std::ifstream in(dir / "first" / "solution.expansion");
  const auto p = read_expansion(in);
  CHECK(p.set() == report.lambdas.back());
  std::filesystem::remove_all(dir);
}
