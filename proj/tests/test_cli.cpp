#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "kansa/experiment.hpp"

using namespace kansa;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
  std::random_device rd;
  fs::path p = fs::temp_directory_path() / ("kansa-cli-" + tag + "-" + std::to_string(rd()));
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int line_count(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

Json small_advection(const std::string& id, const std::string& solver) {
  return {{"defaults", "advection"},
          {"id", id},
          {"solver", solver},
          {"setup", {{"nx", 20}, {"nt", 6}, {"nd", 10}, {"nb", 12}}}};
}

int run_solver(const std::string& args) {
  const std::string cmd = std::string(SOLVER_EXE) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config round trip is a fixpoint") {
  Json raw = {{"defaults", "burgers"},
              {"id", "rt"},
              {"solver", "fully_nonlinear"},
              {"setup", {{"nu", 0.25}, {"exact_bc", false}}},
              {"kernels", {{"u", {{"family", "gaussian"}, {"sigma", 2.0}}}}},
              {"tune", {{"lo", 0.1}, {"hi", 10}, {"per_decade", 4}}},
              {"seed", 42}};
  ExperimentConfig a = config_from_json(raw);
  Json once = to_json(a);
  ExperimentConfig b = config_from_json(once);
  CHECK(a == b);
  CHECK(dump_json(to_json(b)) == dump_json(once));
  CHECK(a.kernels.at("u").epsilon == doctest::Approx(RbfKernel::epsilon_from_sigma(2.0)));

  Json inv = {{"defaults", "lotka_volterra"}, {"id", "inv"}, {"inverse", {{"init", {1, 1, 1, 1}}, {"method", "nm"}}}};
  ExperimentConfig c = config_from_json(inv);
  CHECK(config_from_json(to_json(c)) == c);
}

TEST_CASE("defaults inheritance") {
  ExperimentConfig c = config_from_json({{"defaults", "lotka_volterra"}, {"id", "lv"}});
  CHECK(c.solver == "coupled_picard");
  CHECK(c.kernels.at("x").epsilon == 0.21);
  CHECK(c.kernels.at("y").epsilon == 0.2);

  Json nested = {{"defaults", {{"defaults", "advection"}, {"setup", {{"beta", 0.7}}}}},
                 {"id", "nested"},
                 {"setup", {{"nx", 30}}}};
  ExperimentConfig n = config_from_json(nested);
  CHECK(n.problem == "advection");
  CHECK(n.setup.at("beta") == 0.7);
  CHECK(n.setup.at("nx") == 30);
  CHECK(n.kernels.at("u").epsilon == 3.0);
}

TEST_CASE("invalid configurations are config errors") {
  auto bad = [](Json j) { CHECK_THROWS_AS(config_from_json(j), ConfigError); };
  bad({{"defaults", "advection"}, {"id", "x"}, {"bogus", 1}});
  bad({{"defaults", "advection"}, {"id", "x"}, {"setup", {{"nu", 0.1}}}});
  bad({{"defaults", "advection"}, {"id", "x"}, {"solver", "crank_nicolson"}});
  bad({{"defaults", "advection"}, {"id", "x"}, {"c_scale", 8}});
  bad({{"defaults", "burgers"}, {"id", "x"}, {"c_scale", 4}});
  bad({{"defaults", "advection"}, {"id", "x"}, {"ct_scale", 2}});
  bad({{"defaults", "lotka_volterra"}, {"id", "x"}, {"inverse", {{"init", {1, 1}}}}});
  bad({{"defaults", "maxwell"}, {"id", "x"}, {"inverse", {{"init", {1}}}}});
  bad({{"defaults", "burgers"}, {"id", "x"}, {"tune", Json::object()}});
  bad({{"defaults", "advection"}, {"id", "x"}, {"kernels", {{"u", {{"family", "cubic"}}}}}});
  bad({{"defaults", "advection"}, {"id", "x"}, {"kernels", {{"v", {{"epsilon", 1}}}}}});
  bad({{"defaults", "nowhere"}, {"id", "x"}});
  bad({{"problem", "heat"}, {"solver", "linear"}, {"id", "x"}});
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0) == "0");
  CHECK(format_number(5e-4) == "5.000000e-04");
  CHECK(format_number(-2.5e-6) == "-2.500000e-06");
  CHECK(format_number(0.0123) == "0.0123");
  CHECK(format_number(1.5) == "1.5");
  CHECK(format_number(3e8) == "3.000000e+08");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  for (double v : {1.918e-3, 36.63, 2.8e-6, 0.402})
    CHECK(std::stod(format_number(v)) == doctest::Approx(v).epsilon(1e-6));
}

TEST_CASE("record serialization round trip") {
  ResultRecord r;
  r.id = "rec, \"quoted\"";
  r.problem = "burgers";
  r.solver = "imex";
  r.ct_scale = 4;
  r.scores = {{"u", 1.25e-3, 1.72e-2, 2}};
  r.params = {{"nu", 0.1, 0.4987, 0.5}};
  r.stable = false;
  r.error = "line one\nline two";
  r.cond_estimate = INFINITY;
  r.extra = {{"loss", 3.5e-9}, {"nan_field", NAN}};
  r.config = config_from_json({{"defaults", "burgers"}, {"id", "cfg"}, {"solver", "imex"}});

  ResultRecord back = record_from_json(Json::parse(dump_json(to_json(r))));
  CHECK(dump_json(to_json(back)) == dump_json(to_json(r)));
  CHECK(back.id == r.id);
  CHECK(std::isinf(back.cond_estimate));
  CHECK(std::isnan(back.extra.at("nan_field")));
  CHECK(back.config == r.config);
  CHECK(results_csv({back}) == results_csv({r}));

  std::string csv = results_csv({r});
  CHECK(csv.rfind(results_csv_header() + "\n", 0) == 0);
  CHECK(csv.find("\"rec, \"\"quoted\"\"\"") != std::string::npos);
  CHECK(csv.find("nu=0.4987") != std::string::npos);
  CHECK(csv.find(",0.00125,") != std::string::npos);
  CHECK_THROWS_AS(record_from_json(Json{{"id", "x"}}), ConfigError);
}

TEST_CASE("tuning trace csv") {
  std::vector<TuneEntry> t(2);
  t[0] = {0.5, 12.0, 0.25, 0, 0.25, false};
  t[1] = {1.0, 4.0, 0.125, 0, 0.125, true};
  CHECK(tune_csv(t) == "epsilon,cond,tv,data_loss,objective,selected\n"
                       "0.5,12,0.25,0,0.25,0\n"
                       "1,4,0.125,0,0.125,1\n");
}

TEST_CASE("empty manifest yields the header only") {
  SuiteResult s = run_suite({}, 2);
  CHECK(s.csv == results_csv_header() + "\n");
  CHECK(s.records.empty());
}

TEST_CASE("built-in manifests") {
  CHECK(builtin_manifest_names().size() == 7);
  std::vector<ExperimentConfig> adv = builtin_manifest("advection");
  REQUIRE(adv.size() == 4);
  int fdm = 0;
  for (const auto& c : adv) fdm += c.solver == "fdm";
  CHECK(fdm == 2);
  CHECK(builtin_manifest("burgers-fe-stability").size() == 4);
  CHECK(builtin_manifest("burgers").size() == 5);
  CHECK(builtin_manifest("inverse-lv")[0].inverse->init == std::vector<double>{1, 1, 1, 1});
  CHECK_THROWS_AS(builtin_manifest("no-such-manifest"), ConfigError);
}

TEST_CASE("suite output is deterministic and sorted") {
  std::vector<ExperimentConfig> m;
  for (const char* solver : {"linear", "fdm"}) {
    m.push_back(config_from_json(small_advection(std::string("b-") + solver, solver)));
    Json j = small_advection(std::string("a-") + solver, solver);
    j["c_scale"] = 4;
    m.push_back(config_from_json(j));
  }
  Json broken = small_advection("z-broken", "fdm");
  broken["setup"]["courant"] = 5.0;
  m.push_back(config_from_json(broken));

  SuiteResult a = run_suite(m, 1);
  std::reverse(m.begin(), m.end());
  SuiteResult b = run_suite(m, 3);
  CHECK(a.csv == b.csv);
  CHECK(a.summary == b.summary);
  REQUIRE(a.records.size() == 5);
  CHECK(a.records[0].solver == "fdm");
  CHECK(a.records[0].c_scale == 1);
  CHECK(a.records.back().solver == "linear");
  CHECK(a.records.back().c_scale == 4);
  int failed = 0;
  for (const auto& r : a.records) failed += r.failed;
  CHECK(failed == 1);
  CHECK(line_count(a.csv) == 6);
  CHECK(line_count(a.timings_csv) == 6);
}

TEST_CASE("surface data") {
  Box box{Vec::Zero(2), Vec::Ones(2)};
  FieldFn constant = [](const Points& q) { return Vec::Constant(q.rows(), 2.5); };
  FieldFn wave = [](const Points& q) { return Vec((q.col(0) - 0.4 * q.col(1)).array().sin()); };
  std::string csv = surface_csv(constant, wave, box, {64, 8});
  CHECK(line_count(csv) == 513);
  CHECK(csv.rfind("x,t,u_pred,u_exact,abs_err\n", 0) == 0);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    REQUIRE(cells.size() == 5);
    CHECK(cells[2] == "2.5");
  }
  std::string self = surface_csv(wave, wave, box, {5, 3});
  std::istringstream in2(self);
  std::getline(in2, line);
  while (std::getline(in2, line)) CHECK(line.substr(line.rfind(',') + 1) == "0");

  CHECK(parse_grid("64x8").nx == 64);
  CHECK(parse_grid("64x8").nt == 8);
  CHECK_THROWS_AS(parse_grid("64"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0x8"), ConfigError);
  CHECK_THROWS_AS(parse_grid("8x4y"), ConfigError);
}

TEST_CASE("advection record re-solves into a 64x8 surface") {
  fs::path dir = scratch_dir("plot");
  ExperimentConfig c = config_from_json(small_advection("plot-me", "linear"));
  c.output = dir.string();
  ResultRecord r = run_forward(c);
  REQUIRE_FALSE(r.failed);
  CHECK(fs::exists(dir / "plot-me.json"));
  CHECK(fs::exists(dir / "plot-me.csv"));
  ResultRecord loaded = record_from_json(Json::parse(slurp(dir / "plot-me.json")));
  auto files = emit_plot_data(loaded, {64, 8}, dir);
  REQUIRE(files.size() == 1);
  CHECK(line_count(slurp(dir / "surface.csv")) == 513);
  fs::remove_all(dir);
}

TEST_CASE("atomic writes leave no temporaries") {
  fs::path dir = scratch_dir("atomic");
  write_atomic(dir / "a.txt", "first");
  write_atomic(dir / "a.txt", "second");
  write_atomic(dir / "nested" / "b.txt", "x");
  CHECK(slurp(dir / "a.txt") == "second");
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) {
      ++files;
      CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
    }
  }
  CHECK(files == 2);
  fs::remove_all(dir);
}

TEST_CASE("command-line exit codes") {
  fs::path dir = scratch_dir("exe");
  auto write = [&](const std::string& name, const Json& j) {
    std::ofstream(dir / name) << j.dump();
    return (dir / name).string();
  };
  const std::string ok = write("ok.json", small_advection("ok", "fdm"));
  Json unstable = small_advection("cfl", "fdm");
  unstable["setup"]["courant"] = 5.0;
  const std::string cfl = write("cfl.json", unstable);
  const std::string bad = write("bad.json", Json{{"defaults", "advection"}, {"id", "bad"}, {"mystery", 1}});

  CHECK(run_solver("forward --config " + ok + " --out " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "ok.json"));
  CHECK(run_solver("forward --config " + cfl) == 2);
  CHECK(run_solver("forward --config " + cfl + " --allow-unstable") == 0);
  CHECK(run_solver("forward --config " + bad) == 1);
  CHECK(run_solver("forward --config " + (dir / "missing.json").string()) == 1);
  CHECK(run_solver("frobnicate") == 1);
  CHECK(run_solver("plot --record " + (dir / "out" / "ok.json").string()) == 0);
  CHECK(fs::exists(dir / "out" / "surface.csv"));
  fs::remove_all(dir);
}
