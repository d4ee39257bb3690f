// Benchmark runner: solver {forward|inverse|tune|bench|plot}.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "kansa/experiment.hpp"

using namespace kansa;

namespace {

constexpr int kOk = 0, kConfigError = 1, kSolverFailure = 2;

struct Overrides {
  bool allow_unstable = false;
  std::optional<std::uint64_t> seed;
  std::string out;
};

ExperimentConfig load(const std::string& path, const Overrides& o) {
  ExperimentConfig c = load_config(path);
  if (o.allow_unstable) c.allow_unstable = true;
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.output = o.out;
  return c;
}

int report(const ResultRecord& r) {
  std::cout << summary_table({r});
  if (r.failed) {
    std::cerr << "solver failure: " << r.error << "\n";
    return kSolverFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mesh-free RBF collocation benchmark runner"};
  app.require_subcommand(1);
  Overrides o;
  std::string config, manifest, record, grid = "64x8";
  int parallel = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--allow-unstable", o.allow_unstable, "Run explicit schemes past their CFL limit");
    sub->add_option("--seed", o.seed, "Override the experiment seed");
    sub->add_option("--out", o.out, "Output directory");
  };
  auto* fwd = app.add_subcommand("forward", "Solve one forward problem and score it");
  fwd->add_option("--config", config, "Experiment JSON")->required();
  add_common(fwd);
  auto* inv = app.add_subcommand("inverse", "Recover parameters from analytic observations");
  inv->add_option("--config", config, "Experiment JSON")->required();
  add_common(inv);
  auto* tun = app.add_subcommand("tune", "Select the shape parameter and re-solve");
  tun->add_option("--config", config, "Experiment JSON")->required();
  add_common(tun);
  auto* bench = app.add_subcommand("bench", "Run a manifest of experiments");
  bench->add_option("--manifest", manifest, "Built-in manifest name or a JSON array file")->required();
  bench->add_option("--parallel", parallel, "Concurrent experiments")->check(CLI::PositiveNumber);
  add_common(bench);
  auto* plot = app.add_subcommand("plot", "Write surface.csv for a recorded experiment");
  plot->add_option("--record", record, "Record JSON")->required();
  plot->add_option("--grid", grid, "Evaluation grid, NXxNT");
  plot->add_option("--out", o.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (fwd->parsed()) return report(run_forward(load(config, o)));
    if (inv->parsed()) return report(run_inverse(load(config, o)));
    if (tun->parsed()) return report(run_tune(load(config, o)));
    if (bench->parsed()) {
      std::vector<ExperimentConfig> cfgs;
      const auto names = builtin_manifest_names();
      if (std::find(names.begin(), names.end(), manifest) != names.end()) {
        cfgs = builtin_manifest(manifest);
      } else {
        std::ifstream in(manifest);
        if (!in) throw ConfigError("unknown manifest: " + manifest);
        Json arr;
        try {
          arr = Json::parse(in);
        } catch (const Json::exception& e) {
          throw ConfigError(std::string("invalid manifest JSON: ") + e.what());
        }
        if (!arr.is_array()) throw ConfigError("manifest file must hold a JSON array of configs");
        for (const auto& d : arr) cfgs.push_back(config_from_json(d));
      }
      for (auto& c : cfgs) {
        if (o.allow_unstable) c.allow_unstable = true;
        if (o.seed) c.seed = *o.seed;
      }
      SuiteResult s = run_suite(cfgs, parallel);
      std::cout << s.summary;
      if (!o.out.empty()) {
        std::filesystem::path dir = o.out;
        write_atomic(dir / "results.csv", s.csv);
        write_atomic(dir / "timings.csv", s.timings_csv);
        write_atomic(dir / "summary.txt", s.summary);
        for (const auto& r : s.records) write_atomic(dir / "records" / (r.id + ".json"), dump_json(to_json(r)));
      } else {
        std::cout << "\n" << s.csv;
      }
      return kOk;
    }
    if (plot->parsed()) {
      std::ifstream in(record);
      if (!in) throw ConfigError("cannot open record: " + record);
      Json j;
      try {
        j = Json::parse(in);
      } catch (const Json::exception& e) {
        throw ConfigError(std::string("invalid record JSON: ") + e.what());
      }
      ResultRecord r = record_from_json(j);
      GridSpec g = parse_grid(grid);
      std::filesystem::path dir = o.out.empty() ? std::filesystem::path(record).parent_path() : std::filesystem::path(o.out);
      if (dir.empty()) dir = ".";
      for (const auto& p : emit_plot_data(r, g, dir)) std::cout << p.string() << "\n";
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kOk;
}
