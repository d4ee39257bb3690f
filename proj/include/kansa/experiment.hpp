#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kansa/benchmarks.hpp"

namespace kansa {

using Json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KernelSpec {
  std::string family = "gaussian";
  double epsilon = 1.0;
  bool operator==(const KernelSpec&) const = default;
};

struct TuneSpec {
  double lo = 1e-2, hi = 1e2;
  int per_decade = 16;
  double w1 = 1e-12, w2 = 1.0, w3 = 1.0;
  bool use_data = false;  // fit the analytic solution at the test points as the data term
  bool operator==(const TuneSpec&) const = default;
};

struct InverseSpec {
  std::vector<double> init;
  std::string method = "auto";
  int max_fev = 2000;
  double line_step = 0;
  double line_tol = 1e-6;
  bool check_identifiability = false;
  bool operator==(const InverseSpec&) const = default;
};

// Problems: advection, lotka_volterra, maxwell, burgers.
// Solvers: linear, fdm, coupled, coupled_picard, forward_euler, imex, backward_euler,
// crank_nicolson, fully_nonlinear.
struct ExperimentConfig {
  std::string id;
  std::string problem;
  std::string solver;
  int c_scale = 1;
  int ct_scale = 1;
  std::map<std::string, double> setup;  // numeric overrides of the problem setup
  std::map<std::string, KernelSpec> kernels;
  std::optional<TuneSpec> tune;
  std::optional<InverseSpec> inverse;
  std::uint64_t seed = 0;
  bool allow_unstable = false;
  std::string output;

  bool operator==(const ExperimentConfig&) const = default;
};

Json to_json(const ExperimentConfig& c);
// Resolves `defaults` (a built-in problem name or a nested config object) before validating.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
Json builtin_defaults(const std::string& problem);

struct ResultRecord {
  std::string id, problem, solver;
  int c_scale = 1, ct_scale = 1;
  std::vector<FieldScore> scores;
  double train_time_s = 0, infer_time_s = 0;
  std::vector<ParamReport> params;
  bool stable = true;
  bool failed = false;
  std::string error;
  double cond_estimate = std::numeric_limits<double>::quiet_NaN();
  std::map<std::string, double> extra;
  std::optional<ExperimentConfig> config;
  std::vector<TuneEntry> tune_trace;  // written beside the record as <id>_tune.csv
};

Json to_json(const ResultRecord& r);
ResultRecord record_from_json(const Json& j);

ResultRecord run_forward(const ExperimentConfig& c);
ResultRecord run_inverse(const ExperimentConfig& c);
ResultRecord run_tune(const ExperimentConfig& c);
// Dispatches on the presence of the inverse / tune descriptors.
ResultRecord run_experiment(const ExperimentConfig& c);

std::vector<std::string> builtin_manifest_names();
std::vector<ExperimentConfig> builtin_manifest(const std::string& name);

struct SuiteResult {
  std::vector<ResultRecord> records;  // sorted by (problem, solver, C_scale, C_t_scale, id)
  std::string csv;                    // deterministic: no timing columns
  std::string timings_csv;
  std::string summary;
};

SuiteResult run_suite(const std::vector<ExperimentConfig>& manifest, int parallelism);

// ------------------------------------------------------------------ output
std::string format_number(double v);
std::string results_csv_header();
std::vector<std::string> results_csv_rows(const ResultRecord& r);
std::string results_csv(const std::vector<ResultRecord>& records);
std::string timings_csv(const std::vector<ResultRecord>& records);
std::string summary_table(const std::vector<ResultRecord>& records);
// Columns: epsilon, cond, tv, data_loss, objective, selected.
std::string tune_csv(const std::vector<TuneEntry>& trace);

// Writes through a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);
// Stable key order, 2-space indent, trailing newline.
std::string dump_json(const Json& j);
void write_record(const ResultRecord& r, const std::filesystem::path& dir);

struct GridSpec {
  int nx = 64, nt = 8;
};
GridSpec parse_grid(const std::string& s);

using FieldFn = std::function<Vec(const Points&)>;

// Rows: x, t, u_pred, u_exact, abs_err over a tensor grid of the box (x slowest).
std::string surface_csv(const FieldFn& pred, const FieldFn& exact, const Box& box, const GridSpec& g);
void emit_plot_data(const FieldFn& pred, const FieldFn& exact, const Box& box, const GridSpec& g,
                    const std::filesystem::path& dir);
// Re-solves the recorded configuration and writes surface.csv (plus surface_<field>.csv per
// field for coupled problems). Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(const ResultRecord& r, const GridSpec& g,
                                                  const std::filesystem::path& dir);

}  // namespace kansa
