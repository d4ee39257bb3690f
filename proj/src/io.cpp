#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "kansa/experiment.hpp"

namespace kansa {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(cells[i]);
  }
  return line;
}

std::string params_cell(const std::vector<ParamReport>& ps) {
  std::string s;
  for (const auto& p : ps) {
    if (!s.empty()) s += ';';
    s += p.name + "=" + format_number(p.recovered);
  }
  return s;
}

// JSON cannot hold inf/NaN; they travel as strings.
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double denum(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw ConfigError("not a number: " + s);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) return "0";
  char buf[64];
  const double a = std::abs(v);
  if (a < 1e-3 || a >= 1e7) std::snprintf(buf, sizeof buf, "%.6e", v);
  else std::snprintf(buf, sizeof buf, "%.7g", v);
  return buf;
}

std::string results_csv_header() {
  return "id,problem,solver,c_scale,ct_scale,field,l2,rel_l2,excluded,stable,failed,cond_estimate,params,error";
}

std::vector<std::string> results_csv_rows(const ResultRecord& r) {
  std::vector<std::string> rows;
  auto row = [&](const FieldScore* s) {
    rows.push_back(join({r.id, r.problem, r.solver, std::to_string(r.c_scale), std::to_string(r.ct_scale),
                         s ? s->field : "", s ? format_number(s->l2) : "", s ? format_number(s->rel_l2) : "",
                         s ? std::to_string(s->excluded) : "", r.stable ? "stable" : "unstable",
                         r.failed ? "1" : "0", format_number(r.cond_estimate), params_cell(r.params), r.error}));
  };
  if (r.scores.empty()) row(nullptr);
  for (const auto& s : r.scores) row(&s);
  return rows;
}

std::string results_csv(const std::vector<ResultRecord>& records) {
  std::string out = results_csv_header() + "\n";
  for (const auto& r : records)
    for (const auto& line : results_csv_rows(r)) out += line + "\n";
  return out;
}

std::string timings_csv(const std::vector<ResultRecord>& records) {
  std::string out = "id,problem,solver,c_scale,ct_scale,train_time_s,infer_time_s\n";
  for (const auto& r : records)
    out += join({r.id, r.problem, r.solver, std::to_string(r.c_scale), std::to_string(r.ct_scale),
                 format_number(r.train_time_s), format_number(r.infer_time_s)}) +
           "\n";
  return out;
}

std::string summary_table(const std::vector<ResultRecord>& records) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-30s %-16s %-16s %4s %4s %-5s %-13s %-9s\n", "id", "problem", "solver",
                "C", "Ct", "field", "rel_l2", "status");
  os << buf;
  for (const auto& r : records) {
    const std::string status = r.failed ? "failed" : (r.stable ? "stable" : "unstable");
    auto line = [&](const std::string& field, const std::string& value) {
      std::snprintf(buf, sizeof buf, "%-30s %-16s %-16s %4d %4d %-5s %-13s %-9s\n", r.id.c_str(),
                    r.problem.c_str(), r.solver.c_str(), r.c_scale, r.ct_scale, field.c_str(), value.c_str(),
                    status.c_str());
      os << buf;
    };
    if (r.scores.empty()) line("", params_cell(r.params));
    for (const auto& s : r.scores) line(s.field, format_number(s.rel_l2));
  }
  return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  thread_local std::mt19937_64 rng(std::random_device{}());
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rng() % 1000000007);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const ResultRecord& r) {
  Json j;
  j["id"] = r.id;
  j["problem"] = r.problem;
  j["solver"] = r.solver;
  j["c_scale"] = r.c_scale;
  j["ct_scale"] = r.ct_scale;
  j["scores"] = Json::array();
  for (const auto& s : r.scores)
    j["scores"].push_back({{"field", s.field}, {"l2", num(s.l2)}, {"rel_l2", num(s.rel_l2)}, {"excluded", s.excluded}});
  j["train_time_s"] = num(r.train_time_s);
  j["infer_time_s"] = num(r.infer_time_s);
  j["params"] = Json::array();
  for (const auto& p : r.params)
    j["params"].push_back({{"name", p.name}, {"initial", num(p.initial)}, {"recovered", num(p.recovered)},
                           {"reference", num(p.reference)}});
  j["stable"] = r.stable;
  j["failed"] = r.failed;
  j["error"] = r.error;
  j["cond_estimate"] = num(r.cond_estimate);
  j["extra"] = Json::object();
  for (const auto& [k, v] : r.extra) j["extra"][k] = num(v);
  if (r.config) j["config"] = to_json(*r.config);
  return j;
}

ResultRecord record_from_json(const Json& j) {
  try {
    ResultRecord r;
    r.id = j.at("id").get<std::string>();
    r.problem = j.at("problem").get<std::string>();
    r.solver = j.at("solver").get<std::string>();
    r.c_scale = j.at("c_scale").get<int>();
    r.ct_scale = j.at("ct_scale").get<int>();
    for (const auto& s : j.at("scores"))
      r.scores.push_back({s.at("field").get<std::string>(), denum(s.at("l2")), denum(s.at("rel_l2")),
                          s.at("excluded").get<int>()});
    r.train_time_s = denum(j.at("train_time_s"));
    r.infer_time_s = denum(j.at("infer_time_s"));
    for (const auto& p : j.at("params"))
      r.params.push_back({p.at("name").get<std::string>(), denum(p.at("initial")), denum(p.at("recovered")),
                          denum(p.at("reference"))});
    r.stable = j.at("stable").get<bool>();
    r.failed = j.at("failed").get<bool>();
    r.error = j.at("error").get<std::string>();
    r.cond_estimate = denum(j.at("cond_estimate"));
    for (auto it = j.at("extra").begin(); it != j.at("extra").end(); ++it) r.extra[it.key()] = denum(*it);
    if (j.contains("config")) r.config = config_from_json(j.at("config"));
    return r;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed record: ") + e.what());
  }
}

void write_record(const ResultRecord& r, const std::filesystem::path& dir) {
  write_atomic(dir / (r.id + ".json"), dump_json(to_json(r)));
  std::string csv = results_csv_header() + "\n";
  for (const auto& line : results_csv_rows(r)) csv += line + "\n";
  write_atomic(dir / (r.id + ".csv"), csv);
  if (!r.tune_trace.empty()) write_atomic(dir / (r.id + "_tune.csv"), tune_csv(r.tune_trace));
}

std::string tune_csv(const std::vector<TuneEntry>& trace) {
  std::string out = "epsilon,cond,tv,data_loss,objective,selected\n";
  for (const auto& e : trace)
    out += format_number(e.epsilon) + "," + format_number(e.cond) + "," + format_number(e.tv) + "," +
           format_number(e.data_loss) + "," + format_number(e.objective) + "," + (e.selected ? "1" : "0") + "\n";
  return out;
}

GridSpec parse_grid(const std::string& s) {
  const auto x = s.find('x');
  GridSpec g;
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    size_t used = 0;
    g.nx = std::stoi(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(s);
    g.nt = std::stoi(s.substr(x + 1), &used);
    if (used != s.size() - x - 1) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw ConfigError("grid must look like 64x8, got: " + s);
  }
  if (g.nx < 1 || g.nt < 1) throw ConfigError("grid sizes must be positive");
  return g;
}

std::string surface_csv(const FieldFn& pred, const FieldFn& exact, const Box& box, const GridSpec& g) {
  Points q = tensor_grid({linspace(box.lo[0], box.hi[0], g.nx), linspace(box.lo[1], box.hi[1], g.nt)});
  Vec p = pred(q), e = exact(q);
  std::string out = "x,t,u_pred,u_exact,abs_err\n";
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    out += format_number(q(i, 0)) + "," + format_number(q(i, 1)) + "," + format_number(p[i]) + "," +
           format_number(e[i]) + "," + format_number(std::abs(p[i] - e[i])) + "\n";
  return out;
}

void emit_plot_data(const FieldFn& pred, const FieldFn& exact, const Box& box, const GridSpec& g,
                    const std::filesystem::path& dir) {
  write_atomic(dir / "surface.csv", surface_csv(pred, exact, box, g));
}

}  // namespace kansa
