/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "flexsched/metrics.h"
#include "flexsched/trace.h"

namespace flexsched::tools {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

EmpiricalDistribution ParseDistribution(const json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array of [value, cdf] pairs");
  std::vector<std::pair<double, double>> points;
  for (const json& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw InputError(what + " must be an array of [value, cdf] pairs");
    }
    points.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  try {
    return EmpiricalDistribution(std::move(points));
  } catch (const InputError& e) {
    throw InputError(what + ": " + e.what());
  }
}

json DistributionToJson(const EmpiricalDistribution& d) {
  json arr = json::array();
  for (const auto& [v, p] : d.points()) arr.push_back({v, p});
  return arr;
}

void ParseClass(const json& j, ClassDistributions& d, const std::string& name) {
  auto field = [&](const char* key, EmpiricalDistribution& target) {
    if (j.contains(key)) target = ParseDistribution(j.at(key), name + "." + key);
  };
  field("runtime", d.runtime);
  field("cpu", d.cpu);
  // Either RAM form replaces whichever one the base spec had.
  if (j.contains("ram") || j.contains("ram_per_cpu")) {
    d.ram = {};
    d.ram_per_cpu = {};
  }
  field("ram", d.ram);
  field("ram_per_cpu", d.ram_per_cpu);
  field("n_core", d.n_core);
  field("n_elastic", d.n_elastic);
}

json ClassToJson(const ClassDistributions& d) {
  json j;
  j["runtime"] = DistributionToJson(d.runtime);
  j["cpu"] = DistributionToJson(d.cpu);
  if (!d.ram.empty()) j["ram"] = DistributionToJson(d.ram);
  if (!d.ram_per_cpu.empty()) j["ram_per_cpu"] = DistributionToJson(d.ram_per_cpu);
  j["n_core"] = DistributionToJson(d.n_core);
  if (!d.n_elastic.empty()) j["n_elastic"] = DistributionToJson(d.n_elastic);
  return j;
}

template <typename T>
T Get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(where + "." + key + " has the wrong type");
  }
}

bool ParseOnOff(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "on" || s == "true") return true;
    if (s == "off" || s == "false") return false;
  }
  throw InputError("preemption values must be booleans or on/off");
}

std::string Hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

void AddStatistics(json& rows, const std::string& metric, const std::string& cls,
                   const Summary& s) {
  for (const auto& [name, value] : Statistics(s)) {
    rows.push_back({{"metric", metric}, {"class", cls}, {"statistic", name}, {"value", value}});
  }
}

void AddAppStatistics(json& rows, const std::string& cls, const std::vector<AppMetrics>& ms) {
  if (ms.empty()) return;
  std::vector<double> turnaround, queuing, slowdown;
  for (const AppMetrics& m : ms) {
    turnaround.push_back(m.turnaround);
    queuing.push_back(m.queuing);
    slowdown.push_back(m.slowdown);
  }
  AddStatistics(rows, "turnaround", cls, Summarize(turnaround));
  AddStatistics(rows, "queuing", cls, Summarize(queuing));
  AddStatistics(rows, "slowdown", cls, Summarize(slowdown));
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string CsvNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return FormatNumber(v);
}

}  // namespace

void ExperimentConfig::Validate() const {
  cluster.Validate();
  if (schedulers.empty()) throw InputError("at least one scheduler is required");
  if (policies.empty()) throw InputError("at least one policy is required");
  if (seeds.empty()) throw InputError("at least one seed is required");
  if (preemption.empty()) throw InputError("at least one preemption setting is required");
  if (trace) {
    if (!fs::exists(*trace)) throw InputError("trace " + trace->string() + " does not exist");
  } else {
    workload.Validate();
  }
  const bool wants_preemption =
      std::find(preemption.begin(), preemption.end(), true) != preemption.end();
  const bool has_flexible = std::find(schedulers.begin(), schedulers.end(),
                                      SchedulerKind::kFlexible) != schedulers.end();
  if (wants_preemption && !has_flexible) {
    throw InputError("preemption is only valid with the flexible scheduler");
  }
}

WorkloadSpec ParseWorkloadSpec(const json& doc, WorkloadSpec spec) {
  if (!doc.is_object()) throw InputError("workload spec must be an object");
  const std::string where = "workload";
  if (doc.contains("n_apps")) spec.n_apps = Get<int>(doc, "n_apps", where);
  if (doc.contains("seed")) spec.seed = Get<std::uint64_t>(doc, "seed", where);
  if (doc.contains("mix")) {
    const json& mix = doc.at("mix");
    if (mix.contains("batch")) spec.batch_fraction = Get<double>(mix, "batch", "mix");
    if (mix.contains("interactive")) {
      spec.interactive_fraction = Get<double>(mix, "interactive", "mix");
    }
    // A lone fraction implies its complement.
    if (mix.contains("batch") && !mix.contains("interactive")) {
      spec.interactive_fraction = 1.0 - spec.batch_fraction;
    } else if (mix.contains("interactive") && !mix.contains("batch")) {
      spec.batch_fraction = 1.0 - spec.interactive_fraction;
    }
    if (mix.contains("batch_elastic")) {
      spec.elastic_fraction = Get<double>(mix, "batch_elastic", "mix");
    }
    if (mix.contains("batch_rigid")) spec.rigid_fraction = Get<double>(mix, "batch_rigid", "mix");
    if (mix.contains("batch_elastic") && !mix.contains("batch_rigid")) {
      spec.rigid_fraction = 1.0 - spec.elastic_fraction;
    } else if (mix.contains("batch_rigid") && !mix.contains("batch_elastic")) {
      spec.elastic_fraction = 1.0 - spec.rigid_fraction;
    }
  }
  if (doc.contains("inter_arrival")) {
    spec.inter_arrival = ParseDistribution(doc.at("inter_arrival"), "inter_arrival");
  }
  if (doc.contains("gaussian_arrivals")) {
    const json& g = doc.at("gaussian_arrivals");
    if (g.is_null()) {
      spec.gaussian_arrivals.reset();
    } else {
      spec.gaussian_arrivals = GaussianArrivals{Get<double>(g, "mean", "gaussian_arrivals"),
                                                Get<double>(g, "stddev", "gaussian_arrivals")};
    }
  }
  if (doc.contains("classes")) {
    const json& c = doc.at("classes");
    if (c.contains("batch_elastic")) ParseClass(c.at("batch_elastic"), spec.batch_elastic, "batch_elastic");
    if (c.contains("batch_rigid")) ParseClass(c.at("batch_rigid"), spec.batch_rigid, "batch_rigid");
    if (c.contains("interactive")) ParseClass(c.at("interactive"), spec.interactive, "interactive");
  }
  if (doc.contains("fit_full_demand")) {
    spec.fit_full_demand = Get<bool>(doc, "fit_full_demand", where);
  }
  return spec;
}

json WorkloadSpecToJson(const WorkloadSpec& spec) {
  json j;
  j["n_apps"] = spec.n_apps;
  j["seed"] = spec.seed;
  j["mix"] = {{"batch", spec.batch_fraction},
              {"interactive", spec.interactive_fraction},
              {"batch_elastic", spec.elastic_fraction},
              {"batch_rigid", spec.rigid_fraction}};
  j["inter_arrival"] = DistributionToJson(spec.inter_arrival);
  if (spec.gaussian_arrivals) {
    j["gaussian_arrivals"] = {{"mean", spec.gaussian_arrivals->mean},
                              {"stddev", spec.gaussian_arrivals->stddev}};
  }
  j["classes"] = {{"batch_elastic", ClassToJson(spec.batch_elastic)},
                  {"batch_rigid", ClassToJson(spec.batch_rigid)},
                  {"interactive", ClassToJson(spec.interactive)}};
  j["fit_full_demand"] = spec.fit_full_demand;
  return j;
}

ExperimentConfig ParseConfig(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw InputError("configuration must be a JSON object");
  ExperimentConfig cfg;
  if (doc.contains("cluster")) {
    const json& c = doc.at("cluster");
    if (c.contains("n_machines")) cfg.cluster.n_machines = Get<int>(c, "n_machines", "cluster");
    if (c.contains("cpu")) cfg.cluster.per_machine.cpu = Get<double>(c, "cpu", "cluster");
    if (c.contains("ram_mb")) cfg.cluster.per_machine.ram = Get<double>(c, "ram_mb", "cluster");
  }
  if (doc.contains("workload")) {
    const json& w = doc.at("workload");
    if (w.contains("trace")) {
      fs::path p = Get<std::string>(w, "trace", "workload");
      cfg.trace = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else {
      cfg.workload = ParseWorkloadSpec(w, cfg.workload);
    }
  }
  if (doc.contains("schedulers")) {
    cfg.schedulers.clear();
    for (const json& s : doc.at("schedulers")) {
      cfg.schedulers.push_back(ParseSchedulerKind(s.get<std::string>()));
    }
  }
  if (doc.contains("policies")) {
    cfg.policies.clear();
    for (const json& p : doc.at("policies")) cfg.policies.push_back(PolicyId::Parse(p.get<std::string>()));
  }
  if (doc.contains("preemption")) {
    cfg.preemption.clear();
    const json& p = doc.at("preemption");
    if (p.is_array()) {
      for (const json& v : p) cfg.preemption.push_back(ParseOnOff(v));
    } else {
      cfg.preemption.push_back(ParseOnOff(p));
    }
  }
  if (doc.contains("seeds")) {
    cfg.seeds.clear();
    for (const json& s : doc.at("seeds")) cfg.seeds.push_back(s.get<std::uint64_t>());
  }
  if (doc.contains("output_dir")) {
    fs::path p = Get<std::string>(doc, "output_dir", "config");
    cfg.output_dir = p;
  }
  if (doc.contains("jobs")) cfg.jobs = Get<unsigned>(doc, "jobs", "config");
  cfg.workload.cluster = cfg.cluster;
  return cfg;
}

ExperimentConfig LoadConfig(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  try {
    return ParseConfig(doc, path.parent_path());
  } catch (const json::exception& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
}

std::vector<Request> BuildWorkload(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.trace) return ReadTrace(*config.trace);
  WorkloadSpec spec = config.workload;
  spec.seed = seed;
  spec.cluster = config.cluster;
  return Generate(spec);
}

std::string CellSpec::Name() const {
  std::string name(ToString(scheduler.kind));
  if (scheduler.preemption) name += "-preempt";
  return name + "_" + scheduler.policy.Name() + "_seed" + std::to_string(seed);
}

std::vector<CellSpec> ExpandCells(const ExperimentConfig& config) {
  std::vector<CellSpec> cells;
  std::set<std::string> seen;
  for (std::uint64_t seed : config.seeds) {
    for (SchedulerKind kind : config.schedulers) {
      for (const PolicyId& policy : config.policies) {
        for (bool preempt : config.preemption) {
          if (preempt && kind != SchedulerKind::kFlexible) continue;
          CellSpec cell{SchedulerConfig{kind, policy, preempt}, seed};
          if (seen.insert(cell.Name()).second) cells.push_back(cell);
        }
      }
    }
  }
  return cells;
}

json SummarizeCell(const CellSpec& cell, const SimResult& result,
                   std::uint64_t workload_fingerprint, std::size_t n_requests) {
  json j;
  j["cell"] = cell.Name();
  j["scheduler"] = std::string(ToString(cell.scheduler.kind));
  j["preemption"] = cell.scheduler.preemption;
  j["policy"] = cell.scheduler.policy.Name();
  j["seed"] = cell.seed;
  j["cluster"] = {{"n_machines", result.meta.cluster.n_machines},
                  {"cpu", result.meta.cluster.per_machine.cpu},
                  {"ram_mb", result.meta.cluster.per_machine.ram}};
  j["workload_fingerprint"] = Hex(workload_fingerprint);
  j["n_requests"] = n_requests;
  j["completed"] = result.completed.size();
  json rejected = json::array();
  for (const auto& r : result.rejected) rejected.push_back({{"id", r.id}, {"reason", r.reason}});
  j["rejected"] = rejected;
  j["makespan_s"] = result.makespan;

  json rows = json::array();
  const auto metrics = ComputeAppMetrics(result);
  AddAppStatistics(rows, "all", metrics);
  for (const auto& [cls, ms] : GroupByClass(metrics)) AddAppStatistics(rows, cls, ms);
  const ClusterStats cs = AllocationStats(result);
  AddStatistics(rows, "alloc_cpu", "cluster", cs.cpu);
  AddStatistics(rows, "alloc_ram", "cluster", cs.ram);
  AddStatistics(rows, "pending", "cluster", cs.pending);
  AddStatistics(rows, "running", "cluster", cs.running);
  j["statistics"] = rows;
  return j;
}

void WriteCell(const fs::path& dir, const CellOutcome& outcome) {
  const fs::path cell_dir = dir / outcome.cell.Name();
  fs::create_directories(cell_dir);
  if (!outcome.ok || !outcome.result) {
    json j = {{"cell", outcome.cell.Name()}, {"error", outcome.error}};
    WriteFile(cell_dir / "error.json", j.dump(2) + "\n");
    return;
  }
  std::error_code ignored;
  fs::remove(cell_dir / "error.json", ignored);
  const SimResult& result = *outcome.result;
  std::ostringstream per_app;
  WriteAppMetricsCsv(per_app, ComputeAppMetrics(result));
  WriteFile(cell_dir / "per_app.csv", per_app.str());
  std::ostringstream series;
  WriteTimeSeriesCsv(series, result.series);
  WriteFile(cell_dir / "timeseries.csv", series.str());
  WriteFile(cell_dir / "summary.json",
            SummarizeCell(outcome.cell, result, outcome.workload_fingerprint, outcome.n_requests)
                    .dump(2) +
                "\n");
}

std::vector<CellOutcome> RunSweep(const ExperimentConfig& config, bool write_outputs,
                                  std::ostream& log) {
  config.Validate();
  const auto cells = ExpandCells(config);
  if (cells.empty()) throw InputError("the configuration expands to no cells");

  // Workloads are shared by every cell of a seed.
  std::map<std::uint64_t, std::vector<Request>> workloads;
  for (std::uint64_t seed : config.seeds) {
    if (!workloads.contains(seed)) workloads.emplace(seed, BuildWorkload(config, seed));
  }

  std::vector<CellOutcome> outcomes(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      CellOutcome& out = outcomes[i];
      out.cell = cells[i];
      const auto& requests = workloads.at(cells[i].seed);
      out.n_requests = requests.size();
      out.workload_fingerprint = Fingerprint(requests);
      try {
        SimResult r = Run(requests, cells[i].scheduler, config.cluster);
        r.meta.seed = cells[i].seed;
        out.result = std::move(r);
        out.ok = true;
      } catch (const std::exception& e) {
        out.error = e.what();
      }
      if (write_outputs) {
        try {
          WriteCell(config.output_dir, out);
        } catch (const std::exception& e) {
          out.ok = false;
          out.error = e.what();
        }
      }
      std::lock_guard lock(log_mu);
      log << (out.ok ? "done   " : "FAILED ") << out.cell.Name();
      if (!out.ok) log << ": " << out.error;
      log << '\n';
    }
  };

  unsigned n_workers = config.jobs != 0 ? config.jobs : std::thread::hardware_concurrency();
  n_workers = std::clamp<unsigned>(n_workers, 1, static_cast<unsigned>(cells.size()));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }
  return outcomes;
}

GenloadReport CmdGenload(const ExperimentConfig& config, std::uint64_t seed,
                         const fs::path& out_path, std::ostream& log) {
  WorkloadSpec spec = config.workload;
  spec.seed = seed;
  spec.cluster = config.cluster;
  const auto requests = Generate(spec);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  WriteTrace(out_path, requests);

  GenloadReport report;
  report.count = requests.size();
  Resources lo{1e300, 1e300}, hi{0, 0};
  int max_core = 0, max_elastic = 0;
  for (const Request& r : requests) {
    switch (r.app_class) {
      case AppClass::kBatchElastic:
        ++report.batch_elastic;
        break;
      case AppClass::kBatchRigid:
        ++report.batch_rigid;
        break;
      case AppClass::kInteractive:
        ++report.interactive;
        break;
    }
    lo.cpu = std::min(lo.cpu, r.per_component.cpu);
    lo.ram = std::min(lo.ram, r.per_component.ram);
    hi.cpu = std::max(hi.cpu, r.per_component.cpu);
    hi.ram = std::max(hi.ram, r.per_component.ram);
    max_core = std::max(max_core, r.n_core);
    max_elastic = std::max(max_elastic, r.n_elastic);
  }
  log << "wrote " << report.count << " requests to " << out_path.string() << '\n'
      << "  batch_elastic " << report.batch_elastic << ", batch_rigid " << report.batch_rigid
      << ", interactive " << report.interactive << '\n';
  if (!requests.empty()) {
    log << "  per-component cpu [" << lo.cpu << ", " << hi.cpu << "], ram MB [" << lo.ram
        << ", " << hi.ram << "], n_core <= " << max_core << ", n_elastic <= " << max_elastic
        << '\n';
  }
  return report;
}

int CmdSimulate(const ExperimentConfig& config, std::ostream& log) {
  const auto outcomes = RunSweep(config, true, log);
  bool all_ok = true;
  log << std::left << std::setw(40) << "cell" << std::right << std::setw(16)
      << "mean turnaround" << std::setw(16) << "p50 turnaround" << '\n';
  for (const auto& o : outcomes) {
    if (!o.ok) {
      all_ok = false;
      log << std::left << std::setw(40) << o.cell.Name() << "  error: " << o.error << '\n';
      continue;
    }
    const auto metrics = ComputeAppMetrics(*o.result);
    std::vector<double> t;
    for (const auto& m : metrics) t.push_back(m.turnaround);
    log << std::left << std::setw(40) << o.cell.Name() << std::right;
    if (t.empty()) {
      log << std::setw(16) << "-" << std::setw(16) << "-" << '\n';
    } else {
      const Summary s = Summarize(t);
      log << std::setw(16) << s.mean << std::setw(16) << s.p50 << '\n';
    }
  }
  return all_ok ? kExitOk : kExitSimulationError;
}

namespace {

struct LoadedCell {
  std::string name;
  std::string fingerprint;
  // (metric, class, statistic) -> value
  std::map<std::tuple<std::string, std::string, std::string>, double> values;
  std::vector<std::tuple<std::string, std::string, std::string>> order;
};

LoadedCell LoadCell(const fs::path& summary_path) {
  std::ifstream in(summary_path);
  if (!in) throw InputError("cannot open " + summary_path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(summary_path.string() + ": " + e.what());
  }
  LoadedCell cell;
  cell.name = j.value("cell", summary_path.parent_path().filename().string());
  cell.fingerprint = j.value("workload_fingerprint", "");
  for (const json& row : j.at("statistics")) {
    auto key = std::make_tuple(row.at("metric").get<std::string>(),
                               row.at("class").get<std::string>(),
                               row.at("statistic").get<std::string>());
    const json& v = row.at("value");
    cell.values[key] = v.is_number() ? v.get<double>() : std::nan("");
    cell.order.push_back(key);
  }
  return cell;
}

}  // namespace

int CmdReport(const std::vector<fs::path>& inputs, const fs::path& out_dir,
              const std::string& baseline, std::ostream& log) {
  std::vector<fs::path> summaries;
  for (const fs::path& in : inputs) {
    if (fs::is_regular_file(in)) {
      summaries.push_back(in);
    } else if (fs::exists(in / "summary.json")) {
      summaries.push_back(in / "summary.json");
    } else if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(in)) {
        if (entry.is_directory() && fs::exists(entry.path() / "summary.json")) {
          found.push_back(entry.path() / "summary.json");
        }
      }
      std::sort(found.begin(), found.end());
      summaries.insert(summaries.end(), found.begin(), found.end());
    } else {
      throw InputError("no result cell at " + in.string());
    }
  }
  if (summaries.empty()) throw InputError("no result cells to report on");

  std::vector<LoadedCell> cells;
  for (const auto& p : summaries) cells.push_back(LoadCell(p));

  std::size_t base = 0;
  if (!baseline.empty()) {
    auto it = std::find_if(cells.begin(), cells.end(),
                           [&](const LoadedCell& c) { return c.name == baseline; });
    if (it == cells.end()) throw InputError("baseline cell '" + baseline + "' not found");
    base = static_cast<std::size_t>(it - cells.begin());
  } else {
    auto it = std::find_if(cells.begin(), cells.end(),
                           [](const LoadedCell& c) { return c.name.starts_with("rigid_"); });
    if (it != cells.end()) base = static_cast<std::size_t>(it - cells.begin());
  }
  const LoadedCell& ref = cells[base];

  fs::create_directories(out_dir);
  std::ostringstream longf;
  longf << "metric,statistic,measure,class,cell,baseline,value,workload_mismatch\n";
  for (const LoadedCell& c : cells) {
    const bool mismatch = c.fingerprint != ref.fingerprint;
    if (mismatch) {
      log << "warning: " << c.name << " ran a different workload than " << ref.name << '\n';
    }
    for (const auto& key : c.order) {
      const auto& [metric, cls, stat] = key;
      const double v = c.values.at(key);
      longf << metric << ',' << stat << ",value," << cls << ',' << c.name << ',' << ref.name
            << ',' << CsvNumber(v) << ',' << (mismatch ? 1 : 0) << '\n';
      if (&c == &ref) continue;
      auto it = ref.values.find(key);
      if (it == ref.values.end()) continue;
      double ratio;
      if (it->second != 0.0) {
        ratio = v / it->second;
      } else {
        ratio = v == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
      }
      longf << metric << ',' << stat << ",ratio," << cls << ',' << c.name << ',' << ref.name
            << ',' << CsvNumber(ratio) << ',' << (mismatch ? 1 : 0) << '\n';
    }
  }
  WriteFile(out_dir / "comparison.csv", longf.str());

  // Wide table: one column per cell.
  std::ostringstream wide;
  wide << "metric,class,statistic";
  for (const LoadedCell& c : cells) wide << ',' << c.name;
  wide << '\n';
  for (const auto& key : ref.order) {
    const auto& [metric, cls, stat] = key;
    wide << metric << ',' << cls << ',' << stat;
    for (const LoadedCell& c : cells) {
      auto it = c.values.find(key);
      wide << ',' << (it == c.values.end() ? std::string() : CsvNumber(it->second));
    }
    wide << '\n';
  }
  WriteFile(out_dir / "table.csv", wide.str());

  log << "compared " << cells.size() << " cell(s) against " << ref.name << "; wrote "
      << (out_dir / "comparison.csv").string() << " and " << (out_dir / "table.csv").string()
      << '\n';
  for (const LoadedCell& c : cells) {
    auto key = std::make_tuple(std::string("turnaround"), std::string("all"), std::string("p50"));
    auto mean = std::make_tuple(std::string("turnaround"), std::string("all"), std::string("mean"));
    log << "  " << std::left << std::setw(40) << c.name << std::right;
    if (c.values.contains(key)) {
      log << " p50 " << std::setw(12) << c.values.at(key) << " mean " << std::setw(12)
          << c.values.at(mean);
      if (&c != &ref && ref.values.contains(key) && ref.values.at(key) != 0.0) {
        log << "  p50 ratio " << c.values.at(key) / ref.values.at(key);
      }
    }
    log << '\n';
  }
  return kExitOk;
}

}  // namespace flexsched::tools
