#include "aegis/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "aegis/benchmarks.hpp"
#include "aegis/errors.hpp"
#include "aegis/run_trace.hpp"
#include "aegis/stats.hpp"

namespace aegis {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  return m.line >= 0 ? "line " + std::to_string(m.line + 1) + ": " : "";
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ConfigError(where(node) + "field '" + field + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::BadConversion&) {
    throw ConfigError(where(node) + "field '" + field + "' has an invalid value '" + node.Scalar() + "'");
  }
}

template <typename T>
std::vector<T> list(const YAML::Node& node, const std::string& field) {
  std::vector<T> out;
  if (node.IsNull()) return out;
  if (node.IsScalar()) {
    out.push_back(scalar<T>(node, field));
    return out;
  }
  if (!node.IsSequence()) throw ConfigError(where(node) + "field '" + field + "' must be a list");
  for (const auto& item : node) out.push_back(scalar<T>(item, field));
  return out;
}

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (problems.empty()) throw ConfigError("field 'problems' must list at least one problem");
  if (methods.empty()) throw ConfigError("field 'methods' must list at least one method");
  if (q.empty()) throw ConfigError("field 'q' must list at least one worker count");
  for (const auto& p : problems) make_problem(p);
  for (const auto& m : methods) parse_method(m).validate();
  for (int v : q)
    if (v < 1) throw ConfigError("field 'q' values must be >= 1");
  if (repeats < 1) throw ConfigError("field 'repeats' must be >= 1");
  if (jobs < 1) throw ConfigError("field 'jobs' must be >= 1");
  for (const auto& p : problems) {
    const int d = make_problem(p).dim;
    if (budget <= 2 * d) throw ConfigError("field 'budget' must exceed 2 d = " + std::to_string(2 * d) + " for " + p);
  }
  const std::pair<const char*, const std::optional<int>*> positive[] = {
      {"samples_per_dim", &samples_per_dim},   {"refine", &refine},
      {"nsga_population_per_dim", &nsga_population_per_dim}, {"nsga_generations", &nsga_generations},
      {"fourier_features", &fourier_features}, {"fit_restarts", &fit_restarts},
      {"lhs_candidates", &lhs_candidates}};
  for (const auto& [name, value] : positive)
    if (value->has_value() && **value < 1) throw ConfigError(std::string("field '") + name + "' must be >= 1");
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping of fields");

  ExperimentConfig c;
  std::set<std::string> seen;
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (!seen.insert(key).second) throw ConfigError(where(kv.first) + "duplicate field '" + key + "'");
    if (key == "problems") c.problems = list<std::string>(v, key);
    else if (key == "methods") c.methods = list<std::string>(v, key);
    else if (key == "q") c.q = list<int>(v, key);
    else if (key == "repeats") c.repeats = scalar<int>(v, key);
    else if (key == "budget") c.budget = scalar<int>(v, key);
    else if (key == "seed") c.seed = scalar<std::uint64_t>(v, key);
    else if (key == "out") c.out = scalar<std::string>(v, key);
    else if (key == "jobs") c.jobs = scalar<int>(v, key);
    else if (key == "samples_per_dim") c.samples_per_dim = scalar<int>(v, key);
    else if (key == "refine") c.refine = scalar<int>(v, key);
    else if (key == "nsga_population_per_dim") c.nsga_population_per_dim = scalar<int>(v, key);
    else if (key == "nsga_generations") c.nsga_generations = scalar<int>(v, key);
    else if (key == "fourier_features") c.fourier_features = scalar<int>(v, key);
    else if (key == "fit_restarts") c.fit_restarts = scalar<int>(v, key);
    else if (key == "lhs_candidates") c.lhs_candidates = scalar<int>(v, key);
    else throw ConfigError(where(kv.first) + "unknown field '" + key + "'");

    try {
      if (key == "problems")
        for (const auto& p : c.problems) make_problem(p);
      if (key == "methods")
        for (const auto& m : c.methods) parse_method(m).validate();
    } catch (const ConfigError& e) {
      throw ConfigError(where(v) + e.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string RunKey::file_name() const { return trace_file_name(problem, method, q, repeat); }

std::uint64_t design_seed_for(std::uint64_t base, const std::string& problem, int repeat) {
  return derive_seed(base, "design", problem, repeat);
}

std::uint64_t run_seed_for(std::uint64_t base, const RunKey& key) {
  return derive_seed(base, "run", key.problem, key.method, key.q, key.repeat);
}

RunFilter RunFilter::parse(const std::string& text) {
  RunFilter f;
  std::string* fields[] = {&f.problem, &f.method, &f.q, &f.repeat};
  std::stringstream ss(text);
  std::string part;
  int i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= 4) throw ConfigError("--only takes at most four fields: problem,method,q,repeat");
    *fields[i++] = part == "*" ? "" : part;
  }
  return f;
}

bool RunFilter::matches(const RunKey& key) const {
  return (problem.empty() || problem == key.problem) && (method.empty() || method == key.method) &&
         (q.empty() || q == std::to_string(key.q)) && (repeat.empty() || repeat == std::to_string(key.repeat));
}

std::vector<RunKey> expand_matrix(const ExperimentConfig& config) {
  std::vector<RunKey> keys;
  for (const auto& p : config.problems) {
    const std::string id = make_problem(p).id();
    for (const auto& m : config.methods)
      for (int q : config.q)
        for (int r = 0; r < config.repeats; ++r) keys.push_back({id, m, q, r});
  }
  return keys;
}

RunSpec make_run_spec(const ExperimentConfig& config, const RunKey& key) {
  RunSpec spec;
  spec.problem = make_problem(key.problem);
  const int d = spec.problem.dim;
  spec.strategy = parse_method(key.method);
  spec.strategy.label = key.method;
  spec.q = key.q;
  spec.budget = config.budget;
  spec.repeat = key.repeat;
  spec.seed = run_seed_for(config.seed, key);
  spec.design_seed = design_seed_for(config.seed, key.problem, key.repeat);
  SelectionContext ctx = SelectionContext::for_dimension(d);
  if (config.samples_per_dim) ctx.optimiser.n_samples = *config.samples_per_dim * d;
  if (config.refine) ctx.optimiser.n_refine = *config.refine;
  if (config.nsga_population_per_dim) ctx.nsga.pop_size = 2 * ((*config.nsga_population_per_dim * d + 1) / 2);
  if (config.nsga_generations) ctx.nsga.generations = *config.nsga_generations;
  if (config.fourier_features) ctx.n_features = *config.fourier_features;
  spec.context = ctx;
  if (config.fit_restarts) spec.fit_restarts = *config.fit_restarts;
  if (config.lhs_candidates) spec.lhs_candidates = *config.lhs_candidates;
  return spec;
}

namespace {

json load_manifest(const fs::path& path) {
  if (!fs::exists(path)) return json{{"runs", json::object()}};
  try {
    std::ifstream in(path);
    json m = json::parse(in);
    if (!m.contains("runs")) m["runs"] = json::object();
    return m;
  } catch (const json::exception&) {
    return json{{"runs", json::object()}};
  }
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config, const RunFilter& filter, std::ostream& log) {
  config.validate();
  fs::create_directories(config.out);
  const fs::path manifest_path = config.out / "manifest.json";
  json manifest = load_manifest(manifest_path);

  std::vector<RunKey> todo;
  RunReport report;
  for (const auto& key : expand_matrix(config)) {
    if (!filter.matches(key)) continue;
    ++report.selected;
    if (trace_is_complete(config.out / key.file_name(), config.budget)) {
      ++report.skipped;
      continue;
    }
    todo.push_back(key);
  }
  log << report.selected << " runs selected, " << report.skipped << " already complete, " << todo.size()
      << " to run\n";

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  int done = 0;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      const RunKey& key = todo[i];
      const std::string name = key.file_name();
      const auto t0 = std::chrono::steady_clock::now();
      json entry = {{"problem", key.problem}, {"method", key.method}, {"q", key.q}, {"repeat", key.repeat}};
      std::string error;
      try {
        const RunResult result = run_optimisation(make_run_spec(config, key));
        write_trace(config.out / name, result);
      } catch (const std::exception& e) {
        error = e.what();
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      entry["status"] = error.empty() ? "ok" : "failed";
      if (!error.empty()) entry["error"] = error;
      entry["seconds"] = secs;

      std::lock_guard lock(mu);
      ++done;
      manifest["runs"][name] = entry;
      write_file_atomic(manifest_path, manifest.dump(2) + "\n");
      if (error.empty()) {
        ++report.completed;
        log << "[" << done << "/" << todo.size() << "] " << name << " ok (" << format_sci(secs) << " s)\n";
      } else {
        ++report.failed;
        report.failures.push_back(name + ": " + error);
        log << "[" << done << "/" << todo.size() << "] " << name << " FAILED: " << error << "\n";
      }
      log.flush();
    }
  };
  const int n_threads = std::max(1, std::min<int>(config.jobs, static_cast<int>(todo.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (report.failed > 0)
    log << "WARNING: " << report.failed << " run(s) failed and are excluded from statistics; see "
        << manifest_path.string() << "\n";
  return report;
}

namespace {

struct GroupData {
  // method -> repeat -> run
  std::map<std::string, std::map<int, RunResult>> runs;
};

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

}  // namespace

SummaryReport summarize(const fs::path& results, const fs::path& out, std::ostream& log, int n_boot) {
  if (!fs::is_directory(results)) throw ConfigError("results directory " + results.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(results))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::map<std::pair<std::string, int>, GroupData> groups;
  SummaryReport report;
  for (const auto& f : files) {
    RunResult r;
    try {
      r = read_trace(f);
    } catch (const std::exception& e) {
      log << "WARNING: skipping " << f.filename().string() << ": " << e.what() << "\n";
      continue;
    }
    if (static_cast<int>(r.evaluations.size()) != r.budget) {
      log << "WARNING: skipping incomplete trace " << f.filename().string() << "\n";
      continue;
    }
    groups[{r.problem, r.q}].runs[r.method][r.repeat] = std::move(r);
    ++report.traces;
  }
  if (report.traces == 0) throw ConfigError("no complete traces in " + results.string());
  fs::create_directories(out);

  std::ostringstream csv, txt, prop;
  csv << "problem,q,method,repeats,median,mad,flag,p_value\n";
  // q -> method -> (problems, best_or_equivalent)
  std::map<int, std::map<std::string, std::pair<int, int>>> proportion;

  for (auto& [gkey, group] : groups) {
    const auto& [problem_id, q] = gkey;
    const Problem problem = make_problem(problem_id);
    ++report.groups;

    // Pair by repeat index: keep the repeats every method has.
    std::set<int> common;
    bool first = true;
    for (const auto& [method, reps] : group.runs) {
      std::set<int> mine;
      for (const auto& [r, run] : reps) mine.insert(r);
      if (first) {
        common = mine;
        first = false;
      } else {
        std::set<int> both;
        std::set_intersection(common.begin(), common.end(), mine.begin(), mine.end(),
                              std::inserter(both, both.begin()));
        if (both.size() != common.size() || both.size() != mine.size())
          log << "WARNING: " << problem_id << " q=" << q << ": methods have different repeats; using the "
              << both.size() << " shared ones\n";
        common = std::move(both);
      }
    }
    if (common.empty()) {
      log << "WARNING: " << problem_id << " q=" << q << ": no repeat shared by all methods, skipped\n";
      continue;
    }

    std::vector<MethodOutcome> outcomes;
    std::vector<std::vector<std::vector<double>>> traces;
    std::vector<std::string> names;
    for (const auto& [method, reps] : group.runs) {
      MethodOutcome o{method, {}};
      std::vector<std::vector<double>> tr;
      for (int r : common) {
        o.regrets.push_back(final_regret(reps.at(r), problem.f_min));
        tr.push_back(regret_trace(reps.at(r), problem.f_min));
      }
      outcomes.push_back(std::move(o));
      traces.push_back(std::move(tr));
      names.push_back(method);
    }

    const ComparisonTable table = best_or_equivalent(outcomes);
    if (!table.tie_note.empty()) log << "NOTE: " << problem_id << " q=" << q << ": " << table.tie_note << "\n";

    txt << problem_id << " (q=" << q << ", " << common.size() << " repeats)\n";
    std::size_t w = 6;
    for (const auto& n : names) w = std::max(w, n.size());
    txt << "  " << pad("Method", w) << "  " << pad("Median", 9) << "  " << pad("MAD", 9) << "  flag\n";
    for (const auto& row : table.rows) {
      csv << problem_id << "," << q << "," << row.method << "," << common.size() << "," << format_full(row.median)
          << "," << format_full(row.mad) << "," << to_string(row.flag) << "," << format_full(row.p_value) << "\n";
      const char* mark = row.flag == Flag::Best ? "best" : row.flag == Flag::Equivalent ? "equivalent" : "";
      txt << "  " << pad(row.method, w) << "  " << pad(format_sci(row.median), 9) << "  "
          << pad(format_sci(row.mad), 9) << "  " << mark << "\n";
      auto& counts = proportion[q][row.method];
      ++counts.first;
      counts.second += row.flag != Flag::Worse;
    }
    txt << "\n";

    const std::string stem = problem_id + "_q" + std::to_string(q);
    const std::size_t iters = traces.front().front().size();
    std::ostringstream conv;
    conv << "iteration,method,q25,q50,q75\n";
    for (std::size_t t = 0; t < iters; ++t) {
      for (std::size_t k = 0; k < names.size(); ++k) {
        std::vector<double> col;
        for (const auto& tr : traces[k]) col.push_back(tr[t]);
        conv << t + 1 << "," << names[k] << "," << format_full(quantile(col, 0.25)) << ","
             << format_full(quantile(col, 0.5)) << "," << format_full(quantile(col, 0.75)) << "\n";
      }
    }
    const fs::path conv_path = out / ("convergence_" + stem + ".csv");
    write_file_atomic(conv_path, conv.str());
    report.files.push_back(conv_path);

    Rng rng(derive_seed(0, "ranks", problem_id, q));
    const auto ranks = fractional_rank_bootstrap(traces, n_boot, rng);
    std::ostringstream rk;
    rk << "iteration,method,mean_rank\n";
    for (std::size_t t = 0; t < iters; ++t)
      for (std::size_t k = 0; k < names.size(); ++k)
        rk << t + 1 << "," << names[k] << "," << format_full(ranks[k][t]) << "\n";
    const fs::path rank_path = out / ("ranks_" + stem + ".csv");
    write_file_atomic(rank_path, rk.str());
    report.files.push_back(rank_path);
  }

  prop << "q,method,problems,best_or_equivalent,proportion\n";
  for (const auto& [q, methods] : proportion)
    for (const auto& [method, counts] : methods)
      prop << q << "," << method << "," << counts.first << "," << counts.second << ","
           << format_full(static_cast<double>(counts.second) / counts.first) << "\n";

  const fs::path csv_path = out / "summary.csv", txt_path = out / "summary.txt", prop_path = out / "best_proportion.csv";
  write_file_atomic(csv_path, csv.str());
  write_file_atomic(txt_path, txt.str());
  write_file_atomic(prop_path, prop.str());
  report.files.insert(report.files.begin(), {csv_path, txt_path, prop_path});
  return report;
}

void list_problems(std::ostream& os) {
  os << "name,d,bounds,f_min\n";
  for (const auto& key : problem_registry()) {
    const Problem p = make_problem(key.name, key.dim);
    std::string bounds;
    const bool uniform = (p.bounds.lower.array() == p.bounds.lower[0]).all() &&
                         (p.bounds.upper.array() == p.bounds.upper[0]).all();
    auto num = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", v);
      return std::string(buf);
    };
    if (uniform) {
      bounds = "[" + num(p.bounds.lower[0]) + " " + num(p.bounds.upper[0]) + "]^" + std::to_string(p.dim);
    } else {
      for (int i = 0; i < p.dim; ++i)
        bounds += (i ? "x[" : "[") + num(p.bounds.lower[i]) + " " + num(p.bounds.upper[i]) + "]";
    }
    os << p.name << "," << p.dim << "," << bounds << "," << format_full(p.f_min) << "\n";
  }
}

}  // namespace aegis
