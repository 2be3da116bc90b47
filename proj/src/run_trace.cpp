#include "aegis/run_trace.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "aegis/errors.hpp"

namespace aegis {

using nlohmann::json;

namespace {

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd json_vector(const json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

json header_json(const RunResult& r) {
  const SelectionContext& c = r.context;
  json config = {
      {"method", r.method},
      {"kind", std::string(to_string(r.strategy.kind))},
      {"gamma", r.strategy.gamma},
      {"epsilon_fixed", r.strategy.schedule.fixed_value},
      {"epsilon_variant", static_cast<int>(r.strategy.schedule.variant)},
      {"fit_restarts", r.fit_restarts},
      {"acq_samples", c.optimiser.n_samples},
      {"acq_refine", c.optimiser.n_refine},
      {"acq_refine_steps", c.optimiser.max_refine_steps},
      {"nsga_population", c.nsga.pop_size},
      {"nsga_generations", c.nsga.generations},
      {"fourier_features", c.n_features},
  };
  return json{{"type", "header"},   {"problem", r.problem},         {"method", r.method},
              {"q", r.q},           {"budget", r.budget},           {"repeat", r.repeat},
              {"seed", r.seed},     {"design_seed", r.design_seed}, {"n_initial", r.n_initial},
              {"config", config}};
}

json evaluation_json(const EvaluationRecord& e, int iteration) {
  json j = {{"iteration", iteration},
            {"dispatch", e.dispatch_index},
            {"x", vector_json(e.x_raw)},
            {"f", e.f},
            {"submit_time", e.submit_time},
            {"finish_time", e.finish_time},
            {"worker", e.worker_id},
            {"branch", std::string(to_string(e.branch))},
            {"n_train", e.n_train},
            {"n_pending", e.n_pending}};
  if (e.hyperparams) {
    j["lengthscale"] = e.hyperparams->lengthscale;
    j["signal_variance"] = e.hyperparams->signal_variance;
    j["noise_variance"] = e.hyperparams->noise_variance;
  }
  return j;
}

}  // namespace

std::string trace_file_name(const std::string& problem, const std::string& method, int q, int repeat) {
  return problem + "_" + method + "_q" + std::to_string(q) + "_r" + std::to_string(repeat) + ".jsonl";
}

std::string serialise_trace(const RunResult& result) {
  std::string out = header_json(result).dump();
  out += '\n';
  int iteration = 0;
  for (const auto& e : result.evaluations) {
    out += evaluation_json(e, iteration++).dump();
    out += '\n';
  }
  return out;
}

RunResult parse_trace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  RunResult r;
  int line_no = 0;
  try {
    if (!std::getline(in, line)) throw ConsistencyError("empty trace");
    ++line_no;
    const json h = json::parse(line);
    if (h.value("type", "") != "header") throw ConsistencyError("first line is not a header");
    r.problem = h.at("problem").get<std::string>();
    r.method = h.at("method").get<std::string>();
    r.q = h.at("q").get<int>();
    r.budget = h.at("budget").get<int>();
    r.repeat = h.at("repeat").get<int>();
    r.seed = h.at("seed").get<std::uint64_t>();
    r.design_seed = h.at("design_seed").get<std::uint64_t>();
    r.n_initial = h.at("n_initial").get<int>();
    const json& c = h.at("config");
    r.strategy = parse_method(r.method);
    r.fit_restarts = c.at("fit_restarts").get<int>();
    r.context.optimiser.n_samples = c.at("acq_samples").get<int>();
    r.context.optimiser.n_refine = c.at("acq_refine").get<int>();
    r.context.optimiser.max_refine_steps = c.at("acq_refine_steps").get<int>();
    r.context.nsga.pop_size = c.at("nsga_population").get<int>();
    r.context.nsga.generations = c.at("nsga_generations").get<int>();
    r.context.n_features = c.at("fourier_features").get<int>();

    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json j = json::parse(line);
      EvaluationRecord e;
      e.dispatch_index = j.at("dispatch").get<int>();
      e.x_raw = json_vector(j.at("x"));
      e.f = j.at("f").get<double>();
      e.submit_time = j.at("submit_time").get<double>();
      e.finish_time = j.at("finish_time").get<double>();
      e.worker_id = j.at("worker").get<int>();
      e.branch = branch_from_string(j.at("branch").get<std::string>());
      e.n_train = j.at("n_train").get<int>();
      e.n_pending = j.at("n_pending").get<int>();
      if (j.contains("lengthscale"))
        e.hyperparams = GPHyperparams{j.at("lengthscale").get<double>(), j.at("signal_variance").get<double>(),
                                      j.at("noise_variance").get<double>()};
      r.evaluations.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ConsistencyError("trace line " + std::to_string(line_no) + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConsistencyError("trace line " + std::to_string(line_no) + ": " + e.what());
  }
  return r;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::ostringstream suffix;
  suffix << ".tmp." << std::this_thread::get_id();
  std::filesystem::path tmp = path;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StateError("cannot open " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw StateError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_trace(const std::filesystem::path& path, const RunResult& result) {
  write_file_atomic(path, serialise_trace(result));
}

RunResult read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StateError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_trace(buf.str());
  } catch (const ConsistencyError& e) {
    throw ConsistencyError(path.string() + ": " + e.what());
  }
}

bool trace_is_complete(const std::filesystem::path& path, int budget) {
  if (!std::filesystem::is_regular_file(path)) return false;
  try {
    const RunResult r = read_trace(path);
    return r.budget == budget && static_cast<int>(r.evaluations.size()) == budget;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace aegis
