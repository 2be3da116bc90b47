#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "aegis/errors.hpp"
#include "aegis/harness.hpp"
#include "aegis/run_trace.hpp"
#include "aegis/stats.hpp"

using namespace aegis;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("aegis_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> jsonl_files(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".jsonl") names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

// Small inner budgets so a run takes milliseconds.
ExperimentConfig quick_config(const fs::path& out) {
  ExperimentConfig c = parse_config(R"(
problems: [Branin]
methods: [AEGiS, Random]
q: [2]
repeats: 3
budget: 10
seed: 5
samples_per_dim: 50
refine: 2
nsga_population_per_dim: 10
nsga_generations: 3
fourier_features: 100
fit_restarts: 2
)");
  c.out = out;
  return c;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("AEGIS_CLI");
  REQUIRE(cli != nullptr);
  const int status = std::system((std::string(cli) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const ExperimentConfig c = parse_config("problems: Branin\nmethods: [AEGiS, TS]\nq: [1, 4]\n");
  CHECK(c.problems == std::vector<std::string>{"Branin"});
  CHECK(c.methods.size() == 2);
  CHECK(c.q == std::vector<int>{1, 4});
  CHECK(c.repeats == 51);
  CHECK(c.budget == 200);

  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("problems: [Branin]\nmethods: []\nq: [1]\n").find("methods") != std::string::npos);
  CHECK(message("problems: [Branin]\nmethods: [AEGiS]\nq: []\n").find("q") != std::string::npos);
  CHECK(message("problems: [Branin]\nmethods: [AEGiS]\nq: [1]\nrepeats: 0\n").find("repeats") != std::string::npos);
  CHECK(message("problems: [Nowhere]\nmethods: [AEGiS]\nq: [1]\n").find("Nowhere") != std::string::npos);
  CHECK(message("problems: [Branin]\nmethods: [Bogus]\nq: [1]\n").find("Bogus") != std::string::npos);
  const std::string unknown = message("problems: [Branin]\nmethods: [AEGiS]\nq: [1]\ncolour: blue\n");
  CHECK(unknown.find("colour") != std::string::npos);
  CHECK(unknown.find("line 4") != std::string::npos);
  CHECK(message("problems: [Branin]\nmethods: [AEGiS]\nq: [1]\nbudget: lots\n").find("line 4") != std::string::npos);
  CHECK(message("problems: [Branin]\nproblems: [Branin]\nmethods: [AEGiS]\nq: [1]\n").find("problems") !=
        std::string::npos);
  CHECK(message("problems: [Branin\n").find("line") != std::string::npos);
}

TEST_CASE("seeds, matrix and filters") {
  ExperimentConfig c = quick_config("unused");
  const auto keys = expand_matrix(c);
  CHECK(keys.size() == 6);
  CHECK(keys[0].file_name() == "Branin_AEGiS_q2_r0.jsonl");
  std::set<std::string> names;
  for (const auto& k : keys) names.insert(k.file_name());
  CHECK(names.size() == 6);

  CHECK(design_seed_for(5, "Branin", 1) == design_seed_for(5, "Branin", 1));
  CHECK(design_seed_for(5, "Branin", 1) != design_seed_for(5, "Branin", 2));
  CHECK(design_seed_for(5, "Branin", 1) != design_seed_for(6, "Branin", 1));
  const RunKey a{"Branin", "AEGiS", 2, 0}, b{"Branin", "TS", 2, 0};
  CHECK(run_seed_for(5, a) != run_seed_for(5, b));
  CHECK(make_run_spec(c, a).design_seed == make_run_spec(c, b).design_seed);
  CHECK(make_run_spec(c, a).context->nsga.pop_size == 20);

  const RunFilter f = RunFilter::parse("Branin,Random,*,1");
  CHECK(f.matches({"Branin", "Random", 2, 1}));
  CHECK_FALSE(f.matches({"Branin", "Random", 2, 0}));
  CHECK_FALSE(f.matches({"Branin", "AEGiS", 2, 1}));
  CHECK(RunFilter::parse("").matches(a));
  CHECK(RunFilter::parse(",,2,").matches(a));
  CHECK_FALSE(RunFilter::parse(",,4,").matches(a));
}

TEST_CASE("run, resume and reproduce") {
  TempDir dir("run");
  ExperimentConfig c = quick_config(dir.path() / "a");
  std::ostringstream log;
  const RunReport first = run_experiment(c, {}, log);
  CHECK(first.completed == 6);
  CHECK(first.failed == 0);
  const auto files = jsonl_files(c.out);
  REQUIRE(files.size() == 6);
  CHECK(fs::exists(c.out / "manifest.json"));
  for (const auto& f : files) CHECK(trace_is_complete(c.out / f, 10));

  std::map<std::string, fs::file_time_type> stamps;
  for (const auto& f : files) stamps[f] = fs::last_write_time(c.out / f);
  const RunReport again = run_experiment(c, {}, log);
  CHECK(again.skipped == 6);
  CHECK(again.completed == 0);
  for (const auto& f : files) CHECK(fs::last_write_time(c.out / f) == stamps[f]);

  // A damaged trace is recomputed, the rest are left alone.
  {
    const std::string text = slurp(c.out / files[0]);
    std::ofstream(c.out / files[0], std::ios::binary) << text.substr(0, text.size() / 2);
  }
  CHECK_FALSE(trace_is_complete(c.out / files[0], 10));
  const RunReport repair = run_experiment(c, {}, log);
  CHECK(repair.completed == 1);
  CHECK(repair.skipped == 5);

  ExperimentConfig d = c;
  d.out = dir.path() / "b";
  d.jobs = 2;
  run_experiment(d, {}, log);
  for (const auto& f : files) CHECK(slurp(c.out / f) == slurp(d.out / f));

  ExperimentConfig e = c;
  e.out = dir.path() / "c";
  const RunReport only = run_experiment(e, RunFilter::parse("Branin,Random,*,1"), log);
  CHECK(only.selected == 1);
  CHECK(jsonl_files(e.out) == std::vector<std::string>{"Branin_Random_q2_r1.jsonl"});
}

TEST_CASE("trace round trip") {
  TempDir dir("trace");
  ExperimentConfig c = quick_config(dir.path());
  const RunResult r = run_optimisation(make_run_spec(c, {"Branin", "AEGiS", 2, 0}));
  const RunResult back = parse_trace(serialise_trace(r));
  CHECK(back.problem == r.problem);
  CHECK(back.method == r.method);
  CHECK(back.seed == r.seed);
  REQUIRE(back.evaluations.size() == r.evaluations.size());
  for (std::size_t i = 0; i < r.evaluations.size(); ++i) {
    CHECK(back.evaluations[i].x_raw == r.evaluations[i].x_raw);
    CHECK(back.evaluations[i].f == r.evaluations[i].f);
    CHECK(back.evaluations[i].finish_time == r.evaluations[i].finish_time);
    CHECK(back.evaluations[i].branch == r.evaluations[i].branch);
  }
  CHECK(serialise_trace(back) == serialise_trace(r));
  CHECK_THROWS_AS(parse_trace("{\"type\":\"header\"\n"), ConsistencyError);
  CHECK_THROWS_AS(parse_trace(""), ConsistencyError);
}

TEST_CASE("summaries") {
  TempDir dir("summary");
  ExperimentConfig c = quick_config(dir.path() / "runs");
  c.methods = {"AEGiS"};
  std::ostringstream log;
  run_experiment(c, {}, log);

  const SummaryReport single = summarize(c.out, dir.path() / "s1", log, 50);
  CHECK(single.traces == 3);
  auto rows = read_csv(dir.path() / "s1" / "summary.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"problem", "q", "method", "repeats", "median", "mad", "flag", "p_value"});
  CHECK(rows[1][2] == "AEGiS");
  CHECK(rows[1][6] == "best");

  // A second method with the very same traces.
  for (int r = 0; r < 3; ++r) {
    RunResult copy = read_trace(c.out / RunKey{"Branin", "AEGiS", 2, r}.file_name());
    copy.method = "TS";
    copy.strategy = parse_method("TS");
    write_trace(c.out / RunKey{"Branin", "TS", 2, r}.file_name(), copy);
  }
  summarize(c.out, dir.path() / "s2", log, 50);
  rows = read_csv(dir.path() / "s2" / "summary.csv");
  REQUIRE(rows.size() == 3);
  std::multiset<std::string> flags = {rows[1][6], rows[2][6]};
  CHECK(flags == std::multiset<std::string>{"best", "equivalent"});

  // Median column of the convergence data, recomputed from the traces.
  const double f_min = make_problem("Branin").f_min;
  std::vector<std::vector<double>> traces;
  for (int r = 0; r < 3; ++r) traces.push_back(regret_trace(read_trace(c.out / RunKey{"Branin", "AEGiS", 2, r}.file_name()), f_min));
  const auto conv = read_csv(dir.path() / "s2" / "convergence_Branin_q2.csv");
  CHECK(conv[0] == std::vector<std::string>{"iteration", "method", "q25", "q50", "q75"});
  int checked = 0;
  for (std::size_t i = 1; i < conv.size(); ++i) {
    if (conv[i][1] != "AEGiS") continue;
    const int it = std::stoi(conv[i][0]);
    std::vector<double> col;
    for (const auto& t : traces) col.push_back(t[it - 1]);
    CHECK(std::stod(conv[i][3]) == doctest::Approx(median(col)).epsilon(1e-12));
    CHECK(std::stod(conv[i][2]) <= std::stod(conv[i][3]));
    CHECK(std::stod(conv[i][3]) <= std::stod(conv[i][4]));
    ++checked;
  }
  CHECK(checked == 10);
  CHECK(fs::exists(dir.path() / "s2" / "best_proportion.csv"));
  CHECK(fs::exists(dir.path() / "s2" / "ranks_Branin_q2.csv"));
  CHECK(fs::exists(dir.path() / "s2" / "summary.txt"));

  // Pure function of the trace directory.
  summarize(c.out, dir.path() / "s3", log, 50);
  for (const char* f : {"summary.csv", "summary.txt", "best_proportion.csv", "convergence_Branin_q2.csv",
                        "ranks_Branin_q2.csv"})
    CHECK(slurp(dir.path() / "s2" / f) == slurp(dir.path() / "s3" / f));

  TempDir empty("empty");
  CHECK_THROWS_AS(summarize(empty.path(), empty.path() / "out", log), ConfigError);
}

TEST_CASE("problem listing") {
  std::ostringstream a, b;
  list_problems(a);
  list_problems(b);
  CHECK(a.str() == b.str());
  std::stringstream in(a.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "name,d,bounds,f_min");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto first = line.find(',');
    const auto second = line.find(',', first + 1);
    const auto last = line.rfind(',');
    const Problem p = make_problem(line.substr(0, first), std::stoi(line.substr(first + 1, second - first - 1)));
    CHECK(std::stod(line.substr(last + 1)) == p.f_min);
    ++rows;
  }
  CHECK(rows == 15);
}

TEST_CASE("command line") {
  TempDir dir("cli");
  CHECK(run_cli("list-problems") == 0);
  {
    std::ofstream(dir.path() / "bad.yaml") << "problems: [Branin]\nmethods: []\nq: [1]\n";
  }
  CHECK(run_cli("run --config " + (dir.path() / "bad.yaml").string()) == 2);
  {
    std::ofstream cfg(dir.path() / "ok.yaml");
    cfg << "problems: [Branin]\nmethods: [Random]\nq: [2]\nrepeats: 2\nbudget: 8\n";
  }
  const std::string out = (dir.path() / "runs").string();
  CHECK(run_cli("run --config " + (dir.path() / "ok.yaml").string() + " --out " + out) == 0);
  CHECK(jsonl_files(out).size() == 2);
  CHECK(run_cli("summarize " + out) == 0);
  CHECK(fs::exists(fs::path(out) / "summary" / "summary.csv"));
  fs::create_directories(dir.path() / "nothing");
  CHECK(run_cli("summarize " + (dir.path() / "nothing").string()) != 0);
  CHECK(run_cli("frobnicate") != 0);
}
