#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aegis/async_sim.hpp"

namespace aegis {

/// Experiment matrix read from a YAML file. Optional budget overrides shrink
/// the inner optimisers for quick runs; unset fields use the defaults.
struct ExperimentConfig {
  std::vector<std::string> problems;  // registry ids or "name:d"
  std::vector<std::string> methods;   // method labels, see parse_method
  std::vector<int> q;
  int repeats = 51;
  int budget = 200;
  std::uint64_t seed = 0;
  std::filesystem::path out = "results";
  int jobs = 1;

  std::optional<int> samples_per_dim;
  std::optional<int> refine;
  std::optional<int> nsga_population_per_dim;
  std::optional<int> nsga_generations;
  std::optional<int> fourier_features;
  std::optional<int> fit_restarts;
  std::optional<int> lhs_candidates;

  /// ConfigError naming the offending field.
  void validate() const;
};

/// ConfigError messages carry "line N" for the offending YAML node.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunKey {
  std::string problem;  // registry id
  std::string method;
  int q = 1;
  int repeat = 0;

  std::string file_name() const;
};

/// Initial designs depend on (base, problem, repeat) only.
std::uint64_t design_seed_for(std::uint64_t base, const std::string& problem, int repeat);
std::uint64_t run_seed_for(std::uint64_t base, const RunKey& key);

/// "problem,method,q,repeat"; empty fields and "*" match anything.
struct RunFilter {
  std::string problem, method, q, repeat;

  static RunFilter parse(const std::string& text);
  bool matches(const RunKey& key) const;
};

/// Every (problem, method, q, repeat) in matrix order.
std::vector<RunKey> expand_matrix(const ExperimentConfig& config);

RunSpec make_run_spec(const ExperimentConfig& config, const RunKey& key);

struct RunReport {
  int selected = 0;
  int skipped = 0;  // already complete on disk
  int completed = 0;
  int failed = 0;
  std::vector<std::string> failures;  // "file: message"
};

/// Runs the selected part of the matrix into config.out, skipping complete
/// traces. Failures are recorded in manifest.json and do not stop the matrix.
RunReport run_experiment(const ExperimentConfig& config, const RunFilter& filter, std::ostream& log);

struct SummaryReport {
  int traces = 0;
  int groups = 0;  // (problem, q) pairs
  std::vector<std::filesystem::path> files;
};

/// Reads every complete trace in `results`, writes tables and plot data into
/// `out` (created if needed). ConfigError when no trace is found.
///   summary.csv           problem,q,method,repeats,median,mad,flag,p_value
///   summary.txt           the same as aligned text, one block per (problem, q)
///   best_proportion.csv   q,method,problems,best_or_equivalent,proportion
///   convergence_<problem>_q<q>.csv   iteration,method,q25,q50,q75 (log10 regret)
///   ranks_<problem>_q<q>.csv         iteration,method,mean_rank (bootstrap)
SummaryReport summarize(const std::filesystem::path& results, const std::filesystem::path& out, std::ostream& log,
                        int n_boot = 1000);

/// One row per registry problem: name, d, bounds, f_min.
void list_problems(std::ostream& os);

}  // namespace aegis
