#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aegis/errors.hpp"
#include "aegis/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous epsilon-greedy Bayesian optimisation experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment matrix (resumes complete traces)");
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::string only;
  run->add_option("--config", config_path, "YAML experiment file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Base seed (overrides the config)");
  run->add_option("--only", only, "Filter problem,method,q,repeat; empty or * matches all");

  auto* summ = app.add_subcommand("summarize", "Tables and plot data from a results directory");
  std::string results_dir;
  std::optional<std::string> summary_out;
  int n_boot = 1000;
  summ->add_option("results", results_dir, "Directory of JSONL traces")->required();
  summ->add_option("--out", summary_out, "Where to write tables (default: <results>/summary)");
  summ->add_option("--bootstrap", n_boot, "Bootstrap draws for the rank data")->check(CLI::PositiveNumber);

  app.add_subcommand("list-problems", "Print the benchmark registry");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      aegis::ExperimentConfig config = aegis::load_config(config_path);
      if (out_dir) config.out = *out_dir;
      if (jobs) config.jobs = *jobs;
      if (seed) config.seed = *seed;
      const aegis::RunReport report = aegis::run_experiment(config, aegis::RunFilter::parse(only), std::cerr);
      std::cout << "selected " << report.selected << ", skipped " << report.skipped << ", completed "
                << report.completed << ", failed " << report.failed << "\n";
      return report.failed > 0 ? 3 : 0;
    }
    if (*summ) {
      const std::filesystem::path out = summary_out ? std::filesystem::path(*summary_out)
                                                    : std::filesystem::path(results_dir) / "summary";
      const aegis::SummaryReport report = aegis::summarize(results_dir, out, std::cerr, n_boot);
      std::cout << report.traces << " traces, " << report.groups << " groups\n";
      for (const auto& f : report.files) std::cout << f.string() << "\n";
      return 0;
    }
    aegis::list_problems(std::cout);
    return 0;
  } catch (const aegis::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
