#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "aegis/benchmarks.hpp"
#include "aegis/gp.hpp"
#include "aegis/random.hpp"
#include "aegis/strategies.hpp"

namespace aegis {

/// Half-normal evaluation times |z| * scale; the default scale sqrt(pi/2)
/// gives a mean runtime of 1.
struct RuntimeModel {
  double scale = std::sqrt(std::numbers::pi / 2.0);

  /// Strictly positive; an exact zero is resampled.
  double sample(Rng& rng) const;
};

inline double sample_runtime(const RuntimeModel& model, Rng& rng) { return model.sample(rng); }

struct PendingJob {
  Eigen::VectorXd x;  // unit cube
  double submit_time = 0.0;
  double finish_time = 0.0;
  int worker_id = 0;
  int dispatch_index = 0;
};

/// One completed evaluation, in completion order within a RunResult.
struct EvaluationRecord {
  int dispatch_index = 0;  // submission order, 0-based
  Eigen::VectorXd x_raw;
  double f = 0.0;
  double submit_time = 0.0;
  double finish_time = 0.0;
  int worker_id = 0;
  Branch branch = Branch::Initial;
  /// Completed observations the selecting model was trained on (0 for the
  /// initial design) and jobs in flight when the point was selected.
  int n_train = 0;
  int n_pending = 0;
  /// Hyperparameters of the model that selected this point.
  std::optional<GPHyperparams> hyperparams;
};

struct RunResult {
  std::string problem;
  std::string method;
  int q = 1;
  int budget = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  std::uint64_t design_seed = 0;
  int n_initial = 0;
  /// Settings the run was produced with (header of the trace).
  StrategyConfig strategy;
  SelectionContext context;
  int fit_restarts = 10;
  std::vector<EvaluationRecord> evaluations;
};

struct RunSpec {
  Problem problem;
  StrategyConfig strategy;
  int q = 1;
  int budget = 200;
  int repeat = 0;
  std::uint64_t seed = 0;
  /// Seed of the initial Latin hypercube; shared by every method for a given
  /// (problem, repeat).
  std::uint64_t design_seed = 0;
  /// Initial design size; 0 means 2 d.
  int n_initial = 0;
  /// Inner-optimiser budgets; defaults to SelectionContext::for_dimension(d).
  std::optional<SelectionContext> context;
  int fit_restarts = 10;
  int lhs_candidates = 100;
};

/// Observes every selection: simulated time, the points in flight and the
/// number of completed observations used.
struct SelectionEvent {
  double time = 0.0;
  int dispatch_index = 0;
  int n_pending = 0;
  int n_train = 0;
};
using SelectionObserver = std::function<void(const SelectionEvent&)>;

/// The shared initial design for (problem, design seed), in the unit cube.
Eigen::MatrixXd initial_design(const Problem& problem, std::uint64_t design_seed, int n_initial,
                               int lhs_candidates = 100);

/// Simulates q asynchronous workers for `budget` evaluations. The initial
/// design is dispatched first; once it has completed the strategy fills the
/// idle workers, and afterwards every completion triggers a GP refit on the
/// completed data and one new selection. Deterministic given the RunSpec.
RunResult run_optimisation(const RunSpec& spec, const SelectionObserver& observer = {});

/// log10 of the simple regret of the running best, in completion order,
/// floored at 1e-12. ConsistencyError if a value beats f_min by > 1e-9.
std::vector<double> regret_trace(const RunResult& result, double f_min);

/// Final (raw, not log) simple regret.
double final_regret(const RunResult& result, double f_min);

}  // namespace aegis
