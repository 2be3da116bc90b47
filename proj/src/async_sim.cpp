#include "aegis/async_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aegis/design_data.hpp"
#include "aegis/errors.hpp"

namespace aegis {

double RuntimeModel::sample(Rng& rng) const {
  for (;;) {
    const double t = std::abs(standard_normal(rng)) * scale;
    if (t > 0.0) return t;
  }
}

Eigen::MatrixXd initial_design(const Problem& problem, std::uint64_t design_seed, int n_initial,
                               int lhs_candidates) {
  Rng rng(design_seed);
  return latin_hypercube(n_initial, problem.dim, rng, lhs_candidates);
}

namespace {

struct JobInfo {
  Branch branch = Branch::Initial;
  int n_train = 0;
  int n_pending = 0;
  std::optional<GPHyperparams> hyperparams;
};

class EventLoop {
 public:
  EventLoop(const RunSpec& spec, const SelectionObserver& observer)
      : spec_(spec),
        observer_(observer),
        dim_(spec.problem.dim),
        n_initial_(spec.n_initial > 0 ? spec.n_initial : 2 * spec.problem.dim),
        ctx_(spec.context.value_or(SelectionContext::for_dimension(spec.problem.dim))),
        runtime_rng_(derive_seed(spec.seed, "runtime")),
        data_(spec.problem.dim),
        workers_(spec.q) {}

  RunResult run() {
    if (spec_.q < 1) throw ConfigError("run_optimisation: q must be >= 1");
    if (spec_.budget <= n_initial_)
      throw ConfigError("run_optimisation: budget " + std::to_string(spec_.budget) +
                        " must exceed the initial design size " + std::to_string(n_initial_));
    strategy_ = make_strategy(spec_.strategy, dim_, ctx_, spec_.seed);

    result_.problem = spec_.problem.id();
    result_.method = spec_.strategy.label;
    result_.q = spec_.q;
    result_.budget = spec_.budget;
    result_.repeat = spec_.repeat;
    result_.seed = spec_.seed;
    result_.design_seed = spec_.design_seed;
    result_.n_initial = n_initial_;
    result_.strategy = spec_.strategy;
    result_.context = ctx_;
    result_.fit_restarts = spec_.fit_restarts;

    run_initial_design();
    fill_idle_workers();
    while (busy_count() > 0) {
      const PendingJob job = pop_next();
      complete(job);
      if (dispatched_ < spec_.budget) select_and_dispatch(job.worker_id);
    }
    return std::move(result_);
  }

 private:
  void run_initial_design() {
    const Eigen::MatrixXd design = initial_design(spec_.problem, spec_.design_seed, n_initial_, spec_.lhs_candidates);
    int next = 0;
    for (int w = 0; w < spec_.q && next < n_initial_; ++w) dispatch(design.row(next++).transpose(), w, JobInfo{});
    while (data_.size() < n_initial_) {
      const PendingJob job = pop_next();
      complete(job);
      if (next < n_initial_) dispatch(design.row(next++).transpose(), job.worker_id, JobInfo{});
    }
    data_.set_n_initial(n_initial_);
  }

  void fill_idle_workers() {
    const int slots = std::min(spec_.q - busy_count(), spec_.budget - dispatched_);
    if (slots <= 0) return;
    const std::optional<GPModel> model = fit();
    Rng rng(derive_seed(spec_.seed, "select", dispatched_));
    std::vector<SelectionRecord> batch = strategy_->initial_batch(model ? &*model : nullptr, slots, rng);
    int pending = busy_count();
    for (auto& rec : batch) {
      notify(pending);
      JobInfo info{rec.branch, data_.size(), pending, hyperparams(model)};
      dispatch(rec.x, free_worker(), info);
      ++pending;
    }
  }

  void select_and_dispatch(int worker) {
    const std::optional<GPModel> model = fit();
    std::vector<Eigen::VectorXd> pending;
    for (const auto& w : workers_)
      if (w) pending.push_back(w->x);
    Rng rng(derive_seed(spec_.seed, "select", dispatched_));
    notify(static_cast<int>(pending.size()));
    SelectionRecord rec = strategy_->select(model ? &*model : nullptr, pending, rng);
    dispatch(rec.x, worker, JobInfo{rec.branch, data_.size(), static_cast<int>(pending.size()), hyperparams(model)});
  }

  std::optional<GPModel> fit() {
    if (!strategy_->needs_model()) return std::nullopt;
    Rng rng(derive_seed(spec_.seed, "fit", dispatched_));
    FitOptions opts;
    opts.restarts = spec_.fit_restarts;
    opts.warm_start = last_hp_;
    try {
      FitResult fit = fit_hyperparameters(data_, rng, opts);
      last_hp_ = fit.model.hyperparams();
      return std::move(fit.model);
    } catch (const NumericalError& e) {
      throw NumericalError(result_.problem + "/" + result_.method + " at evaluation " + std::to_string(dispatched_) +
                           ": " + e.what());
    }
  }

  static std::optional<GPHyperparams> hyperparams(const std::optional<GPModel>& model) {
    if (!model) return std::nullopt;
    return model->hyperparams();
  }

  void notify(int n_pending) {
    if (observer_) observer_(SelectionEvent{now_, dispatched_, n_pending, data_.size()});
  }

  int busy_count() const {
    return static_cast<int>(std::count_if(workers_.begin(), workers_.end(), [](const auto& w) { return w.has_value(); }));
  }

  int free_worker() const {
    for (int w = 0; w < spec_.q; ++w)
      if (!workers_[w]) return w;
    throw StateError("no idle worker");
  }

  void dispatch(const Eigen::VectorXd& x, int worker, JobInfo info) {
    if (workers_[worker]) throw StateError("dispatch to a busy worker");
    if (!in_unit_cube(x)) throw NumericalError("strategy proposed a point outside the unit cube", x);
    const double runtime = runtime_model_.sample(runtime_rng_);
    workers_[worker] = PendingJob{x, now_, now_ + runtime, worker, dispatched_};
    info_.push_back(std::move(info));
    ++dispatched_;
  }

  PendingJob pop_next() {
    int best = -1;
    for (int w = 0; w < spec_.q; ++w) {
      if (!workers_[w]) continue;
      if (best < 0 || workers_[w]->finish_time < workers_[best]->finish_time) best = w;
    }
    if (best < 0) throw StateError("no job in flight");
    PendingJob job = std::move(*workers_[best]);
    workers_[best].reset();
    now_ = job.finish_time;
    return job;
  }

  void complete(const PendingJob& job) {
    const Eigen::VectorXd x_raw = from_unit_cube(job.x, spec_.problem.bounds);
    const double f = evaluate(spec_.problem, x_raw);
    if (!std::isfinite(f)) throw NumericalError(result_.problem + ": objective returned a non-finite value", x_raw);
    const JobInfo& info = info_[job.dispatch_index];
    result_.evaluations.push_back(EvaluationRecord{job.dispatch_index, x_raw, f, job.submit_time, job.finish_time,
                                                   job.worker_id, info.branch, info.n_train, info.n_pending,
                                                   info.hyperparams});
    data_.append(job.x, f);
  }

  const RunSpec& spec_;
  const SelectionObserver& observer_;
  int dim_;
  int n_initial_;
  SelectionContext ctx_;
  RuntimeModel runtime_model_;
  Rng runtime_rng_;
  Dataset data_;
  std::vector<std::optional<PendingJob>> workers_;
  std::vector<JobInfo> info_;
  std::unique_ptr<Strategy> strategy_;
  std::optional<GPHyperparams> last_hp_;
  RunResult result_;
  int dispatched_ = 0;
  double now_ = 0.0;
};

}  // namespace

RunResult run_optimisation(const RunSpec& spec, const SelectionObserver& observer) {
  return EventLoop(spec, observer).run();
}

std::vector<double> regret_trace(const RunResult& result, double f_min) {
  std::vector<double> trace;
  trace.reserve(result.evaluations.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : result.evaluations) {
    best = std::min(best, e.f);
    if (best < f_min - 1e-9)
      throw ConsistencyError(result.problem + ": observed " + std::to_string(best) + " below the stated optimum " +
                             std::to_string(f_min));
    trace.push_back(std::log10(std::max(best - f_min, 1e-12)));
  }
  return trace;
}

double final_regret(const RunResult& result, double f_min) {
  if (result.evaluations.empty()) throw DomainError("final_regret: empty run");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : result.evaluations) best = std::min(best, e.f);
  if (best < f_min - 1e-9) throw ConsistencyError(result.problem + ": observed value below the stated optimum");
  return std::max(best - f_min, 0.0);
}

}  // namespace aegis
