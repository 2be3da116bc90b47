#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "aegis/async_sim.hpp"
#include "aegis/errors.hpp"

using namespace aegis;

namespace {

SelectionContext tiny_context(int dim) {
  SelectionContext ctx = SelectionContext::for_dimension(dim);
  ctx.optimiser.n_samples = 100;
  ctx.optimiser.n_refine = 2;
  ctx.optimiser.max_refine_steps = 20;
  ctx.nsga.pop_size = 20;
  ctx.nsga.generations = 5;
  ctx.n_features = 200;
  return ctx;
}

RunSpec small_spec(const std::string& problem, const std::string& method, int q, int budget, std::uint64_t seed) {
  RunSpec spec;
  spec.problem = make_problem(problem);
  spec.strategy = parse_method(method);
  spec.q = q;
  spec.budget = budget;
  spec.seed = seed;
  spec.design_seed = 1000 + seed;
  spec.context = tiny_context(spec.problem.dim);
  spec.fit_restarts = 2;
  return spec;
}

bool same(const RunResult& a, const RunResult& b) {
  if (a.evaluations.size() != b.evaluations.size()) return false;
  for (std::size_t i = 0; i < a.evaluations.size(); ++i) {
    const auto& x = a.evaluations[i];
    const auto& y = b.evaluations[i];
    if (x.dispatch_index != y.dispatch_index || x.x_raw != y.x_raw || x.f != y.f || x.submit_time != y.submit_time ||
        x.finish_time != y.finish_time || x.worker_id != y.worker_id || x.branch != y.branch ||
        x.n_train != y.n_train || x.n_pending != y.n_pending)
      return false;
  }
  return true;
}

// Points selected by the model carry the number of completions strictly
// before their submission.
void check_causality(const RunResult& r) {
  for (const auto& e : r.evaluations) {
    if (e.branch == Branch::Initial) continue;
    const auto done = std::count_if(r.evaluations.begin(), r.evaluations.end(),
                                    [&](const EvaluationRecord& o) { return o.finish_time <= e.submit_time; });
    CHECK(e.n_train == done);
  }
}

}  // namespace

TEST_CASE("half-normal runtimes") {
  Rng rng(1);
  const RuntimeModel model;
  const int n = 1000000;
  std::vector<double> t(n);
  double sum = 0.0;
  for (auto& v : t) {
    v = sample_runtime(model, rng);
    REQUIRE(v > 0.0);
    sum += v;
  }
  CHECK(std::abs(sum / n - 1.0) <= 0.01);
  std::nth_element(t.begin(), t.begin() + n / 2, t.end());
  CHECK(std::abs(t[n / 2] - 0.8453) <= 0.01);
}

TEST_CASE("budget and initial design size") {
  const RunResult r = run_optimisation(small_spec("Hartmann3", "Random", 4, 200, 1));
  CHECK(r.evaluations.size() == 200);
  CHECK(r.n_initial == 6);
  CHECK(std::count_if(r.evaluations.begin(), r.evaluations.end(),
                      [](const EvaluationRecord& e) { return e.branch == Branch::Initial; }) == 6);
  for (std::size_t i = 1; i < r.evaluations.size(); ++i)
    CHECK(r.evaluations[i].finish_time >= r.evaluations[i - 1].finish_time);
  std::vector<int> dispatch;
  for (const auto& e : r.evaluations) {
    CHECK(e.finish_time > e.submit_time);
    dispatch.push_back(e.dispatch_index);
  }
  std::sort(dispatch.begin(), dispatch.end());
  for (int i = 0; i < 200; ++i) CHECK(dispatch[i] == i);

  const RunResult a = run_optimisation(small_spec("Hartmann3", "AEGiS", 3, 20, 2));
  CHECK(a.evaluations.size() == 20);
  CHECK(std::count_if(a.evaluations.begin(), a.evaluations.end(),
                      [](const EvaluationRecord& e) { return e.branch == Branch::Initial; }) == 6);
}

TEST_CASE("sequential runs never have pending work") {
  std::vector<SelectionEvent> events;
  const RunResult r =
      run_optimisation(small_spec("Branin", "AEGiS", 1, 12, 3), [&](const SelectionEvent& e) { events.push_back(e); });
  CHECK(events.size() == 8);
  for (const auto& e : events) CHECK(e.n_pending == 0);
  for (const auto& e : r.evaluations) CHECK(e.n_pending == 0);
  check_causality(r);
}

TEST_CASE("worker conservation and causality with q workers") {
  for (const char* method : {"AEGiS", "KB", "TS", "Random"}) {
    const int q = 4;
    std::vector<SelectionEvent> events;
    const RunResult r =
        run_optimisation(small_spec("Branin", method, q, 24, 4), [&](const SelectionEvent& e) { events.push_back(e); });
    INFO(method);
    CHECK(events.size() == 20);
    for (std::size_t i = 0; i < events.size(); ++i) {
      CHECK(events[i].n_pending <= q - 1);
      // After the initial batch every selection happens with one worker free.
      if (i >= static_cast<std::size_t>(q)) CHECK(events[i].n_pending == q - 1);
    }
    check_causality(r);
    // At any instant at most q jobs are in flight.
    for (const auto& e : r.evaluations) {
      const double t = e.submit_time;
      const auto running = std::count_if(r.evaluations.begin(), r.evaluations.end(), [&](const EvaluationRecord& o) {
        return o.submit_time <= t && o.finish_time > t;
      });
      CHECK(running <= q);
    }
  }
}

TEST_CASE("runs are deterministic given the seed") {
  const RunResult a = run_optimisation(small_spec("Branin", "AEGiS", 3, 16, 5));
  const RunResult b = run_optimisation(small_spec("Branin", "AEGiS", 3, 16, 5));
  CHECK(same(a, b));
  const RunResult c = run_optimisation(small_spec("Branin", "AEGiS", 3, 16, 6));
  CHECK_FALSE(same(a, c));
}

TEST_CASE("methods share the initial design of a repeat") {
  auto initial = [](const RunResult& r) {
    std::vector<std::pair<int, Eigen::VectorXd>> pts;
    for (const auto& e : r.evaluations)
      if (e.branch == Branch::Initial) pts.emplace_back(e.dispatch_index, e.x_raw);
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return pts;
  };
  RunSpec a = small_spec("Branin", "AEGiS", 2, 8, 7);
  RunSpec b = small_spec("Branin", "Random", 4, 8, 8);
  b.design_seed = a.design_seed;
  const auto ia = initial(run_optimisation(a)), ib = initial(run_optimisation(b));
  REQUIRE(ia.size() == 4);
  REQUIRE(ib.size() == 4);
  for (std::size_t i = 0; i < ia.size(); ++i) CHECK(ia[i].second == ib[i].second);
}

TEST_CASE("invalid runs are rejected") {
  CHECK_THROWS_AS(run_optimisation(small_spec("Branin", "AEGiS", 0, 10, 1)), ConfigError);
  CHECK_THROWS_AS(run_optimisation(small_spec("Branin", "AEGiS", 1, 4, 1)), ConfigError);
  CHECK_THROWS_AS(run_optimisation(small_spec("Branin", "AEGiS-eps0", 2, 10, 1)), ConfigError);
}

TEST_CASE("regret traces") {
  RunResult r;
  r.problem = "toy";
  for (double f : {3.0, 2.0, 5.0}) {
    EvaluationRecord e;
    e.f = f;
    r.evaluations.push_back(e);
  }
  const auto t = regret_trace(r, 1.0);
  REQUIRE(t.size() == 3);
  CHECK(t[0] == doctest::Approx(std::log10(2.0)));
  CHECK(t[1] == 0.0);
  CHECK(t[2] == 0.0);
  CHECK(final_regret(r, 1.0) == 1.0);

  r.evaluations[1].f = 1.0;
  CHECK(regret_trace(r, 1.0)[1] == -12.0);

  r.evaluations[2].f = 0.5;
  CHECK_THROWS_AS(regret_trace(r, 1.0), ConsistencyError);
  CHECK_THROWS_AS(final_regret(r, 1.0), ConsistencyError);
  CHECK_THROWS_AS(final_regret(RunResult{}, 0.0), DomainError);

  const Problem branin = make_problem("Branin");
  const RunResult run = run_optimisation(small_spec("Branin", "Random", 2, 30, 9));
  const auto trace = regret_trace(run, branin.f_min);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
}
