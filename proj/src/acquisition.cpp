#include "aegis/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "aegis/errors.hpp"

namespace aegis {

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

OptimiserConfig OptimiserConfig::for_dimension(int dim) {
  OptimiserConfig cfg;
  cfg.n_samples = 1000 * dim;
  return cfg;
}

OptimisationResult optimize_objective(const Objective& objective, bool minimise, const OptimiserConfig& cfg,
                                      int dim, Rng& rng) {
  if (cfg.n_samples < 1 || cfg.n_refine < 0 || cfg.n_refine > cfg.n_samples)
    throw ConfigError("optimize_objective: need 0 <= n_refine <= n_samples and n_samples >= 1");
  const double sign = minimise ? 1.0 : -1.0;

  Eigen::MatrixXd samples(cfg.n_samples, dim);
  for (int i = 0; i < cfg.n_samples; ++i)
    for (int j = 0; j < dim; ++j) samples(i, j) = uniform01(rng);

  Eigen::VectorXd values(cfg.n_samples);
  if (objective.batch) {
    values = objective.batch(samples);
  } else {
    for (int i = 0; i < cfg.n_samples; ++i) values[i] = objective.evaluate(samples.row(i).transpose(), nullptr);
  }
  for (int i = 0; i < cfg.n_samples; ++i) {
    if (!std::isfinite(values[i]))
      throw NumericalError("optimize_objective: non-finite objective value", samples.row(i).transpose());
  }
  values *= sign;

  std::vector<int> order(cfg.n_samples);
  std::iota(order.begin(), order.end(), 0);
  const int n_refine = std::max(cfg.n_refine, 1);
  std::partial_sort(order.begin(), order.begin() + n_refine, order.end(),
                    [&](int a, int b) { return values[a] < values[b] || (values[a] == values[b] && a < b); });

  OptimisationResult best;
  best.x = samples.row(order[0]).transpose();
  best.value = values[order[0]];
  best.best_sampled = values[order[0]];

  const SmoothObjective signed_objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    const double v = objective.evaluate(x, grad);
    if (grad && sign < 0.0) *grad = -*grad;
    return sign * v;
  };
  BoxLbfgsOptions opts;
  opts.max_iterations = cfg.max_refine_steps;
  opts.f_tolerance = cfg.tolerance;
  // Acquisition values can be tiny (EI far from the incumbent), so both
  // stopping rules are purely relative.
  opts.pg_tolerance = 0.0;
  opts.f_scale_floor = 0.0;
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(dim);
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(dim);
  for (int k = 0; k < cfg.n_refine; ++k) {
    const BoxLbfgsResult r = minimize_box_lbfgs(signed_objective, samples.row(order[k]).transpose(), lo, hi, opts);
    if (std::isfinite(r.value) && r.value < best.value) {
      best.x = r.x;
      best.value = r.value;
    }
  }
  best.x = best.x.cwiseMax(0.0).cwiseMin(1.0);
  best.value *= sign;
  best.best_sampled *= sign;
  return best;
}

double expected_improvement(double mu, double sigma, double f_best) {
  const double gap = f_best - mu;
  if (!(sigma > 0.0)) return std::max(gap, 0.0);
  const double z = gap / sigma;
  return std::max(0.0, gap * normal_cdf(z) + sigma * normal_pdf(z));
}

double expected_improvement_with_gradient(const GPModel& model, const Eigen::VectorXd& x, double f_best,
                                          Eigen::VectorXd* grad) {
  Eigen::VectorXd d_mu, d_var;
  const Prediction p = model.predict_with_gradient(x, grad ? &d_mu : nullptr, grad ? &d_var : nullptr);
  const double sigma = std::sqrt(p.variance);
  const double ei = expected_improvement(p.mean, sigma, f_best);
  if (grad) {
    if (sigma > 0.0) {
      const double z = (f_best - p.mean) / sigma;
      // dEI/dmu = -Phi(z), dEI/dsigma = phi(z), dsigma/dx = dvar/dx / (2 sigma).
      *grad = -normal_cdf(z) * d_mu + normal_pdf(z) * d_var / (2.0 * sigma);
    } else {
      *grad = p.mean < f_best ? Eigen::VectorXd(-d_mu) : Eigen::VectorXd::Zero(x.size());
    }
  }
  return ei;
}

Eigen::VectorXd exploit(const GPModel& model, const OptimiserConfig& cfg, Rng& rng) {
  Objective obj;
  obj.evaluate = [&model](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    return model.predict_with_gradient(x, grad, nullptr).mean;
  };
  obj.batch = [&model](const Eigen::MatrixXd& Xs) { return model.predict_mean(Xs); };
  return optimize_objective(obj, true, cfg, model.dim(), rng).x;
}

Eigen::VectorXd ei_select(const GPModel& model, double f_best_std, const OptimiserConfig& cfg, Rng& rng) {
  Objective obj;
  obj.evaluate = [&model, f_best_std](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    return expected_improvement_with_gradient(model, x, f_best_std, grad);
  };
  obj.batch = [&model, f_best_std](const Eigen::MatrixXd& Xs) {
    Eigen::VectorXd mu, var;
    model.predict_batch(Xs, mu, var);
    Eigen::VectorXd ei(Xs.rows());
    for (Eigen::Index i = 0; i < Xs.rows(); ++i) ei[i] = expected_improvement(mu[i], std::sqrt(var[i]), f_best_std);
    return ei;
  };
  return optimize_objective(obj, false, cfg, model.dim(), rng).x;
}

}  // namespace aegis
