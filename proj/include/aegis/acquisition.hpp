#pragma once

#include <functional>

#include <Eigen/Core>

#include "aegis/box_lbfgs.hpp"
#include "aegis/gp.hpp"
#include "aegis/random.hpp"

namespace aegis {

/// Sample-then-refine settings for inner optimisation over [0,1]^d.
struct OptimiserConfig {
  int n_samples = 1000;
  int n_refine = 10;
  int max_refine_steps = 100;
  double tolerance = 1e-8;

  /// 1000 d uniform samples, best 10 refined.
  static OptimiserConfig for_dimension(int dim);
};

/// A differentiable scalar field on the unit cube. `batch` is optional and
/// only used to speed up the sampling stage; it must agree with `evaluate`.
struct Objective {
  SmoothObjective evaluate;
  std::function<Eigen::VectorXd(const Eigen::MatrixXd&)> batch;
};

struct OptimisationResult {
  Eigen::VectorXd x;
  double value = 0.0;           // objective value in the requested sense
  double best_sampled = 0.0;    // best value found by the sampling stage
};

/// Evaluates the objective at cfg.n_samples uniform points, refines the
/// cfg.n_refine best with box L-BFGS and returns the overall best point.
/// `minimise == false` maximises. Throws NumericalError (with the point) on a
/// non-finite value in the sampling stage.
OptimisationResult optimize_objective(const Objective& objective, bool minimise, const OptimiserConfig& cfg,
                                      int dim, Rng& rng);

/// Closed-form expected improvement for minimisation; sigma is a standard
/// deviation. sigma == 0 gives max(f_best - mu, 0).
double expected_improvement(double mu, double sigma, double f_best);

/// EI at x together with its gradient in x.
double expected_improvement_with_gradient(const GPModel& model, const Eigen::VectorXd& x, double f_best,
                                          Eigen::VectorXd* grad);

/// argmin of the posterior mean.
Eigen::VectorXd exploit(const GPModel& model, const OptimiserConfig& cfg, Rng& rng);

/// argmax of EI with respect to the standardised incumbent f_best_std.
Eigen::VectorXd ei_select(const GPModel& model, double f_best_std, const OptimiserConfig& cfg, Rng& rng);

}  // namespace aegis
