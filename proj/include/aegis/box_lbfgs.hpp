#pragma once

#include <functional>

#include <Eigen/Core>

namespace aegis {

/// Value and (optionally) gradient of a smooth objective. Implementations
/// write the gradient into *grad when grad is non-null.
using SmoothObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct BoxLbfgsOptions {
  int max_iterations = 100;
  int memory = 10;
  /// Stop when the relative decrease of f in one step falls below this.
  double f_tolerance = 1e-8;
  /// Stop when the infinity norm of the projected gradient falls below this.
  double pg_tolerance = 1e-6;
  int max_backtracks = 30;
  /// Relative decrease is measured against max(|f|, f_scale_floor).
  double f_scale_floor = 1.0;
};

struct BoxLbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimises a smooth function over the box [lower, upper] with a projected
/// limited-memory BFGS method: variables held at a bound by the gradient are
/// frozen, the two-loop recursion runs on the free subspace, and an Armijo
/// backtracking search runs along the projected path. Non-finite trial values
/// are treated as a failed step and shrink the step length.
///
/// The start point is projected into the box. The returned value never
/// exceeds f(start) when f(start) is finite.
BoxLbfgsResult minimize_box_lbfgs(const SmoothObjective& f, const Eigen::VectorXd& start,
                                  const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                  const BoxLbfgsOptions& options = {});

}  // namespace aegis
