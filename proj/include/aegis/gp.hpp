#pragma once

#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "aegis/design_data.hpp"
#include "aegis/random.hpp"

namespace aegis {

/// Isotropic Matern-5/2 hyperparameters. Lengthscale is in unit-cube units,
/// variances in standardised-output units.
struct GPHyperparams {
  double lengthscale = 0.5;
  double signal_variance = 1.0;
  double noise_variance = 1e-6;
};

inline constexpr double kDefaultJitter = 1e-6;
inline constexpr double kMaxJitter = 1e-2;
inline constexpr double kMinLengthscale = 1e-3;
inline constexpr double kMaxLengthscale = 10.0;
inline constexpr double kMinSignalVariance = 1e-3;
inline constexpr double kMaxSignalVariance = 1e3;

/// sf2 * (1 + sqrt5 r/l + 5 r^2 / (3 l^2)) * exp(-sqrt5 r/l), r = |a - b|.
double matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const GPHyperparams& hp);

/// Covariance as a function of distance.
double matern52_of_distance(double r, const GPHyperparams& hp);

/// Cross-covariance matrix k(A_i, B_j); rows of A and B are points.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const GPHyperparams& hp);

/// Lower Cholesky factor of K + noise*I. The noise is multiplied by 10 on
/// failure up to kMaxJitter; the value actually used is written back to
/// `noise`. Throws NumericalError when even kMaxJitter fails.
Eigen::LLT<Eigen::MatrixXd> factorise_with_jitter(const Eigen::MatrixXd& K, double& noise);

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Zero-mean GP posterior conditioned on (X, y). Immutable after
/// construction; safe to share read-only between threads.
class GPModel {
 public:
  /// Conditions on the rows of X with targets y. Throws NumericalError if the
  /// kernel matrix cannot be factorised.
  GPModel(Eigen::MatrixXd X, Eigen::VectorXd y, GPHyperparams hp);

  /// A model with no observations: mean 0, variance sf2 everywhere.
  static GPModel prior(int dim, GPHyperparams hp);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(X_.rows()); }
  /// Hyperparameters with the noise actually used by the factorisation.
  const GPHyperparams& hyperparams() const { return hp_; }
  const Eigen::MatrixXd& X() const { return X_; }
  const Eigen::VectorXd& y() const { return y_; }
  /// (K + noise I)^-1 y.
  const Eigen::VectorXd& alpha() const { return alpha_; }
  /// Lower Cholesky factor of K + noise I.
  Eigen::MatrixXd cholesky_factor() const;

  /// Solves (K + noise I) z = rhs.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  Eigen::VectorXd kernel_vector(const Eigen::VectorXd& x) const;

  Prediction predict(const Eigen::VectorXd& x) const;

  /// Posterior variance before clamping to [0, inf).
  double raw_variance(const Eigen::VectorXd& x) const;

  /// Mean/variance with their gradients in x.
  Prediction predict_with_gradient(const Eigen::VectorXd& x, Eigen::VectorXd* d_mean,
                                   Eigen::VectorXd* d_variance) const;

  /// Posterior means at the rows of Xs.
  Eigen::VectorXd predict_mean(const Eigen::MatrixXd& Xs) const;
  /// Posterior means and clamped variances at the rows of Xs.
  void predict_batch(const Eigen::MatrixXd& Xs, Eigen::VectorXd& means, Eigen::VectorXd& variances) const;

  /// Same hyperparameters, conditioned on the extra rows as well. No refit.
  GPModel condition_on(const Eigen::MatrixXd& X_extra, const Eigen::VectorXd& y_extra) const;

 private:
  GPModel(int dim, GPHyperparams hp);

  int dim_;
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  GPHyperparams hp_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
};

/// Log marginal likelihood of y under the zero-mean GP with hp. When grad is
/// non-null it receives the derivative with respect to (log lengthscale,
/// log signal variance). Escalates jitter like factorise_with_jitter.
double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GPHyperparams& hp,
                               Eigen::Vector2d* grad = nullptr);

struct FitOptions {
  int restarts = 10;
  int max_iterations = 50;
  /// Previous optimum; used as the first start point when present.
  std::optional<GPHyperparams> warm_start;
  double noise_variance = kDefaultJitter;
};

struct FitResult {
  GPModel model;
  double log_likelihood;
  /// Log likelihood at each start point, in the order tried.
  std::vector<double> start_log_likelihoods;
};

/// Maximises the log marginal likelihood over (log lengthscale, log signal
/// variance) within the hyperparameter box using box-constrained L-BFGS from
/// `restarts` starts (warm start first, the rest log-uniform).
FitResult fit_hyperparameters(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Rng& rng,
                              const FitOptions& options = {});

inline FitResult fit_hyperparameters(const Dataset& data, Rng& rng, const FitOptions& options = {}) {
  return fit_hyperparameters(data.X(), data.f_std(), rng, options);
}

}  // namespace aegis
