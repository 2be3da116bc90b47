#pragma once

#include <Eigen/Core>

#include "aegis/gp.hpp"
#include "aegis/random.hpp"

namespace aegis {

inline constexpr int kDefaultFourierFeatures = 2000;

/// Random Fourier features phi(x) = scale * cos(Omega x + b) whose inner
/// products approximate the Matern-5/2 kernel.
struct FeatureMap {
  Eigen::MatrixXd frequencies;  // n_features x d
  Eigen::VectorXd phases;       // in [0, 2 pi)
  double scale = 0.0;           // sqrt(2 sf2 / n_features)

  int n_features() const { return static_cast<int>(phases.size()); }
  Eigen::VectorXd features(const Eigen::VectorXd& x) const;
  /// Feature matrix, one row per row of Xs.
  Eigen::MatrixXd features(const Eigen::MatrixXd& Xs) const;
};

/// Frequencies from the Matern-5/2 spectral density (a multivariate Student-t
/// with 5 degrees of freedom): omega = z sqrt(5/u) / l, z ~ N(0, I), u ~ chi2(5).
FeatureMap sample_feature_map(const GPHyperparams& hp, int dim, int n_features, Rng& rng);

/// One approximate posterior sample path
///   g(x) = phi(x)^T w + k(x, X)^T v,  v = (K + noise I)^-1 (y - Phi(X) w)
/// with w ~ N(0, I). Immutable; evaluation is reentrant.
class FunctionDraw {
 public:
  FunctionDraw(FeatureMap map, Eigen::VectorXd weights, Eigen::VectorXd correction, Eigen::MatrixXd X,
               GPHyperparams hp);

  int dim() const { return static_cast<int>(map_.frequencies.cols()); }
  const FeatureMap& feature_map() const { return map_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& correction() const { return correction_; }

  double operator()(const Eigen::VectorXd& x) const { return value(x, nullptr); }
  double value(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const;
  Eigen::VectorXd values(const Eigen::MatrixXd& Xs) const;

 private:
  FeatureMap map_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd correction_;
  Eigen::MatrixXd X_;
  GPHyperparams hp_;
};

FunctionDraw draw_function(const GPModel& model, FeatureMap map, Rng& rng);

/// Samples a fresh feature map for the model's hyperparameters, then a draw.
FunctionDraw draw_function(const GPModel& model, Rng& rng, int n_features = kDefaultFourierFeatures);

}  // namespace aegis
