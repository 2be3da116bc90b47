#include "aegis/pathwise.hpp"

#include <cmath>
#include <numbers>

#include "aegis/errors.hpp"

namespace aegis {

Eigen::VectorXd FeatureMap::features(const Eigen::VectorXd& x) const {
  return scale * ((frequencies * x + phases).array().cos()).matrix();
}

Eigen::MatrixXd FeatureMap::features(const Eigen::MatrixXd& Xs) const {
  Eigen::MatrixXd arg = Xs * frequencies.transpose();
  arg.rowwise() += phases.transpose();
  return scale * arg.array().cos().matrix();
}

FeatureMap sample_feature_map(const GPHyperparams& hp, int dim, int n_features, Rng& rng) {
  if (n_features < 1) throw DomainError("sample_feature_map: n_features must be >= 1");
  if (dim < 1) throw DomainError("sample_feature_map: dim must be >= 1");
  FeatureMap map;
  map.frequencies.resize(n_features, dim);
  map.phases.resize(n_features);
  std::chi_squared_distribution<double> chi2(5.0);
  for (int j = 0; j < n_features; ++j) {
    double u = chi2(rng);
    while (!(u > 0.0)) u = chi2(rng);
    const double mix = std::sqrt(5.0 / u) / hp.lengthscale;
    for (int i = 0; i < dim; ++i) map.frequencies(j, i) = standard_normal(rng) * mix;
  }
  for (int j = 0; j < n_features; ++j) map.phases[j] = 2.0 * std::numbers::pi * uniform01(rng);
  map.scale = std::sqrt(2.0 * hp.signal_variance / n_features);
  return map;
}

FunctionDraw::FunctionDraw(FeatureMap map, Eigen::VectorXd weights, Eigen::VectorXd correction,
                           Eigen::MatrixXd X, GPHyperparams hp)
    : map_(std::move(map)),
      weights_(std::move(weights)),
      correction_(std::move(correction)),
      X_(std::move(X)),
      hp_(hp) {}

double FunctionDraw::value(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
  const Eigen::ArrayXd arg = (map_.frequencies * x + map_.phases).array();
  double v = map_.scale * arg.cos().matrix().dot(weights_);
  if (grad) {
    const Eigen::VectorXd c = (-map_.scale * arg.sin() * weights_.array()).matrix();
    *grad = map_.frequencies.transpose() * c;
  }
  if (X_.rows() > 0) {
    constexpr double kSqrt5 = 2.23606797749978969640917366873128;
    const Eigen::ArrayXd a = (X_.rowwise() - x.transpose()).rowwise().norm().array() * (kSqrt5 / hp_.lengthscale);
    const Eigen::ArrayXd e = (-a).exp();
    const Eigen::ArrayXd k = hp_.signal_variance * (1.0 + a + a.square() / 3.0) * e;
    v += (k * correction_.array()).sum();
    if (grad) {
      const double l2 = hp_.lengthscale * hp_.lengthscale;
      const Eigen::VectorXd cf =
          (correction_.array() * (-hp_.signal_variance * 5.0 / (3.0 * l2)) * e * (1.0 + a)).matrix();
      *grad += cf.sum() * x - X_.transpose() * cf;
    }
  }
  return v;
}

Eigen::VectorXd FunctionDraw::values(const Eigen::MatrixXd& Xs) const {
  Eigen::VectorXd out = map_.features(Xs) * weights_;
  if (X_.rows() > 0) out.noalias() += kernel_matrix(Xs, X_, hp_) * correction_;
  return out;
}

FunctionDraw draw_function(const GPModel& model, FeatureMap map, Rng& rng) {
  Eigen::VectorXd w(map.n_features());
  for (int j = 0; j < w.size(); ++j) w[j] = standard_normal(rng);
  Eigen::VectorXd v(0);
  if (model.size() > 0) {
    const Eigen::VectorXd prior_at_data = map.features(model.X()) * w;
    v = model.solve(model.y() - prior_at_data);
    if (!v.allFinite()) throw NumericalError("draw_function: non-finite pathwise correction");
  }
  return FunctionDraw(std::move(map), std::move(w), std::move(v), model.X(), model.hyperparams());
}

FunctionDraw draw_function(const GPModel& model, Rng& rng, int n_features) {
  FeatureMap map = sample_feature_map(model.hyperparams(), model.dim(), n_features, rng);
  return draw_function(model, std::move(map), rng);
}

}  // namespace aegis
