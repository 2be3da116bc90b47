#include "aegis/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "aegis/box_lbfgs.hpp"
#include "aegis/errors.hpp"

namespace aegis {

namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873128;

// Derivative of k with respect to x for the pair (x, xi), divided by (x - xi):
// dk/dx = -sf2 * 5/(3 l^2) * exp(-a) * (1 + a) * (x - xi).
double matern52_grad_factor(double r, const GPHyperparams& hp) {
  const double a = kSqrt5 * r / hp.lengthscale;
  return -hp.signal_variance * 5.0 / (3.0 * hp.lengthscale * hp.lengthscale) * std::exp(-a) * (1.0 + a);
}

Eigen::VectorXd distances_to(const Eigen::MatrixXd& X, const Eigen::VectorXd& x) {
  return (X.rowwise() - x.transpose()).rowwise().norm();
}

}  // namespace

double matern52_of_distance(double r, const GPHyperparams& hp) {
  const double a = kSqrt5 * r / hp.lengthscale;
  return hp.signal_variance * (1.0 + a + a * a / 3.0) * std::exp(-a);
}

double matern52(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const GPHyperparams& hp) {
  return matern52_of_distance((a - b).norm(), hp);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const GPHyperparams& hp) {
  Eigen::MatrixXd K(A.rows(), B.rows());
  const double scale = kSqrt5 / hp.lengthscale;
  for (Eigen::Index j = 0; j < B.rows(); ++j) {
    const Eigen::ArrayXd a = (A.rowwise() - B.row(j)).rowwise().norm().array() * scale;
    K.col(j) = (hp.signal_variance * (1.0 + a + a.square() / 3.0) * (-a).exp()).matrix();
  }
  return K;
}

Eigen::LLT<Eigen::MatrixXd> factorise_with_jitter(const Eigen::MatrixXd& K, double& noise) {
  const auto n = K.rows();
  for (;;) {
    Eigen::MatrixXd Kn = K;
    Kn.diagonal().array() += noise;
    Eigen::LLT<Eigen::MatrixXd> llt(Kn);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 0.0) return llt;
    if (noise >= kMaxJitter) break;
    noise = std::min(kMaxJitter, noise > 0.0 ? noise * 10.0 : kDefaultJitter);
  }
  throw NumericalError("Cholesky factorisation failed for a " + std::to_string(n) + "x" + std::to_string(n) +
                       " kernel matrix even with jitter " + std::to_string(kMaxJitter));
}

GPModel::GPModel(int dim, GPHyperparams hp) : dim_(dim), X_(0, dim), y_(0), hp_(hp), alpha_(0) {}

GPModel::GPModel(Eigen::MatrixXd X, Eigen::VectorXd y, GPHyperparams hp)
    : dim_(static_cast<int>(X.cols())), X_(std::move(X)), y_(std::move(y)), hp_(hp) {
  if (X_.rows() != y_.size()) throw DomainError("GPModel: X and y sizes differ");
  if (!(hp_.lengthscale > 0.0) || !(hp_.signal_variance > 0.0) || hp_.noise_variance < 0.0)
    throw DomainError("GPModel: invalid hyperparameters");
  if (X_.rows() == 0) {
    alpha_.resize(0);
    return;
  }
  llt_ = factorise_with_jitter(kernel_matrix(X_, X_, hp_), hp_.noise_variance);
  alpha_ = llt_.solve(y_);
}

GPModel GPModel::prior(int dim, GPHyperparams hp) { return GPModel(dim, hp); }

Eigen::MatrixXd GPModel::cholesky_factor() const {
  if (size() == 0) return Eigen::MatrixXd(0, 0);
  return llt_.matrixL();
}

Eigen::VectorXd GPModel::solve(const Eigen::VectorXd& rhs) const {
  if (size() == 0) return Eigen::VectorXd(0);
  return llt_.solve(rhs);
}

Eigen::VectorXd GPModel::kernel_vector(const Eigen::VectorXd& x) const {
  Eigen::VectorXd k(size());
  const Eigen::VectorXd r = distances_to(X_, x);
  for (int i = 0; i < size(); ++i) k[i] = matern52_of_distance(r[i], hp_);
  return k;
}

double GPModel::raw_variance(const Eigen::VectorXd& x) const {
  if (size() == 0) return hp_.signal_variance;
  Eigen::VectorXd v = kernel_vector(x);
  llt_.matrixL().solveInPlace(v);
  return hp_.signal_variance - v.squaredNorm();
}

Prediction GPModel::predict(const Eigen::VectorXd& x) const {
  if (size() == 0) return {0.0, hp_.signal_variance};
  const Eigen::VectorXd k = kernel_vector(x);
  Eigen::VectorXd v = k;
  llt_.matrixL().solveInPlace(v);
  return {k.dot(alpha_), std::max(0.0, hp_.signal_variance - v.squaredNorm())};
}

Prediction GPModel::predict_with_gradient(const Eigen::VectorXd& x, Eigen::VectorXd* d_mean,
                                          Eigen::VectorXd* d_variance) const {
  if (size() == 0) {
    if (d_mean) d_mean->setZero(dim_);
    if (d_variance) d_variance->setZero(dim_);
    return {0.0, hp_.signal_variance};
  }
  const Eigen::VectorXd r = distances_to(X_, x);
  Eigen::VectorXd k(size()), factor(size());
  for (int i = 0; i < size(); ++i) {
    k[i] = matern52_of_distance(r[i], hp_);
    factor[i] = matern52_grad_factor(r[i], hp_);
  }
  Eigen::VectorXd v = k;
  llt_.matrixL().solveInPlace(v);
  const Prediction p{k.dot(alpha_), std::max(0.0, hp_.signal_variance - v.squaredNorm())};
  // d k_i / dx = factor_i * (x - x_i), so sum_i c_i dk_i = (sum_i c_i f_i) x - X^T (c .* f).
  auto grad_of = [&](const Eigen::VectorXd& c) -> Eigen::VectorXd {
    const Eigen::VectorXd cf = c.cwiseProduct(factor);
    return cf.sum() * x - X_.transpose() * cf;
  };
  if (d_mean) *d_mean = grad_of(alpha_);
  if (d_variance) {
    Eigen::VectorXd w = v;
    llt_.matrixU().solveInPlace(w);
    *d_variance = -2.0 * grad_of(w);
  }
  return p;
}

Eigen::VectorXd GPModel::predict_mean(const Eigen::MatrixXd& Xs) const {
  if (size() == 0) return Eigen::VectorXd::Zero(Xs.rows());
  return kernel_matrix(Xs, X_, hp_) * alpha_;
}

void GPModel::predict_batch(const Eigen::MatrixXd& Xs, Eigen::VectorXd& means, Eigen::VectorXd& variances) const {
  if (size() == 0) {
    means = Eigen::VectorXd::Zero(Xs.rows());
    variances = Eigen::VectorXd::Constant(Xs.rows(), hp_.signal_variance);
    return;
  }
  Eigen::MatrixXd Kxs = kernel_matrix(X_, Xs, hp_);
  means = Kxs.transpose() * alpha_;
  llt_.matrixL().solveInPlace(Kxs);
  variances = (hp_.signal_variance - Kxs.colwise().squaredNorm().array()).max(0.0).matrix().transpose();
}

GPModel GPModel::condition_on(const Eigen::MatrixXd& X_extra, const Eigen::VectorXd& y_extra) const {
  Eigen::MatrixXd X(size() + X_extra.rows(), dim_);
  X << X_, X_extra;
  Eigen::VectorXd y(size() + y_extra.size());
  y << y_, y_extra;
  GPHyperparams hp = hp_;
  return GPModel(std::move(X), std::move(y), hp);
}

namespace {

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& X) {
  const auto n = X.rows();
  Eigen::MatrixXd D(n, n);
  for (Eigen::Index j = 0; j < n; ++j) D.col(j) = (X.rowwise() - X.row(j)).rowwise().norm();
  return D;
}

double lml_from_distances(const Eigen::MatrixXd& D, const Eigen::VectorXd& y, const GPHyperparams& hp,
                          Eigen::Vector2d* grad) {
  const auto n = D.rows();
  const Eigen::ArrayXXd a = D.array() * (kSqrt5 / hp.lengthscale);
  const Eigen::ArrayXXd e = hp.signal_variance * (-a).exp();
  const Eigen::MatrixXd K = (e * (1.0 + a + a.square() / 3.0)).matrix();
  double noise = hp.noise_variance;
  const Eigen::LLT<Eigen::MatrixXd> llt = factorise_with_jitter(K, noise);
  const Eigen::VectorXd alpha = llt.solve(y);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double lml = -0.5 * y.dot(alpha) - 0.5 * log_det - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (grad) {
    // d/dtheta = 0.5 tr((alpha alpha^T - K^-1) dK/dtheta)
    Eigen::MatrixXd A = -llt.solve(Eigen::MatrixXd::Identity(n, n));
    A.noalias() += alpha * alpha.transpose();
    const Eigen::ArrayXXd dlen = e * a.square() * (1.0 + a) / 3.0;
    (*grad)[0] = 0.5 * (A.array() * dlen).sum();
    (*grad)[1] = 0.5 * (A.array() * K.array()).sum();
  }
  return lml;
}

}  // namespace

double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GPHyperparams& hp,
                               Eigen::Vector2d* grad) {
  if (X.rows() < 1) throw DomainError("log_marginal_likelihood: need at least one observation");
  if (y.size() != X.rows()) throw DomainError("log_marginal_likelihood: X and y sizes differ");
  return lml_from_distances(pairwise_distances(X), y, hp, grad);
}

FitResult fit_hyperparameters(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Rng& rng,
                              const FitOptions& options) {
  if (X.rows() < 1) throw DomainError("fit_hyperparameters: need at least one observation");
  if (options.restarts < 1) throw ConfigError("fit_hyperparameters: restarts must be >= 1");

  const Eigen::Vector2d lo(std::log(kMinLengthscale), std::log(kMinSignalVariance));
  const Eigen::Vector2d hi(std::log(kMaxLengthscale), std::log(kMaxSignalVariance));
  auto to_hp = [&](const Eigen::VectorXd& theta) {
    return GPHyperparams{std::exp(theta[0]), std::exp(theta[1]), options.noise_variance};
  };

  const Eigen::MatrixXd D = pairwise_distances(X);
  const SmoothObjective negative_lml = [&](const Eigen::VectorXd& theta, Eigen::VectorXd* grad) {
    try {
      Eigen::Vector2d g;
      const double v = lml_from_distances(D, y, to_hp(theta), grad ? &g : nullptr);
      if (grad) *grad = -g;
      return -v;
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<Eigen::VectorXd> starts;
  if (options.warm_start) {
    Eigen::VectorXd w(2);
    w << std::log(options.warm_start->lengthscale), std::log(options.warm_start->signal_variance);
    starts.push_back(w.cwiseMax(lo).cwiseMin(hi));
  }
  while (static_cast<int>(starts.size()) < options.restarts) {
    Eigen::VectorXd s(2);
    for (int i = 0; i < 2; ++i) s[i] = lo[i] + uniform01(rng) * (hi[i] - lo[i]);
    starts.push_back(s);
  }

  BoxLbfgsOptions opts;
  opts.max_iterations = options.max_iterations;
  opts.f_tolerance = 1e-9;
  opts.pg_tolerance = 1e-5;

  std::vector<double> start_lmls;
  Eigen::VectorXd best_theta;
  double best_value = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    const BoxLbfgsResult r = minimize_box_lbfgs(negative_lml, s, lo, hi, opts);
    start_lmls.push_back(-negative_lml(s, nullptr));
    if (std::isfinite(r.value) && r.value < best_value) {
      best_value = r.value;
      best_theta = r.x;
    }
  }
  if (!std::isfinite(best_value))
    throw NumericalError("fit_hyperparameters: every restart failed numerically");
  return FitResult{GPModel(X, y, to_hp(best_theta)), -best_value, std::move(start_lmls)};
}

}  // namespace aegis
