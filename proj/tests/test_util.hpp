#pragma once

#include <cmath>
#include <functional>

#include <Eigen/Core>

#include "aegis/gp.hpp"
#include "aegis/random.hpp"

namespace testutil {

inline Eigen::MatrixXd uniform_matrix(int rows, int cols, aegis::Rng& rng) {
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = aegis::uniform01(rng);
  return M;
}

inline Eigen::VectorXd normal_vector(int n, aegis::Rng& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = aegis::standard_normal(rng);
  return v;
}

/// A GP on random unit-cube inputs with smooth standardised targets.
inline aegis::GPModel random_model(int n, int dim, aegis::Rng& rng, aegis::GPHyperparams hp = {0.3, 1.0, 1e-6}) {
  Eigen::MatrixXd X = uniform_matrix(n, dim, rng);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = std::sin(6.0 * X(i, 0)) + (dim > 1 ? X.row(i).tail(dim - 1).squaredNorm() : 0.0);
  if (n > 1) {
    const double m = y.mean();
    const double s = std::sqrt((y.array() - m).square().sum() / (n - 1));
    y = (y.array() - m) / (s > 0 ? s : 1.0);
  }
  return aegis::GPModel(X, y, hp);
}

/// Central finite-difference gradient.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                   double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

/// max_i |a_i - b_i| / max(|b_i|, floor)
inline double max_rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-3) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), floor));
  return e;
}

}  // namespace testutil
