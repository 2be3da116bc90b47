#include "aegis/box_lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace aegis {

namespace {

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
};

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Two-loop recursion restricted to the coordinates where mask == 1.
Eigen::VectorXd lbfgs_direction(const Eigen::VectorXd& g, const Eigen::VectorXd& mask,
                                const std::deque<CurvaturePair>& memory) {
  Eigen::VectorXd q = g.cwiseProduct(mask);
  const auto m = memory.size();
  std::vector<double> alpha(m), rho(m);
  for (std::size_t k = m; k-- > 0;) {
    const Eigen::VectorXd s = memory[k].s.cwiseProduct(mask);
    const Eigen::VectorXd y = memory[k].y.cwiseProduct(mask);
    const double sy = s.dot(y);
    rho[k] = sy > 0.0 ? 1.0 / sy : 0.0;
    alpha[k] = rho[k] * s.dot(q);
    q -= alpha[k] * y;
  }
  double gamma = 1.0;
  if (m > 0) {
    const Eigen::VectorXd s = memory.back().s.cwiseProduct(mask);
    const Eigen::VectorXd y = memory.back().y.cwiseProduct(mask);
    const double yy = y.squaredNorm();
    if (yy > 0.0 && s.dot(y) > 0.0) gamma = s.dot(y) / yy;
  }
  Eigen::VectorXd r = gamma * q;
  for (std::size_t k = 0; k < m; ++k) {
    const Eigen::VectorXd s = memory[k].s.cwiseProduct(mask);
    const Eigen::VectorXd y = memory[k].y.cwiseProduct(mask);
    const double beta = rho[k] * y.dot(r);
    r += s * (alpha[k] - beta);
  }
  return -r.cwiseProduct(mask);
}

}  // namespace

BoxLbfgsResult minimize_box_lbfgs(const SmoothObjective& f, const Eigen::VectorXd& start,
                                  const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                  const BoxLbfgsOptions& options) {
  const auto n = start.size();
  BoxLbfgsResult result;
  Eigen::VectorXd x = project(start, lower, upper);
  Eigen::VectorXd g(n);
  double fx = f(x, &g);
  result.evaluations = 1;
  result.x = x;
  result.value = fx;
  if (!std::isfinite(fx) || !g.allFinite()) return result;

  std::deque<CurvaturePair> memory;
  Eigen::VectorXd mask(n);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;

    double pg_norm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool pinned = (x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0);
      mask[i] = pinned ? 0.0 : 1.0;
      if (!pinned) pg_norm = std::max(pg_norm, std::abs(g[i]));
    }
    if (pg_norm < options.pg_tolerance) {
      result.converged = true;
      break;
    }

    bool accepted = false;
    Eigen::VectorXd x_new, g_new(n);
    double f_new = fx;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Eigen::VectorXd d = lbfgs_direction(g, mask, memory);
      if (memory.empty() || d.dot(g) >= 0.0) {
        memory.clear();
        d = -g.cwiseProduct(mask);
        // Unit-length first step in the max norm.
        const double dmax = d.cwiseAbs().maxCoeff();
        if (dmax > 1.0) d /= dmax;
      }
      double step = 1.0;
      for (int k = 0; k < options.max_backtracks; ++k, step *= 0.5) {
        x_new = project(x + step * d, lower, upper);
        const Eigen::VectorXd delta = x_new - x;
        if (delta.cwiseAbs().maxCoeff() == 0.0) break;
        // Gradients only for the full step and for the point finally accepted.
        const bool with_grad = k == 0;
        f_new = f(x_new, with_grad ? &g_new : nullptr);
        ++result.evaluations;
        if (std::isfinite(f_new) && f_new <= fx + 1e-4 * g.dot(delta)) {
          if (!with_grad) {
            f_new = f(x_new, &g_new);
            ++result.evaluations;
          }
          if (std::isfinite(f_new) && g_new.allFinite()) {
            accepted = true;
            break;
          }
        }
      }
      if (!accepted && memory.empty()) break;
      if (!accepted) memory.clear();
    }
    if (!accepted) break;

    CurvaturePair pair{x_new - x, g_new - g};
    const double sy = pair.s.dot(pair.y);
    if (sy > 1e-12 * pair.y.squaredNorm()) {
      memory.push_back(std::move(pair));
      if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
    }
    const double decrease = fx - f_new;
    x = x_new;
    g = g_new;
    fx = f_new;
    if (decrease <= options.f_tolerance * std::max({std::abs(fx), std::abs(fx + decrease), options.f_scale_floor})) {
      result.converged = true;
      break;
    }
  }
  result.x = x;
  result.value = fx;
  return result;
}

}  // namespace aegis
