#include <doctest.h>

#include <cmath>

#include "aegis/box_lbfgs.hpp"

using namespace aegis;

TEST_CASE("unconstrained quadratic") {
  const SmoothObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    Eigen::VectorXd c(3);
    c << 0.3, -0.2, 0.7;
    if (g) *g = 2.0 * (x - c);
    return (x - c).squaredNorm();
  };
  const auto r = minimize_box_lbfgs(f, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Constant(3, -1),
                                    Eigen::VectorXd::Constant(3, 1));
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(-0.2).epsilon(1e-6));
  CHECK(r.value <= 1e-10);
}

TEST_CASE("active bounds") {
  const SmoothObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (g) *g = 2.0 * (x.array() - 2.0).matrix();
    return (x.array() - 2.0).square().sum();
  };
  const auto r = minimize_box_lbfgs(f, Eigen::VectorXd::Constant(2, 0.5), Eigen::VectorXd::Zero(2),
                                    Eigen::VectorXd::Ones(2));
  CHECK(r.x[0] == 1.0);
  CHECK(r.x[1] == 1.0);
}

TEST_CASE("Rosenbrock valley") {
  const SmoothObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    if (g) {
      g->resize(2);
      (*g)[0] = -2.0 * a - 400.0 * x[0] * b;
      (*g)[1] = 200.0 * b;
    }
    return a * a + 100.0 * b * b;
  };
  BoxLbfgsOptions o;
  o.max_iterations = 500;
  const auto r = minimize_box_lbfgs(f, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(-2, -2), Eigen::Vector2d(2, 2), o);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("non-finite trial values are treated as failed steps") {
  const SmoothObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (x[0] > 0.8) return std::numeric_limits<double>::infinity();
    if (g) *g = Eigen::VectorXd::Constant(1, -1.0);
    return -x[0];
  };
  const auto r = minimize_box_lbfgs(f, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
  CHECK(std::isfinite(r.value));
  CHECK(r.x[0] <= 0.8);
  CHECK(r.x[0] >= 0.0);
}
