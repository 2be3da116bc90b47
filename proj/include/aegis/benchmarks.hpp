#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "aegis/design_data.hpp"

namespace aegis {

/// A deterministic black-box test function on a box in raw coordinates.
struct Problem {
  std::string name;
  int dim = 0;
  Bounds bounds;
  std::function<double(const Eigen::VectorXd&)> objective;
  double f_min = 0.0;
  std::vector<Eigen::VectorXd> x_min;

  /// Registry key: the name for fixed-dimension functions ("Branin",
  /// "Hartmann6"), name followed by d otherwise ("Ackley10").
  std::string id() const;
};

struct ProblemKey {
  std::string name;
  int dim;
};

/// The fifteen (name, d) pairs, in a stable order.
const std::vector<ProblemKey>& problem_registry();

/// Throws ConfigError for pairs outside the registry.
Problem make_problem(std::string_view name, int dim);

/// Accepts a registry id ("StyblinskiTang7") or "name:d".
Problem make_problem(std::string_view id);

/// Objective value at a raw point; DomainError when out of bounds.
double evaluate(const Problem& problem, const Eigen::VectorXd& x_raw);

/// Objective value at a unit-cube point.
double evaluate_unit(const Problem& problem, const Eigen::VectorXd& u);

namespace functions {

double branin(const Eigen::VectorXd& x);
double eggholder(const Eigen::VectorXd& x);
double goldstein_price(const Eigen::VectorXd& x);
double six_hump_camel(const Eigen::VectorXd& x);
double hartmann3(const Eigen::VectorXd& x);
double hartmann6(const Eigen::VectorXd& x);
double ackley(const Eigen::VectorXd& x);
double michalewicz(const Eigen::VectorXd& x);
double styblinski_tang(const Eigen::VectorXd& x);
double rosenbrock(const Eigen::VectorXd& x);

}  // namespace functions

}  // namespace aegis
