#include "aegis/benchmarks.hpp"

#include <cmath>
#include <numbers>

#include "aegis/errors.hpp"
#include "benchmark_minima.hpp"

namespace aegis {

namespace functions {

double branin(const Eigen::VectorXd& x) {
  constexpr double pi = std::numbers::pi;
  const double b = 5.1 / (4.0 * pi * pi);
  const double c = 5.0 / pi;
  const double t = 1.0 / (8.0 * pi);
  const double u = x[1] - b * x[0] * x[0] + c * x[0] - 6.0;
  return u * u + 10.0 * (1.0 - t) * std::cos(x[0]) + 10.0;
}

double eggholder(const Eigen::VectorXd& x) {
  const double a = x[1] + 47.0;
  return -a * std::sin(std::sqrt(std::abs(a + 0.5 * x[0]))) - x[0] * std::sin(std::sqrt(std::abs(x[0] - a)));
}

double goldstein_price(const Eigen::VectorXd& x) {
  const double x1 = x[0], x2 = x[1];
  const double s = x1 + x2 + 1.0;
  const double t = 2.0 * x1 - 3.0 * x2;
  const double a = 1.0 + s * s * (19.0 - 14.0 * x1 + 3.0 * x1 * x1 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2 * x2);
  const double b = 30.0 + t * t * (18.0 - 32.0 * x1 + 12.0 * x1 * x1 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2 * x2);
  return a * b;
}

double six_hump_camel(const Eigen::VectorXd& x) {
  const double x1 = x[0], x2 = x[1];
  const double x1s = x1 * x1, x2s = x2 * x2;
  return (4.0 - 2.1 * x1s + x1s * x1s / 3.0) * x1s + x1 * x2 + (-4.0 + 4.0 * x2s) * x2s;
}

namespace {

template <int D>
double hartmann(const Eigen::VectorXd& x, const double (&A)[4][D], const double (&P)[4][D]) {
  constexpr double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  double f = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < D; ++j) {
      const double d = x[j] - P[i][j];
      inner += A[i][j] * d * d;
    }
    f -= alpha[i] * std::exp(-inner);
  }
  return f;
}

}  // namespace

double hartmann3(const Eigen::VectorXd& x) {
  static constexpr double A[4][3] = {{3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}, {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}};
  static constexpr double P[4][3] = {{0.3689, 0.1170, 0.2673},
                                     {0.4699, 0.4387, 0.7470},
                                     {0.1091, 0.8732, 0.5547},
                                     {0.0381, 0.5743, 0.8828}};
  return hartmann<3>(x, A, P);
}

double hartmann6(const Eigen::VectorXd& x) {
  static constexpr double A[4][6] = {{10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
                                     {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
                                     {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
                                     {17.0, 8.0, 0.05, 10.0, 0.1, 14.0}};
  static constexpr double P[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                     {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                     {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                     {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
  return hartmann<6>(x, A, P);
}

double ackley(const Eigen::VectorXd& x) {
  constexpr double a = 20.0, b = 0.2, c = 2.0 * std::numbers::pi;
  const double d = static_cast<double>(x.size());
  const double sq = x.squaredNorm() / d;
  const double cs = (c * x.array()).cos().sum() / d;
  return -a * std::exp(-b * std::sqrt(sq)) - std::exp(cs) + a + std::numbers::e;
}

double michalewicz(const Eigen::VectorXd& x) {
  constexpr int m = 10;
  double f = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double s = std::sin(static_cast<double>(i + 1) * x[i] * x[i] / std::numbers::pi);
    f -= std::sin(x[i]) * std::pow(s, 2 * m);
  }
  return f;
}

double styblinski_tang(const Eigen::VectorXd& x) {
  const Eigen::ArrayXd a = x.array();
  return 0.5 * (a.pow(4) - 16.0 * a.square() + 5.0 * a).sum();
}

double rosenbrock(const Eigen::VectorXd& x) {
  double f = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double u = x[i + 1] - x[i] * x[i];
    const double v = x[i] - 1.0;
    f += 100.0 * u * u + v * v;
  }
  return f;
}

}  // namespace functions

std::string Problem::id() const {
  if (name == "Branin" || name == "Eggholder" || name == "GoldsteinPrice" || name == "SixHumpCamel" ||
      name == "Hartmann3" || name == "Hartmann6")
    return name;
  return name + std::to_string(dim);
}

const std::vector<ProblemKey>& problem_registry() {
  static const std::vector<ProblemKey> registry = {
      {"Branin", 2},         {"Eggholder", 2},       {"GoldsteinPrice", 2},   {"SixHumpCamel", 2},
      {"Hartmann3", 3},      {"Ackley", 5},          {"Ackley", 10},          {"Michalewicz", 5},
      {"Michalewicz", 10},   {"StyblinskiTang", 5},  {"StyblinskiTang", 7},   {"StyblinskiTang", 10},
      {"Hartmann6", 6},      {"Rosenbrock", 7},      {"Rosenbrock", 10},
  };
  return registry;
}

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(values.size());
  int i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

Problem make_problem(std::string_view name, int dim) {
  bool known = false;
  for (const auto& key : problem_registry()) known = known || (key.name == name && key.dim == dim);
  if (!known)
    throw ConfigError("unknown problem '" + std::string(name) + "' with d=" + std::to_string(dim));

  using namespace minima;
  Problem p;
  p.name = std::string(name);
  p.dim = dim;
  if (name == "Branin") {
    p.bounds = Bounds{vec({-5.0, 0.0}), vec({10.0, 15.0})};
    p.objective = functions::branin;
    p.f_min = kBranin;
    p.x_min = {vec({-std::numbers::pi, 12.275}), vec({std::numbers::pi, 2.275}), vec({3.0 * std::numbers::pi, 2.475})};
  } else if (name == "Eggholder") {
    p.bounds = Bounds::uniform(2, -512.0, 512.0);
    p.objective = functions::eggholder;
    p.f_min = kEggholder;
    p.x_min = {vec({kEggholderX0, kEggholderX1})};
  } else if (name == "GoldsteinPrice") {
    p.bounds = Bounds::uniform(2, -2.0, 2.0);
    p.objective = functions::goldstein_price;
    p.f_min = kGoldsteinPrice;
    p.x_min = {vec({0.0, -1.0})};
  } else if (name == "SixHumpCamel") {
    p.bounds = Bounds{vec({-3.0, -2.0}), vec({3.0, 2.0})};
    p.objective = functions::six_hump_camel;
    p.f_min = kSixHumpCamel;
    p.x_min = {vec({kSixHumpCamelX0, kSixHumpCamelX1}), vec({-kSixHumpCamelX0, -kSixHumpCamelX1})};
  } else if (name == "Hartmann3") {
    p.bounds = Bounds::uniform(3, 0.0, 1.0);
    p.objective = functions::hartmann3;
    p.f_min = kHartmann3;
    p.x_min = {Eigen::Map<const Eigen::VectorXd>(kHartmann3X, 3)};
  } else if (name == "Hartmann6") {
    p.bounds = Bounds::uniform(6, 0.0, 1.0);
    p.objective = functions::hartmann6;
    p.f_min = kHartmann6;
    p.x_min = {Eigen::Map<const Eigen::VectorXd>(kHartmann6X, 6)};
  } else if (name == "Ackley") {
    p.bounds = Bounds::uniform(dim, -32.768, 32.768);
    p.objective = functions::ackley;
    p.f_min = 0.0;
    p.x_min = {Eigen::VectorXd::Zero(dim)};
  } else if (name == "Michalewicz") {
    p.bounds = Bounds::uniform(dim, 0.0, std::numbers::pi);
    p.objective = functions::michalewicz;
    Eigen::VectorXd x(dim);
    for (int i = 0; i < dim; ++i) x[i] = kMichalewiczCoordinate[i];
    p.x_min = {x};
    p.f_min = dim == 5 ? kMichalewicz5 : kMichalewicz10;
  } else if (name == "StyblinskiTang") {
    p.bounds = Bounds::uniform(dim, -5.0, 5.0);
    p.objective = functions::styblinski_tang;
    p.f_min = dim * kStyblinskiTangPerCoordinate;
    p.x_min = {Eigen::VectorXd::Constant(dim, kStyblinskiTangX)};
  } else if (name == "Rosenbrock") {
    p.bounds = Bounds::uniform(dim, -5.0, 10.0);
    p.objective = functions::rosenbrock;
    p.f_min = 0.0;
    p.x_min = {Eigen::VectorXd::Ones(dim)};
  }
  return p;
}

Problem make_problem(std::string_view id) {
  if (const auto colon = id.find(':'); colon != std::string_view::npos) {
    const std::string dim_text(id.substr(colon + 1));
    try {
      return make_problem(id.substr(0, colon), std::stoi(dim_text));
    } catch (const std::invalid_argument&) {
      throw ConfigError("bad problem dimension in '" + std::string(id) + "'");
    }
  }
  for (const auto& key : problem_registry()) {
    Problem p = make_problem(key.name, key.dim);
    if (p.id() == id) return p;
  }
  throw ConfigError("unknown problem '" + std::string(id) + "'");
}

double evaluate(const Problem& problem, const Eigen::VectorXd& x_raw) {
  if (x_raw.size() != problem.dim) throw DomainError(problem.id() + ": wrong dimension");
  for (int i = 0; i < problem.dim; ++i) {
    if (!(x_raw[i] >= problem.bounds.lower[i] && x_raw[i] <= problem.bounds.upper[i]))
      throw DomainError(problem.id() + ": coordinate " + std::to_string(i) + " outside bounds");
  }
  return problem.objective(x_raw);
}

double evaluate_unit(const Problem& problem, const Eigen::VectorXd& u) {
  return problem.objective(from_unit_cube(u, problem.bounds));
}

}  // namespace aegis
