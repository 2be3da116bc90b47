#include "aegis/design_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "aegis/errors.hpp"

namespace aegis {

void Bounds::validate() const {
  if (lower.size() < 1 || lower.size() != upper.size())
    throw DomainError("bounds: lower/upper must have equal dimension >= 1");
  for (int i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i]))
      throw DomainError("bounds: lower[" + std::to_string(i) + "] must be < upper");
  }
}

Bounds Bounds::uniform(int dim, double lo, double hi) {
  return Bounds{Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi)};
}

Eigen::VectorXd to_unit_cube(const Eigen::VectorXd& x_raw, const Bounds& bounds) {
  if (x_raw.size() != bounds.dim()) throw DomainError("to_unit_cube: dimension mismatch");
  Eigen::VectorXd u(x_raw.size());
  for (int i = 0; i < x_raw.size(); ++i) {
    const double range = bounds.upper[i] - bounds.lower[i];
    const double slack = 1e-12 * range;
    if (!(x_raw[i] >= bounds.lower[i] - slack && x_raw[i] <= bounds.upper[i] + slack))
      throw DomainError("to_unit_cube: coordinate " + std::to_string(i) + " outside bounds");
    u[i] = std::clamp((x_raw[i] - bounds.lower[i]) / range, 0.0, 1.0);
  }
  return u;
}

Eigen::VectorXd from_unit_cube(const Eigen::VectorXd& u, const Bounds& bounds) {
  if (u.size() != bounds.dim()) throw DomainError("from_unit_cube: dimension mismatch");
  Eigen::VectorXd x(u.size());
  for (int i = 0; i < u.size(); ++i) {
    x[i] = std::clamp(bounds.lower[i] + u[i] * (bounds.upper[i] - bounds.lower[i]), bounds.lower[i],
                      bounds.upper[i]);
  }
  return x;
}

bool in_unit_cube(const Eigen::VectorXd& u) {
  return (u.array() >= 0.0).all() && (u.array() <= 1.0).all();
}

Dataset::Dataset(int dim) : dim_(dim), X_(0, dim) {
  if (dim < 1) throw DomainError("dataset: dimension must be >= 1");
}

void Dataset::append(const Eigen::VectorXd& x, double f) {
  if (x.size() != dim_) throw DomainError("dataset: point has wrong dimension");
  if (!in_unit_cube(x)) throw DomainError("dataset: point outside the unit cube");
  const int t = size();
  X_.conservativeResize(t + 1, Eigen::NoChange);
  X_.row(t) = x.transpose();
  f_raw_.conservativeResize(t + 1);
  f_raw_[t] = f;
  restandardise();
}

void Dataset::restandardise() {
  const int t = size();
  if (t == 0) {
    out_mean_ = 0.0;
    out_std_ = 1.0;
    f_std_.resize(0);
    return;
  }
  out_mean_ = f_raw_.mean();
  out_std_ = 1.0;
  if (t > 1) {
    const double var = (f_raw_.array() - out_mean_).square().sum() / (t - 1);
    if (var > 0.0 && std::isfinite(var)) out_std_ = std::sqrt(var);
  }
  f_std_ = (f_raw_.array() - out_mean_) / out_std_;
}

double Dataset::best_raw() const {
  if (empty()) throw StateError("dataset: no observations");
  return f_raw_.minCoeff();
}

double Dataset::best_std() const {
  if (empty()) throw StateError("dataset: no observations");
  return f_std_.minCoeff();
}

double min_pairwise_distance(const Eigen::MatrixXd& points) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points.rows(); ++i)
    for (int j = i + 1; j < points.rows(); ++j)
      best = std::min(best, (points.row(i) - points.row(j)).squaredNorm());
  return std::sqrt(best);
}

namespace {

Eigen::MatrixXd plain_lhs(int n, int dim, Rng& rng) {
  Eigen::MatrixXd out(n, dim);
  std::vector<int> perm(n);
  for (int j = 0; j < dim; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < n; ++i) {
      // Keep strictly inside the stratum so that k/M boundaries never collide.
      const double jitter = std::min(uniform01(rng), std::nextafter(1.0, 0.0));
      out(i, j) = (perm[i] + jitter) / n;
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXd latin_hypercube(int n_points, int dim, Rng& rng, int candidates) {
  if (n_points < 1 || dim < 1 || candidates < 1)
    throw DomainError("latin_hypercube: n_points, dim and candidates must be >= 1");
  Eigen::MatrixXd best = plain_lhs(n_points, dim, rng);
  double best_dist = min_pairwise_distance(best);
  for (int c = 1; c < candidates; ++c) {
    Eigen::MatrixXd cand = plain_lhs(n_points, dim, rng);
    const double dist = min_pairwise_distance(cand);
    if (dist > best_dist) {
      best = std::move(cand);
      best_dist = dist;
    }
  }
  return best;
}

void write_design_csv(const std::filesystem::path& path, const DesignTable& design) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const auto dim = design.x_raw.cols();
  for (Eigen::Index j = 0; j < dim; ++j) out << 'x' << j << ',';
  out << "f\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < design.x_raw.rows(); ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) out << design.x_raw(i, j) << ',';
    out << design.f[i] << '\n';
  }
}

DesignTable read_design_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DomainError("design csv: missing header");
  const auto n_cols = std::count(line.begin(), line.end(), ',') + 1;
  if (n_cols < 2) throw DomainError("design csv: need at least one coordinate and f");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<long>(row.size()) != n_cols)
      throw DomainError("design csv: row " + std::to_string(rows.size() + 2) + " has wrong column count");
    rows.push_back(std::move(row));
  }
  DesignTable design{Eigen::MatrixXd(rows.size(), n_cols - 1), Eigen::VectorXd(rows.size())};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (long j = 0; j + 1 < n_cols; ++j) design.x_raw(i, j) = rows[i][j];
    design.f[i] = rows[i].back();
  }
  return design;
}

}  // namespace aegis
