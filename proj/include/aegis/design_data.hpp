#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "aegis/random.hpp"

namespace aegis {

/// Axis-aligned box in raw problem coordinates.
struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }

  /// Throws DomainError unless d >= 1 and lower < upper componentwise.
  void validate() const;

  static Bounds uniform(int dim, double lower, double upper);
};

/// Affine map of a raw point into [0,1]^d. Throws DomainError when x_raw lies
/// outside the bounds.
Eigen::VectorXd to_unit_cube(const Eigen::VectorXd& x_raw, const Bounds& bounds);

/// Inverse of to_unit_cube; the result is clamped into the box.
Eigen::VectorXd from_unit_cube(const Eigen::VectorXd& u, const Bounds& bounds);

bool in_unit_cube(const Eigen::VectorXd& u);

/// Observations collected so far. Inputs live in the unit cube; outputs are
/// kept raw and standardised (zero mean, unit sample variance).
class Dataset {
 public:
  explicit Dataset(int dim);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(f_raw_.size()); }
  bool empty() const { return f_raw_.size() == 0; }

  /// t x d design matrix, one row per observation, in insertion order.
  const Eigen::MatrixXd& X() const { return X_; }
  const Eigen::VectorXd& f_raw() const { return f_raw_; }
  const Eigen::VectorXd& f_std() const { return f_std_; }
  double out_mean() const { return out_mean_; }
  double out_std() const { return out_std_; }

  int n_initial() const { return n_initial_; }
  void set_n_initial(int m) { n_initial_ = m; }

  /// Adds one observation and restandardises. Throws DomainError when x is
  /// outside [0,1]^d or has the wrong dimension.
  void append(const Eigen::VectorXd& x, double f);

  /// Recomputes out_mean/out_std (unbiased) and f_std. A singleton or
  /// constant sample gets out_std = 1.
  void restandardise();

  double standardise(double f) const { return (f - out_mean_) / out_std_; }
  double best_raw() const;
  double best_std() const;

 private:
  int dim_;
  Eigen::MatrixXd X_;
  Eigen::VectorXd f_raw_;
  Eigen::VectorXd f_std_;
  double out_mean_ = 0.0;
  double out_std_ = 1.0;
  int n_initial_ = 0;
};

/// Best-of-`candidates` Latin hypercube design: every column has exactly one
/// point per stratum [k/M, (k+1)/M), and the candidate with the largest
/// minimum pairwise distance is returned. Rows are points.
Eigen::MatrixXd latin_hypercube(int n_points, int dim, Rng& rng, int candidates = 100);

/// Smallest pairwise Euclidean distance between rows (infinity for < 2 rows).
double min_pairwise_distance(const Eigen::MatrixXd& points);

/// Initial design in raw coordinates, with its observations.
struct DesignTable {
  Eigen::MatrixXd x_raw;  // rows are points
  Eigen::VectorXd f;
};

/// CSV with header x0..x{d-1},f. Values are written with 17 significant
/// digits so a read-back reproduces the doubles exactly.
void write_design_csv(const std::filesystem::path& path, const DesignTable& design);
DesignTable read_design_csv(const std::filesystem::path& path);

}  // namespace aegis
