#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "aegis/gp.hpp"
#include "aegis/random.hpp"

namespace aegis {

/// A candidate in the (minimise mean, maximise variance) trade-off.
struct Individual {
  Eigen::VectorXd x;
  double mu = 0.0;
  double sigma2 = 0.0;
  int rank = 0;
  double crowding = 0.0;
};

/// Approximate Pareto set: mutually non-dominating individuals.
struct ParetoArchive {
  std::vector<Individual> members;

  bool empty() const { return members.empty(); }
  std::size_t size() const { return members.size(); }
};

struct Nsga2Config {
  int pop_size = 100;
  int generations = 100;
  double crossover_prob = 0.8;
  double mutation_prob = 1.0;
  double eta_c = 20.0;
  double eta_m = 20.0;

  /// Population 100 d, mutation rate 1/d, crossover rate 0.8, eta_c = eta_m = 20.
  static Nsga2Config for_dimension(int dim);
  void validate() const;
};

/// a dominates b: a.mu <= b.mu and a.sigma2 >= b.sigma2, at least one strict.
bool dominates(const Individual& a, const Individual& b);

/// Partitions indices of `pop` into successive non-dominated fronts. Front 0
/// holds the individuals no one dominates. O(N log N) for two objectives.
std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Individual> pop);

/// Crowding distance of each member of `front` (aligned with the input).
/// Per-objective boundary members get +infinity; interior members accumulate
/// neighbour gaps normalised by the objective's range on the front.
std::vector<double> crowding_distance(std::span<const Individual> front);

/// Simulated binary crossover (with probability crossover_prob per pair)
/// followed by polynomial mutation (mutation_prob per coordinate). Children
/// stay in [0,1]^d.
std::pair<Eigen::VectorXd, Eigen::VectorXd> vary(const Eigen::VectorXd& parent1, const Eigen::VectorXd& parent2,
                                                 const Nsga2Config& cfg, Rng& rng);

/// Polynomial mutation of a single coordinate in [0,1].
double polynomial_mutation(double x, double eta_m, Rng& rng);

/// Called with -1 and the initial population, then after each generation
/// with its index and the surviving population.
using Nsga2Observer = std::function<void(int, const std::vector<Individual>&)>;

/// Generational NSGA-II on (mu(x), sigma2(x)) with binary tournaments on
/// (rank, crowding). Returns front 0 of the final population.
ParetoArchive nsga2(const GPModel& model, const Nsga2Config& cfg, Rng& rng, const Nsga2Observer& observer = {});

/// Uniform choice over archive members. Throws StateError when empty.
Eigen::VectorXd random_pareto_point(const ParetoArchive& archive, Rng& rng);

/// Area dominated by `points` in (minimise mu, maximise sigma2) and bounded
/// by the reference (mu_ref, sigma2_ref).
double hypervolume_2d(std::span<const Individual> points, double mu_ref, double sigma2_ref);

/// CSV with header x0..x{d-1},mu,sigma2.
void write_archive_csv(const std::filesystem::path& path, const ParetoArchive& archive);

}  // namespace aegis
