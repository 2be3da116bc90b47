#include "aegis/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "aegis/errors.hpp"

namespace aegis {

Nsga2Config Nsga2Config::for_dimension(int dim) {
  Nsga2Config cfg;
  cfg.pop_size = 100 * dim;
  cfg.mutation_prob = 1.0 / dim;
  return cfg;
}

void Nsga2Config::validate() const {
  if (pop_size < 2 || pop_size % 2 != 0) throw ConfigError("nsga2: pop_size must be even and >= 2");
  if (generations < 0) throw ConfigError("nsga2: generations must be >= 0");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(crossover_prob) || !prob(mutation_prob)) throw ConfigError("nsga2: probabilities must be in [0,1]");
  if (!(eta_c >= 0.0) || !(eta_m >= 0.0)) throw ConfigError("nsga2: distribution indices must be >= 0");
}

bool dominates(const Individual& a, const Individual& b) {
  return a.mu <= b.mu && a.sigma2 >= b.sigma2 && (a.mu < b.mu || a.sigma2 > b.sigma2);
}

std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Individual> pop) {
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pop[a].mu != pop[b].mu) return pop[a].mu < pop[b].mu;
    if (pop[a].sigma2 != pop[b].sigma2) return pop[a].sigma2 > pop[b].sigma2;
    return a < b;
  });
  // Within a front sorted by mu, the last member has the largest sigma2, so a
  // newcomer is dominated by the front iff it is dominated by that member.
  std::vector<std::vector<std::size_t>> fronts;
  for (std::size_t idx : order) {
    std::size_t lo = 0, hi = fronts.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (dominates(pop[fronts[mid].back()], pop[idx]))
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo == fronts.size()) fronts.emplace_back();
    fronts[lo].push_back(idx);
  }
  for (auto& f : fronts) std::sort(f.begin(), f.end());
  return fronts;
}

std::vector<double> crowding_distance(std::span<const Individual> front) {
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    return dist;
  }
  std::vector<std::size_t> order(n);
  auto accumulate = [&](auto key, auto tie) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (key(front[a]) != key(front[b])) return key(front[a]) < key(front[b]);
      return tie(front[a]) < tie(front[b]);
    });
    const double lo = key(front[order.front()]);
    const double hi = key(front[order.back()]);
    dist[order.front()] = std::numeric_limits<double>::infinity();
    dist[order.back()] = std::numeric_limits<double>::infinity();
    if (!(hi > lo)) return;
    for (std::size_t k = 1; k + 1 < n; ++k)
      dist[order[k]] += (key(front[order[k + 1]]) - key(front[order[k - 1]])) / (hi - lo);
  };
  auto mu = [](const Individual& i) { return i.mu; };
  auto s2 = [](const Individual& i) { return i.sigma2; };
  auto neg_s2 = [](const Individual& i) { return -i.sigma2; };
  accumulate(mu, neg_s2);
  accumulate(s2, [](const Individual& i) { return -i.mu; });
  return dist;
}

double polynomial_mutation(double y, double eta_m, Rng& rng) {
  const double d1 = y;
  const double d2 = 1.0 - y;
  const double r = uniform01(rng);
  const double pw = 1.0 / (eta_m + 1.0);
  double dq;
  if (r <= 0.5) {
    const double v = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, eta_m + 1.0);
    dq = std::pow(v, pw) - 1.0;
  } else {
    const double v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, eta_m + 1.0);
    dq = 1.0 - std::pow(v, pw);
  }
  return std::clamp(y + dq, 0.0, 1.0);
}

namespace {

double sbx_spread(double beta, double eta_c, double r) {
  const double alpha = 2.0 - std::pow(beta, -(eta_c + 1.0));
  if (r <= 1.0 / alpha) return std::pow(r * alpha, 1.0 / (eta_c + 1.0));
  return std::pow(1.0 / (2.0 - r * alpha), 1.0 / (eta_c + 1.0));
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> vary(const Eigen::VectorXd& parent1, const Eigen::VectorXd& parent2,
                                                 const Nsga2Config& cfg, Rng& rng) {
  Eigen::VectorXd c1 = parent1;
  Eigen::VectorXd c2 = parent2;
  const auto dim = parent1.size();
  if (uniform01(rng) < cfg.crossover_prob) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (uniform01(rng) > 0.5) continue;
      if (std::abs(parent1[i] - parent2[i]) <= 1e-14) continue;
      const double y1 = std::min(parent1[i], parent2[i]);
      const double y2 = std::max(parent1[i], parent2[i]);
      const double r = uniform01(rng);
      const double bq1 = sbx_spread(1.0 + 2.0 * y1 / (y2 - y1), cfg.eta_c, r);
      const double bq2 = sbx_spread(1.0 + 2.0 * (1.0 - y2) / (y2 - y1), cfg.eta_c, r);
      double a = std::clamp(0.5 * ((y1 + y2) - bq1 * (y2 - y1)), 0.0, 1.0);
      double b = std::clamp(0.5 * ((y1 + y2) + bq2 * (y2 - y1)), 0.0, 1.0);
      if (uniform01(rng) <= 0.5) std::swap(a, b);
      c1[i] = a;
      c2[i] = b;
    }
  }
  for (Eigen::VectorXd* c : {&c1, &c2}) {
    for (Eigen::Index i = 0; i < dim; ++i)
      if (uniform01(rng) < cfg.mutation_prob) (*c)[i] = polynomial_mutation((*c)[i], cfg.eta_m, rng);
  }
  return {c1.cwiseMax(0.0).cwiseMin(1.0), c2.cwiseMax(0.0).cwiseMin(1.0)};
}

namespace {

void evaluate(const GPModel& model, std::vector<Individual>& pop, std::size_t from) {
  const std::size_t n = pop.size() - from;
  if (n == 0) return;
  Eigen::MatrixXd Xs(n, model.dim());
  for (std::size_t i = 0; i < n; ++i) Xs.row(i) = pop[from + i].x.transpose();
  Eigen::VectorXd mu, var;
  model.predict_batch(Xs, mu, var);
  for (std::size_t i = 0; i < n; ++i) {
    pop[from + i].mu = mu[i];
    pop[from + i].sigma2 = var[i];
  }
}

// Assigns rank and crowding in place; returns the fronts.
std::vector<std::vector<std::size_t>> rank_population(std::vector<Individual>& pop) {
  auto fronts = non_dominated_sort(pop);
  std::vector<Individual> members;
  for (std::size_t k = 0; k < fronts.size(); ++k) {
    members.clear();
    for (std::size_t idx : fronts[k]) members.push_back(pop[idx]);
    const std::vector<double> cd = crowding_distance(members);
    for (std::size_t j = 0; j < fronts[k].size(); ++j) {
      pop[fronts[k][j]].rank = static_cast<int>(k);
      pop[fronts[k][j]].crowding = cd[j];
    }
  }
  return fronts;
}

bool better(const Individual& a, const Individual& b) {
  return a.rank < b.rank || (a.rank == b.rank && a.crowding > b.crowding);
}

}  // namespace

ParetoArchive nsga2(const GPModel& model, const Nsga2Config& cfg, Rng& rng, const Nsga2Observer& observer) {
  cfg.validate();
  const int dim = model.dim();
  const auto n = static_cast<std::size_t>(cfg.pop_size);

  std::vector<Individual> pop(n);
  for (auto& ind : pop) ind.x = uniform_point(dim, rng);
  evaluate(model, pop, 0);
  auto fronts = rank_population(pop);
  if (observer) observer(-1, pop);

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  auto tournament = [&]() -> const Individual& {
    const Individual& a = pop[pick(rng)];
    const Individual& b = pop[pick(rng)];
    if (better(a, b)) return a;
    if (better(b, a)) return b;
    return uniform01(rng) < 0.5 ? a : b;
  };

  for (int gen = 0; gen < cfg.generations; ++gen) {
    std::vector<Individual> combined = pop;
    combined.reserve(2 * n);
    while (combined.size() < 2 * n) {
      const Individual& p1 = tournament();
      const Individual& p2 = tournament();
      auto [c1, c2] = vary(p1.x, p2.x, cfg, rng);
      combined.push_back(Individual{std::move(c1)});
      if (combined.size() < 2 * n) combined.push_back(Individual{std::move(c2)});
    }
    evaluate(model, combined, n);
    fronts = rank_population(combined);

    std::vector<Individual> next;
    next.reserve(n);
    for (const auto& front : fronts) {
      if (next.size() + front.size() <= n) {
        for (std::size_t idx : front) next.push_back(combined[idx]);
        continue;
      }
      std::vector<std::size_t> last = front;
      std::stable_sort(last.begin(), last.end(),
                       [&](std::size_t a, std::size_t b) { return combined[a].crowding > combined[b].crowding; });
      for (std::size_t k = 0; next.size() < n; ++k) next.push_back(combined[last[k]]);
      break;
    }
    pop = std::move(next);
    fronts = rank_population(pop);
    if (observer) observer(gen, pop);
  }

  ParetoArchive archive;
  for (std::size_t idx : fronts.front()) archive.members.push_back(pop[idx]);
  return archive;
}

Eigen::VectorXd random_pareto_point(const ParetoArchive& archive, Rng& rng) {
  if (archive.empty()) throw StateError("random_pareto_point: empty archive");
  std::uniform_int_distribution<std::size_t> pick(0, archive.size() - 1);
  return archive.members[pick(rng)].x;
}

double hypervolume_2d(std::span<const Individual> points, double mu_ref, double sigma2_ref) {
  // Minimisation of (mu, -sigma2): sweep by mu and add rectangles.
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : points)
    if (p.mu < mu_ref && -p.sigma2 < -sigma2_ref) pts.emplace_back(p.mu, -p.sigma2);
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  double best_second = -sigma2_ref;
  for (const auto& [a, b] : pts) {
    if (b < best_second) {
      area += (mu_ref - a) * (best_second - b);
      best_second = b;
    }
  }
  return area;
}

void write_archive_csv(const std::filesystem::path& path, const ParetoArchive& archive) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const auto dim = archive.empty() ? 0 : archive.members.front().x.size();
  for (Eigen::Index j = 0; j < dim; ++j) out << 'x' << j << ',';
  out << "mu,sigma2\n";
  out.precision(17);
  for (const auto& m : archive.members) {
    for (Eigen::Index j = 0; j < dim; ++j) out << m.x[j] << ',';
    out << m.mu << ',' << m.sigma2 << '\n';
  }
}

}  // namespace aegis
