#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "aegis/acquisition.hpp"
#include "aegis/gp.hpp"
#include "aegis/nsga2.hpp"
#include "aegis/pathwise.hpp"
#include "aegis/random.hpp"

namespace aegis {

enum class StrategyKind { AEGiS, AEGiS_RS, NoPF, NoTS, NoExploit, TS, KB, Random };

enum class Branch { Initial, Exploit, Thompson, Pareto, RandomSpace, Baseline };

std::string_view to_string(Branch branch);
Branch branch_from_string(std::string_view name);
std::string_view to_string(StrategyKind kind);

/// How the total exploration probability epsilon decays with dimension.
struct EpsilonSchedule {
  enum class Variant { Default, Faster, Slower, Fixed };
  Variant variant = Variant::Default;
  double fixed_value = 0.0;

  static EpsilonSchedule fixed(double value) { return {Variant::Fixed, value}; }
};

/// default: min(2/sqrt(d), 1); faster: min(2/(d-2), 1) with d <= 2 mapped to
/// 1; slower: min(2/ln(d+3), 1); fixed: the stored value.
double epsilon_for(int dim, const EpsilonSchedule& schedule);

/// Probabilities of the two deliberate-exploration branches; exploitation
/// takes the remainder.
struct BranchProbabilities {
  double thompson = 0.0;
  double pareto = 0.0;

  double exploit() const { return 1.0 - (thompson + pareto); }
};

struct StrategyConfig {
  StrategyKind kind = StrategyKind::AEGiS;
  EpsilonSchedule schedule;
  double gamma = 0.5;
  /// Method name used in traces and file names.
  std::string label = "AEGiS";

  /// (eps_T, eps_P) for the AEGiS family at dimension d. Baselines return
  /// zeros.
  BranchProbabilities probabilities(int dim) const;
  bool is_aegis_family() const;
  void validate() const;
};

/// NoPF: (eps, 0); NoTS: (0, eps); NoExploit: (1/2, 1/2), eps from the
/// default schedule. Any other kind is a ConfigError.
StrategyConfig ablation_config(StrategyKind kind);

/// Parses a method label such as "AEGiS", "AEGiS-RS", "TS", "KB", "EI",
/// "Random", "NoExploit", optionally followed by modifiers "-faster",
/// "-slower", "-eps<value>" or "-gamma<value>" for the AEGiS family.
StrategyConfig parse_method(std::string_view label);

/// Inner-optimiser budgets used when a strategy selects a point.
struct SelectionContext {
  OptimiserConfig optimiser;
  Nsga2Config nsga;
  int n_features = kDefaultFourierFeatures;

  static SelectionContext for_dimension(int dim);
};

struct SelectionRecord {
  Eigen::VectorXd x;
  Branch branch = Branch::Baseline;
  /// Uniform draw that decided the branch; NaN when no draw was made.
  double r_drawn = 0.0;
  int iteration = 0;
};

/// Branch chosen by the uniform draw r for the given probabilities:
/// r < 1 - (eps_T + eps_P) exploits, r < 1 - eps_P Thompson-samples,
/// otherwise Pareto (or RandomSpace when random_space is set).
Branch choose_branch(double r, const BranchProbabilities& probs, bool random_space);

/// One step of the epsilon-greedy policy. Pending evaluations are not used.
SelectionRecord aegis_select(const GPModel& model, const StrategyConfig& config, const SelectionContext& ctx,
                             Rng& rng, std::span<const Eigen::VectorXd> pending = {});

/// Runs the branch's optimisation and returns its point.
Eigen::VectorXd select_for_branch(Branch branch, const GPModel& model, const SelectionContext& ctx, Rng& rng);

/// First q selections: one exploit point, then q-1 points that are each a
/// Thompson sample with probability eps_T/(eps_T+eps_P), else a Pareto (or
/// random-space) point. ConfigError when q > 1 and eps_T + eps_P == 0.
std::vector<SelectionRecord> initial_batch(const GPModel& model, const StrategyConfig& config,
                                           const SelectionContext& ctx, int q, Rng& rng);

/// Minimiser of a fresh posterior sample path.
Eigen::VectorXd ts_select(const GPModel& model, const SelectionContext& ctx, Rng& rng);

/// Kriging Believer: conditions on (x_p, mu(x_p)) for every pending point with
/// frozen hyperparameters, then maximises EI against the best completed
/// observation.
Eigen::VectorXd kb_select(const GPModel& model, std::span<const Eigen::VectorXd> pending,
                          const SelectionContext& ctx, Rng& rng);

/// Model augmented with mean-valued hallucinations at the pending points.
GPModel kriging_believer_model(const GPModel& model, std::span<const Eigen::VectorXd> pending);

/// Latin hypercube stream, refilled in blocks of 200 points.
class RandomSelector {
 public:
  static constexpr int kBlockSize = 200;

  RandomSelector(int dim, std::uint64_t seed);
  Eigen::VectorXd next();

 private:
  int dim_;
  Rng rng_;
  Eigen::MatrixXd block_;
  int cursor_ = kBlockSize;
};

/// Selection policy driven by the asynchronous simulator.
class Strategy {
 public:
  virtual ~Strategy() = default;

  /// False for policies that never look at the surrogate (Random).
  virtual bool needs_model() const { return true; }

  /// Fills q idle workers at the start of the run. The default selects one
  /// point at a time, treating earlier picks as pending.
  virtual std::vector<SelectionRecord> initial_batch(const GPModel* model, int q, Rng& rng);

  virtual SelectionRecord select(const GPModel* model, std::span<const Eigen::VectorXd> pending, Rng& rng) = 0;
};

std::unique_ptr<Strategy> make_strategy(const StrategyConfig& config, int dim, const SelectionContext& ctx,
                                        std::uint64_t seed);

}  // namespace aegis
