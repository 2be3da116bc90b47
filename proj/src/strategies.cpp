#include "aegis/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "aegis/design_data.hpp"
#include "aegis/errors.hpp"

namespace aegis {

std::string_view to_string(Branch branch) {
  switch (branch) {
    case Branch::Initial: return "initial";
    case Branch::Exploit: return "exploit";
    case Branch::Thompson: return "thompson";
    case Branch::Pareto: return "pareto";
    case Branch::RandomSpace: return "random-space";
    case Branch::Baseline: return "baseline";
  }
  return "unknown";
}

Branch branch_from_string(std::string_view name) {
  for (Branch b : {Branch::Initial, Branch::Exploit, Branch::Thompson, Branch::Pareto, Branch::RandomSpace,
                   Branch::Baseline})
    if (to_string(b) == name) return b;
  throw DomainError("unknown branch label '" + std::string(name) + "'");
}

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::AEGiS: return "AEGiS";
    case StrategyKind::AEGiS_RS: return "AEGiS-RS";
    case StrategyKind::NoPF: return "NoPF";
    case StrategyKind::NoTS: return "NoTS";
    case StrategyKind::NoExploit: return "NoExploit";
    case StrategyKind::TS: return "TS";
    case StrategyKind::KB: return "KB";
    case StrategyKind::Random: return "Random";
  }
  return "unknown";
}

double epsilon_for(int dim, const EpsilonSchedule& schedule) {
  if (dim < 1) throw DomainError("epsilon_for: dimension must be >= 1");
  const double d = dim;
  switch (schedule.variant) {
    case EpsilonSchedule::Variant::Default: return std::min(2.0 / std::sqrt(d), 1.0);
    case EpsilonSchedule::Variant::Faster: return dim <= 2 ? 1.0 : std::min(2.0 / (d - 2.0), 1.0);
    case EpsilonSchedule::Variant::Slower: return std::min(2.0 / std::log(d + 3.0), 1.0);
    case EpsilonSchedule::Variant::Fixed: return std::clamp(schedule.fixed_value, 0.0, 1.0);
  }
  return 1.0;
}

bool StrategyConfig::is_aegis_family() const {
  switch (kind) {
    case StrategyKind::AEGiS:
    case StrategyKind::AEGiS_RS:
    case StrategyKind::NoPF:
    case StrategyKind::NoTS:
    case StrategyKind::NoExploit: return true;
    default: return false;
  }
}

BranchProbabilities StrategyConfig::probabilities(int dim) const {
  const double eps = epsilon_for(dim, schedule);
  switch (kind) {
    case StrategyKind::AEGiS:
    case StrategyKind::AEGiS_RS: return {gamma * eps, (1.0 - gamma) * eps};
    case StrategyKind::NoPF: return {eps, 0.0};
    case StrategyKind::NoTS: return {0.0, eps};
    case StrategyKind::NoExploit: return {0.5, 0.5};
    default: return {0.0, 0.0};
  }
}

void StrategyConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("strategy '" + label + "': gamma must be in [0,1]");
  if (schedule.variant == EpsilonSchedule::Variant::Fixed &&
      !(schedule.fixed_value >= 0.0 && schedule.fixed_value <= 1.0))
    throw ConfigError("strategy '" + label + "': fixed epsilon must be in [0,1]");
}

StrategyConfig ablation_config(StrategyKind kind) {
  if (kind != StrategyKind::NoPF && kind != StrategyKind::NoTS && kind != StrategyKind::NoExploit)
    throw ConfigError("ablation_config: '" + std::string(to_string(kind)) + "' is not an ablation");
  StrategyConfig cfg;
  cfg.kind = kind;
  cfg.label = std::string(to_string(kind));
  return cfg;
}

StrategyConfig parse_method(std::string_view label) {
  StrategyConfig cfg;
  cfg.label = std::string(label);
  std::string_view rest;
  auto starts = [&](std::string_view prefix) {
    if (label.substr(0, prefix.size()) != prefix) return false;
    rest = label.substr(prefix.size());
    return rest.empty() || rest.front() == '-';
  };
  if (starts("AEGiS-RS")) {
    cfg.kind = StrategyKind::AEGiS_RS;
  } else if (starts("AEGiS")) {
    cfg.kind = StrategyKind::AEGiS;
  } else if (starts("NoPF")) {
    cfg.kind = StrategyKind::NoPF;
  } else if (starts("NoTS")) {
    cfg.kind = StrategyKind::NoTS;
  } else if (starts("NoExploit")) {
    cfg.kind = StrategyKind::NoExploit;
  } else if (starts("TS")) {
    cfg.kind = StrategyKind::TS;
  } else if (starts("KB") || starts("EI")) {
    cfg.kind = StrategyKind::KB;
  } else if (starts("Random")) {
    cfg.kind = StrategyKind::Random;
  } else {
    throw ConfigError("unknown method '" + std::string(label) + "'");
  }

  const bool schedulable = cfg.kind == StrategyKind::AEGiS || cfg.kind == StrategyKind::AEGiS_RS ||
                           cfg.kind == StrategyKind::NoPF || cfg.kind == StrategyKind::NoTS;
  const bool splittable = cfg.kind == StrategyKind::AEGiS || cfg.kind == StrategyKind::AEGiS_RS;
  auto number = [&](std::string_view text) {
    try {
      std::size_t used = 0;
      const double v = std::stod(std::string(text), &used);
      if (used != text.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("method '" + std::string(label) + "': bad number '" + std::string(text) + "'");
    }
  };
  while (!rest.empty()) {
    rest.remove_prefix(1);
    const auto dash = rest.find('-', 1);
    const std::string_view mod = rest.substr(0, dash);
    rest = dash == std::string_view::npos ? std::string_view{} : rest.substr(dash);
    if (schedulable && mod == "faster") {
      cfg.schedule.variant = EpsilonSchedule::Variant::Faster;
    } else if (schedulable && mod == "slower") {
      cfg.schedule.variant = EpsilonSchedule::Variant::Slower;
    } else if (schedulable && mod.starts_with("eps")) {
      cfg.schedule = EpsilonSchedule::fixed(number(mod.substr(3)));
    } else if (splittable && mod.starts_with("gamma")) {
      cfg.gamma = number(mod.substr(5));
    } else {
      throw ConfigError("method '" + std::string(label) + "': unsupported modifier '" + std::string(mod) + "'");
    }
  }
  cfg.validate();
  return cfg;
}

SelectionContext SelectionContext::for_dimension(int dim) {
  return SelectionContext{OptimiserConfig::for_dimension(dim), Nsga2Config::for_dimension(dim),
                          kDefaultFourierFeatures};
}

Branch choose_branch(double r, const BranchProbabilities& probs, bool random_space) {
  if (r < 1.0 - (probs.thompson + probs.pareto)) return Branch::Exploit;
  if (r < 1.0 - probs.pareto) return Branch::Thompson;
  return random_space ? Branch::RandomSpace : Branch::Pareto;
}

Eigen::VectorXd select_for_branch(Branch branch, const GPModel& model, const SelectionContext& ctx, Rng& rng) {
  switch (branch) {
    case Branch::Exploit: return exploit(model, ctx.optimiser, rng);
    case Branch::Thompson: return ts_select(model, ctx, rng);
    case Branch::Pareto: return random_pareto_point(nsga2(model, ctx.nsga, rng), rng);
    case Branch::RandomSpace: return uniform_point(model.dim(), rng);
    default: throw StateError("select_for_branch: branch has no selection rule");
  }
}

SelectionRecord aegis_select(const GPModel& model, const StrategyConfig& config, const SelectionContext& ctx,
                             Rng& rng, std::span<const Eigen::VectorXd> /*pending*/) {
  const double r = uniform01(rng);
  const Branch branch =
      choose_branch(r, config.probabilities(model.dim()), config.kind == StrategyKind::AEGiS_RS);
  return SelectionRecord{select_for_branch(branch, model, ctx, rng), branch, r, 0};
}

std::vector<SelectionRecord> initial_batch(const GPModel& model, const StrategyConfig& config,
                                           const SelectionContext& ctx, int q, Rng& rng) {
  if (q < 1) throw ConfigError("initial_batch: q must be >= 1");
  const BranchProbabilities p = config.probabilities(model.dim());
  const double explore = p.thompson + p.pareto;
  if (q > 1 && !(explore > 0.0))
    throw ConfigError("initial_batch: eps_T + eps_P = 0 leaves the remaining q-1 initial points undefined");
  std::vector<SelectionRecord> batch;
  batch.push_back(SelectionRecord{exploit(model, ctx.optimiser, rng), Branch::Exploit,
                                  std::numeric_limits<double>::quiet_NaN(), 0});
  const Branch other = config.kind == StrategyKind::AEGiS_RS ? Branch::RandomSpace : Branch::Pareto;
  for (int i = 1; i < q; ++i) {
    const double r = uniform01(rng);
    const Branch branch = r < p.thompson / explore ? Branch::Thompson : other;
    batch.push_back(SelectionRecord{select_for_branch(branch, model, ctx, rng), branch, r, i});
  }
  return batch;
}

Eigen::VectorXd ts_select(const GPModel& model, const SelectionContext& ctx, Rng& rng) {
  const FunctionDraw g = draw_function(model, rng, ctx.n_features);
  Objective obj;
  obj.evaluate = [&g](const Eigen::VectorXd& x, Eigen::VectorXd* grad) { return g.value(x, grad); };
  obj.batch = [&g](const Eigen::MatrixXd& Xs) { return g.values(Xs); };
  return optimize_objective(obj, true, ctx.optimiser, model.dim(), rng).x;
}

GPModel kriging_believer_model(const GPModel& model, std::span<const Eigen::VectorXd> pending) {
  if (pending.empty()) return model;
  Eigen::MatrixXd Xp(pending.size(), model.dim());
  for (std::size_t i = 0; i < pending.size(); ++i) Xp.row(i) = pending[i].transpose();
  const Eigen::VectorXd mu = model.predict_mean(Xp);
  return model.condition_on(Xp, mu);
}

Eigen::VectorXd kb_select(const GPModel& model, std::span<const Eigen::VectorXd> pending,
                          const SelectionContext& ctx, Rng& rng) {
  const double f_best = model.size() > 0 ? model.y().minCoeff() : 0.0;
  if (pending.empty()) return ei_select(model, f_best, ctx.optimiser, rng);
  return ei_select(kriging_believer_model(model, pending), f_best, ctx.optimiser, rng);
}

RandomSelector::RandomSelector(int dim, std::uint64_t seed) : dim_(dim), rng_(seed) {}

Eigen::VectorXd RandomSelector::next() {
  if (cursor_ >= kBlockSize) {
    block_ = latin_hypercube(kBlockSize, dim_, rng_, 1);
    cursor_ = 0;
  }
  return block_.row(cursor_++).transpose();
}

std::vector<SelectionRecord> Strategy::initial_batch(const GPModel* model, int q, Rng& rng) {
  std::vector<SelectionRecord> batch;
  std::vector<Eigen::VectorXd> chosen;
  for (int i = 0; i < q; ++i) {
    SelectionRecord rec = select(model, chosen, rng);
    rec.iteration = i;
    chosen.push_back(rec.x);
    batch.push_back(std::move(rec));
  }
  return batch;
}

namespace {

const GPModel& require_model(const GPModel* model) {
  if (!model) throw StateError("strategy requires a fitted model");
  return *model;
}

class AegisStrategy final : public Strategy {
 public:
  AegisStrategy(StrategyConfig config, SelectionContext ctx) : config_(std::move(config)), ctx_(std::move(ctx)) {}

  std::vector<SelectionRecord> initial_batch(const GPModel* model, int q, Rng& rng) override {
    return aegis::initial_batch(require_model(model), config_, ctx_, q, rng);
  }

  SelectionRecord select(const GPModel* model, std::span<const Eigen::VectorXd> pending, Rng& rng) override {
    return aegis_select(require_model(model), config_, ctx_, rng, pending);
  }

 private:
  StrategyConfig config_;
  SelectionContext ctx_;
};

class ThompsonStrategy final : public Strategy {
 public:
  explicit ThompsonStrategy(SelectionContext ctx) : ctx_(std::move(ctx)) {}

  SelectionRecord select(const GPModel* model, std::span<const Eigen::VectorXd>, Rng& rng) override {
    return {ts_select(require_model(model), ctx_, rng), Branch::Thompson, std::numeric_limits<double>::quiet_NaN(),
            0};
  }

 private:
  SelectionContext ctx_;
};

class KrigingBelieverStrategy final : public Strategy {
 public:
  explicit KrigingBelieverStrategy(SelectionContext ctx) : ctx_(std::move(ctx)) {}

  SelectionRecord select(const GPModel* model, std::span<const Eigen::VectorXd> pending, Rng& rng) override {
    return {kb_select(require_model(model), pending, ctx_, rng), Branch::Baseline,
            std::numeric_limits<double>::quiet_NaN(), 0};
  }

 private:
  SelectionContext ctx_;
};

class RandomStrategy final : public Strategy {
 public:
  RandomStrategy(int dim, std::uint64_t seed) : selector_(dim, seed) {}

  bool needs_model() const override { return false; }

  SelectionRecord select(const GPModel*, std::span<const Eigen::VectorXd>, Rng&) override {
    return {selector_.next(), Branch::Baseline, std::numeric_limits<double>::quiet_NaN(), 0};
  }

 private:
  RandomSelector selector_;
};

}  // namespace

std::unique_ptr<Strategy> make_strategy(const StrategyConfig& config, int dim, const SelectionContext& ctx,
                                        std::uint64_t seed) {
  config.validate();
  switch (config.kind) {
    case StrategyKind::TS: return std::make_unique<ThompsonStrategy>(ctx);
    case StrategyKind::KB: return std::make_unique<KrigingBelieverStrategy>(ctx);
    case StrategyKind::Random: return std::make_unique<RandomStrategy>(dim, derive_seed(seed, "random-lhs"));
    default: return std::make_unique<AegisStrategy>(config, ctx);
  }
}

}  // namespace aegis
