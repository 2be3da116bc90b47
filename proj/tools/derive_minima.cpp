// Re-derives the benchmark optima by multistart local search (and by exact
// coordinate-wise search for the separable functions) and prints them as the
// constants header consumed by benchmarks.cpp.
//
//   derive_minima > src/benchmark_minima.hpp

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "aegis/benchmarks.hpp"
#include "aegis/box_lbfgs.hpp"
#include "aegis/random.hpp"

namespace {

using aegis::Bounds;
using Fn = std::function<double(const Eigen::VectorXd&)>;

struct Optimum {
  Eigen::VectorXd x;
  double f = std::numeric_limits<double>::infinity();
};

aegis::SmoothObjective with_fd_gradient(const Fn& f, const Bounds& b) {
  return [f, b](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    if (grad) {
      grad->resize(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-7 * (b.upper[i] - b.lower[i]);
        Eigen::VectorXd xp = x, xm = x;
        xp[i] = std::min(x[i] + h, b.upper[i]);
        xm[i] = std::max(x[i] - h, b.lower[i]);
        (*grad)[i] = (f(xp) - f(xm)) / (xp[i] - xm[i]);
      }
    }
    return f(x);
  };
}

Optimum multistart(const Fn& f, const Bounds& b, const std::vector<Eigen::VectorXd>& seeds, int starts,
                   std::uint64_t seed) {
  aegis::Rng rng(seed);
  std::vector<Eigen::VectorXd> all = seeds;
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd x(b.dim());
    for (int i = 0; i < b.dim(); ++i) x[i] = b.lower[i] + aegis::uniform01(rng) * (b.upper[i] - b.lower[i]);
    all.push_back(x);
  }
  aegis::BoxLbfgsOptions opts;
  opts.max_iterations = 500;
  opts.f_tolerance = 1e-15;
  opts.pg_tolerance = 1e-10;
  const auto obj = with_fd_gradient(f, b);
  Optimum best;
  for (const auto& s : all) {
    const auto r = aegis::minimize_box_lbfgs(obj, s, b.lower, b.upper, opts);
    if (r.value < best.f) best = {r.x, r.value};
  }
  return best;
}

// Exact 1-d minimisation by dense grid scan plus golden-section polish.
Optimum scan_1d(const std::function<double(double)>& g, double lo, double hi) {
  const int n = 2'000'000;
  double best_x = lo, best_f = g(lo);
  for (int k = 1; k <= n; ++k) {
    const double x = lo + (hi - lo) * k / n;
    const double v = g(x);
    if (v < best_f) best_f = v, best_x = x;
  }
  double a = std::max(lo, best_x - (hi - lo) / n), c = std::min(hi, best_x + (hi - lo) / n);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double x1 = c - phi * (c - a), x2 = a + phi * (c - a);
    if (g(x1) < g(x2)) c = x2; else a = x1;
  }
  const double x = 0.5 * (a + c);
  Optimum o;
  o.x = Eigen::VectorXd::Constant(1, x);
  o.f = std::min(g(x), best_f);
  return o;
}

Eigen::VectorXd v2(double a, double b) { Eigen::VectorXd v(2); v << a, b; return v; }

}  // namespace

int main() {
  using namespace aegis::functions;
  const auto branin_o = multistart(branin, aegis::make_problem("Branin", 2).bounds,
                                   {v2(-std::numbers::pi, 12.275), v2(std::numbers::pi, 2.275), v2(9.42478, 2.475)}, 1000, 1);
  const auto egg = multistart(eggholder, aegis::make_problem("Eggholder", 2).bounds, {v2(512.0, 404.2319)}, 1000, 2);
  const auto gp = multistart(goldstein_price, aegis::make_problem("GoldsteinPrice", 2).bounds, {v2(0.0, -1.0)}, 1000, 3);
  const auto shc = multistart(six_hump_camel, aegis::make_problem("SixHumpCamel", 2).bounds,
                              {v2(0.0898, -0.7126), v2(-0.0898, 0.7126)}, 1000, 4);
  Eigen::VectorXd h3s(3); h3s << 0.114614, 0.555649, 0.852547;
  const auto h3 = multistart(hartmann3, aegis::make_problem("Hartmann3", 3).bounds, {h3s}, 1000, 5);
  Eigen::VectorXd h6s(6); h6s << 0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573;
  const auto h6 = multistart(hartmann6, aegis::make_problem("Hartmann6", 6).bounds, {h6s}, 1000, 6);

  // Michalewicz and Styblinski-Tang are separable: the optimum is the sum of
  // coordinate-wise 1-d optima.
  double mich_coord[10];
  double mich_f[10];
  for (int i = 0; i < 10; ++i) {
    const auto o = scan_1d([i](double x) {
      return -std::sin(x) * std::pow(std::sin((i + 1) * x * x / std::numbers::pi), 20);
    }, 0.0, std::numbers::pi);
    mich_coord[i] = o.x[0];
    mich_f[i] = o.f;
  }
  double mich5 = 0.0, mich10 = 0.0;
  for (int i = 0; i < 10; ++i) (i < 5 ? mich5 : mich10) += mich_f[i];
  mich10 += mich5;
  const auto st = scan_1d([](double x) { return 0.5 * (x * x * x * x - 16.0 * x * x + 5.0 * x); }, -5.0, 5.0);

  std::printf("#pragma once\n\n");
  std::printf("// Benchmark optima generated by tools/derive_minima.cpp: multistart box L-BFGS\n");
  std::printf("// (1000 random starts plus the published minimisers) for the non-separable\n");
  std::printf("// functions, exact coordinate-wise scans for Michalewicz and Styblinski-Tang.\n\n");
  std::printf("namespace aegis::minima {\n\n");
  std::printf("inline constexpr double kBranin = %.17g;\n", branin_o.f);
  std::printf("inline constexpr double kEggholder = %.17g;\n", egg.f);
  std::printf("inline constexpr double kEggholderX0 = %.17g;\n", egg.x[0]);
  std::printf("inline constexpr double kEggholderX1 = %.17g;\n", egg.x[1]);
  std::printf("inline constexpr double kGoldsteinPrice = %.17g;\n", gp.f);
  std::printf("inline constexpr double kSixHumpCamel = %.17g;\n", shc.f);
  std::printf("inline constexpr double kSixHumpCamelX0 = %.17g;\n", shc.x[0]);
  std::printf("inline constexpr double kSixHumpCamelX1 = %.17g;\n", shc.x[1]);
  std::printf("inline constexpr double kHartmann3 = %.17g;\n", h3.f);
  std::printf("inline constexpr double kHartmann3X[3] = {%.17g, %.17g, %.17g};\n", h3.x[0], h3.x[1], h3.x[2]);
  std::printf("inline constexpr double kHartmann6 = %.17g;\n", h6.f);
  std::printf("inline constexpr double kHartmann6X[6] = {%.17g, %.17g, %.17g, %.17g, %.17g, %.17g};\n", h6.x[0],
              h6.x[1], h6.x[2], h6.x[3], h6.x[4], h6.x[5]);
  std::printf("inline constexpr double kMichalewiczCoordinate[10] = {");
  for (int i = 0; i < 10; ++i) std::printf("%s%.17g", i ? ", " : "", mich_coord[i]);
  std::printf("};\n");
  std::printf("inline constexpr double kMichalewicz5 = %.17g;\n", mich5);
  std::printf("inline constexpr double kMichalewicz10 = %.17g;\n", mich10);
  std::printf("inline constexpr double kStyblinskiTangX = %.17g;\n", st.x[0]);
  std::printf("inline constexpr double kStyblinskiTangPerCoordinate = %.17g;\n", st.f);
  std::printf("\n}  // namespace aegis::minima\n");
  return 0;
}
