#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "aegis/benchmarks.hpp"
#include "aegis/design_data.hpp"
#include "aegis/errors.hpp"
#include "test_util.hpp"

using namespace aegis;

namespace {

Bounds bounds1(double lo, double hi) { return Bounds::uniform(1, lo, hi); }

Eigen::VectorXd v1(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

TEST_CASE("to_unit_cube maps affinely") {
  CHECK(to_unit_cube(v1(0.0), bounds1(-5, 5))[0] == doctest::Approx(0.5));
  CHECK(to_unit_cube(v1(-5.0), bounds1(-5, 5))[0] == 0.0);
  CHECK(to_unit_cube(v1(5.0), bounds1(-5, 5))[0] == 1.0);
  CHECK(to_unit_cube(v1(1.0), bounds1(-5, 10))[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK_THROWS_AS(to_unit_cube(v1(10.5), bounds1(-5, 10)), DomainError);
  CHECK_THROWS_AS(to_unit_cube(v1(-6.0), bounds1(-5, 10)), DomainError);
}

TEST_CASE("Bounds validation") {
  CHECK_THROWS(Bounds::uniform(2, 1.0, 1.0).validate());
  CHECK_THROWS(Bounds::uniform(0, 0.0, 1.0).validate());
  CHECK_NOTHROW(Bounds::uniform(3, -1.0, 1.0).validate());
}

TEST_CASE("unit-cube round trip on every benchmark domain") {
  Rng rng(1);
  for (const auto& key : problem_registry()) {
    const Problem p = make_problem(key.name, key.dim);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Eigen::VectorXd u = testutil::uniform_matrix(1, p.dim, rng).row(0).transpose();
      const Eigen::VectorXd x = from_unit_cube(u, p.bounds);
      worst = std::max(worst, (to_unit_cube(x, p.bounds) - u).cwiseAbs().maxCoeff());
    }
    CHECK_MESSAGE(worst <= 1e-12, p.id());
  }
}

TEST_CASE("restandardise examples") {
  Dataset d(1);
  d.append(v1(0.1), 2.0);
  CHECK(d.out_mean() == 2.0);
  CHECK(d.out_std() == 1.0);
  CHECK(d.f_std()[0] == 0.0);

  Dataset e(1);
  e.append(v1(0.1), 1.0);
  e.append(v1(0.2), 3.0);
  CHECK(e.out_mean() == doctest::Approx(2.0));
  CHECK(e.out_std() == doctest::Approx(std::sqrt(2.0)));
  CHECK(e.f_std()[0] == doctest::Approx(-std::sqrt(0.5)));
  CHECK(e.f_std()[1] == doctest::Approx(std::sqrt(0.5)));

  Dataset c(1);
  for (double x : {0.1, 0.2, 0.3}) c.append(v1(x), 5.0);
  CHECK(c.out_std() == 1.0);
  CHECK(c.f_std().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standardisation invariant and idempotence") {
  Rng rng(7);
  Dataset d(3);
  for (int t = 0; t < 200; ++t) {
    const Eigen::VectorXd x = testutil::uniform_matrix(1, 3, rng).row(0).transpose();
    d.append(x, 10.0 * standard_normal(rng) + 3.0);
    CHECK(d.size() == t + 1);
    CHECK(d.X().row(t).transpose() == x);
    if (t >= 1) {
      const double n = d.size();
      CHECK(std::abs(d.f_std().mean()) <= 1e-9);
      const double var = (d.f_std().array() - d.f_std().mean()).square().sum() / (n - 1);
      CHECK(std::abs(std::sqrt(var) - 1.0) <= 1e-9);
    }
  }
  const double m = d.out_mean(), s = d.out_std();
  d.restandardise();
  d.restandardise();
  CHECK(std::abs(d.out_mean() - m) <= 1e-12);
  CHECK(std::abs(d.out_std() - s) <= 1e-12);
  CHECK(d.best_raw() == d.f_raw().minCoeff());
}

TEST_CASE("append rejects points outside the unit cube") {
  Dataset d(2);
  Eigen::VectorXd x(2);
  x << 0.5, 1.5;
  CHECK_THROWS_AS(d.append(x, 1.0), DomainError);
  CHECK(d.size() == 0);
}

TEST_CASE("latin hypercube stratification") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const int M = 1 + static_cast<int>(seed % 17);
    const Eigen::MatrixXd X = latin_hypercube(M, 3, rng, 5);
    REQUIRE(X.rows() == M);
    for (int j = 0; j < 3; ++j) {
      std::vector<int> seen(M, 0);
      for (int i = 0; i < M; ++i) {
        const double v = X(i, j);
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        ++seen[static_cast<int>(std::floor(v * M))];
      }
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    }
  }
}

TEST_CASE("latin hypercube small cases and determinism") {
  Rng a(3), b(3);
  CHECK(latin_hypercube(10, 2, a) == latin_hypercube(10, 2, b));
  Rng r(4);
  const Eigen::MatrixXd one = latin_hypercube(1, 4, r);
  CHECK(one.rows() == 1);
  CHECK(in_unit_cube(one.row(0).transpose()));
  Rng q(5);
  Eigen::MatrixXd four = latin_hypercube(4, 1, q);
  std::vector<double> s(four.data(), four.data() + 4);
  std::sort(s.begin(), s.end());
  for (int k = 0; k < 4; ++k) {
    CHECK(s[k] >= k / 4.0);
    CHECK(s[k] < (k + 1) / 4.0);
  }
}

TEST_CASE("maximin selection beats a plain hypercube on average") {
  double maximin = 0.0, plain = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng a(seed), b(seed + 1000);
    maximin += min_pairwise_distance(latin_hypercube(10, 2, a, 100));
    plain += min_pairwise_distance(latin_hypercube(10, 2, b, 1));
  }
  CHECK(maximin >= plain);
}

TEST_CASE("design csv round trip") {
  Rng rng(11);
  DesignTable t{testutil::uniform_matrix(5, 3, rng), testutil::normal_vector(5, rng)};
  const auto path = std::filesystem::temp_directory_path() / "aegis_design_roundtrip.csv";
  write_design_csv(path, t);
  const DesignTable back = read_design_csv(path);
  CHECK(back.x_raw == t.x_raw);
  CHECK(back.f == t.f);
  std::filesystem::remove(path);
}
