#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "aegis/design_data.hpp"
#include "aegis/gp.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace aegis;
using testutil::uniform_matrix;

namespace {

Eigen::VectorXd unit_point(int d, Rng& rng) { return uniform_matrix(1, d, rng).row(0).transpose(); }

}  // namespace

TEST_CASE("Matern 5/2 kernel values") {
  GPHyperparams hp{0.7, 2.5, 1e-6};
  Rng rng(1);
  const Eigen::VectorXd a = unit_point(3, rng), b = unit_point(3, rng);
  CHECK(matern52(a, a, hp) == 2.5);
  CHECK(matern52(a, b, hp) == matern52(b, a, hp));
  const double s5 = std::sqrt(5.0);
  const double expected = (1.0 + s5 + 5.0 / 3.0) * std::exp(-s5);
  CHECK(matern52_of_distance(1.0, GPHyperparams{1.0, 1.0, 0.0}) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.52399).epsilon(1e-5));
}

TEST_CASE("posterior equals the dense explicit-inverse algebra") {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int t = 1 + trial % 20;
    const int d = 1 + trial % 4;
    const GPModel m = testutil::random_model(t, d, rng, {0.25, 1.3, 1e-6});
    for (int k = 0; k < 10; ++k) {
      const Eigen::VectorXd x = unit_point(d, rng);
      const Prediction p = m.predict(x), o = oracle::dense_posterior(m, x);
      CHECK(std::abs(p.mean - o.mean) <= 1e-9);
      CHECK(std::abs(p.variance - std::max(0.0, o.variance)) <= 1e-9);
    }
  }
}

TEST_CASE("posterior interpolates and reverts to the prior") {
  Rng rng(3);
  const GPModel m = testutil::random_model(8, 2, rng, {0.3, 1.0, 1e-10});
  for (int i = 0; i < m.size(); ++i) {
    const Prediction p = m.predict(m.X().row(i).transpose());
    CHECK(std::abs(p.mean - m.y()[i]) <= 1e-4);
    CHECK(p.variance <= 1e-4);
  }
  const Prediction far = m.predict(Eigen::Vector2d(60.0, 60.0));
  CHECK(std::abs(far.mean) <= 1e-6);
  CHECK(std::abs(far.variance - 1.0) <= 1e-6);
}

TEST_CASE("single-observation posterior mean") {
  Rng rng(4);
  const GPHyperparams hp{0.4, 1.7, 1e-6};
  Eigen::MatrixXd X = uniform_matrix(1, 2, rng);
  Eigen::VectorXd y(1);
  y << -0.8;
  const GPModel m(X, y, hp);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd x = unit_point(2, rng);
    const double expected = matern52(x, X.row(0).transpose(), hp) * y[0] / (hp.signal_variance + hp.noise_variance);
    CHECK(m.predict(x).mean == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("log marginal likelihood closed forms") {
  const GPHyperparams hp{0.5, 2.0, 1e-6};
  Eigen::MatrixXd X = Eigen::MatrixXd::Constant(1, 2, 0.3);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
  const double expected = -0.5 * std::log(2.0 + 1e-6) - 0.5 * std::log(2.0 * std::numbers::pi);
  CHECK(log_marginal_likelihood(X, y, hp) == doctest::Approx(expected).epsilon(1e-14));

  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd Xr = uniform_matrix(5, 3, rng);
    const Eigen::VectorXd yr = testutil::normal_vector(5, rng);
    const GPHyperparams h{0.1 + uniform01(rng), 0.5 + 2.0 * uniform01(rng), 1e-6};
    CHECK(std::abs(log_marginal_likelihood(Xr, yr, h) - oracle::dense_lml(Xr, yr, h)) <= 1e-9);
  }
}

TEST_CASE("log marginal likelihood gradient matches finite differences") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd X = uniform_matrix(5, 2, rng);
    const Eigen::VectorXd y = testutil::normal_vector(5, rng);
    Eigen::VectorXd theta(2);
    theta << std::log(0.05 + uniform01(rng)), std::log(0.3 + 3.0 * uniform01(rng));
    auto f = [&](const Eigen::VectorXd& t) {
      return log_marginal_likelihood(X, y, GPHyperparams{std::exp(t[0]), std::exp(t[1]), 1e-6});
    };
    Eigen::Vector2d g;
    log_marginal_likelihood(X, y, GPHyperparams{std::exp(theta[0]), std::exp(theta[1]), 1e-6}, &g);
    const Eigen::VectorXd fd = testutil::fd_gradient(f, theta, 1e-5);
    CHECK(testutil::max_rel_error(g, fd, 1e-2) <= 1e-5);
  }
}

TEST_CASE("posterior gradients match finite differences") {
  Rng rng(7);
  int checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const GPModel m = testutil::random_model(12, 3, rng);
    for (int k = 0; k < 10; ++k, ++checked) {
      const Eigen::VectorXd x = unit_point(3, rng);
      Eigen::VectorXd dm, dv;
      m.predict_with_gradient(x, &dm, &dv);
      const auto fm = testutil::fd_gradient([&](const Eigen::VectorXd& z) { return m.predict(z).mean; }, x);
      const auto fv = testutil::fd_gradient([&](const Eigen::VectorXd& z) { return m.raw_variance(z); }, x);
      CHECK(testutil::max_rel_error(dm, fm, 1e-2) <= 1e-4);
      CHECK(testutil::max_rel_error(dv, fv, 1e-2) <= 1e-4);
    }
  }
  CHECK(checked == 100);
}

TEST_CASE("posterior variance is non-negative and shrinks with data") {
  Rng rng(8);
  const GPModel m = testutil::random_model(30, 2, rng);
  for (int k = 0; k < 10000; ++k) {
    const Eigen::VectorXd x = unit_point(2, rng);
    CHECK(m.raw_variance(x) >= -1e-8);
    CHECK(m.predict(x).variance >= 0.0);
  }
  for (int k = 0; k < 100; ++k) {
    const GPModel base = testutil::random_model(1 + k % 15, 2, rng);
    const Eigen::MatrixXd xnew = uniform_matrix(1, 2, rng);
    const GPModel more = base.condition_on(xnew, Eigen::VectorXd::Constant(1, standard_normal(rng)));
    const Eigen::VectorXd x = unit_point(2, rng);
    CHECK(more.predict(x).variance <= base.predict(x).variance + 1e-8);
  }
}

TEST_CASE("batch predictions agree with pointwise ones") {
  Rng rng(9);
  const GPModel m = testutil::random_model(15, 3, rng);
  const Eigen::MatrixXd Xs = uniform_matrix(50, 3, rng);
  Eigen::VectorXd mu, var;
  m.predict_batch(Xs, mu, var);
  const Eigen::VectorXd mu2 = m.predict_mean(Xs);
  for (int i = 0; i < 50; ++i) {
    const Prediction p = m.predict(Xs.row(i).transpose());
    CHECK(mu[i] == doctest::Approx(p.mean).epsilon(1e-10));
    CHECK(mu2[i] == doctest::Approx(p.mean).epsilon(1e-10));
    CHECK(std::abs(var[i] - p.variance) <= 1e-12);
  }
}

TEST_CASE("zero-data model is the prior") {
  const GPModel m = GPModel::prior(3, {0.5, 2.0, 1e-6});
  const Prediction p = m.predict(Eigen::Vector3d(0.1, 0.2, 0.3));
  CHECK(p.mean == 0.0);
  CHECK(p.variance == 2.0);
}

TEST_CASE("jitter escalates on a singular kernel matrix") {
  Eigen::MatrixXd X(3, 1);
  X << 0.5, 0.5, 0.5;
  const GPModel m(X, Eigen::Vector3d(0.1, 0.1, 0.1), {0.3, 1.0, 0.0});
  CHECK(m.hyperparams().noise_variance > 0.0);
  CHECK(m.hyperparams().noise_variance <= kMaxJitter);
}

TEST_CASE("fitting recovers the lengthscale of GP-distributed data") {
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 51; ++seed) {
    Rng rng(derive_seed(100, seed));
    const Eigen::MatrixXd X = uniform_matrix(60, 2, rng);
    const GPHyperparams truth{0.2, 1.0, 1e-6};
    Eigen::MatrixXd K = kernel_matrix(X, X, truth);
    K.diagonal().array() += 1e-8;
    const Eigen::VectorXd f = Eigen::LLT<Eigen::MatrixXd>(K).matrixL() * testutil::normal_vector(60, rng);
    Dataset data(2);
    for (int i = 0; i < 60; ++i) data.append(X.row(i).transpose(), f[i]);
    const FitResult fit = fit_hyperparameters(data, rng);
    const double l = fit.model.hyperparams().lengthscale;
    inside += l >= 0.1 && l <= 0.4;
  }
  CHECK(inside >= 45);
}

TEST_CASE("fitted likelihood dominates every restart start and warm starts") {
  Rng rng(10);
  const GPModel base = testutil::random_model(25, 3, rng);
  Rng fit_rng(11);
  const FitResult first = fit_hyperparameters(base.X(), base.y(), fit_rng);
  REQUIRE(first.start_log_likelihoods.size() == 10);
  for (double s : first.start_log_likelihoods) CHECK(first.log_likelihood >= s - 1e-12);
  CHECK(first.log_likelihood ==
        doctest::Approx(log_marginal_likelihood(base.X(), base.y(), first.model.hyperparams())).epsilon(1e-10));

  FitOptions warm;
  warm.warm_start = first.model.hyperparams();
  Rng fit_rng2(12);
  const FitResult second = fit_hyperparameters(base.X(), base.y(), fit_rng2, warm);
  CHECK(second.log_likelihood >= first.log_likelihood - 1e-9);

  const auto& hp = second.model.hyperparams();
  CHECK(hp.lengthscale >= kMinLengthscale);
  CHECK(hp.lengthscale <= kMaxLengthscale);
  CHECK(hp.signal_variance >= kMinSignalVariance);
  CHECK(hp.signal_variance <= kMaxSignalVariance);
}

TEST_CASE("fitting is deterministic given the stream") {
  Rng rng(13);
  const GPModel base = testutil::random_model(20, 2, rng);
  Rng a(5), b(5);
  const FitResult fa = fit_hyperparameters(base.X(), base.y(), a);
  const FitResult fb = fit_hyperparameters(base.X(), base.y(), b);
  CHECK(fa.model.hyperparams().lengthscale == fb.model.hyperparams().lengthscale);
  CHECK(fa.log_likelihood == fb.log_likelihood);
}
