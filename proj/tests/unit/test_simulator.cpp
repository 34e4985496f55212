#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include <Eigen/QR>

#include "doctest.h"
#include "mispar/errors.hpp"
#include "mispar/parallel.hpp"
#include "mispar/ridge.hpp"
#include "mispar/simulator.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using mispar::ModelConfig;
namespace sim = mispar::sim;

namespace {

// Largest violation of the lasso optimality conditions, evaluated from scratch.
double kkt_oracle(const MatrixXd& x, const VectorXd& y, const VectorXd& b, double lam) {
  const VectorXd g = x.transpose() * (y - x * b);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double v = b[j] == 0.0 ? std::fabs(g[j]) - lam : std::fabs(g[j] - lam * (b[j] > 0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

MatrixXd gaussian(int rows, int cols, unsigned seed) {
  std::srand(seed);
  return MatrixXd::Random(rows, cols);
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("ridge: identity design at lambda = 0 returns y") {
  const VectorXd y = VectorXd::LinSpaced(6, -1.0, 2.0);
  const auto fit = sim::fit_ridge(MatrixXd::Identity(6, 6), y, 0.0);
  CHECK((fit.beta_hat - y).norm() < 1e-12);
}

TEST_CASE("ridge: heavy penalty shrinks to zero") {
  const MatrixXd x = gaussian(30, 50, 1);
  const VectorXd y = gaussian(30, 1, 2);
  const auto fit = sim::fit_ridge(x, y, 1e8);
  CHECK(fit.beta_hat.norm() <= (x.transpose() * y).norm() / 1e8 * (1 + 1e-12));
}

TEST_CASE("ridge: normal equations at lambda > 0") {
  const MatrixXd x = gaussian(40, 25, 3);
  const VectorXd y = gaussian(40, 1, 4);
  const auto fit = sim::fit_ridge(x, y, 0.3);
  const VectorXd r = (x.transpose() * x + 0.3 * MatrixXd::Identity(25, 25)) * fit.beta_hat - x.transpose() * y;
  CHECK(r.norm() < 1e-10);
  // Wide design (dual form).
  const MatrixXd w = gaussian(20, 60, 5);
  const VectorXd yw = gaussian(20, 1, 6);
  const auto fw = sim::fit_ridge(w, yw, 0.3);
  const VectorXd rw = (w.transpose() * w + 0.3 * MatrixXd::Identity(60, 60)) * fw.beta_hat - w.transpose() * yw;
  CHECK(rw.norm() < 1e-10);
}

TEST_CASE("ridge: lambda = 0 is OLS when p < m and min-norm interpolation when p > m") {
  const MatrixXd x = gaussian(50, 20, 7);
  const VectorXd y = gaussian(50, 1, 8);
  const VectorXd ols = (x.transpose() * x).ldlt().solve(x.transpose() * y);
  CHECK((sim::fit_ridge(x, y, 0.0).beta_hat - ols).norm() <= 1e-8 * ols.norm());

  const MatrixXd w = gaussian(20, 70, 9);
  const VectorXd yw = gaussian(20, 1, 10);
  const auto fit = sim::fit_ridge(w, yw, 0.0);
  CHECK((yw - w * fit.beta_hat).norm() <= 1e-8 * yw.norm());
  const VectorXd mn = w.transpose() * (w * w.transpose()).ldlt().solve(yw);
  CHECK((fit.beta_hat - mn).norm() <= 1e-8 * mn.norm());
}

TEST_CASE("lasso: lambda above |X^T y|_inf gives zero") {
  const MatrixXd x = gaussian(30, 40, 11);
  const VectorXd y = gaussian(30, 1, 12);
  const double lmax = (x.transpose() * y).cwiseAbs().maxCoeff();
  const auto fit = sim::fit_lasso(x, y, lmax * 1.0001);
  CHECK(fit.beta_hat.isZero(0.0));
  CHECK(fit.converged);
  CHECK_THROWS_AS(sim::fit_lasso(x, y, 0.0), mispar::DomainError);
}

TEST_CASE("lasso: orthonormal columns give soft thresholding") {
  const MatrixXd q = Eigen::HouseholderQR<MatrixXd>(gaussian(40, 15, 13)).householderQ() * MatrixXd::Identity(40, 15);
  const VectorXd y = 2.0 * gaussian(40, 1, 14);
  const double lam = 0.4;
  const VectorXd z = q.transpose() * y;
  const auto fit = sim::fit_lasso(q, y, lam);
  for (int j = 0; j < 15; ++j) {
    const double expect = std::copysign(std::max(std::fabs(z[j]) - lam, 0.0), z[j]);
    CHECK(std::fabs(fit.beta_hat[j] - expect) < 1e-9);
  }
}

TEST_CASE("lasso: KKT oracle on sampled instances") {
  for (double mu : {0.5, 1.5, 3.0})
    for (double lam : {0.0, 0.01, 0.2}) {
      const auto inst = mispar::sample_instance({0.8, mu, 0.2, 0.1, lam}, 120, 21);
      const auto fit = sim::fit_lasso(inst, lam);
      const double target = lam > 0 ? lam : 1e-6 * 0.21 * std::sqrt(static_cast<double>(inst.m));
      const MatrixXd x = inst.inference_design();
      CHECK(fit.converged);
      CHECK(kkt_oracle(x, inst.y, fit.beta_hat, target) <= 1e-6);
      CHECK(sim::lasso_kkt_violation(x, inst.y, fit.beta_hat, target) == doctest::Approx(fit.kkt_violation));
    }
}

TEST_CASE("empirical_risk examples") {
  auto inst = mispar::sample_instance({0.5, 2.0, 0.3, 0.2, 0.0}, 200, 31);
  REQUIRE(inst.p == inst.n);
  sim::FitResult exact;
  exact.beta_hat = inst.beta;
  CHECK(sim::empirical_risk(inst, exact).ge == doctest::Approx(0.04 / 0.34).epsilon(1e-12));

  sim::FitResult zero;
  zero.beta_hat = VectorXd::Zero(inst.p);
  CHECK(sim::empirical_risk(inst, zero).ge ==
        doctest::Approx((0.04 + inst.beta.squaredNorm() / inst.n) / 0.34).epsilon(1e-12));

  // Null predictor scores about 1 at large n.
  const auto big = mispar::sample_instance({0.5, 1.0, 0.3, 0.2, 0.0}, 2000, 32);
  zero.beta_hat = VectorXd::Zero(big.p);
  CHECK(sim::empirical_risk(big, zero).ge == doctest::Approx(1.0).epsilon(0.05));

  // Extra columns beyond n count as pure error, missing ones as unexplained signal.
  auto wide = mispar::sample_instance({0.8, 2.5, 0.3, 0.0, 0.0}, 100, 33);
  sim::FitResult pad;
  pad.beta_hat = VectorXd::Zero(wide.p);
  pad.beta_hat.head(wide.n) = wide.beta;
  pad.beta_hat[wide.p - 1] = 2.0;
  CHECK(sim::empirical_risk(wide, pad).ge == doctest::Approx(4.0 / wide.n / 0.3).epsilon(1e-12));
}

TEST_CASE("interpolating fits have zero training error") {
  const auto inst = mispar::sample_instance({0.8, 2.0, 0.2, 0.1, 0.0}, 150, 41);
  CHECK(sim::empirical_risk(inst, sim::fit_ridge(inst, 0.0)).te < 1e-10);
  CHECK(sim::empirical_risk(inst, sim::fit_lasso(inst, 0.0)).te < 1e-10);
}

TEST_CASE("run_trials is deterministic and independent of the worker count") {
  for (auto pen : {sim::Penalty::l2, sim::Penalty::l1}) {
    const ModelConfig c{0.8, 1.6, 0.2, 0.1, 0.0};
    const auto a = sim::run_trials(c, 80, 12, pen, 5, 1);
    const auto b = sim::run_trials(c, 80, 12, pen, 5, 3);
    CHECK(a.te_mean == b.te_mean);
    CHECK(a.ge_mean == b.ge_mean);
    CHECK(a.te_stderr == b.te_stderr);
    CHECK(a.ge_stderr == b.ge_stderr);
    CHECK(a.failed == 0);
    CHECK(sim::run_trials(c, 80, 12, pen, 6, 1).ge_mean != a.ge_mean);
  }
  const auto one = sim::run_trials({0.8, 2.0, 0.2, 0.1, 0.0}, 60, 1, sim::Penalty::l2, 1);
  CHECK(std::isnan(one.ge_stderr));
  CHECK(std::isfinite(one.ge_mean));
  CHECK_THROWS_AS(sim::run_trials({0.8, 2.0, 0.2, 0.1, 0.0}, 60, 0, sim::Penalty::l2, 1), mispar::DomainError);
}

TEST_CASE("stderr is the sample standard deviation over sqrt(trials)") {
  const ModelConfig c{0.8, 2.0, 0.2, 0.1, 0.0};
  const int k = 7;
  std::vector<double> ge;
  for (int t = 0; t < k; ++t) {
    const auto inst = mispar::sample_instance(c, 60, mispar::trial_key(3, t));
    ge.push_back(sim::empirical_risk(inst, sim::fit_ridge(inst, 0.0)).ge);
  }
  double mean = 0, var = 0;
  for (double g : ge) mean += g / k;
  for (double g : ge) var += (g - mean) * (g - mean) / (k - 1);
  const auto s = sim::run_trials(c, 60, k, sim::Penalty::l2, 3, 1);
  CHECK(s.ge_mean == doctest::Approx(mean).epsilon(1e-14));
  CHECK(s.ge_stderr == doctest::Approx(std::sqrt(var / k)).epsilon(1e-12));
}

TEST_CASE("l1 recovers a sparse signal where l2 cannot") {
  const ModelConfig c{0.8, 2.0, 0.2, 0.01, 0.0};
  const auto l1 = sim::run_trials(c, 200, 8, sim::Penalty::l1, 17);
  const auto l2 = sim::run_trials(c, 200, 8, sim::Penalty::l2, 17);
  CHECK(l1.ge_mean < 0.05);
  CHECK(l2.ge_mean > 0.3);
}

TEST_CASE("without sparsity l1 does not beat l2") {
  const ModelConfig c{0.8, 2.0, 1.0, 0.1, 0.0};
  const auto l1 = sim::run_trials(c, 100, 20, sim::Penalty::l1, 23);
  const auto l2 = sim::run_trials(c, 100, 20, sim::Penalty::l2, 23);
  CHECK(l1.ge_mean >= l2.ge_mean - 3.0 * std::hypot(l1.ge_stderr, l2.ge_stderr));
}

TEST_CASE("parallel_for runs each index once and rethrows") {
  std::vector<std::atomic<int>> hits(50);
  mispar::parallel_for(50, [&](int i) { hits[i]++; }, 4);
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(mispar::parallel_for(10, [](int i) { if (i == 7) throw std::runtime_error("x"); }, 3),
                  std::runtime_error);
}

TEST_CASE("MISPAR_THREADS caps the pool") {
  setenv("MISPAR_THREADS", "2", 1);
  CHECK(mispar::worker_count(8) == 2);
  CHECK(mispar::worker_count(1) == 1);
  setenv("MISPAR_THREADS", "junk", 1);
  CHECK(mispar::worker_count(5) == 5);
  unsetenv("MISPAR_THREADS");
}

}  // TEST_SUITE
