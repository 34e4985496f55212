#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "mispar/model.hpp"

namespace mispar::sim {

enum class Penalty { l2, l1 };

const char* to_string(Penalty p);

struct FitResult {
  Eigen::VectorXd beta_hat;
  int iterations = 0;  ///< coordinate sweeps (lasso) or 1 (ridge)
  double objective = 0.0;
  bool converged = false;
  double kkt_violation = 0.0;  ///< lasso only
};

using DesignRef = Eigen::Ref<const Eigen::MatrixXd>;

/// argmin 1/2 |y - X b|^2 + lambda/2 |b|^2. lambda = 0 gives the minimum-norm
/// least-squares solution through a thin SVD (singular values below s_max * 1e-10 dropped).
FitResult fit_ridge(const DesignRef& x, const Eigen::VectorXd& y, double lambda);
FitResult fit_ridge(const Instance& inst, double lambda);

struct LassoOptions {
  double tol = 1e-10;        ///< stop when the largest coordinate update falls below this
  int max_sweeps = 100;      ///< per stage, before exact path following takes over
  int stages = 20;           ///< geometric stages from |X^T y|_inf / 2 to the target
  double kkt_tol = 1e-6;
};

/// Cyclic coordinate descent on 1/2 |y - X b|^2 + lambda |b|_1 with warm-started
/// homotopy. A stage that runs out of sweeps is finished by exact path following
/// from the previous stage; MaxIterExceeded if that also fails.
FitResult fit_lasso(const DesignRef& x, const Eigen::VectorXd& y, double lambda,
                    const LassoOptions& opts = {});

/// lambda = 0 ends the homotopy at 1e-6 (sigma^2 + rho) sqrt(m).
FitResult fit_lasso(const Instance& inst, double lambda, const LassoOptions& opts = {});

/// Largest KKT violation of b for the lasso problem at lambda.
double lasso_kkt_violation(const DesignRef& x, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& b, double lambda);

/// TE = |y - X b|^2 / (m (sigma^2 + rho)); GE is the exact expectation over a fresh
/// row, [sigma^2 + |beta - b|^2 / n] / (sigma^2 + rho) with both vectors zero-padded.
RiskPoint empirical_risk(const Instance& inst, const FitResult& fit);

struct TrialSummary {
  ModelConfig cfg;
  int n = 0;
  int trials = 0;      ///< requested
  int failed = 0;      ///< trials whose fit threw
  double te_mean = 0.0;
  double te_stderr = 0.0;  ///< nan when fewer than two trials succeeded
  double ge_mean = 0.0;
  double ge_stderr = 0.0;
  Penalty penalty = Penalty::l2;
};

/// Trial t samples with trial_key(seed, t). Results do not depend on `workers`.
/// Throws NoConvergence when more than 5% of trials fail.
TrialSummary run_trials(const ModelConfig& cfg, int n, int trials, Penalty penalty,
                        std::uint64_t seed, int workers = 0);

}  // namespace mispar::sim
