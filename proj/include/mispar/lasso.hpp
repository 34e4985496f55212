#pragma once

#include "mispar/model.hpp"

namespace mispar::lasso {

/// Which branch of the self-consistent system produced a state.
enum class Branch {
  finite_lambda,
  interp_mu_below_1,
  interp_mu_above_1,
  zero_noise_perfect,
  zero_noise_failed,
};

const char* to_string(Branch b);

/// Unknowns of the l1 fixed point: effective threshold tau (lambda' = tau * sigma_xi),
/// fraction of nonzero estimates, and the cavity field standard deviation.
struct SelfConsistentState {
  double tau = 0.0;
  double rho_hat = 1.0;
  double sigma_xi = 0.0;
  Branch branch = Branch::finite_lambda;
};

struct L1Solution {
  RiskPoint risk;
  SelfConsistentState state;
};

struct PhaseBoundary {
  double rho;
  double tau_c;
  double alpha_c;
};

struct RecoveryCurve {
  double rho_over_alpha;
  double mu_c;
  double tau_at_mc;
};

/// Mean squared soft-threshold output for a zero coefficient, in units of sigma_xi^2.
double A_fun(double tau);

/// Same for a N(0, 1) coefficient. Requires sigma_xi > 0.
double B_fun(double tau, double sigma_xi);

/// Fraction of nonzero estimates as sigma_xi -> 0.
double F1(double tau, double rho);
/// Noiseless limit of the variance equation; minimized at tau_c(rho).
double F2(double tau, double rho);

/// Solves the three coupled equations for lambda > 0.
SelfConsistentState solve_l1_finite(const ModelConfig& cfg);

/// GE = alpha sigma_xi^2 / (sigma^2 + rho), TE = (1 - mu rho_hat)^2 alpha sigma_xi^2 / (sigma^2 + rho).
RiskPoint risk_from_state(const ModelConfig& cfg, const SelfConsistentState& state);

/// lambda -> 0 limit, every branch (mu < 1 closed form, rho_hat = 1/mu for mu > 1,
/// and the noiseless analysis when sigma = 0 and mu alpha >= 1).
L1Solution risk_l1_interp(const ModelConfig& cfg);

/// Dispatch on cfg.lambda.
L1Solution solve_l1(const ModelConfig& cfg);

/// sigma = 0, lambda = 0.
L1Solution zero_noise_branch(const ModelConfig& cfg);

/// Critical undersampling: tau_c is the root of F1 - F2 and alpha_c = F1(tau_c).
PhaseBoundary alpha_c(double rho);

/// Largest mu with perfect noiseless recovery, from the parametric equations in tau.
/// Throws NoWindow when alpha <= alpha_c(rho).
RecoveryCurve mu_c(double rho, double alpha);

/// Same quantity from the implicit form 1/mu_c = alpha_c(rho / (mu_c alpha)).
double mu_c_implicit(double rho, double alpha);

/// Small rho/alpha approximation sqrt(pi alpha / (2 rho)) exp(alpha / (2 rho)).
double mu_c_approx(double rho, double alpha);

/// Slope of GE1 in (1/alpha - mu) as mu -> 1/alpha from below, sigma = 0, alpha_c < alpha < 1.
double recovery_slope(double rho, double alpha);

/// Equation residuals of a returned state (re-substitution check).
struct Residuals {
  double rho_hat_eq = 0.0;  ///< fraction-of-nonzeros equation (or F1 for the noiseless branch)
  double variance_eq = 0.0;  ///< sigma_xi^2 fixed point, relative to max(1, sigma_xi^2) (or F2)
  double threshold_eq = 0.0;  ///< lambda / alpha = tau sigma_xi (1 - mu rho_hat)
  double max_abs() const;
};

Residuals residuals(const ModelConfig& cfg, const SelfConsistentState& state);

}  // namespace mispar::lasso
