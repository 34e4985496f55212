#pragma once

#include "mispar/model.hpp"
#include "mispar/numerics.hpp"

namespace mispar::ridge {

/// Support of the Marchenko-Pastur law with aspect ratio mu.
struct MPSupport {
  double mu_minus;
  double mu_plus;
  double point_mass_at_zero;  ///< max(0, 1 - 1/mu)
};

MPSupport mp_support(double mu);

/// Quadrature panels used for the MP integral at this (alpha, mu, lambda).
int mp_panels(double mu, double alpha, double lambda);

/// Average of f over the eigenvalues of X^T X (x ~ N(0, 1/n)), whose law is
/// alpha * MP(mu): the zero-eigenvalue mass plus the continuous part, with f
/// evaluated at alpha * z.
double mp_average(const numerics::ScalarFn& f, double mu, double alpha, int panels = 512);

/// Closed-form TE/GE for lambda > 0 in either specification regime.
RiskPoint risk_l2(const ModelConfig& cfg);

/// lambda -> 0 limit. GE is kDiverged at mu = 1 when the effective noise is positive.
RiskPoint risk_l2_interp(const ModelConfig& cfg);

/// Dispatches to risk_l2 or risk_l2_interp on cfg.lambda.
RiskPoint risk_l2_any(const ModelConfig& cfg);

/// Independent route: TE and GE from the eigenvalue sums evaluated with mp_average.
RiskPoint risk_l2_oracle(const ModelConfig& cfg);

}  // namespace mispar::ridge
