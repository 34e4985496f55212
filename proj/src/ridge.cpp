#include "mispar/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mispar/errors.hpp"

namespace mispar::ridge {

MPSupport mp_support(double mu) {
  if (!(mu >= 0.0)) throw DomainError("mp_support: mu must be >= 0");
  const double r = std::sqrt(mu);
  return {(1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r), mu > 1.0 ? 1.0 - 1.0 / mu : 0.0};
}

int mp_panels(double mu, double alpha, double lambda) {
  const auto s = mp_support(mu);
  int panels = lambda / alpha < 1e-3 ? 4096 : 512;
  // Both the 1/z factor and 1/(alpha z + lambda)^2 peak at the lower edge; after
  // the sin^2 map that feature has width ~ sqrt(scale / (mu_+ - mu_-)) in theta.
  const double scale = s.mu_minus + lambda / alpha;
  const double width = std::sqrt(scale / std::max(s.mu_plus - s.mu_minus, 1e-300));
  const double wanted = 4.0 * std::numbers::pi / std::max(width, 1e-12);
  while (panels < wanted && panels < (1 << 18)) panels *= 2;
  return panels;
}

double mp_average(const numerics::ScalarFn& f, double mu, double alpha, int panels) {
  if (!(alpha > 0.0)) throw DomainError("mp_average: alpha must be > 0");
  if (mu == 0.0) return f(alpha);  // degenerate law: all mass at z = 1
  const auto s = mp_support(mu);
  double total = 0.0;
  if (s.point_mass_at_zero > 0.0) total += s.point_mass_at_zero * f(0.0);
  auto density_times_f = [&](double z) {
    const double w = std::sqrt(std::max(0.0, (s.mu_plus - z) * (z - s.mu_minus)));
    if (w == 0.0) return 0.0;
    return w / (mu * z) * f(alpha * z);
  };
  total += numerics::integrate(
               density_times_f,
               {s.mu_minus, s.mu_plus, panels, numerics::EndpointWeight::sqrt_both_ends}) /
           (2.0 * std::numbers::pi);
  return total;
}

namespace {

struct ClosedFormTerms {
  double a;      // [(t + mu_+)(t + mu_-)]^{1/2}, t = lambda / alpha
  double t;      // lambda / alpha
  double big_t;  // t + 1 + mu
};

ClosedFormTerms closed_form_terms(double mu, double alpha, double lambda) {
  const double t = lambda / alpha;
  const double big_t = t + 1.0 + mu;
  // A^2 = T^2 - 4 mu, written so that A - T never cancels.
  const double a = big_t * std::sqrt(1.0 - 4.0 * mu / (big_t * big_t));
  return {a, t, big_t};
}

}  // namespace

RiskPoint risk_l2(const ModelConfig& cfg) {
  cfg.validate();
  if (!(cfg.lambda > 0.0)) throw DomainError("risk_l2: requires lambda > 0");
  const auto [s2, r] = effective_params(cfg);
  const double mu = cfg.mu, alpha = cfg.alpha, lambda = cfg.lambda;
  const auto [a, t, big_t] = closed_form_terms(mu, alpha, lambda);
  const double gap = std::fabs(1.0 - mu);

  // Both brackets use A^2 - t T = t (1 + mu) + (1 - mu)^2 to avoid the O(lambda^2)
  // cancellation of the displayed form at large lambda.
  const double core = (t * (1.0 + mu) + (1.0 - mu) * (1.0 - mu)) / a - gap;
  const double te_num = s2 * (mu < 1.0 ? 1.0 - mu : 0.0) +
                        0.5 * (s2 * core + 4.0 * mu * lambda * t * r / (a * (a + big_t)));
  const double ge_num = (mu > 1.0 ? mu * alpha * r * (1.0 - 1.0 / mu) : 0.0) +
                        0.5 * (r * alpha * core + s2 * (big_t / a + 1.0));
  const double norm = risk_norm(cfg);
  return {std::max(0.0, te_num / norm), std::max(0.0, ge_num / norm)};
}

RiskPoint risk_l2_interp(const ModelConfig& cfg) {
  cfg.validate();
  if (cfg.lambda != 0.0) throw DomainError("risk_l2_interp: requires lambda = 0");
  const double mu = cfg.mu, fill = cfg.mu * cfg.alpha;
  const double s2 = sigma_eff_sq(cfg);
  const double norm = risk_norm(cfg);

  const double te = mu < 1.0 ? s2 * (1.0 - mu) / norm : 0.0;
  double ge = 0.0;
  if (mu > 1.0) {
    const double shrink = fill < 1.0 ? fill : 1.0;
    ge = (cfg.rho * shrink * (1.0 - 1.0 / mu) + s2 * mu / (mu - 1.0)) / norm;
  } else if (mu < 1.0) {
    ge = s2 / ((1.0 - mu) * norm);
  } else {
    ge = s2 > 0.0 ? kDiverged : 0.0;
  }
  return {te, ge};
}

RiskPoint risk_l2_any(const ModelConfig& cfg) {
  return cfg.interpolating() ? risk_l2_interp(cfg) : risk_l2(cfg);
}

RiskPoint risk_l2_oracle(const ModelConfig& cfg) {
  cfg.validate();
  if (!(cfg.lambda > 0.0)) throw DomainError("risk_l2_oracle: requires lambda > 0");
  const auto [s2, r] = effective_params(cfg);
  const double lambda = cfg.lambda, mu = cfg.mu, alpha = cfg.alpha;
  const int panels = mp_panels(mu, alpha, lambda);

  // Training residual per nonzero-or-zero eigenvalue x of X^T X.
  const double te_sum = mp_average(
      [&](double x) { return lambda * lambda * (r * x + s2) / ((x + lambda) * (x + lambda)); },
      mu, alpha, panels);
  // Estimation error per eigen-direction.
  const double ge_sum = mp_average(
      [&](double x) { return (lambda * lambda * r + s2 * x) / ((x + lambda) * (x + lambda)); },
      mu, alpha, panels);

  const double norm = risk_norm(cfg);
  return {(s2 * (1.0 - mu) + mu * te_sum) / norm, (s2 + mu * alpha * ge_sum) / norm};
}

}  // namespace mispar::ridge
