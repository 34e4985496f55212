#include "mispar/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mispar/errors.hpp"
#include "mispar/numerics.hpp"

namespace mispar::lasso {

namespace nm = numerics;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

// a^2 erfc(a/sqrt2) + erf(a/sqrt2) - sqrt(2/pi) a exp(-a^2/2). Behaves like a^2 near 0,
// where the closed form loses everything to cancellation.
double h_fun(double a) {
  if (a < 0.5) {
    double sum = 0.0, term = a * a * a;  // a^{2k+3} / (2^k k!)
    for (int k = 0; k < 30; ++k) {
      sum += term / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
      term *= -a * a / (2.0 * (k + 1));
      if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return a * a - 2.0 * kSqrt2OverPi * sum;
  }
  return a * a * nm::erfc(a / kSqrt2) + nm::erf(a / kSqrt2) -
         kSqrt2OverPi * a * std::exp(-0.5 * a * a);
}

// Phi-bar(t) / phi(t).
double mills_ratio(double t) {
  if (t < 5.0) return nm::normal_sf(t) / nm::normal_pdf(t);
  double d = t;
  for (int k = 200; k >= 1; --k) d = t + k / d;
  return 1.0 / d;
}

// Proportional to F1 - F2 with the tau factor and the erfc - A cancellation removed.
double f1_minus_f2_over_tau(double tau, double rho) {
  return (1.0 - rho) * 2.0 * nm::normal_pdf(tau) * (1.0 - tau * mills_ratio(tau)) - rho * tau;
}

double rho_hat_of(double tau, double s, double rho) {
  const double a = tau * s / std::sqrt(1.0 + s * s);
  return (1.0 - rho) * nm::erfc(tau / kSqrt2) + rho * nm::erfc(a / kSqrt2);
}

double mixture(double tau, double s, double rho) {
  return (1.0 - rho) * A_fun(tau) + rho * B_fun(tau, s);
}

// Finds lo < hi with f(lo) < 0 <= f(hi) for f increasing in x > 0, walking
// geometrically from x0. Throws BracketFailure if the walk leaves [1e-150, 1e150].
std::pair<double, double> geometric_bracket(const nm::ScalarFn& f, double x0, double factor,
                                            const char* what) {
  double x = x0;
  double fx = f(x);
  if (fx < 0.0) {
    while (true) {
      const double nx = x * factor;
      if (nx > 1e150) throw BracketFailure(std::string(what) + ": no upper bracket");
      const double fn = f(nx);
      if (fn >= 0.0) return {x, nx};
      x = nx;
    }
  }
  while (true) {
    const double nx = x / factor;
    if (nx < 1e-150) throw BracketFailure(std::string(what) + ": no lower bracket");
    const double fn = f(nx);
    if (fn < 0.0) return {nx, x};
    x = nx;
  }
}

// Upper bracket for a function increasing in tau on [0, inf) with f(0) <= 0.
double tau_upper(const nm::ScalarFn& f, double start, const char* what) {
  double hi = std::max(start, 1.0);
  while (f(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e150) throw BracketFailure(std::string(what) + ": tau unbounded");
  }
  return hi;
}

// Threshold equation lambda / alpha = tau s (1 - mu rho_hat(tau, s)) for fixed s.
double tau_for_threshold(double s, double mu, double rho, double lam_over_alpha) {
  auto h = [&](double tau) {
    return tau * s * (1.0 - mu * rho_hat_of(tau, s, rho)) - lam_over_alpha;
  };
  const double hi = tau_upper(h, std::max(40.0, 2.0 * lam_over_alpha / s + 1.0), "threshold");
  return nm::brent_root(h, {0.0, hi});
}

// rho_hat(tau, s) = target, rho_hat decreasing from 1 at tau = 0.
double tau_for_sparsity(double s, double rho, double target) {
  auto g = [&](double tau) { return target - rho_hat_of(tau, s, rho); };
  const double hi = tau_upper(g, 8.0, "sparsity");
  return nm::brent_root(g, {0.0, hi});
}

double tau_for_f1(double rho, double target) {
  auto g = [&](double tau) { return target - F1(tau, rho); };
  const double hi = tau_upper(g, 8.0, "F1");
  return nm::brent_root(g, {0.0, hi});
}

PhaseBoundary boundary_any(double rho) {
  if (rho <= 0.0) return {rho, std::numeric_limits<double>::infinity(), 0.0};
  if (rho >= 1.0) return {rho, 0.0, 1.0};
  const double tau_c =
      nm::brent_root([&](double t) { return f1_minus_f2_over_tau(t, rho); }, {1e-6, 40.0});
  return {rho, tau_c, F1(tau_c, rho)};
}

// Root of F2(tau, rho) = target with tau >= tau_c. Requires target >= alpha_c(rho).
double larger_f2_root(double rho, double target, const PhaseBoundary& pb) {
  if (rho <= 0.0) {
    // F2 = A is decreasing from 1.
    if (target >= 1.0) return 0.0;
    return nm::brent_root([&](double t) { return target - A_fun(t); },
                          {0.0, tau_upper([&](double t) { return target - A_fun(t); }, 8.0, "A")});
  }
  auto g = [&](double t) { return F2(t, rho) - target; };
  const double lo = pb.tau_c;
  if (g(lo) >= 0.0) return lo;
  double hi = std::max(2.0 * lo, 1.0);
  while (g(hi) < 0.0) hi *= 2.0;
  return nm::brent_root(g, {lo, hi});
}

L1Solution from_state(const ModelConfig& cfg, const SelfConsistentState& st) {
  return {risk_from_state(cfg, st), st};
}

// lambda -> 0 with positive effective noise.
L1Solution interp_positive_noise(const ModelConfig& cfg) {
  const auto [s2, r] = effective_params(cfg);
  const double mu = cfg.mu, alpha = cfg.alpha;
  SelfConsistentState st;
  if (mu <= 1.0) {
    st.tau = 0.0;
    st.rho_hat = 1.0;
    st.sigma_xi = mu < 1.0 ? std::sqrt(s2 / (alpha * (1.0 - mu))) : kDiverged;
    st.branch = Branch::interp_mu_below_1;
    return from_state(cfg, st);
  }
  const double target = 1.0 / mu;
  auto psi = [&](double s) {
    const double tau = tau_for_sparsity(s, r, target);
    return s * s * (1.0 - mu * mixture(tau, s, r)) - s2 / alpha;
  };
  const auto [lo, hi] = geometric_bracket(psi, std::sqrt(s2 / alpha), 2.0, "interp sigma_xi");
  const double s = nm::brent_root(psi, {lo, hi});
  st.sigma_xi = s;
  st.tau = tau_for_sparsity(s, r, target);
  st.rho_hat = rho_hat_of(st.tau, s, r);
  st.branch = Branch::interp_mu_above_1;
  return from_state(cfg, st);
}

}  // namespace

const char* to_string(Branch b) {
  switch (b) {
    case Branch::finite_lambda: return "finite_lambda";
    case Branch::interp_mu_below_1: return "interp_mu_below_1";
    case Branch::interp_mu_above_1: return "interp_mu_above_1";
    case Branch::zero_noise_perfect: return "zero_noise_perfect";
    case Branch::zero_noise_failed: return "zero_noise_failed";
  }
  return "unknown";
}

double A_fun(double tau) {
  if (!(tau >= 0.0)) throw DomainError("A_fun: tau must be >= 0");
  return (1.0 + tau * tau) * nm::erfc(tau / kSqrt2) -
         kSqrt2OverPi * tau * std::exp(-0.5 * tau * tau);
}

double B_fun(double tau, double sigma_xi) {
  if (!(tau >= 0.0)) throw DomainError("B_fun: tau must be >= 0");
  if (!(sigma_xi > 0.0)) throw DomainError("B_fun: sigma_xi must be > 0");
  const double s = sigma_xi;
  const double a = tau * s / std::sqrt(1.0 + s * s);
  const double c0 = 1.0 + 1.0 / (s * s);
  return 1.0 - 2.0 * nm::erf(a / kSqrt2) + c0 * h_fun(a);
}

double F1(double tau, double rho) { return rho + (1.0 - rho) * nm::erfc(tau / kSqrt2); }

double F2(double tau, double rho) { return (1.0 - rho) * A_fun(tau) + rho * (1.0 + tau * tau); }

SelfConsistentState solve_l1_finite(const ModelConfig& cfg) {
  cfg.validate();
  if (!(cfg.lambda > 0.0)) throw DomainError("solve_l1_finite: requires lambda > 0");
  risk_norm(cfg);
  const auto [s2, r] = effective_params(cfg);
  const double mu = cfg.mu, alpha = cfg.alpha, lam = cfg.lambda / cfg.alpha;

  // Eliminate tau and rho_hat for fixed sigma_xi, then solve the variance equation
  // as a scalar root in sigma_xi.
  auto psi = [&](double s) {
    const double tau = tau_for_threshold(s, mu, r, lam);
    return s * s * (1.0 - mu * mixture(tau, s, r)) - s2 / alpha;
  };
  const double start = s2 > 0.0 ? std::sqrt(s2 / alpha) : 1.0;
  const auto [lo, hi] = geometric_bracket(psi, start, 2.0, "solve_l1_finite");
  const double s = nm::brent_root(psi, {lo, hi});

  SelfConsistentState st;
  st.sigma_xi = s;
  st.tau = tau_for_threshold(s, mu, r, lam);
  st.rho_hat = rho_hat_of(st.tau, s, r);
  st.branch = Branch::finite_lambda;
  if (!std::isfinite(st.sigma_xi) || !std::isfinite(st.tau))
    throw NonFinite("solve_l1_finite: non-finite state");
  return st;
}

RiskPoint risk_from_state(const ModelConfig& cfg, const SelfConsistentState& st) {
  const double norm = risk_norm(cfg);
  if (std::isinf(st.sigma_xi)) return {0.0, kDiverged};
  const double ge = cfg.alpha * st.sigma_xi * st.sigma_xi / norm;
  // rho_hat = 1/mu holds exactly on these branches; don't let rounding leak into TE.
  const bool interpolates =
      st.branch == Branch::interp_mu_above_1 || st.branch == Branch::zero_noise_failed;
  const double gap = interpolates ? 0.0 : 1.0 - cfg.mu * st.rho_hat;
  return {gap * gap * ge, ge};
}

L1Solution risk_l1_interp(const ModelConfig& cfg) {
  cfg.validate();
  if (cfg.lambda != 0.0) throw DomainError("risk_l1_interp: requires lambda = 0");
  risk_norm(cfg);
  if (sigma_eff_sq(cfg) > 0.0) return interp_positive_noise(cfg);
  return zero_noise_branch(cfg);
}

L1Solution solve_l1(const ModelConfig& cfg) {
  if (cfg.interpolating()) return risk_l1_interp(cfg);
  return from_state(cfg, solve_l1_finite(cfg));
}

L1Solution zero_noise_branch(const ModelConfig& cfg) {
  cfg.validate();
  if (cfg.sigma != 0.0 || cfg.lambda != 0.0)
    throw DomainError("zero_noise_branch: requires sigma = 0 and lambda = 0");
  risk_norm(cfg);
  const auto [s2, r] = effective_params(cfg);
  if (s2 > 0.0) return interp_positive_noise(cfg);

  const double mu = cfg.mu;
  const double target = 1.0 / mu;
  const auto pb = boundary_any(r);
  SelfConsistentState st;

  if (target >= pb.alpha_c) {
    st.sigma_xi = 0.0;
    st.tau = larger_f2_root(r, target, pb);
    st.rho_hat = F1(st.tau, r);
    st.branch = Branch::zero_noise_perfect;
    return {{0.0, 0.0}, st};
  }

  auto psi = [&](double s) {
    const double tau = tau_for_sparsity(s, r, target);
    return 1.0 - mu * mixture(tau, s, r);
  };
  const auto [lo, hi] = geometric_bracket(psi, 1.0, 2.0, "zero_noise_branch");
  const double s = nm::brent_root(psi, {lo, hi});
  st.sigma_xi = s;
  st.tau = tau_for_sparsity(s, r, target);
  st.rho_hat = rho_hat_of(st.tau, s, r);
  st.branch = Branch::zero_noise_failed;
  return from_state(cfg, st);
}

PhaseBoundary alpha_c(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("alpha_c: rho must lie in (0, 1)");
  return boundary_any(rho);
}

RecoveryCurve mu_c(double rho, double alpha) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("mu_c: rho must lie in (0, 1)");
  if (!(alpha > 0.0)) throw DomainError("mu_c: alpha must be > 0");
  const double ratio = rho / alpha;
  if (ratio >= 1.0 || alpha <= alpha_c(rho).alpha_c)
    throw NoWindow("mu_c: alpha <= alpha_c(rho), no perfect-recovery window");

  // tau R(tau) = 1 - rho/alpha, then mu_c = rho/alpha + tau / (2 phi(tau)).
  auto q = [&](double t) { return t * mills_ratio(t) - (1.0 - ratio); };
  const double hi = tau_upper(q, 4.0, "mu_c");
  const double tau = nm::brent_root(q, {0.0, hi});
  const double mc = ratio + tau / (2.0 * nm::normal_pdf(tau));
  return {ratio, std::isfinite(mc) ? mc : kDiverged, tau};
}

double mu_c_implicit(double rho, double alpha) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("mu_c_implicit: rho must lie in (0, 1)");
  if (!(alpha > 0.0)) throw DomainError("mu_c_implicit: alpha must be > 0");
  const double ratio = rho / alpha;
  if (ratio >= 1.0 || alpha <= alpha_c(rho).alpha_c)
    throw NoWindow("mu_c_implicit: alpha <= alpha_c(rho), no perfect-recovery window");
  auto g = [&](double logmu) {
    const double m = std::exp(logmu);
    return boundary_any(ratio / m).alpha_c - 1.0 / m;
  };
  double lo = std::log(1.0 / alpha), hi = lo + 1.0;
  while (g(hi) < 0.0) {
    lo = hi;
    hi += 1.0;
    if (hi > 700.0) throw BracketFailure("mu_c_implicit: no upper bracket");
  }
  return std::exp(nm::brent_root(g, {lo, hi}));
}

double mu_c_approx(double rho, double alpha) {
  if (!(rho > 0.0) || !(alpha > 0.0)) throw DomainError("mu_c_approx: rho, alpha must be > 0");
  const double x = alpha / rho;
  return std::sqrt(std::numbers::pi * x / 2.0) * std::exp(x / 2.0);
}

double recovery_slope(double rho, double alpha) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("recovery_slope: rho must lie in (0, 1)");
  if (!(alpha < 1.0) || alpha <= alpha_c(rho).alpha_c)
    throw DomainError("recovery_slope: requires alpha_c(rho) < alpha < 1");
  const double tau0 = tau_for_f1(rho, alpha);
  return alpha * alpha / (alpha - F2(tau0, rho));
}

double Residuals::max_abs() const {
  return std::max({std::fabs(rho_hat_eq), std::fabs(variance_eq), std::fabs(threshold_eq)});
}

Residuals residuals(const ModelConfig& cfg, const SelfConsistentState& st) {
  const auto [s2, r] = effective_params(cfg);
  const double mu = cfg.mu, alpha = cfg.alpha, s = st.sigma_xi;
  Residuals out;
  switch (st.branch) {
    case Branch::zero_noise_perfect:
      out.rho_hat_eq = st.rho_hat - F1(st.tau, r);
      out.variance_eq = 1.0 / mu - F2(st.tau, r);
      return out;
    case Branch::interp_mu_below_1:
      if (!std::isfinite(s)) return out;
      out.variance_eq = (s * s * (1.0 - mu) - s2 / alpha) / std::max(1.0, s * s);
      return out;
    case Branch::zero_noise_failed:
      out.rho_hat_eq = st.rho_hat - rho_hat_of(st.tau, s, r);
      out.variance_eq = 1.0 - mu * mixture(st.tau, s, r);
      out.threshold_eq = 1.0 - mu * st.rho_hat;
      return out;
    case Branch::interp_mu_above_1:
    case Branch::finite_lambda:
      break;
  }
  out.rho_hat_eq = st.rho_hat - rho_hat_of(st.tau, s, r);
  out.variance_eq = (s * s - (s2 + mu * alpha * s * s * mixture(st.tau, s, r)) / alpha) /
                    std::max(1.0, s * s);
  out.threshold_eq = cfg.lambda / alpha - st.tau * s * (1.0 - mu * st.rho_hat);
  return out;
}

}  // namespace mispar::lasso
