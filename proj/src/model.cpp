#include "mispar/model.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "mispar/errors.hpp"

namespace mispar {

void ModelConfig::validate() const {
  std::ostringstream os;
  if (!(alpha > 0.0) || !std::isfinite(alpha)) os << "alpha must be > 0; ";
  if (!(mu >= 0.0) || !std::isfinite(mu)) os << "mu must be >= 0; ";
  if (!(rho >= 0.0 && rho <= 1.0)) os << "rho must lie in [0, 1]; ";
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) os << "sigma must be >= 0; ";
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) os << "lambda must be >= 0; ";
  const auto msg = os.str();
  if (!msg.empty()) throw DomainError("invalid ModelConfig: " + msg);
}

double risk_norm(const ModelConfig& cfg) {
  const double v = cfg.signal_power();
  if (!(v > 0.0)) throw DomainError("risk normalization sigma^2 + rho is zero");
  return v;
}

Regime classify(const ModelConfig& cfg) {
  return {cfg.mu * cfg.alpha <= 1.0 ? Specification::underspecified : Specification::overspecified,
          cfg.mu <= 1.0 ? Parametrization::under : Parametrization::over};
}

double sigma_eff_sq(const ModelConfig& cfg) {
  const double fill = cfg.mu * cfg.alpha;
  const double s2 = cfg.sigma * cfg.sigma;
  return fill <= 1.0 ? s2 + (1.0 - fill) * cfg.rho : s2;
}

EffectiveParams effective_params(const ModelConfig& cfg) {
  const double fill = cfg.mu * cfg.alpha;
  if (fill <= 1.0) return {sigma_eff_sq(cfg), cfg.rho};
  return {cfg.sigma * cfg.sigma, cfg.rho / fill};
}

std::pair<int, int> instance_dims(const ModelConfig& cfg, int n) {
  const int m = static_cast<int>(std::lround(cfg.alpha * n));
  const int p = static_cast<int>(std::lround(cfg.mu * m));
  return {m, p};
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t trial_key(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(splitmix64(seed) ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
}

Instance sample_instance(const ModelConfig& cfg, int n, std::uint64_t seed) {
  cfg.validate();
  if (n < 10) throw DimensionError("sample_instance: n must be >= 10");
  const auto [m, p] = instance_dims(cfg, n);
  if (m < 1 || p < 1) {
    std::ostringstream os;
    os << "sample_instance: degenerate dimensions m = " << m << ", p = " << p << " for n = " << n;
    throw DimensionError(os.str());
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Instance inst;
  inst.cfg = cfg;
  inst.n = n;
  inst.m = m;
  inst.p = p;

  inst.beta.resize(n);
  for (int j = 0; j < n; ++j) {
    const bool on = unif(rng) < cfg.rho;
    const double slab = gauss(rng);
    inst.beta[j] = on ? slab : 0.0;
  }
  inst.noise.resize(m);
  for (int i = 0; i < m; ++i) inst.noise[i] = cfg.sigma * gauss(rng);

  const int cols = std::max(n, p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  inst.design.resize(m, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < m; ++i) inst.design(i, j) = scale * gauss(rng);

  inst.y = inst.design.leftCols(n) * inst.beta + inst.noise;
  return inst;
}

}  // namespace mispar
