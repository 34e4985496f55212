#pragma once

#include <cstdint>
#include <limits>
#include <utility>

#include <Eigen/Dense>

namespace mispar {

/// The five dimensionless knobs of the model.
///
/// `lambda == 0` is not a numeric penalty value: it selects the interpolating
/// limit lambda -> 0 everywhere (closed forms in theory, min-norm / vanishing
/// penalty fits in the simulator).
struct ModelConfig {
  double alpha = 1.0;   ///< undersampling m / n
  double mu = 1.0;      ///< overparametrization p / m
  double rho = 0.0;     ///< probability a generative coefficient is nonzero
  double sigma = 0.0;   ///< measurement noise standard deviation
  double lambda = 0.0;  ///< penalty strength (0 = interpolating limit)

  /// Throws DomainError if any invariant is violated.
  void validate() const;

  bool interpolating() const { return lambda == 0.0; }
  double signal_power() const { return sigma * sigma + rho; }
};

/// sigma^2 + rho, the risk normalization. Throws DomainError when it is zero.
double risk_norm(const ModelConfig& cfg);

enum class Specification { underspecified, overspecified };
enum class Parametrization { under, over };

struct Regime {
  Specification specification;
  Parametrization parametrization;
};

/// underspecified iff mu*alpha <= 1; under-parametrized iff mu <= 1.
Regime classify(const ModelConfig& cfg);

/// sigma^2 + (1 - mu alpha) rho when mu alpha <= 1, else sigma^2.
double sigma_eff_sq(const ModelConfig& cfg);

/// Noise variance and sparsity seen by a fit with p parameters.
struct EffectiveParams {
  double sigma2;
  double rho;
};

/// Underspecified: (sigma_eff^2, rho). Overspecified: (sigma^2, rho / (mu alpha)).
EffectiveParams effective_params(const ModelConfig& cfg);

/// Normalized training and generalization errors.
struct RiskPoint {
  double te = 0.0;
  double ge = 0.0;
};

inline constexpr double kDiverged = std::numeric_limits<double>::infinity();

/// One finite-size draw of the generative model plus the inference design.
struct Instance {
  ModelConfig cfg;
  int n = 0;  ///< generative parameters
  int m = 0;  ///< measurements
  int p = 0;  ///< fitting parameters
  Eigen::MatrixXd design;  ///< m x max(n, p), entries N(0, 1/n)
  Eigen::VectorXd beta;    ///< length n, spike-and-slab
  Eigen::VectorXd noise;   ///< length m, N(0, sigma^2)
  Eigen::VectorXd y;       ///< design.leftCols(n) * beta + noise

  /// The first p columns of the design, used for inference.
  auto inference_design() const { return design.leftCols(p); }
};

/// m = round(alpha n) and p = round(mu m).
std::pair<int, int> instance_dims(const ModelConfig& cfg, int n);

/// Deterministic 64-bit key for trial `trial` of a run seeded with `seed`.
std::uint64_t trial_key(std::uint64_t seed, std::uint64_t trial);

/// Draws an instance. Identical (cfg, n, seed) give bitwise-identical results.
///
/// Draw order is beta, noise, then design columns left to right, so that two
/// configs differing only in mu share beta, noise and the leading columns.
Instance sample_instance(const ModelConfig& cfg, int n, std::uint64_t seed);

}  // namespace mispar
