"""Risk curves for misparametrized sparse regression (ridge and lasso)."""

from ._mispar import (
    DomainError,
    Error,
    ModelConfig,
    NoConvergence,
    NoWindow,
    RiskPoint,
    UsageError,
    alpha_c,
    mu_c,
    mu_c_approx,
    parse_grid,
    phase_csv,
    recovery_slope,
    risk_l1,
    risk_l2,
    risk_l2_oracle,
    run_trials,
)

__all__ = [
    "DomainError",
    "Error",
    "ModelConfig",
    "NoConvergence",
    "NoWindow",
    "RiskPoint",
    "UsageError",
    "alpha_c",
    "mu_c",
    "mu_c_approx",
    "parse_grid",
    "phase_csv",
    "recovery_slope",
    "risk_l1",
    "risk_l2",
    "risk_l2_oracle",
    "run_trials",
]
