"""Core model definitions: parameters, state, and drift functions.

Two strategy-update rules (payoff imitation / resource-knowledge feedback)
are coupled to a harvested resource whose growth is either plain logistic
or logistic with an Allee threshold.  Everything downstream (the ODE
integrator, the finite-population simulator, the equilibrium analysis and
the parameter sweeps) evaluates the drift through this module, so the
formulas live here exactly once.

All drift functions are pure and accept either Python floats or numpy
arrays (elementwise, broadcasting), which is what lets the sweep machinery
integrate thousands of initial conditions in one vectorized pass with
bit-identical arithmetic to the scalar path.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple


class ParamDomainError(ValueError):
    """A model parameter lies outside its admissible domain."""


class GrowthKind(enum.Enum):
    """Resource growth law."""

    PLAIN_LOGISTIC = "logistic"
    ALLEE_LOGISTIC = "allee"


class StrategyRule(enum.Enum):
    """Strategy update rule for the consumer population."""

    REPLICATOR = "replicator"
    KNOWLEDGE_FEEDBACK = "knowledge"


@dataclass(frozen=True)
class ModelParams:
    """Model parameters.

    T        : natural growth rate of the resource (> 0)
    A        : Allee threshold, growth is negative below it (0 < A < K)
    K        : carrying capacity; normalized to 1 (see validate_params)
    e_C_hat  : normalized cooperator extraction rate, N*e_C/T (< 1)
    e_D_hat  : normalized defector extraction rate,  N*e_D/T (> 1)
    w        : greed parameter of the imitation rule (0 < w <= 1);
               ignored by the knowledge-feedback rule
    """

    T: float = 2.0
    A: float = 0.1
    K: float = 1.0
    e_C_hat: float = 0.5
    e_D_hat: float = 1.5
    w: float = 1.0


class State(NamedTuple):
    """Resource level R and cooperator fraction x, both in [0, 1]."""

    R: float
    x: float


def validate_params(params: ModelParams, *, allow_unnormalized: bool = False) -> ModelParams:
    """Check every parameter domain; return the params unchanged if valid.

    Raises ParamDomainError naming the violated constraint.  K != 1 is
    rejected unless ``allow_unnormalized`` is set: every quoted result in
    this package assumes the resource has been normalized to K = 1.
    """
    p = params
    if not p.T > 0:
        raise ParamDomainError(f"T must be > 0, got T={p.T}")
    if not p.K > 0:
        raise ParamDomainError(f"K must be > 0, got K={p.K}")
    if not (p.K == 1.0 or allow_unnormalized):
        raise ParamDomainError(
            f"K must equal 1 (normalized resource), got K={p.K}; "
            "pass allow_unnormalized=True to override"
        )
    if not 0.0 < p.A < p.K:
        raise ParamDomainError(f"A must satisfy 0 < A < K, got A={p.A}, K={p.K}")
    if not 0.0 < p.e_C_hat < 1.0:
        raise ParamDomainError(f"e_C_hat must satisfy 0 < e_C_hat < 1, got {p.e_C_hat}")
    if not p.e_D_hat > 1.0:
        raise ParamDomainError(f"e_D_hat must satisfy e_D_hat > 1, got {p.e_D_hat}")
    if not 0.0 < p.w <= 1.0:
        raise ParamDomainError(f"w must satisfy 0 < w <= 1, got {p.w}")
    return p


def growth_rate(R, params: ModelParams, kind: GrowthKind):
    """dR/dt from growth alone (no extraction).

    Plain logistic: T*R*(1 - R/K).  With an Allee threshold the extra
    factor (R/A - 1) makes growth negative on (0, A): T*R*(R/A - 1)*(1 - R/K).
    """
    if kind is GrowthKind.ALLEE_LOGISTIC:
        return params.T * R * (R / params.A - 1.0) * (1.0 - R / params.K)
    return params.T * R * (1.0 - R / params.K)


def extraction_rate(R, x, params: ModelParams):
    """Total harvest flow T*R*(x*e_C_hat + (1-x)*e_D_hat)."""
    return params.T * R * (x * params.e_C_hat + (1.0 - x) * params.e_D_hat)


def resource_drift(state: State, params: ModelParams, kind: GrowthKind):
    """Net dR/dt: growth minus extraction."""
    R, x = state
    return growth_rate(R, params, kind) - extraction_rate(R, x, params)


def strategy_drift(state: State, params: ModelParams, rule: StrategyRule):
    """dx/dt under the selected update rule.

    Imitation (replicator):    -w*R*x*(1-x); cooperation never grows.
    Knowledge feedback:        1 - x - step(R-A)*(R-A)/(K-A), where
                               step(y) = 0 for y < 0 and 1 for y >= 0.
    """
    R, x = state
    if rule is StrategyRule.REPLICATOR:
        return -params.w * R * x * (1.0 - x)
    # (R >= A) is exact at R == A: the threshold point sits on the upper branch
    return 1.0 - x - (R >= params.A) * ((R - params.A) / (params.K - params.A))


def coevolution_rhs(state: State, params: ModelParams, kind: GrowthKind, rule: StrategyRule):
    """(dR/dt, dx/dt) for the coupled system; pure function of the state."""
    return make_rhs(params, kind, rule)(state[0], state[1])


def make_rhs(params: ModelParams, kind: GrowthKind, rule: StrategyRule):
    """Build a specialized rhs(R, x) -> (dR, dx) closure.

    The closure captures the parameters as locals, which makes tight
    integration loops roughly 3x faster than going through the dataclass
    on every call.  It accepts floats or numpy arrays; the arithmetic is
    written once so scalar and vectorized integrations agree bitwise.
    """
    T, A, K = params.T, params.A, params.K
    eC, eD, w = params.e_C_hat, params.e_D_hat, params.w
    allee = kind is GrowthKind.ALLEE_LOGISTIC
    span = K - A

    if rule is StrategyRule.REPLICATOR:
        if allee:
            def rhs(R, x):
                dR = T * R * (R / A - 1.0) * (1.0 - R / K) - T * R * (x * eC + (1.0 - x) * eD)
                dx = -w * R * x * (1.0 - x)
                return dR, dx
        else:
            def rhs(R, x):
                dR = T * R * (1.0 - R / K) - T * R * (x * eC + (1.0 - x) * eD)
                dx = -w * R * x * (1.0 - x)
                return dR, dx
    else:
        if allee:
            def rhs(R, x):
                dR = T * R * (R / A - 1.0) * (1.0 - R / K) - T * R * (x * eC + (1.0 - x) * eD)
                dx = 1.0 - x - (R >= A) * ((R - A) / span)
                return dR, dx
        else:
            def rhs(R, x):
                dR = T * R * (1.0 - R / K) - T * R * (x * eC + (1.0 - x) * eD)
                dx = 1.0 - x - (R >= A) * ((R - A) / span)
                return dR, dx
    return rhs
