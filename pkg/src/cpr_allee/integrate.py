"""Fixed-step RK4 integration of the coupled resource/strategy ODEs.

Fixed steps keep sweep costs predictable and the output deterministic.
The vector field is cheap and smooth except for the step-function kink of
the knowledge-feedback rule at R = A, where local accuracy degrades to
O(dt); the default dt keeps that error far below the test tolerances.

States are clamped to the unit square after every step and the resource
snaps to exactly 0 below ``extinct_eps``: extinction is absorbing, and the
snap prevents a tiny negative overshoot of the cubic from re-injecting
spurious growth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GrowthKind, ModelParams, State, StrategyRule, make_rhs, validate_params


class NonFiniteState(RuntimeError):
    """An integration stage produced NaN or infinity."""


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    t_max: float = 200.0
    conv_tol: float = 1e-9
    record_stride: int = 100
    extinct_eps: float = 1e-12

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.dt < self.t_max:
            raise ValueError(f"dt must be < t_max, got dt={self.dt}, t_max={self.t_max}")
        if not self.conv_tol > 0:
            raise ValueError(f"conv_tol must be > 0, got {self.conv_tol}")
        if not self.extinct_eps > 0:
            raise ValueError(f"extinct_eps must be > 0, got {self.extinct_eps}")
        if not self.record_stride >= 1:
            raise ValueError(f"record_stride must be >= 1, got {self.record_stride}")


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution: times plus matching R(t), x(t) arrays."""

    times: np.ndarray
    R: np.ndarray
    x: np.ndarray

    @property
    def final(self) -> State:
        return State(float(self.R[-1]), float(self.x[-1]))

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class SteadyStateResult:
    final: State
    converged: bool
    t_elapsed: float
    rhs_norm: float


def _advance(R, x, rhs, dt):
    """One classical RK4 stage combination (no clamping)."""
    half = 0.5 * dt
    d1R, d1x = rhs(R, x)
    d2R, d2x = rhs(R + half * d1R, x + half * d1x)
    d3R, d3x = rhs(R + half * d2R, x + half * d2x)
    d4R, d4x = rhs(R + dt * d3R, x + dt * d3x)
    Rn = R + (dt / 6.0) * (d1R + 2.0 * d2R + 2.0 * d3R + d4R)
    xn = x + (dt / 6.0) * (d1x + 2.0 * d2x + 2.0 * d3x + d4x)
    return Rn, xn


def step_rk4(state: State, params: ModelParams, kind: GrowthKind, rule: StrategyRule,
             dt: float, extinct_eps: float = 1e-12) -> State:
    """A single RK4 step, clamped to [0,1]^2 with the extinction snap."""
    rhs = make_rhs(params, kind, rule)
    R, x = state
    Rn, xn = _advance(R, x, rhs, dt)
    if not (np.isfinite(Rn) and np.isfinite(xn)):
        raise NonFiniteState(f"non-finite state after step from {state!r}")
    Rn = 0.0 if Rn < 0.0 else (1.0 if Rn > 1.0 else Rn)
    xn = 0.0 if xn < 0.0 else (1.0 if xn > 1.0 else xn)
    if Rn < extinct_eps:
        Rn = 0.0
    return State(Rn, xn)


def _run_scalar(state0, params, kind, rule, config, record):
    """Shared scalar loop behind integrate() and run_to_steady_state().

    Convergence is tested on the rhs max-norm *before* each step (the k1
    evaluation is reused for the step), so a state already at equilibrium
    converges at t = 0 and slow neutral drift along R = 0 still registers.
    """
    rhs = make_rhs(params, kind, rule)
    dt, tol, eps = config.dt, config.conv_tol, config.extinct_eps
    stride = config.record_stride
    n_steps = int(round(config.t_max / dt))
    R, x = float(state0[0]), float(state0[1])

    times, Rs, xs = [0.0], [R], [x]
    converged = False
    steps_done = 0
    norm = 0.0
    half = 0.5 * dt
    sixth = dt / 6.0
    isfinite = math.isfinite
    for k in range(n_steps):
        d1R, d1x = rhs(R, x)
        norm = max(abs(d1R), abs(d1x))
        if norm <= tol:
            converged = True
            break
        d2R, d2x = rhs(R + half * d1R, x + half * d1x)
        d3R, d3x = rhs(R + half * d2R, x + half * d2x)
        d4R, d4x = rhs(R + dt * d3R, x + dt * d3x)
        R = R + sixth * (d1R + 2.0 * d2R + 2.0 * d3R + d4R)
        x = x + sixth * (d1x + 2.0 * d2x + 2.0 * d3x + d4x)
        if not (isfinite(R) and isfinite(x)):
            raise NonFiniteState(f"non-finite state at t={(k + 1) * dt}")
        R = 0.0 if R < 0.0 else (1.0 if R > 1.0 else R)
        x = 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)
        if R < eps:
            R = 0.0
        steps_done = k + 1
        if record and steps_done % stride == 0:
            times.append(steps_done * dt)
            Rs.append(R)
            xs.append(x)
    else:
        d1R, d1x = rhs(R, x)
        norm = max(abs(d1R), abs(d1x))
        converged = norm <= tol

    t_elapsed = steps_done * dt
    if record and times[-1] != t_elapsed:
        times.append(t_elapsed)
        Rs.append(R)
        xs.append(x)
    return times, Rs, xs, State(R, x), converged, t_elapsed, norm


def integrate(state0: State, params: ModelParams, kind: GrowthKind, rule: StrategyRule,
              config: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    """Integrate from state0 until convergence or t_max; sample every
    record_stride steps, always including the final state."""
    validate_params(params)
    _check_state(state0)
    times, Rs, xs, *_ = _run_scalar(state0, params, kind, rule, config, record=True)
    return Trajectory(np.asarray(times), np.asarray(Rs), np.asarray(xs))


def run_to_steady_state(state0: State, params: ModelParams, kind: GrowthKind,
                        rule: StrategyRule,
                        config: IntegratorConfig = IntegratorConfig()) -> SteadyStateResult:
    """Integrate until the rhs max-norm drops to conv_tol (or t_max runs out).

    Non-convergence is reported, not raised.
    """
    validate_params(params)
    _check_state(state0)
    *_, final, converged, t_elapsed, norm = _run_scalar(
        state0, params, kind, rule, config, record=False)
    return SteadyStateResult(final, converged, t_elapsed, norm)


def _check_state(state):
    R, x = state
    if not (0.0 <= R <= 1.0 and 0.0 <= x <= 1.0):
        raise ValueError(f"initial state must lie in the unit square, got {state!r}")


def integrate_batch(R0, x0, rhs, config: IntegratorConfig, shrink: bool = True):
    """Vectorized steady-state integration of many initial conditions.

    ``rhs`` is a closure from make_rhs.  Arithmetic is step-for-step
    identical to the scalar loop, so per-cell results match
    run_to_steady_state exactly; a cell is frozen at the first state whose
    rhs norm is within tolerance.

    With ``shrink`` the converged cells are dropped from the working
    arrays (the fast path for big basin grids).  A closure whose captured
    parameters are themselves arrays broadcasting against the state (the
    bifurcation sweep) must pass shrink=False, which freezes via masking
    instead so the parameter arrays keep lining up with the state.

    Returns (R_final, x_final, converged) as flat arrays.
    """
    R = np.array(R0, dtype=np.float64).ravel().copy()
    x = np.array(x0, dtype=np.float64).ravel().copy()
    if R.shape != x.shape:
        raise ValueError("R0 and x0 must have the same shape")
    dt, tol, eps = config.dt, config.conv_tol, config.extinct_eps
    n_steps = int(round(config.t_max / dt))
    conv = np.zeros(R.size, dtype=bool)
    half = 0.5 * dt
    sixth = dt / 6.0

    if shrink:
        active = np.arange(R.size)
        for _ in range(n_steps):
            Ra, xa = R[active], x[active]
            d1R, d1x = rhs(Ra, xa)
            newly = np.maximum(np.abs(d1R), np.abs(d1x)) <= tol
            if newly.any():
                conv[active[newly]] = True
                keep = ~newly
                active = active[keep]
                if active.size == 0:
                    break
                Ra, xa = Ra[keep], xa[keep]
                d1R, d1x = d1R[keep], d1x[keep]
            d2R, d2x = rhs(Ra + half * d1R, xa + half * d1x)
            d3R, d3x = rhs(Ra + half * d2R, xa + half * d2x)
            d4R, d4x = rhs(Ra + dt * d3R, xa + dt * d3x)
            Rn = Ra + sixth * (d1R + 2.0 * d2R + 2.0 * d3R + d4R)
            xn = xa + sixth * (d1x + 2.0 * d2x + 2.0 * d3x + d4x)
            Rn = np.clip(Rn, 0.0, 1.0)
            xn = np.clip(xn, 0.0, 1.0)
            Rn = np.where(Rn < eps, 0.0, Rn)
            R[active] = Rn
            x[active] = xn
        if active.size:
            d1R, d1x = rhs(R[active], x[active])
            conv[active] = np.maximum(np.abs(d1R), np.abs(d1x)) <= tol
    else:
        for _ in range(n_steps):
            d1R, d1x = rhs(R, x)
            conv |= np.maximum(np.abs(d1R), np.abs(d1x)) <= tol
            if conv.all():
                break
            d2R, d2x = rhs(R + half * d1R, x + half * d1x)
            d3R, d3x = rhs(R + half * d2R, x + half * d2x)
            d4R, d4x = rhs(R + dt * d3R, x + dt * d3x)
            Rn = R + sixth * (d1R + 2.0 * d2R + 2.0 * d3R + d4R)
            xn = x + sixth * (d1x + 2.0 * d2x + 2.0 * d3x + d4x)
            Rn = np.clip(Rn, 0.0, 1.0)
            xn = np.clip(xn, 0.0, 1.0)
            Rn = np.where(Rn < eps, 0.0, Rn)
            R = np.where(conv, R, Rn)
            x = np.where(conv, x, xn)
        if not conv.all():
            d1R, d1x = rhs(R, x)
            conv |= np.maximum(np.abs(d1R), np.abs(d1x)) <= tol

    bad = ~(np.isfinite(R) & np.isfinite(x))
    if bad.any():
        raise NonFiniteState(f"non-finite terminal state at flat indices {np.nonzero(bad)[0][:5]}")
    return R, x, conv
