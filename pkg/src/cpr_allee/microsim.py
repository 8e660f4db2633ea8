"""Finite-population stochastic counterpart of the macroscopic ODEs.

Players sit on a complete graph, so only the cooperator count matters
(individual identities are exchangeable) and a Population is just (N, n_C).
Each discrete step k applies one strategy micro-update followed by one
Euler resource update of size 1/N that reads the PRE-step cooperator
fraction; time is t = k/N, which is the scaling under which the ensemble
mean converges to the deterministic trajectories as N grows.

RNG contract: numpy PCG64 Generators.  A single realization consumes a
fixed number of uniforms per step (3 for the imitation rule, 2 for
knowledge feedback) so a seed fully determines the trajectory.  Ensemble
run i draws its generator from SeedSequence([base_seed, i]); bifurcation
initial conditions use SeedSequence([base_seed, value_index, ic_index]).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import GrowthKind, ModelParams, State, StrategyRule, resource_drift, validate_params
from .integrate import Trajectory

RNG_KIND = "numpy PCG64 (SeedSequence streams)"


class Population(NamedTuple):
    """Cooperator head-count in a well-mixed population of N players."""

    N: int
    n_C: int

    @property
    def x(self) -> float:
        return self.n_C / self.N


@dataclass(frozen=True)
class SimConfig:
    N: int = 200
    steps: int = 5000
    seed: int = 0
    record_stride: int = 1

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"N must be >= 2 (a neighbor must exist), got {self.N}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.record_stride < 1:
            raise ValueError(f"record_stride must be >= 1, got {self.record_stride}")


@dataclass(frozen=True)
class EnsembleStats:
    """Per-time mean and standard error over independent realizations."""

    times: np.ndarray
    mean_R: np.ndarray
    mean_x: np.ndarray
    sem_R: np.ndarray
    sem_x: np.ndarray
    n_runs: int
    runs: tuple  # the underlying Trajectory objects, kept for sidecar output


def replicator_switch_prob(to_defect: bool, R: float, w: float) -> float:
    """Imitation switch probability 1/2 +- (w/2) R.

    The payoff difference (U_j - U_i)/dU_max collapses to +-R, so the
    unnormalized extraction rates never enter.
    """
    return 0.5 + 0.5 * w * R if to_defect else 0.5 - 0.5 * w * R


def micro_step_replicator(pop: Population, R: float, params: ModelParams,
                          rng: np.random.Generator) -> Population:
    """One imitation update: focal copies a random neighbor's strategy
    with the payoff-biased probability.  Consumes exactly 3 uniforms."""
    N, n_C = pop
    u_focal = rng.random()
    u_neigh = rng.random()
    u_switch = rng.random()
    focal_C = u_focal < n_C / N
    neigh_C = u_neigh < (n_C - focal_C) / (N - 1)
    if focal_C == neigh_C:
        return pop
    if u_switch < replicator_switch_prob(to_defect=focal_C, R=R, w=params.w):
        return Population(N, n_C - 1 if focal_C else n_C + 1)
    return pop


def micro_step_knowledge(pop: Population, R: float, params: ModelParams,
                         rng: np.random.Generator) -> Population:
    """One knowledge-feedback update: the focal player reacts to the
    resource level alone, no neighbor involved.  Consumes 2 uniforms."""
    N, n_C = pop
    u_focal = rng.random()
    u_switch = rng.random()
    focal_C = u_focal < n_C / N
    p_defect = (R >= params.A) * ((R - params.A) / (params.K - params.A))
    if focal_C:
        if u_switch < p_defect:
            return Population(N, n_C - 1)
    else:
        if u_switch < 1.0 - p_defect:
            return Population(N, n_C + 1)
    return pop


def resource_update_discrete(R: float, x: float, params: ModelParams, N: int,
                             kind: GrowthKind, extinct_eps: float = 1e-12) -> float:
    """Euler step of size 1/N on the resource drift, clamped and snapped
    exactly like the ODE engine."""
    Rn = R + resource_drift(State(R, x), params, kind) / N
    Rn = 0.0 if Rn < 0.0 else (1.0 if Rn > 1.0 else Rn)
    return 0.0 if Rn < extinct_eps else Rn


def initial_count(x0: float, N: int) -> int:
    """round(x0*N) with ties-to-even: unbiased and deterministic."""
    n = round(x0 * N)
    if not 0 <= n <= N:
        raise ValueError(f"x0={x0} does not give a cooperator count in [0, {N}]")
    return n


def run_realization(state0: State, params: ModelParams, kind: GrowthKind,
                    rule: StrategyRule, config: SimConfig,
                    rng: np.random.Generator | None = None) -> Trajectory:
    """One stochastic realization, recorded every record_stride steps
    (t = k/N).  With the default rng the trajectory is a pure function of
    config.seed."""
    validate_params(params)
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    N = config.N
    micro = micro_step_replicator if rule is StrategyRule.REPLICATOR else micro_step_knowledge

    pop = Population(N, initial_count(state0.x, N))
    R = float(state0.R)
    times, Rs, xs = [0.0], [R], [pop.x]
    for k in range(1, config.steps + 1):
        x_prev = pop.x
        pop = micro(pop, R, params, rng)
        R = resource_update_discrete(R, x_prev, params, N, kind)
        if k % config.record_stride == 0 or k == config.steps:
            times.append(k / N)
            Rs.append(R)
            xs.append(pop.x)
    return Trajectory(np.asarray(times), np.asarray(Rs), np.asarray(xs))


def ensemble_seed(base_seed: int, run_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([base_seed, run_index])


def ensemble_stats_from_runs(runs) -> EnsembleStats:
    """Reduce stored per-run series to mean and standard error.

    SEM uses the sample standard deviation (ddof=1) over runs; the
    reduction is order-independent.
    """
    runs = tuple(runs)
    if len(runs) < 2:
        raise ValueError("need at least 2 runs for ensemble statistics")
    times = runs[0].times
    for tr in runs[1:]:
        if not np.array_equal(tr.times, times):
            raise ValueError("all runs must share the same recording times")
    n = len(runs)
    R = np.stack([tr.R for tr in runs])
    x = np.stack([tr.x for tr in runs])
    sem = np.sqrt(float(n))
    return EnsembleStats(
        times=times,
        mean_R=R.mean(axis=0),
        mean_x=x.mean(axis=0),
        sem_R=R.std(axis=0, ddof=1) / sem,
        sem_x=x.std(axis=0, ddof=1) / sem,
        n_runs=n,
        runs=runs,
    )


def run_ensemble(state0: State, params: ModelParams, kind: GrowthKind,
                 rule: StrategyRule, config: SimConfig, n_runs: int) -> EnsembleStats:
    """n_runs independent realizations with per-run generators derived
    from (config.seed, run_index)."""
    if n_runs < 2:
        raise ValueError(f"n_runs must be >= 2, got {n_runs}")
    runs = []
    for i in range(n_runs):
        rng = np.random.default_rng(ensemble_seed(config.seed, i))
        runs.append(run_realization(state0, params, kind, rule, config, rng=rng))
    return ensemble_stats_from_runs(runs)
