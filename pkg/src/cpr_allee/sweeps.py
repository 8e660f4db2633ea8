"""Gridded computations: basin-of-attraction grids, bi-stability region
maps, region containment comparison, and bifurcation scans.

Everything here is embarrassingly parallel and deterministically seeded:
each cell's work is a function of its index alone, so the assembled output
is byte-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .core import GrowthKind, ModelParams, StrategyRule, make_rhs, validate_params
from .equilibria import (NoBoundary, critical_line_x0, knowledge_bistable_ok,
                         replicator_bistable_ok, replicator_bistable_threshold,
                         _refine_resource_root)
from .integrate import IntegratorConfig, NonFiniteState, integrate_batch


class AxisMismatch(ValueError):
    """Two region maps do not share identical axes."""


@dataclass(frozen=True)
class GridSpec:
    R0_min: float = 0.0
    R0_max: float = 1.0
    x0_min: float = 0.0
    x0_max: float = 1.0
    resolution: int = 101

    def __post_init__(self):
        if not (self.R0_min < self.R0_max and self.x0_min < self.x0_max):
            raise ValueError("grid axis min must be < max")
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2")

    @property
    def R0_values(self):
        return np.linspace(self.R0_min, self.R0_max, self.resolution)

    @property
    def x0_values(self):
        return np.linspace(self.x0_min, self.x0_max, self.resolution)


@dataclass(frozen=True)
class BasinGrid:
    """Terminal resource level per initial condition.

    R_star[i, j] is the steady state reached from (R0_values[i], x0_values[j]).
    predicted_boundary holds (R0, x0) points of the analytic critical line
    (imitation rule only, where it exists).
    """

    spec: GridSpec
    R_star: np.ndarray
    predicted_boundary: tuple | None


@dataclass(frozen=True)
class RegionMap:
    A_values: np.ndarray
    e_D_values: np.ndarray
    e_C_hat: float
    rule: StrategyRule
    bistable: np.ndarray  # bool, [i_A, j_eD]


@dataclass(frozen=True)
class RegionComparison:
    total_cells: int
    count_a: int
    count_b: int
    a_minus_b: tuple  # (A, e_D_hat) cells bistable in a but not b
    b_minus_a_count: int
    contained: bool  # a subset-of b cellwise


@dataclass(frozen=True)
class SimPoint:
    param_value: float
    R0: float
    x0: float
    seed: int
    R_star: float


@dataclass(frozen=True)
class BifurcationScan:
    param_name: str
    values: np.ndarray
    branch_sustainable: np.ndarray  # NaN where absent
    branch_unstable: np.ndarray     # NaN where absent
    branch_collapse: np.ndarray     # always 0
    sim_points: tuple  # SimPoint


def _chunked_batch(R0_flat, x0_flat, rhs_for_slice, config, threads, shrink=True):
    """integrate_batch over index chunks; chunking never changes results
    because every cell's arithmetic is elementwise.

    ``rhs_for_slice(lo, hi)`` builds the rhs closure for a flat-index
    slice, which lets array-parameter sweeps hand each chunk its matching
    parameter slice.
    """
    n = R0_flat.size
    if threads <= 1 or n < 2 * threads:
        return integrate_batch(R0_flat, x0_flat, rhs_for_slice(0, n), config, shrink=shrink)
    bounds = np.linspace(0, n, threads + 1).astype(int)
    chunks = [(int(bounds[i]), int(bounds[i + 1]))
              for i in range(threads) if bounds[i] < bounds[i + 1]]
    Rf = np.empty(n)
    xf = np.empty(n)
    conv = np.empty(n, dtype=bool)

    def work(lo_hi):
        lo, hi = lo_hi
        out = integrate_batch(R0_flat[lo:hi], x0_flat[lo:hi],
                              rhs_for_slice(lo, hi), config, shrink=shrink)
        return lo, hi, out

    with ThreadPoolExecutor(max_workers=threads) as pool:
        for lo, hi, (r, xx, cv) in pool.map(work, chunks):
            Rf[lo:hi] = r
            xf[lo:hi] = xx
            conv[lo:hi] = cv
    return Rf, xf, conv


def basin_grid(params: ModelParams, kind: GrowthKind, rule: StrategyRule,
               spec: GridSpec = GridSpec(),
               integrator_config: IntegratorConfig = IntegratorConfig(),
               threads: int = 1) -> BasinGrid:
    """Steady-state terminal R for every (R0, x0) grid cell."""
    validate_params(params)
    R0v, x0v = spec.R0_values, spec.x0_values
    Rg, xg = np.meshgrid(R0v, x0v, indexing="ij")
    rhs = make_rhs(params, kind, rule)
    try:
        Rf, _, _ = _chunked_batch(Rg.ravel(), xg.ravel(), lambda lo, hi: rhs,
                                  integrator_config, threads)
    except NonFiniteState as exc:
        raise NonFiniteState(f"basin grid cell failed ({spec!r}): {exc}") from exc
    R_star = Rf.reshape(spec.resolution, spec.resolution)
    bad = ~np.isfinite(R_star)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NonFiniteState(
            f"non-finite terminal state at cell (R0={R0v[i]}, x0={x0v[j]})")

    boundary = None
    if rule is StrategyRule.REPLICATOR:
        try:
            pts = []
            for R0 in R0v:
                x0 = critical_line_x0(float(R0), params)
                if 0.0 <= x0 <= 1.0:
                    pts.append((float(R0), float(x0)))
            boundary = tuple(pts)
        except NoBoundary:
            boundary = None
    return BasinGrid(spec=spec, R_star=R_star, predicted_boundary=boundary)


def region_map(e_C_hat: float, A_range: tuple[float, float],
               e_D_range: tuple[float, float], resolution: int,
               rule: StrategyRule) -> RegionMap:
    """Evaluate the analytic bi-stability predicate on an (A, e_D_hat) grid.

    No integration: each cell is exactly the corresponding predicate.
    """
    A_values = np.linspace(A_range[0], A_range[1], resolution)
    e_D_values = np.linspace(e_D_range[0], e_D_range[1], resolution)
    Ag, eDg = np.meshgrid(A_values, e_D_values, indexing="ij")
    if rule is StrategyRule.REPLICATOR:
        mask = replicator_bistable_ok(Ag, eDg)
    else:
        mask = knowledge_bistable_ok(Ag, e_C_hat, eDg)
    return RegionMap(A_values=A_values, e_D_values=e_D_values,
                     e_C_hat=e_C_hat, rule=rule, bistable=mask)


def compare_regions(map_a: RegionMap, map_b: RegionMap) -> RegionComparison:
    """Cellwise containment report: is map_a's bistable set inside map_b's?"""
    if (map_a.bistable.shape != map_b.bistable.shape
            or not np.array_equal(map_a.A_values, map_b.A_values)
            or not np.array_equal(map_a.e_D_values, map_b.e_D_values)):
        raise AxisMismatch("region maps must share identical (A, e_D_hat) axes")
    a, b = map_a.bistable, map_b.bistable
    only_a = a & ~b
    ii, jj = np.nonzero(only_a)
    cells = tuple((float(map_a.A_values[i]), float(map_a.e_D_values[j]))
                  for i, j in zip(ii, jj))
    return RegionComparison(
        total_cells=int(a.size),
        count_a=int(a.sum()),
        count_b=int(b.sum()),
        a_minus_b=cells,
        b_minus_a_count=int((b & ~a).sum()),
        contained=not cells,
    )


def _ic_seed(base_seed: int, value_index: int, ic_index: int) -> int:
    """Single deterministic integer recorded in output; feeding it to
    default_rng reproduces the initial-condition draw."""
    ss = np.random.SeedSequence([base_seed, value_index, ic_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _draw_ic(seed: int) -> tuple[float, float]:
    # uniform on (0.01, 0.99)^2: never start exactly on an invariant boundary
    rng = np.random.default_rng(seed)
    u = rng.random(2)
    return 0.01 + 0.98 * float(u[0]), 0.01 + 0.98 * float(u[1])


def bifurcation_scan(rule: StrategyRule, params: ModelParams, swept: str,
                     value_range: tuple[float, float], resolution: int,
                     n_ics: int, base_seed: int,
                     integrator_config: IntegratorConfig = IntegratorConfig(),
                     kind: GrowthKind = GrowthKind.ALLEE_LOGISTIC,
                     threads: int = 1) -> BifurcationScan:
    """Analytic equilibrium branches plus simulated terminal states.

    ``swept`` is "e_D_hat" (A fixed) or "A" (e_D_hat fixed).  The analytic
    branches are always the x=0 resource roots of the imitation model
    (stable sustainable / unstable / stable collapse); the rule argument
    only selects the dynamics the random initial conditions are integrated
    under.  Simulated points carry their (IC, seed) provenance.
    """
    if swept not in ("e_D_hat", "A"):
        raise ValueError(f"swept must be 'e_D_hat' or 'A', got {swept!r}")
    validate_params(params)
    values = np.linspace(value_range[0], value_range[1], resolution)

    sustainable = np.full(resolution, np.nan)
    unstable = np.full(resolution, np.nan)
    collapse = np.zeros(resolution)
    per_value_params = []
    for i, v in enumerate(values):
        p = replace(params, **{swept: float(v)})
        validate_params(p)
        per_value_params.append(p)
        disc = (p.K - p.A) ** 2 - 4.0 * p.A * p.K * p.e_D_hat
        if disc >= 0.0:
            root = np.sqrt(disc)
            unstable[i] = _refine_resource_root(
                0.5 * (p.K + p.A - root), p.e_D_hat, p)
            sustainable[i] = _refine_resource_root(
                0.5 * (p.K + p.A + root), p.e_D_hat, p)

    # one flat batch over (value, ic): the swept parameter broadcasts
    # through the rhs closure as an array
    seeds = np.array([[_ic_seed(base_seed, i, j) for j in range(n_ics)]
                      for i in range(resolution)], dtype=np.uint64)
    R0 = np.empty((resolution, n_ics))
    x0 = np.empty((resolution, n_ics))
    for i in range(resolution):
        for j in range(n_ics):
            R0[i, j], x0[i, j] = _draw_ic(int(seeds[i, j]))
    swept_grid = np.repeat(values, n_ics)

    def rhs_for_slice(lo, hi):
        return make_rhs(replace(params, **{swept: swept_grid[lo:hi]}), kind, rule)

    Rf, _, _ = _chunked_batch(R0.ravel(), x0.ravel(), rhs_for_slice,
                              integrator_config, threads, shrink=False)
    Rf = Rf.reshape(resolution, n_ics)

    sims = tuple(
        SimPoint(param_value=float(values[i]), R0=float(R0[i, j]), x0=float(x0[i, j]),
                 seed=int(seeds[i, j]), R_star=float(Rf[i, j]))
        for i in range(resolution) for j in range(n_ics))
    return BifurcationScan(
        param_name=swept, values=values,
        branch_sustainable=sustainable, branch_unstable=unstable,
        branch_collapse=collapse, sim_points=sims)
