"""Coevolving common-pool resource / strategy dynamics with an Allee effect.

Public surface: model definitions (core), deterministic integration
(integrate), finite-population simulation (microsim), fixed points and
stability (equilibria), and gridded sweeps (sweeps).  The `cpr-allee`
console script exposes everything as subcommands with CSV/JSON output.
"""

__version__ = "0.1.0"

from .core import (GrowthKind, ModelParams, ParamDomainError, State,
                   StrategyRule, coevolution_rhs, growth_rate, resource_drift,
                   strategy_drift, validate_params)
from .equilibria import (BistabilityReport, BranchCrossingError,
                         Classification, ExistenceRegionMismatch, FixedPoint,
                         Label, NoBoundary, critical_line_x0,
                         knowledge_bistable, knowledge_fixed_points,
                         numeric_jacobian, replicator_bistable,
                         replicator_fixed_points)
from .integrate import (IntegratorConfig, NonFiniteState, SteadyStateResult,
                        Trajectory, integrate, run_to_steady_state, step_rk4)
from .microsim import (EnsembleStats, Population, SimConfig,
                       micro_step_knowledge, micro_step_replicator,
                       resource_update_discrete, run_ensemble, run_realization)
from .sweeps import (AxisMismatch, BasinGrid, BifurcationScan, GridSpec,
                     RegionMap, basin_grid, bifurcation_scan, compare_regions,
                     region_map)

__all__ = [
    "__version__",
    "GrowthKind", "ModelParams", "ParamDomainError", "State", "StrategyRule",
    "coevolution_rhs", "growth_rate", "resource_drift", "strategy_drift",
    "validate_params",
    "BistabilityReport", "BranchCrossingError", "Classification",
    "ExistenceRegionMismatch", "FixedPoint", "Label", "NoBoundary",
    "critical_line_x0", "knowledge_bistable", "knowledge_fixed_points",
    "numeric_jacobian", "replicator_bistable", "replicator_fixed_points",
    "IntegratorConfig", "NonFiniteState", "SteadyStateResult", "Trajectory",
    "integrate", "run_to_steady_state", "step_rk4",
    "EnsembleStats", "Population", "SimConfig", "micro_step_knowledge",
    "micro_step_replicator", "resource_update_discrete", "run_ensemble",
    "run_realization",
    "AxisMismatch", "BasinGrid", "BifurcationScan", "GridSpec", "RegionMap",
    "basin_grid", "bifurcation_scan", "compare_regions", "region_map",
]
