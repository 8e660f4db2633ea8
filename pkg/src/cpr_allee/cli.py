"""Command-line interface.

Every computation is a subcommand driven by a flat key=value config file
(`#` comments allowed, unknown keys rejected).  The effective config is
echoed verbatim into the output as `#`-prefixed metadata lines, followed
by the CSV header; numbers are written with repr(), the shortest exact
decimal form, so outputs are byte-stable and golden-file friendly.

Exit codes: 0 success, 2 config/validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .core import (GrowthKind, ModelParams, ParamDomainError, State,
                   StrategyRule, validate_params)
from .equilibria import (ExistenceRegionMismatch, NewtonRefinementError,
                         NoBoundary, knowledge_fixed_points,
                         replicator_fixed_points)
from .integrate import IntegratorConfig, NonFiniteState, integrate
from .microsim import RNG_KIND, SimConfig, run_ensemble
from .sweeps import (GridSpec, basin_grid, bifurcation_scan, compare_regions,
                     region_map)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(ValueError):
    pass


def _parse_bool(s):
    if s in ("true", "1", "yes"):
        return True
    if s in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


# key -> (parser, default or REQUIRED marker)
_REQUIRED = object()
_KEYS = {
    "T": (float, 2.0),
    "A": (float, _REQUIRED),
    "K": (float, 1.0),
    "e_C_hat": (float, _REQUIRED),
    "e_D_hat": (float, _REQUIRED),
    "w": (float, 1.0),
    "growth": (str, "allee"),
    "rule": (str, _REQUIRED),
    "R0": (float, _REQUIRED),
    "x0": (float, _REQUIRED),
    "dt": (float, 1e-3),
    "t_max": (float, 200.0),
    "conv_tol": (float, 1e-9),
    "record_stride": (int, 100),
    "extinct_eps": (float, 1e-12),
    "N": (int, 200),
    "steps": (int, 5000),
    "sim_record_stride": (int, 1),
    "n_runs": (int, 50),
    "seed": (int, 0),
    "sidecar": (str, None),
    "R0_min": (float, 0.0),
    "R0_max": (float, 1.0),
    "x0_min": (float, 0.0),
    "x0_max": (float, 1.0),
    "resolution": (int, 101),
    "A_min": (float, _REQUIRED),
    "A_max": (float, _REQUIRED),
    "e_D_min": (float, _REQUIRED),
    "e_D_max": (float, _REQUIRED),
    "sweep_param": (str, "e_D_hat"),
    "sweep_min": (float, _REQUIRED),
    "sweep_max": (float, _REQUIRED),
    "sweep_resolution": (int, 81),
    "n_ics": (int, 50),
    "out": (str, _REQUIRED),
    "threads": (int, 1),
    "quiet": (_parse_bool, False),
    "allow_unnormalized": (_parse_bool, False),
}

# keys each command consumes (beyond out/threads/quiet, shared by all)
_COMMON = ("out", "threads", "quiet")
_PARAM_KEYS = ("T", "A", "K", "e_C_hat", "e_D_hat", "w", "allow_unnormalized")
_ODE_KEYS = ("dt", "t_max", "conv_tol", "record_stride", "extinct_eps")
_CMD_KEYS = {
    "simulate": _PARAM_KEYS + _ODE_KEYS + ("growth", "rule", "R0", "x0") + _COMMON,
    "ensemble": _PARAM_KEYS + ("growth", "rule", "R0", "x0", "N", "steps",
                               "sim_record_stride", "n_runs", "seed", "sidecar") + _COMMON,
    "fixed-points": _PARAM_KEYS + ("growth", "rule") + _COMMON,
    "basin": _PARAM_KEYS + _ODE_KEYS + ("growth", "rule", "R0_min", "R0_max",
                                        "x0_min", "x0_max", "resolution") + _COMMON,
    "region": ("e_C_hat", "rule", "A_min", "A_max", "e_D_min", "e_D_max",
               "resolution") + _COMMON,
    "bifurcation": _PARAM_KEYS + _ODE_KEYS + ("growth", "rule", "sweep_param",
                                              "sweep_min", "sweep_max",
                                              "sweep_resolution", "n_ics", "seed") + _COMMON,
    "compare-regions": ("e_C_hat", "A_min", "A_max", "e_D_min", "e_D_max",
                        "resolution") + _COMMON,
}


def parse_config_text(text: str) -> dict:
    """Parse flat key=value lines; `#` lines and blanks are skipped."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        parser = _KEYS[key][0]
        try:
            raw[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return raw


def resolve_config(raw: dict, command: str, overrides: dict) -> dict:
    """Apply CLI flag overrides and defaults; require what the command needs.

    Keys valid for other commands may sit in the file (one config can
    drive a whole scenario); only the keys this command consumes are
    resolved and echoed.
    """
    cfg = dict(raw)
    used = _CMD_KEYS[command]
    for key, value in overrides.items():
        if value is not None and key in used:
            cfg[key] = value
    out = {}
    for key in used:
        _, default = _KEYS[key]
        if key in cfg:
            out[key] = cfg[key]
        elif default is _REQUIRED:
            raise ConfigError(f"missing required config key {key!r} for {command}")
        else:
            out[key] = default
    return out


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


# execution-environment keys: they never change the computed numbers, and
# leaving them out keeps outputs byte-identical across worker counts and
# output locations
_NO_ECHO = ("out", "threads", "quiet", "sidecar")


def config_echo_lines(cfg: dict) -> list[str]:
    return [f"# {k}={_fmt(v)}" for k, v in sorted(cfg.items())
            if v is not None and k not in _NO_ECHO]


def _metadata_lines(cfg, extra=()):
    lines = [f"# cpr-allee {__version__}"]
    lines += list(extra)
    lines += config_echo_lines(cfg)
    return lines


def _write_csv(path, cfg, header, rows, extra_meta=()):
    with open(path, "w", newline="") as fh:
        for line in _metadata_lines(cfg, extra_meta):
            fh.write(line + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _params_from(cfg) -> ModelParams:
    p = ModelParams(T=cfg["T"], A=cfg["A"], K=cfg["K"], e_C_hat=cfg["e_C_hat"],
                    e_D_hat=cfg["e_D_hat"], w=cfg["w"])
    return validate_params(p, allow_unnormalized=cfg.get("allow_unnormalized", False))


def _growth_from(cfg) -> GrowthKind:
    try:
        return GrowthKind(cfg["growth"])
    except ValueError:
        raise ConfigError(
            f"growth must be one of {[k.value for k in GrowthKind]}, got {cfg['growth']!r}")


def _rule_from(cfg) -> StrategyRule:
    try:
        return StrategyRule(cfg["rule"])
    except ValueError:
        raise ConfigError(
            f"rule must be one of {[r.value for r in StrategyRule]}, got {cfg['rule']!r}")


def _ode_config(cfg) -> IntegratorConfig:
    try:
        return IntegratorConfig(dt=cfg["dt"], t_max=cfg["t_max"], conv_tol=cfg["conv_tol"],
                                record_stride=cfg["record_stride"],
                                extinct_eps=cfg["extinct_eps"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(cfg):
    traj = integrate(State(cfg["R0"], cfg["x0"]), _params_from(cfg), _growth_from(cfg),
                     _rule_from(cfg), _ode_config(cfg))
    rows = zip(traj.times.tolist(), traj.R.tolist(), traj.x.tolist())
    _write_csv(cfg["out"], cfg, ("t", "R", "x"), rows)


def cmd_ensemble(cfg):
    sim = SimConfig(N=cfg["N"], steps=cfg["steps"], seed=cfg["seed"],
                    record_stride=cfg["sim_record_stride"])
    stats = run_ensemble(State(cfg["R0"], cfg["x0"]), _params_from(cfg),
                         _growth_from(cfg), _rule_from(cfg), sim, cfg["n_runs"])
    meta = (f"# rng: {RNG_KIND}; run i uses SeedSequence([seed, i])",)
    rows = zip(stats.times.tolist(), stats.mean_R.tolist(), stats.sem_R.tolist(),
               stats.mean_x.tolist(), stats.sem_x.tolist(),
               [stats.n_runs] * len(stats.times))
    _write_csv(cfg["out"], cfg, ("t", "mean_R", "sem_R", "mean_x", "sem_x", "n_runs"),
               rows, meta)
    if cfg.get("sidecar"):
        rows = ((i, cfg["seed"], t, R, x)
                for i in range(stats.n_runs)
                for t, R, x in zip(stats.runs[i].times.tolist(),
                                   stats.runs[i].R.tolist(),
                                   stats.runs[i].x.tolist()))
        _write_csv(cfg["sidecar"], cfg, ("run", "base_seed", "t", "R", "x"), rows, meta)


def cmd_fixed_points(cfg):
    params = _params_from(cfg)
    rule = _rule_from(cfg)
    kind = _growth_from(cfg)
    if rule is StrategyRule.REPLICATOR:
        pts = replicator_fixed_points(params, kind)
    else:
        pts = knowledge_fixed_points(params, kind)
    doc = {
        "version": __version__,
        "config": {k: v for k, v in sorted(cfg.items()) if v is not None},
        "fixed_points": [
            {
                "R": fp.R_star,
                "x": fp.x_star,
                "label": fp.label.value,
                "eigenvalues": [[lam.real, lam.imag] for lam in fp.eigenvalues],
                "classification": fp.classification.value,
                "residual": fp.residual,
            }
            for fp in pts
        ],
    }
    with open(cfg["out"], "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def cmd_basin(cfg):
    spec = GridSpec(R0_min=cfg["R0_min"], R0_max=cfg["R0_max"], x0_min=cfg["x0_min"],
                    x0_max=cfg["x0_max"], resolution=cfg["resolution"])
    grid = basin_grid(_params_from(cfg), _growth_from(cfg), _rule_from(cfg), spec,
                      _ode_config(cfg), threads=cfg["threads"])
    R0v, x0v = spec.R0_values, spec.x0_values
    rows = ((float(R0v[i]), float(x0v[j]), float(grid.R_star[i, j]))
            for i in range(spec.resolution) for j in range(spec.resolution))
    _write_csv(cfg["out"], cfg, ("R0", "x0", "R_star"), rows)
    if grid.predicted_boundary:
        side = _boundary_path(cfg["out"])
        _write_csv(side, cfg, ("R0", "x0"), grid.predicted_boundary)
        if not cfg["quiet"]:
            print(f"critical line written to {side}", file=sys.stderr)


def _boundary_path(out):
    stem, dot, ext = out.rpartition(".")
    return f"{stem}.boundary.{ext}" if dot else f"{out}.boundary"


def cmd_region(cfg):
    rmap = region_map(cfg["e_C_hat"], (cfg["A_min"], cfg["A_max"]),
                      (cfg["e_D_min"], cfg["e_D_max"]), cfg["resolution"],
                      _rule_from(cfg))
    rows = ((float(rmap.A_values[i]), float(rmap.e_D_values[j]), bool(rmap.bistable[i, j]))
            for i in range(len(rmap.A_values)) for j in range(len(rmap.e_D_values)))
    _write_csv(cfg["out"], cfg, ("A", "e_D_hat", "bistable"), rows)


def cmd_bifurcation(cfg):
    scan = bifurcation_scan(
        _rule_from(cfg), _params_from(cfg), cfg["sweep_param"],
        (cfg["sweep_min"], cfg["sweep_max"]), cfg["sweep_resolution"],
        cfg["n_ics"], cfg["seed"], _ode_config(cfg), kind=_growth_from(cfg),
        threads=cfg["threads"])
    meta = (f"# rng: {RNG_KIND}; ic (i, j) uses SeedSequence([seed, i, j])",)
    rows = []
    for i, v in enumerate(scan.values.tolist()):
        if np.isfinite(scan.branch_sustainable[i]):
            rows.append((v, "branch_sustainable", float(scan.branch_sustainable[i]), ""))
            rows.append((v, "branch_unstable", float(scan.branch_unstable[i]), ""))
        rows.append((v, "branch_collapse", float(scan.branch_collapse[i]), ""))
    for sp in scan.sim_points:
        rows.append((sp.param_value, "sim", sp.R_star, sp.seed))
    _write_csv(cfg["out"], cfg, ("param_value", "branch_or_sim", "R_star", "seed"),
               rows, meta)


def cmd_compare_regions(cfg):
    window = ((cfg["A_min"], cfg["A_max"]), (cfg["e_D_min"], cfg["e_D_max"]))
    rep = region_map(cfg["e_C_hat"], window[0], window[1], cfg["resolution"],
                     StrategyRule.REPLICATOR)
    kf = region_map(cfg["e_C_hat"], window[0], window[1], cfg["resolution"],
                    StrategyRule.KNOWLEDGE_FEEDBACK)
    cmp = compare_regions(rep, kf)
    doc = {
        "version": __version__,
        "config": {k: v for k, v in sorted(cfg.items()) if v is not None},
        "total_cells": cmp.total_cells,
        "replicator_bistable_cells": cmp.count_a,
        "knowledge_bistable_cells": cmp.count_b,
        "replicator_minus_knowledge": [list(c) for c in cmp.a_minus_b],
        "knowledge_minus_replicator_count": cmp.b_minus_a_count,
        "replicator_contained_in_knowledge": cmp.contained,
    }
    with open(cfg["out"], "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


_COMMANDS = {
    "simulate": cmd_simulate,
    "ensemble": cmd_ensemble,
    "fixed-points": cmd_fixed_points,
    "basin": cmd_basin,
    "region": cmd_region,
    "bifurcation": cmd_bifurcation,
    "compare-regions": cmd_compare_regions,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cpr-allee",
        description="Coevolving resource/strategy dynamics with an Allee effect")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="flat key=value config file")
        p.add_argument("--out", default=None, help="output path (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="base seed (overrides config)")
        p.add_argument("--threads", type=int, default=None, help="sweep worker count")
        p.add_argument("--quiet", action="store_true", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            raw = parse_config_text(fh.read())
        overrides = {"out": args.out, "seed": args.seed, "threads": args.threads,
                     "quiet": args.quiet}
        cfg = resolve_config(raw, args.command, overrides)
        if not cfg["quiet"]:
            print(f"cpr-allee {args.command} -> {cfg['out']}", file=sys.stderr)
        _COMMANDS[args.command](cfg)
    except (ConfigError, ParamDomainError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonFiniteState, ExistenceRegionMismatch, NewtonRefinementError,
            NoBoundary, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
