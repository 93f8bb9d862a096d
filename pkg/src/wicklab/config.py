"""Experiment configuration: defaults, JSON loading, and pre-run guards.

A configuration is a flat JSON document; unknown keys are rejected.  Guard
validation (momentum aliasing, CFL, coverage margins) runs before any
compute is spent.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grids import ALIAS_GUARD, PhaseGrid, PositionGrid


class ConfigError(ValueError):
    pass


COMMON_KEYS = {
    "scenario", "grid", "phase_grid", "h_list", "t_max", "dt", "n_snapshots",
    "potential", "interaction", "out_dir", "jobs", "figures", "tolerances",
}

SCENARIO_KEYS = {
    "ehrenfest": {"symbol_width2", "flow_dt"},
    "tdhf_vlasov": {"sigma"},
    "ehrenfest_time": {"h", "state_center"},
    "counterexample": {"alpha", "quad", "radii", "slope_lambdas", "fine_grid"},
    "composition": {"symbol_width2", "orders", "projector_center", "window_half"},
    "selftest": set(),
}


def default_config(scenario: str) -> dict:
    base = {
        "scenario": scenario,
        "h_list": [0.4, 0.2, 0.1, 0.05],
        "out_dir": "out",
        "jobs": 1,
        "figures": True,
        "tolerances": {},
    }
    if scenario == "ehrenfest":
        base.update({
            "grid": {"x_min": -8.0, "x_max": 8.0, "num_points": 1024},
            "phase_grid": {"x_min": -5.0, "x_max": 5.0, "xi_min": -5.0,
                           "xi_max": 5.0, "nx": 128, "nxi": 128},
            "t_max": 1.0,
            "n_snapshots": 5,
            # a = 0.5 keeps the flow constant C(t) small enough that the
            # desk-scale h sweep sits in the sqrt(h) asymptotic regime
            "potential": {"preset": "cosine", "a": 0.5, "b": 1.0},
            "interaction": {"preset": "zero"},
            "symbol_width2": 1.0,
            "flow_dt": 1e-3,
        })
    elif scenario == "tdhf_vlasov":
        base.update({
            "grid": {"x_min": -8.0, "x_max": 8.0, "num_points": 1024},
            "phase_grid": {"x_min": -8.0, "x_max": 8.0, "xi_min": -6.4,
                           "xi_max": 6.4, "nx": 256, "nxi": 256},
            "t_max": 1.0,
            "dt": None,
            "n_snapshots": 4,
            # a < 0 puts the cosine well at the origin: the broad state stays
            # confined over the horizon instead of streaming off the hill
            "potential": {"preset": "cosine", "a": -0.5, "b": 1.0},
            "interaction": {"preset": "gaussian_W", "c": 0.5, "s": 1.0},
            "sigma": 1.0,
        })
    elif scenario == "ehrenfest_time":
        base.update({
            "grid": {"x_min": -48.0, "x_max": 48.0, "num_points": 2048},
            "phase_grid": {"x_min": -40.0, "x_max": 40.0, "xi_min": -3.2,
                           "xi_max": 3.2, "nx": 512, "nxi": 96},
            "h": 0.5,
            "h_list": [0.5],
            "t_max": 8.0,
            "n_snapshots": 16,
            "potential": {"preset": "zero"},
            "interaction": {"preset": "zero"},
            "state_center": [0.0, 0.0],
        })
    elif scenario == "counterexample":
        base.update({
            "grid": {"x_min": -36.0, "x_max": 36.0, "num_points": 1024},
            "fine_grid": {"x_min": -36.0, "x_max": 36.0, "num_points": 2048},
            "h_list": [1.0],
            "alpha": 1.0,
            "quad": {"lam_min": 1e-3, "lam_max": 30.0, "n_nodes": 200},
            "radii": [2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
            "slope_lambdas": list(np.geomspace(0.01, 0.2, 8)),
        })
    elif scenario == "composition":
        base.update({
            "grid": {"x_min": -8.0, "x_max": 8.0, "num_points": 1024},
            "symbol_width2": 4.0,
            "orders": [2, 3],
            "projector_center": [1.6, 1.2],
            "window_half": 3.4,
        })
    elif scenario == "selftest":
        pass
    else:
        raise ConfigError(f"unknown scenario {scenario!r}")
    return base


def validate_config(cfg: dict) -> None:
    scenario = cfg.get("scenario")
    if scenario not in SCENARIO_KEYS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    allowed = COMMON_KEYS | SCENARIO_KEYS[scenario]
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    h_list = cfg.get("h_list", [])
    if h_list:
        if any(not 0 < h <= 1 for h in h_list):
            raise ConfigError("h values must lie in (0, 1]")
        if list(h_list) != sorted(h_list, reverse=True):
            raise ConfigError("h_list must be descending")
    if "grid" in cfg and "phase_grid" in cfg and h_list:
        grid = PositionGrid(**cfg["grid"])
        pg = PhaseGrid(**cfg["phase_grid"])
        for h in h_list:
            bound = ALIAS_GUARD * grid.xi_nyquist(h)
            worst = max(abs(pg.xi_min), abs(pg.xi_max))
            if worst > bound * (1 + 1e-12):
                raise ConfigError(
                    f"alias guard fails at h = {h}: phase grid reaches "
                    f"|xi| = {worst:.3g} > {bound:.3g}")
    if scenario == "tdhf_vlasov" and "phase_grid" in cfg:
        pg = PhaseGrid(**cfg["phase_grid"])
        xi_max = max(abs(pg.xi_min), abs(pg.xi_max))
        dt = cfg.get("dt") or min(pg.dx / (2 * xi_max), 1e-2)
        if 2 * xi_max * dt > pg.dx * (1 + 1e-9):
            raise ConfigError("CFL guard fails: 2 |xi|max dt > dx")


def load_config(path: str | Path) -> dict:
    with open(path) as fh:
        cfg = json.load(fh)
    if "scenario" not in cfg:
        raise ConfigError("config must name a scenario")
    merged = default_config(cfg["scenario"])
    unknown = set(cfg) - set(merged) - SCENARIO_KEYS[cfg["scenario"]] - COMMON_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    merged.update(cfg)
    validate_config(merged)
    return merged
