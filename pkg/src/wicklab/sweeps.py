"""Sweep records, slope fits, and config hashing for the experiment runners."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SweepRow:
    h: float
    t: float
    metric: str
    value: float
    wall_time_s: float


@dataclass
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    n_points: int

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "r2": self.r2, "n_points": self.n_points}


def fit_slope(points) -> SlopeFit:
    """Least squares of ln(value) on ln(h); needs >= 3 positive samples."""
    import numpy as np

    pts = [(float(h), float(v)) for h, v in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points for a slope fit")
    if any(v <= 0 for _, v in pts):
        raise ValueError("slope fits need positive values")
    lx = np.log([h for h, _ in pts])
    ly = np.log([v for _, v in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(float(slope), float(intercept), float(r2), len(pts))


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass
class Criterion:
    name: str
    value: float
    threshold: float
    kind: str  # "<=", ">=", "in" handled by caller through value transforms

    @property
    def passed(self) -> bool:
        if self.kind == "<=":
            return self.value <= self.threshold
        if self.kind == ">=":
            return self.value >= self.threshold
        raise ValueError(self.kind)

    def to_dict(self) -> dict:
        return {"value": self.value, "threshold": self.threshold,
                "kind": self.kind, "passed": self.passed}


@dataclass
class SweepResult:
    scenario: str
    config: dict
    rows: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)
    guards: dict = field(default_factory=dict)
    criteria: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def add_row(self, h, t, metric, value, wall_time_s) -> None:
        self.rows.append(SweepRow(float(h), float(t), str(metric), float(value),
                                  float(wall_time_s)))

    def add_criterion(self, name, value, threshold, kind) -> None:
        self.criteria.append(Criterion(name, float(value), float(threshold), kind))

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.criteria)

    @property
    def hash(self) -> str:
        return config_hash(self.config)

    def summary_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "config": self.config,
            "config_sha256": self.hash,
            "guards": self.guards,
            "fits": {k: (v.to_dict() if isinstance(v, SlopeFit) else v)
                     for k, v in self.fits.items()},
            "criteria": {c.name: c.to_dict() for c in self.criteria},
            "all_pass": self.all_pass,
            "extras": self.extras,
        }
