"""Hamiltonian point flow and the self-consistent Vlasov solver.

The classical Hamiltonian is H(x, xi) = xi^2 + V(x), so the equations of
motion carry a factor two in the drift:

    dx/dt = 2 xi,    dxi/dt = -V'(x).

The mean-field transport equation

    df/dt + 2 xi df/dx - d/dx[Vcl(x; f)] df/dxi = 0,
    Vcl(x; f) = V(x) + integral W(x-y) f(y, eta) dy deta,

is integrated semi-Lagrangially: backward characteristics by one
time-symmetric Verlet substep under a frozen field, cubic-spline
interpolation at the feet, and one predictor-corrector field update per
step (field re-frozen from the half-step distribution).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates

from .grids import PhaseGrid
from .potentials import Potential, PotentialSpec, convolve_interaction
from .symbols import PhaseDistribution, Symbol


class CflError(RuntimeError):
    """Departure length exceeds one cell; shrink dt."""


def hamiltonian_flow(x0, xi0, t: float, V: Potential, dt: float = 1e-3):
    """Leapfrog flow of H = xi^2 + V(x) from (x0, xi0) for time t.

    Vectorized over phase points; dt is the (positive) step, t may be
    negative.  Time-reversible; energy drift is O(dt^2) per unit time.
    """
    x = np.asarray(x0, dtype=float).copy()
    p = np.asarray(xi0, dtype=float).copy()
    if t == 0:
        return x, p
    n_steps = int(np.ceil(abs(t) / dt - 1e-12))
    if n_steps > 10 ** 6:
        raise ValueError("step count beyond 1e6; increase dt")
    step = t / n_steps
    for _ in range(n_steps):
        p -= 0.5 * step * V.deriv(x, 1)
        x += 2.0 * step * p
        p -= 0.5 * step * V.deriv(x, 1)
    return x, p


def flow_energy(x, xi, V: Potential):
    return np.asarray(xi) ** 2 + V(np.asarray(x))


def mean_field_classical(v: PhaseDistribution | Symbol, pot: PotentialSpec,
                         order: int = 0) -> np.ndarray:
    """(d/dx)^order of Vcl(x; v) = V(x) + (W * x-marginal)(x) on the pg x-nodes."""
    pg = v.pg
    marginal = np.asarray(v.values).real.sum(axis=1) * pg.dxi
    out = pot.V.deriv(pg.x, order)
    if pot.interacting:
        out = out + convolve_interaction(pot.W, marginal, pg.x, order)
    return out


@dataclass
class VlasovStepReport:
    mass: float
    min_value: float


class VlasovSolver:
    """Semi-Lagrangian integrator for the mean-field transport equation."""

    def __init__(self, values: np.ndarray, pg: PhaseGrid, pot: PotentialSpec,
                 dt: float | None = None):
        self.pg = pg
        self.pot = pot
        self.values = np.asarray(values, dtype=float).copy()
        self.t = 0.0
        xi_max = max(abs(pg.xi_min), abs(pg.xi_max))
        self.dt = dt if dt is not None else min(pg.dx / (2.0 * xi_max), 1e-2)
        self.mass0 = float(self.values.sum() * pg.cell_area)
        self.reports: list[VlasovStepReport] = []

    def _force(self, values: np.ndarray) -> np.ndarray:
        """-dVcl/dx on the pg x-nodes for the given distribution."""
        tmp = Symbol(values, self.pg)
        return -mean_field_classical(tmp, self.pot, order=1)

    def _check_cfl(self, force: np.ndarray) -> None:
        xi_max = max(abs(self.pg.xi_min), abs(self.pg.xi_max))
        if 2.0 * xi_max * self.dt > self.pg.dx * (1 + 1e-9):
            raise CflError(f"2|xi|max dt = {2 * xi_max * self.dt:.3g} > dx = {self.pg.dx:.3g}")
        if np.max(np.abs(force)) * self.dt > self.pg.dxi * (1 + 1e-9):
            raise CflError("force dt exceeds dxi")

    def _advect(self, values: np.ndarray, dt: float, force_nodes: np.ndarray) -> np.ndarray:
        """One backward-characteristic transport under a frozen field."""
        pg = self.pg
        from scipy.interpolate import CubicSpline

        force = CubicSpline(pg.x, force_nodes, extrapolate=True)
        X, XI = pg.meshes()
        # backward Verlet: run the time-symmetric step with -dt
        p_half = XI - 0.5 * dt * force(X)
        x_f = X - 2.0 * dt * p_half
        xi_f = p_half - 0.5 * dt * force(x_f)
        ix = (x_f - pg.x_min) / pg.dx
        ixi = (xi_f - pg.xi_min) / pg.dxi
        return map_coordinates(values, [ix, ixi], order=3, mode="constant", cval=0.0)

    def step(self) -> VlasovStepReport:
        f0 = self._force(self.values)
        self._check_cfl(f0)
        half = self._advect(self.values, 0.5 * self.dt, f0)
        f_mid = self._force(half)
        new = self._advect(self.values, self.dt, f_mid)
        self.values = new
        self.t += self.dt
        mass = float(new.sum() * self.pg.cell_area)
        mn = float(new.min())
        if mn < -1e-6 * max(new.max(), 1e-300):
            raise RuntimeError(f"negative undershoot {mn:.3e}")
        rep = VlasovStepReport(mass=mass, min_value=mn)
        self.reports.append(rep)
        return rep

    def run_until(self, t_end: float) -> None:
        while self.t < t_end - 1e-12:
            self.step()

    def distribution(self) -> Symbol:
        return Symbol(self.values.copy(), self.pg)
