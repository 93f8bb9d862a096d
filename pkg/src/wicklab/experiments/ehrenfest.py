"""Sup-norm drift of the evolved Wick symbol against the flowed symbol.

For a Gaussian-symbol observable evolved in the Heisenberg picture under
H = -h^2 Lap + V, the Wick symbol tracks the initial symbol composed with
the classical flow; the sup-norm error at fixed t decays like sqrt(h)
times the rescaled commutator indicator (in practice the smooth-symbol
rate is one full power of h).  The propagation here is exact: the discrete
Hamiltonian is diagonalized once per h and conjugation phases are applied
analytically, so no time-stepping error pollutes the h-scaling.
"""

from __future__ import annotations

import time

import numpy as np
from scipy.interpolate import RectBivariateSpline

from ..classical import hamiltonian_flow
from ..grids import PhaseGrid, PositionGrid
from ..operators import QuantumOperator, regularity
from ..potentials import potential_preset
from ..quantize import weyl_quantize, wick_symbol_via_weyl
from ..sweeps import SweepResult, fit_slope


def _hamiltonian_matrix(grid: PositionGrid, h: float, Vx: np.ndarray) -> np.ndarray:
    n = grid.num_points
    F = np.fft.fft(np.eye(n), axis=0)
    Hw = np.fft.ifft((h * grid.k)[:, None] ** 2 * F, axis=0) + np.diag(Vx)
    return 0.5 * (Hw + Hw.conj().T)


def _cell(cfg: dict, h: float) -> tuple[list, dict]:
    t0 = time.time()
    grid = PositionGrid(**cfg["grid"])
    pg = PhaseGrid(**cfg["phase_grid"])
    V = potential_preset(cfg["potential"]["preset"],
                         **{k: v for k, v in cfg["potential"].items() if k != "preset"})
    s2 = cfg["symbol_width2"]
    a = weyl_quantize(lambda x, xi: np.exp(-(x ** 2 + xi ** 2) / (2.0 * s2)),
                      grid, h, hermitian_hint=True)
    i_inf = regularity(a, trace=False).i_inf

    Hw = _hamiltonian_matrix(grid, h, V(grid.x))
    evals, evecs = np.linalg.eigh(Hw)
    a_tilde = evecs.conj().T @ (a.kernel * grid.dx) @ evecs

    sig0 = wick_symbol_via_weyl(a, pg)
    ref_spline = RectBivariateSpline(pg.x, pg.xi, sig0.values.real, kx=3, ky=3)

    X, XI = pg.meshes()
    t_grid = np.linspace(0.0, cfg["t_max"], cfg["n_snapshots"])
    rows = []
    for t in t_grid:
        tic = time.time()
        if t == 0.0:
            err = 0.0
        else:
            phases = np.exp(1j * evals * t / h)
            a_t = evecs @ (phases[:, None] * a_tilde * np.conj(phases)[None, :]) @ evecs.conj().T
            op_t = QuantumOperator(a_t / grid.dx, grid, h)
            sig_t = wick_symbol_via_weyl(op_t, pg)
            fx, fxi = hamiltonian_flow(X.ravel(), XI.ravel(), t, V, dt=cfg["flow_dt"])
            ref = ref_spline(fx, fxi, grid=False).reshape(X.shape)
            err = float(np.max(np.abs(sig_t.values.real - ref)))
        wall = time.time() - tic
        rows.append((h, float(t), "sup_error", err, wall))
        if err > 0:
            rows.append((h, float(t), "normalized_error",
                         err / (np.sqrt(h) * i_inf), wall))
    meta = {"i_inf": float(i_inf), "cell_wall_s": time.time() - t0}
    return rows, meta


def run(cfg: dict) -> SweepResult:
    result = SweepResult("ehrenfest", cfg)
    h_list = list(cfg["h_list"])
    metas = {}
    if cfg.get("jobs", 1) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            futs = {h: pool.submit(_cell, cfg, h) for h in h_list}
            outs = {h: futs[h].result() for h in h_list}
    else:
        outs = {h: _cell(cfg, h) for h in h_list}
    for h in h_list:
        rows, meta = outs[h]
        metas[h] = meta
        for row in rows:
            result.add_row(*row)
    t_max = cfg["t_max"]
    finals = [(h, r.value) for h in h_list for r in result.rows
              if r.h == h and r.metric == "sup_error" and abs(r.t - t_max) < 1e-12]
    fit = fit_slope(finals)
    result.fits["sup_error_at_t_max"] = fit
    ratios = [r.value for r in result.rows if r.metric == "normalized_error"
              and abs(r.t - t_max) < 1e-12]
    spread = max(ratios) / min(ratios)
    result.guards = {"i_inf": {str(h): metas[h]["i_inf"] for h in h_list}}
    tol = cfg.get("tolerances", {})
    result.add_criterion("slope_at_t1", fit.slope, tol.get("slope_min", 0.45), ">=")
    result.add_criterion("r2", fit.r2, tol.get("r2_min", 0.95), ">=")
    result.add_criterion("normalized_spread", spread, tol.get("spread_max", 4.0), "<=")
    result.extras["cell_wall_s"] = {str(h): metas[h]["cell_wall_s"] for h in h_list}
    return result
