"""L1 distance between the Husimi density of the mean-field quantum flow
and the classical mean-field transport started from the same data.

The initial state is a broad Gaussian thermal state quantized from a fixed
phase-space probability density (widths sigma >> sqrt(h/2)): positive,
unit trace, with rescaled-commutator trace indicator bounded in h.  Both
solvers share the time step and the phase grid; the distance at fixed t
shrinks like sqrt(h) or faster.
"""

from __future__ import annotations

import time

import numpy as np

from ..classical import VlasovSolver
from ..grids import PhaseGrid, PositionGrid
from ..operators import DensityState, momentum_commutator, position_commutator, singular_values
from ..potentials import PotentialSpec
from ..quantum import TdhfPropagator, husimi_density, thermal_gaussian_state
from ..sweeps import SweepResult, fit_slope
from ..symbols import l1_distance


def _pot_spec(cfg: dict) -> PotentialSpec:
    return PotentialSpec.from_names(
        cfg["potential"]["preset"], cfg["interaction"]["preset"],
        {k: v for k, v in cfg["potential"].items() if k != "preset"},
        {k: v for k, v in cfg["interaction"].items() if k != "preset"})


def trace_indicator(rho: DensityState) -> float:
    op = rho.as_operator()
    tr_p = singular_values(momentum_commutator(op)).sum()
    tr_q = singular_values(position_commutator(op)).sum()
    return float((tr_p + tr_q) / rho.h)


def _cell(cfg: dict, h: float) -> tuple[list, dict]:
    t0 = time.time()
    grid = PositionGrid(**cfg["grid"])
    pg = PhaseGrid(**cfg["phase_grid"])
    pot = _pot_spec(cfg)
    rho0 = thermal_gaussian_state(grid, h, sigma=cfg["sigma"])
    i_tr = trace_indicator(rho0)

    u0 = husimi_density(rho0, pg, route="via_weyl")
    t_max = cfg["t_max"]
    xi_max = max(abs(pg.xi_min), abs(pg.xi_max))
    dt = cfg.get("dt") or min(pg.dx / (2.0 * xi_max), 1e-2)
    snaps = np.linspace(0.0, t_max, cfg["n_snapshots"] + 1)[1:]
    # integer steps per snapshot keep both solvers on identical time points
    per = max(1, int(np.ceil((snaps[0]) / dt - 1e-12)))
    dt = snaps[0] / per

    vl = VlasovSolver(u0.values, pg, pot, dt=dt)
    qm = TdhfPropagator(rho0, pot, dt=dt)
    rows = [(h, 0.0, "l1_distance", 0.0, 0.0)]
    for t_snap in snaps:
        tic = time.time()
        vl.run_until(t_snap)
        qm.run_until(t_snap)
        u_t = husimi_density(qm.state(), pg, route="via_weyl")
        d = l1_distance(u_t, vl.distribution())
        rows.append((h, float(t_snap), "l1_distance", float(d), time.time() - tic))
    state = qm.state()
    dense = DensityState(grid, h, kernel=state.kernel, validate=False)
    hygiene = {
        "trace": dense.trace(),
        "min_eig": float(dense.eigenvalues().min()),
        "mass_vlasov": float(vl.values.sum() * pg.cell_area),
    }
    meta = {"i_tr": i_tr, "dt": dt, "hygiene": hygiene,
            "cell_wall_s": time.time() - t0}
    return rows, meta


def run(cfg: dict) -> SweepResult:
    result = SweepResult("tdhf_vlasov", cfg)
    h_list = list(cfg["h_list"])
    if cfg.get("jobs", 1) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            futs = {h: pool.submit(_cell, cfg, h) for h in h_list}
            outs = {h: futs[h].result() for h in h_list}
    else:
        outs = {h: _cell(cfg, h) for h in h_list}
    metas = {}
    for h in h_list:
        rows, meta = outs[h]
        metas[h] = meta
        for row in rows:
            result.add_row(*row)
    t_max = cfg["t_max"]
    finals = [(h, r.value) for h in h_list for r in result.rows
              if r.h == h and r.metric == "l1_distance" and abs(r.t - t_max) < 1e-12]
    fit = fit_slope(finals)
    result.fits["l1_distance_at_t_max"] = fit
    zero_d = max(r.value for r in result.rows if r.t == 0.0)
    result.guards = {
        "i_tr": {str(h): metas[h]["i_tr"] for h in h_list},
        "hygiene": {str(h): metas[h]["hygiene"] for h in h_list},
    }
    tol = cfg.get("tolerances", {})
    result.add_criterion("slope_at_t1", fit.slope, tol.get("slope_min", 0.45), ">=")
    result.add_criterion("r2", fit.r2, tol.get("r2_min", 0.95), ">=")
    result.add_criterion("distance_at_t0", zero_d, tol.get("t0_max", 1e-6), "<=")
    result.extras["cell_wall_s"] = {str(h): metas[h]["cell_wall_s"] for h in h_list}
    result.extras["dt"] = {str(h): metas[h]["dt"] for h in h_list}
    return result
