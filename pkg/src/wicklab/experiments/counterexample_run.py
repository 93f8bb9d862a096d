"""Diagnostics for the trace-class operator with a non-integrable symbol.

Three tables: quadrature self-convergence of the trace norm under node
doubling, the logarithmic growth of the plain-symbol ball masses (no
saturation out to R = 64), and the saturation of the Wick-symbol ball
masses by R = 32.
"""

from __future__ import annotations

import time

import numpy as np

from ..counterexample import (
    QuadratureSpec,
    assemble_operator,
    ball_masses,
    symbol_ball_masses,
)
from ..grids import PhaseGrid, PositionGrid
from ..operators import norms
from ..quantize import weyl_symbol, wick_symbol_at
from ..symbols import heat_smooth
from ..sweeps import SweepResult


def run(cfg: dict) -> SweepResult:
    t_start = time.time()
    result = SweepResult("counterexample", cfg)
    alpha = cfg["alpha"]
    quad = QuadratureSpec(lam_min=cfg["quad"]["lam_min"],
                          lam_max=cfg["quad"]["lam_max"],
                          n_nodes=cfg["quad"]["n_nodes"])
    grid = PositionGrid(**cfg["grid"])

    # per-node trace norms over the stated window: O(lam^{-1/2}) slope
    lam_list = [float(v) for v in cfg["slope_lambdas"]]
    trn = []
    from ..counterexample import gaussian_factor_kernel

    for lam in lam_list:
        tic = time.time()
        sv = np.linalg.svd(gaussian_factor_kernel(grid, lam) * grid.dx, compute_uv=False)
        trn.append(float(sv.sum()))
        result.add_row(1.0, lam, "factor_trace_norm", trn[-1], time.time() - tic)
    lam_slope = float(np.polyfit(np.log(lam_list), np.log(trn), 1)[0])
    result.fits["factor_trace_norm_slope"] = lam_slope

    # quadrature self-convergence under node doubling
    tic = time.time()
    p_base = assemble_operator(grid, alpha, quad)
    tr_base = norms(p_base)["tr"]
    result.add_row(1.0, quad.n_nodes, "operator_trace_norm", tr_base, time.time() - tic)
    tic = time.time()
    quad2 = QuadratureSpec(quad.lam_min, quad.lam_max, 2 * quad.n_nodes)
    tr_dbl = norms(assemble_operator(grid, alpha, quad2))["tr"]
    result.add_row(1.0, quad2.n_nodes, "operator_trace_norm", tr_dbl, time.time() - tic)
    rel_change = abs(tr_base - tr_dbl) / tr_dbl

    # plain-symbol ball masses (closed-form symbol, direct 2-D quadrature)
    radii = [float(r) for r in cfg["radii"]]
    p_masses = symbol_ball_masses(alpha, radii)
    for R, m in zip(radii, p_masses):
        result.add_row(1.0, R, "symbol_ball_mass", m, 0.0)
    fitp = np.polyfit(np.log(radii), p_masses, 1)
    resid = p_masses - np.polyval(fitp, np.log(radii))
    r2 = 1.0 - float(np.sum(resid ** 2) / np.sum((p_masses - p_masses.mean()) ** 2))
    result.fits["symbol_mass_log_fit"] = {"slope": float(fitp[0]), "r2": r2}
    growth_tail = (p_masses[-1] - p_masses[-2]) / (p_masses[-2] - p_masses[-3])

    # Wick-symbol ball masses from the assembled operator on the finer grid
    tic = time.time()
    fine = PositionGrid(**cfg["fine_grid"])
    p_fine = assemble_operator(fine, alpha, quad)
    sig = weyl_symbol(p_fine)
    wick = heat_smooth(sig, 1.0)
    wick_radii = [R for R in radii if R <= 32.0]
    masses = ball_masses(wick.values, wick.pg, wick_radii)
    for R, m in zip(wick_radii, masses):
        result.add_row(1.0, R, "wick_ball_mass", m, 0.0)
    sat = (masses[-1] - masses[-2]) / masses[-1]
    result.extras["wick_wall_s"] = time.time() - tic

    # spot-check the smoothed-symbol route against direct coherent averages
    rng = np.random.default_rng(11)
    pts_x = rng.uniform(-6, 6, 24)
    pts_xi = rng.uniform(-6, 6, 24)
    direct = wick_symbol_at(p_fine, pts_x, pts_xi)
    from ..symbols import trig_resample

    via_x = trig_resample(wick.values, wick.pg.x_min, wick.pg.dx, pts_x, axis=0)
    via = np.array([trig_resample(via_x[i:i + 1, :], wick.pg.xi_min, wick.pg.dxi,
                                  np.array([pts_xi[i]]), axis=1)[0, 0]
                    for i in range(len(pts_x))])
    route_gap = float(np.max(np.abs(direct - via)) / np.max(np.abs(direct)))
    result.guards["wick_route_spot_check"] = route_gap

    tol = cfg.get("tolerances", {})
    result.add_criterion("node_doubling_rel_change", rel_change,
                         tol.get("doubling_max", 1e-3), "<=")
    result.add_criterion("symbol_mass_r2", r2, tol.get("r2_min", 0.99), ">=")
    result.add_criterion("symbol_mass_tail_growth", growth_tail,
                         tol.get("tail_growth_min", 0.5), ">=")
    result.add_criterion("wick_mass_saturation", sat, tol.get("saturation_max", 1e-3), "<=")
    result.add_criterion("wick_route_spot_check", route_gap, tol.get("route_max", 1e-4), "<=")
    result.extras["wall_s"] = time.time() - t_start
    return result
