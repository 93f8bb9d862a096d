"""h-scaling of the Wick composition-expansion remainder.

A fixed broad Gaussian symbol is quantized and composed with a coherent
projector offset from the symbol center (a concentric arrangement would
superconverge); the normalized L1 remainder after truncating at order m
scales like h^(m/2).
"""

from __future__ import annotations

import time

import numpy as np

from ..grids import PhaseGrid, PositionGrid
from ..operators import FactoredOperator
from ..quantize import weyl_quantize, wick_symbol_direct, wick_symbol_via_weyl
from ..states import coherent_state
from ..grids import PhasePoint
from ..sweeps import SweepResult, fit_slope
from ..symbols import Symbol, wirtinger
from ..wick import composition_remainder


def _symbol_sup_derivatives(s2: float, max_order: int) -> dict:
    """Global sup norms of the holomorphic derivatives of exp(-|X|^2/2 s2)."""
    pg = PhaseGrid(-12.0, 12.0, -12.0, 12.0, 256, 256)
    X, XI = pg.meshes()
    F = Symbol(np.exp(-(X ** 2 + XI ** 2) / (2.0 * s2)).astype(complex), pg)
    out = {}
    d = F
    for order in range(1, max_order + 1):
        d = wirtinger(d, 1, conjugate=False)
        out[order] = d.linf()
    return out


def _cell(cfg: dict, h: float) -> tuple[list, dict]:
    t0 = time.time()
    grid = PositionGrid(**cfg["grid"])
    s2 = cfg["symbol_width2"]
    x0, xi0 = cfg["projector_center"]
    half = cfg["window_half"]
    a = weyl_quantize(lambda x, xi: np.exp(-(x ** 2 + xi ** 2) / (2.0 * s2)),
                      grid, h, hermitian_hint=True)
    psi = coherent_state(PhasePoint(x0, xi0), h, grid)
    v = psi.values / psi.norm()
    b = FactoredOperator(v[:, None], v[:, None], np.array([1.0 + 0j]), grid, h)
    pg = PhaseGrid(x0 - half, x0 + half, xi0 - half, xi0 + half, 96, 96)
    sig_a = wick_symbol_via_weyl(a, pg)
    sig_b = wick_symbol_direct(b, pg)
    sup = _symbol_sup_derivatives(s2, max(cfg["orders"]) + 1)
    rows = []
    for m in cfg["orders"]:
        tic = time.time()
        out = composition_remainder(a, b, m, pg, sig_a=sig_a, sig_b=sig_b,
                                    method_a="stencil", method_b="spectral")
        from ..wick import remainder_index_set

        bound = sum(h ** (alpha / 2.0) * sup[alpha] for alpha in remainder_index_set(m))
        rows.append((h, float(m), "remainder_l1", out["l1"], time.time() - tic))
        rows.append((h, float(m), "bound_rhs", bound, 0.0))
    return rows, {"cell_wall_s": time.time() - t0}


def run(cfg: dict) -> SweepResult:
    result = SweepResult("composition", cfg)
    h_list = list(cfg["h_list"])
    if cfg.get("jobs", 1) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            futs = {h: pool.submit(_cell, cfg, h) for h in h_list}
            outs = {h: futs[h].result() for h in h_list}
    else:
        outs = {h: _cell(cfg, h) for h in h_list}
    for h in h_list:
        rows, _ = outs[h]
        for row in rows:
            result.add_row(*row)
    tol = cfg.get("tolerances", {})
    for m in cfg["orders"]:
        pts = [(r.h, r.value) for r in result.rows
               if r.metric == "remainder_l1" and r.t == float(m)]
        fit = fit_slope(pts)
        result.fits[f"remainder_slope_m{m}"] = fit
        target = m / 2.0
        window = tol.get("slope_window", 0.15)
        result.add_criterion(f"slope_m{m}_low", fit.slope, target - window, ">=")
        result.add_criterion(f"slope_m{m}_high", fit.slope, target + window, "<=")
    return result
