"""Acceptance suite: one test per headline criterion, at stated tolerances.

Each test prints a PASS line on success (run with -s to see them); the
experiment-backed criteria run the same runners the CLI exposes, with the
default configurations and figures disabled.
"""

import time

import numpy as np
import pytest

from conftest import random_localized_operator
from wicklab.config import default_config
from wicklab.grids import PhaseGrid, PhasePoint, PositionGrid
from wicklab.operators import (
    DensityState,
    QuantumOperator,
    momentum_commutator,
    norms,
    position_commutator,
    singular_values,
)
from wicklab.potentials import PotentialSpec
from wicklab.quantize import (
    smooth_operator,
    weyl_quantize,
    weyl_symbol,
    wick_symbol_direct,
    wick_symbol_via_weyl,
)
from wicklab.quantum import TdhfPropagator, coherent_projector_state, free_evolve, husimi_density
from wicklab.states import coherent_overlap, coherent_state, resolution_of_identity, symmetry_apply
from wicklab.symbols import Symbol, heat_smooth
from wicklab.wick import transport_lhs, transport_rhs, transport_rhs_truncated

H_SWEEP = (0.4, 0.2, 0.1, 0.05)


def _report(name, budget_s, t0, details=""):
    elapsed = time.time() - t0
    assert elapsed < 3 * budget_s, f"{name} took {elapsed:.0f}s (budget {budget_s}s x3)"
    print(f"\nACCEPTANCE {name}: PASS ({elapsed:.0f}s) {details}")


def test_criterion_1_symbol_calculus(grid256):
    t0 = time.time()
    rng = np.random.default_rng(1)
    for h in H_SWEEP:
        # closed-form overlap against the grid inner product
        X = PhasePoint(*rng.uniform(-1.0, 1.0, 2))
        Y = PhasePoint(*rng.uniform(-1.0, 1.0, 2))
        f, g = coherent_state(X, h, grid256), coherent_state(Y, h, grid256)
        assert abs(f.inner(g) - coherent_overlap(X, Y, h)) < 1e-6
        # reflection average
        val = symmetry_apply(Y, h, f).inner(f)
        d2 = (X.x - Y.x) ** 2 + (X.xi - Y.xi) ** 2
        assert abs(val - np.exp(-d2 / h)) < 1e-6
        # completeness of the coherent family
        half = min(4.0, 0.6 * grid256.xi_nyquist(h))
        pg = PhaseGrid(X.x - 4.0, X.x + 4.0, X.xi - half, X.xi + half, 80, 80)
        assert abs(resolution_of_identity(f, h, pg) - 1.0) < 0.01
        # Wick symbol routes agree
        a = random_localized_operator(grid256, h, seed=int(100 * h), width=2.2, band=0.25)
        half_xi = min(0.25 * grid256.xi_nyquist(h) + 4 * np.sqrt(h),
                      0.7 * grid256.xi_nyquist(h))
        pgw = PhaseGrid(-5.5, 5.5, -half_xi, half_xi, 72, 72)
        direct = wick_symbol_direct(a, pgw)
        via = wick_symbol_via_weyl(a, pgw)
        assert np.max(np.abs(direct.values - via.values)) < 1e-4 * direct.linf()
        # trace pairing with Gaussian symbols inside the guarded band
        pgt = PhaseGrid(-7.0, 7.0, -1.7, 1.7, 160, 128)
        Xm, XIm = pgt.meshes()
        F = Symbol(np.exp(-Xm ** 2 / 1.6 - XIm ** 2 / 0.14), pgt)
        G = Symbol(np.exp(-(Xm - 0.5) ** 2 / 1.2 - XIm ** 2 / 0.12), pgt)
        A = weyl_quantize(F, grid256, h)
        B = weyl_quantize(G, grid256, h)
        lhs = (grid256.dx ** 2) * np.sum(A.kernel.T * B.kernel)
        rhs = pgt.cell_area * np.sum(F.values * G.values) / (2 * np.pi * h)
        assert abs(lhs.real - rhs) < 1e-4 * abs(rhs)
    _report("1 symbol-calculus identities", 60, t0)


def test_criterion_2_smoothing_operator(grid256):
    t0 = time.time()
    ratios_op, ratios_tr = [], []
    for h in H_SWEEP:
        # contraction on a random localized operator
        a = random_localized_operator(grid256, h, seed=int(1000 * h), width=2.2, band=0.3)
        sm = smooth_operator(a)
        assert norms(sm)["op"] <= norms(a)["op"] + 1e-8
        # Wick symbol of the smoothed operator is the heat-smoothed symbol
        half_xi = min(0.3 * grid256.xi_nyquist(h) + 4 * np.sqrt(h),
                      0.7 * grid256.xi_nyquist(h))
        pg = PhaseGrid(-6.5, 6.5, -half_xi, half_xi, 104, 104)
        fast = smooth_operator(a, pg=pg, method="fast")
        lhs = wick_symbol_direct(fast, pg)
        rhs = heat_smooth(wick_symbol_direct(a, pg), h)
        assert np.max(np.abs(lhs.values - rhs.values)) < 1e-4 * rhs.linf()
        # Weyl symbol of the smoothed operator equals the Wick symbol
        lhs2 = weyl_symbol(fast, pg)
        rhs2 = wick_symbol_direct(a, pg)
        assert np.max(np.abs(lhs2.values - rhs2.values)) < 1e-4 * rhs2.linf()
        # fitted constant of the commutator bound on the critical family
        proj = coherent_projector_state(grid256, h).as_operator()
        gap = proj - smooth_operator(proj)
        denom_op = (norms(momentum_commutator(proj))["op"]
                    + norms(position_commutator(proj))["op"]) / np.sqrt(h)
        denom_tr = (singular_values(momentum_commutator(proj)).sum()
                    + singular_values(position_commutator(proj)).sum()) / np.sqrt(h)
        n = norms(gap)
        ratios_op.append(n["op"] / denom_op)
        ratios_tr.append(n["tr"] / denom_tr)
    for ratios in (ratios_op, ratios_tr):
        c = float(np.mean(ratios))
        assert max(abs(r - c) for r in ratios) <= 0.25 * c, ratios
    _report("2 smoothing operator", 120, t0,
            f"C_op={np.mean(ratios_op):.3f} C_tr={np.mean(ratios_tr):.3f}")


def test_criterion_3_ehrenfest_bound():
    t0 = time.time()
    from wicklab.experiments.ehrenfest import run

    cfg = default_config("ehrenfest")
    cfg["figures"] = False
    res = run(cfg)
    crits = {c.name: c for c in res.criteria}
    assert crits["slope_at_t1"].passed, crits["slope_at_t1"].to_dict()
    assert crits["r2"].passed, crits["r2"].to_dict()
    assert crits["normalized_spread"].passed, crits["normalized_spread"].to_dict()
    _report("3 Ehrenfest bound", 900, t0,
            f"slope={crits['slope_at_t1'].value:.3f} r2={crits['r2'].value:.3f} "
            f"spread={crits['normalized_spread'].value:.2f}")


def test_criterion_4_tdhf_vlasov_bound():
    t0 = time.time()
    from wicklab.experiments.tdhf_vlasov import run

    cfg = default_config("tdhf_vlasov")
    cfg["figures"] = False
    res = run(cfg)
    crits = {c.name: c for c in res.criteria}
    assert crits["slope_at_t1"].passed, crits["slope_at_t1"].to_dict()
    assert crits["r2"].passed, crits["r2"].to_dict()
    assert crits["distance_at_t0"].passed
    i_tr = res.guards["i_tr"]
    assert max(i_tr.values()) / min(i_tr.values()) < 3.0, i_tr  # bounded in h
    _report("4 TDHF-Vlasov bound", 900, t0,
            f"slope={crits['slope_at_t1'].value:.3f} r2={crits['r2'].value:.3f} "
            f"i_tr={ {k: round(v, 3) for k, v in i_tr.items()} }")


def test_criterion_5_ehrenfest_time():
    t0 = time.time()
    from wicklab.experiments.ehrenfest_time import run

    cfg = default_config("ehrenfest_time")
    cfg["figures"] = False
    res = run(cfg)
    crits = {c.name: c for c in res.criteria}
    for name in ("heat_identity_t1", "monotone_defect", "final_distance",
                 "marginal_oracle_rel_gap"):
        assert crits[name].passed, crits[name].to_dict()
    _report("5 Ehrenfest time", 600, t0,
            f"final={crits['final_distance'].value:.3f} "
            f"heat_gap={crits['heat_identity_t1'].value:.2e}")


def test_criterion_6_counterexample():
    t0 = time.time()
    from wicklab.experiments.counterexample_run import run

    cfg = default_config("counterexample")
    cfg["figures"] = False
    res = run(cfg)
    crits = {c.name: c for c in res.criteria}
    for name in ("node_doubling_rel_change", "symbol_mass_r2",
                 "symbol_mass_tail_growth", "wick_mass_saturation"):
        assert crits[name].passed, crits[name].to_dict()
    assert -0.6 < res.fits["factor_trace_norm_slope"] < -0.4
    _report("6 counter-example", 300, t0,
            f"factor_slope={res.fits['factor_trace_norm_slope']:.3f} "
            f"saturation={crits['wick_mass_saturation'].value:.2e}")


def test_criterion_7_composition(grid256):
    t0 = time.time()
    # polynomial exactness at m = 2 for the degree-one symbol
    from wicklab.operators import position_operator
    from wicklab.wick import factored_compose, wick_compose_expand

    h = 0.3
    q = position_operator(h, grid256)
    psi = coherent_state(PhasePoint(0.2, -0.1), h, grid256)
    from wicklab.operators import FactoredOperator

    v = psi.values / psi.norm()
    b = FactoredOperator(v[:, None], v[:, None], np.array([1.0 + 0j]), grid256, h)
    pg = PhaseGrid(-3.8, 4.2, -4.1, 3.9, 80, 80)
    sig_b = wick_symbol_direct(b, pg)
    X, _ = pg.meshes()
    lhs = wick_symbol_direct(factored_compose(q, b), pg)
    out = wick_compose_expand(q, b, 2, pg, sig_a=Symbol(X.astype(complex), pg),
                              sig_b=sig_b, method_a="stencil", method_b="spectral")
    assert np.max(np.abs(lhs.values - out.values)) < 1e-6
    # h-scaling of the remainder through the experiment runner
    from wicklab.experiments.composition import run

    cfg = default_config("composition")
    cfg["figures"] = False
    res = run(cfg)
    slopes = {m: res.fits[f"remainder_slope_m{m}"].slope for m in (2, 3)}
    assert abs(slopes[2] - 1.0) <= 0.15, slopes
    assert abs(slopes[3] - 1.5) <= 0.15, slopes
    _report("7 composition calculus", 600, t0,
            f"slopes m2={slopes[2]:.3f} m3={slopes[3]:.3f}")


def test_criterion_8_wick_pde():
    t0 = time.time()
    # (a) potential-free residual shrinks under simultaneous dt, dx halving
    grid = PositionGrid(-16.0, 16.0, 512)
    h = 0.2
    rho = coherent_projector_state(grid, h)
    orb0 = rho.orbitals[:, 0]
    t_star = 0.4

    def residual_l1(dt_s, n_pg):
        pg = PhaseGrid(-3.4, 3.4, -3.4, 3.4, n_pg, n_pg)
        us = []
        for t in (t_star - dt_s, t_star, t_star + dt_s):
            orb = free_evolve(orb0, grid, h, t)
            st = DensityState(grid, h, orbitals=orb[:, None],
                              occupations=np.array([1.0]), validate=False)
            us.append(husimi_density(st, pg))
        res = transport_lhs(us[0], us[1], us[2], dt_s, h)
        return res.copy_with(np.abs(np.asarray(res.values))).l1()

    coarse = residual_l1(4e-3, 96)
    fine = residual_l1(2e-3, 192)
    assert coarse / fine >= 1.8, (coarse, fine)

    # (b) the commutator side integrates to zero (trace of a commutator)
    grid2 = PositionGrid(-8.0, 8.0, 512)
    h2 = 0.2
    pot = PotentialSpec.from_names("cosine", "gaussian_W",
                                   v_params={"a": -0.5, "b": 1.0},
                                   w_params={"c": 0.3, "s": 1.0})
    prop = TdhfPropagator(coherent_projector_state(grid2, h2, 0.6, 0.2), pot, dt=1e-3)
    prop.run_until(0.5)
    pg2 = PhaseGrid(-4.4, 5.6, -4.7, 5.0, 128, 128)
    rhs = transport_rhs(prop.state(), pot, pg2)
    assert abs(rhs.integral()) < 1e-8, rhs.integral()

    # (c) truncation-error slope for m = 3 across the h sweep
    slopes_data = {2: [], 3: []}
    for h in H_SWEEP:
        gridh = PositionGrid(-8.0, 8.0, 512)
        state0 = coherent_projector_state(gridh, h, 0.6, 0.2)
        proph = TdhfPropagator(state0, pot, dt=2.5e-4)
        dt_s = 1e-3
        times = (0.5 - dt_s, 0.5, 0.5 + dt_s)
        pgh = PhaseGrid(0.6 - 3.0, 0.6 + 3.0, 0.2 - 3.2, 0.2 + 3.0, 112, 112)
        us = []
        for t in times:
            proph.run_until(t)
            us.append(husimi_density(proph.state(), pgh))
        lhs = transport_lhs(us[0], us[1], us[2], dt_s, h)
        for m in (2, 3):
            rhs_m = transport_rhs_truncated(us[1], pot, h, m)
            diff = np.abs(np.asarray(lhs.values) - np.asarray(rhs_m.values))
            slopes_data[m].append(float(pgh.cell_area * diff.sum()))
    fit3 = np.polyfit(np.log(H_SWEEP), np.log(slopes_data[3]), 1)[0]
    assert 0.35 <= fit3 <= 0.65, (fit3, slopes_data)
    spread2 = max(slopes_data[2]) / min(slopes_data[2])
    _report("8 Wick transport PDE", 600, t0,
            f"shrink={coarse / fine:.2f} m3_slope={fit3:.3f} m2_spread={spread2:.2f}")


def test_criterion_9_propagator_hygiene():
    t0 = time.time()
    from wicklab.selftest import run_selftest

    failures = run_selftest()
    assert failures == 0
    _report("9 propagator hygiene (selftest)", 300, t0)
