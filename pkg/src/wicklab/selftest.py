"""Reduced-size invariant battery: every module exercised in minutes.

Each check prints one PASS/FAIL line; the runner returns the number of
failures (the CLI exits nonzero on any).
"""

from __future__ import annotations

import time

import numpy as np


def _check(name, fn, failures):
    tic = time.time()
    try:
        fn()
        print(f"PASS  {name}  ({time.time() - tic:.1f}s)")
    except Exception as exc:  # noqa: BLE001 - report and count every failure
        failures.append(name)
        print(f"FAIL  {name}: {exc}  ({time.time() - tic:.1f}s)")


def run_selftest() -> int:
    from .grids import PhaseGrid, PhasePoint, PositionGrid
    from .operators import DensityState, QuantumOperator, identity_operator, norms
    from .potentials import PotentialSpec
    from .quantize import smooth_operator, weyl_quantize, weyl_symbol, wick_symbol_direct
    from .quantum import TdhfPropagator, apply_split_step, coherent_projector_state, husimi_density
    from .classical import VlasovSolver
    from .states import coherent_overlap, coherent_state, heisenberg_translate, symmetry_apply
    from .symbols import Symbol, heat_smooth, l1_distance
    from .sweeps import fit_slope

    failures: list[str] = []
    grid = PositionGrid(-8.0, 8.0, 256)
    h = 0.25

    def overlap_identity():
        f = coherent_state(PhasePoint(0.2, -0.4), h, grid)
        g = coherent_state(PhasePoint(-0.5, 0.3), h, grid)
        gap = abs(f.inner(g) - coherent_overlap(PhasePoint(0.2, -0.4),
                                                PhasePoint(-0.5, 0.3), h))
        assert gap < 1e-6, gap

    def translation_group():
        psi = coherent_state(PhasePoint(0.0, 0.0), h, grid)
        X, Y = PhasePoint(0.6, -0.2), PhasePoint(-0.3, 0.5)
        lhs = heisenberg_translate(X, h, heisenberg_translate(Y, h, psi))
        phase = np.exp(0.5j * (Y.x * X.xi - X.x * Y.xi) / h)
        rhs = heisenberg_translate(PhasePoint(X.x + Y.x, X.xi + Y.xi), h, psi)
        assert np.max(np.abs(lhs.values - phase * rhs.values)) < 1e-8
        assert abs(lhs.norm() - 1.0) < 1e-8

    def reflection_average():
        X, Y = PhasePoint(0.25, -0.25), PhasePoint(-0.25, 0.5)
        psi = coherent_state(X, h, grid)
        val = symmetry_apply(Y, h, psi).inner(psi)
        d2 = (X.x - Y.x) ** 2 + (X.xi - Y.xi) ** 2
        assert abs(val - np.exp(-d2 / h)) < 1e-6

    def quantize_round_trip():
        pg = PhaseGrid(-7.5, 7.5, -6.0, 6.0, 96, 96)
        X, XI = pg.meshes()
        F = Symbol(np.exp(-(X ** 2 + XI ** 2) / 1.6), pg)
        a = weyl_quantize(F, grid, h)
        back = weyl_symbol(a, pg)
        assert np.max(np.abs(back.values - F.values)) < 1e-6

    def wick_routes():
        rho = coherent_projector_state(grid, h, 0.3, -0.2)
        pg = PhaseGrid(-2.7, 3.3, -3.2, 2.8, 64, 64)
        u = husimi_density(rho, pg)
        assert abs(u.mass() - 1.0) < 1e-4
        assert u.values.min() > -1e-10
        via = husimi_density(rho, pg, route="via_weyl")
        assert np.max(np.abs(u.values - via.values)) < 1e-4 * u.values.max()

    def smoothing_contraction():
        rng = np.random.default_rng(0)
        raw = rng.standard_normal((256, 256)) + 1j * rng.standard_normal((256, 256))
        env = np.exp(-(grid.x / 2.2) ** 4)
        K = env[:, None] * (raw + raw.conj().T) * env[None, :]
        a = QuantumOperator(K, grid, h)
        sm = smooth_operator(a)
        assert norms(sm)["op"] <= norms(a)["op"] + 1e-8
        ident = identity_operator(grid, h)
        assert np.max(np.abs(smooth_operator(ident).kernel - ident.kernel)) * grid.dx < 1e-8

    def vlasov_free_transport():
        pg = PhaseGrid(-8.0, 8.0, -3.0, 3.0, 192, 64)
        X, XI = pg.meshes()
        vals = np.exp(-(X ** 2) / 1.28 - (XI ** 2) / 0.5)
        vals /= vals.sum() * pg.cell_area
        pot = PotentialSpec.from_names("zero", "zero")
        solver = VlasovSolver(vals.copy(), pg, pot, dt=pg.dx / 6.0)
        for _ in range(60):
            solver.step()
        t = solver.t
        ref = np.exp(-((X - 2 * t * XI) ** 2) / 1.28 - (XI ** 2) / 0.5)
        ref /= ref.sum() * pg.cell_area
        assert np.max(np.abs(solver.values - ref)) < 1e-4 * ref.max()
        assert abs(solver.values.sum() * pg.cell_area - 1.0) < 1e-4

    def propagator_hygiene():
        pot = PotentialSpec.from_names("cosine", "gaussian_W",
                                       w_params={"c": 0.4, "s": 1.0})
        f1 = coherent_state(PhasePoint(-1.0, 0.2), h, grid).values
        f2 = coherent_state(PhasePoint(1.0, -0.3), h, grid).values
        o = grid.dx * np.sum(f2 * np.conj(f1))
        f2 = f2 - o * f1
        f2 /= np.sqrt(grid.dx * np.sum(np.abs(f2) ** 2))
        rho = DensityState(grid, h, orbitals=np.stack([f1, f2], axis=1),
                           occupations=np.array([0.7, 0.3]))
        ev0 = np.sort(np.linalg.eigvalsh(rho.kernel * grid.dx))[-2:]
        prop = TdhfPropagator(rho, pot, dt=5e-3)
        for _ in range(200):
            prop.step()
            state = prop.state()
            tr = state.trace()
            assert abs(tr - 1.0) < 1e-6, f"trace drift {tr - 1:.2e}"
        dense = DensityState(grid, h, kernel=prop.state().kernel, validate=False)
        assert dense.eigenvalues().min() > -1e-8
        ev1 = np.sort(dense.eigenvalues())[-2:]
        assert np.max(np.abs(ev1 - ev0)) < 1e-6

    def linear_reduction():
        pot = PotentialSpec.from_names("cosine", "zero")
        rho = coherent_projector_state(grid, h, 0.3)
        prop = TdhfPropagator(rho, pot, dt=5e-3)
        psi = rho.orbitals[:, 0].copy()
        V = np.cos(grid.x)
        for _ in range(100):
            prop.step()
            psi = apply_split_step(psi, grid, h, 5e-3, V)
        ref = np.outer(psi, np.conj(psi))
        gap = norms(QuantumOperator(prop.state().kernel - ref, grid, h))["tr"]
        assert gap < 1e-6, gap

    def dt_halving_order():
        pot = PotentialSpec.from_names("cosine", "gaussian_W",
                                       w_params={"c": 0.4, "s": 1.0})
        rho = coherent_projector_state(grid, h, 0.4)

        def run_dt(dt):
            p = TdhfPropagator(rho, pot, dt=dt)
            p.run_until(0.5)
            return p.state().kernel

        def defect(dt):
            gap = run_dt(dt) - run_dt(dt / 4)
            return norms(QuantumOperator(gap, grid, h))["tr"]

        ratio = defect(0.02) / defect(0.01)
        assert 3.5 < ratio < 4.5, ratio

    def slope_fitting():
        fit = fit_slope([(0.4, 0.4), (0.2, 0.2), (0.1, 0.1)])
        assert abs(fit.slope - 1.0) < 1e-10
        fit = fit_slope([(hh, np.sqrt(hh)) for hh in (0.4, 0.2, 0.1, 0.05)])
        assert abs(fit.slope - 0.5) < 1e-10

    t0 = time.time()
    for name, fn in [
        ("coherent overlap closed form", overlap_identity),
        ("translation group law + unitarity", translation_group),
        ("reflection coherent average", reflection_average),
        ("weyl quantize/symbol round trip", quantize_round_trip),
        ("husimi mass/positivity + route agreement", wick_routes),
        ("smoothing contraction + identity fixed point", smoothing_contraction),
        ("vlasov free transport + mass", vlasov_free_transport),
        ("tdhf hygiene: trace/positivity/spectrum", propagator_hygiene),
        ("tdhf linear reduction at W=0", linear_reduction),
        ("tdhf dt-halving second order", dt_halving_order),
        ("slope fitting", slope_fitting),
    ]:
        _check(name, fn, failures)
    print(f"selftest: {11 - len(failures)}/11 passed in {time.time() - t0:.1f}s")
    return len(failures)
