import numpy as np
import pytest

from conftest import random_localized_operator
from wicklab.grids import PhasePoint, PositionGrid
from wicklab.operators import (
    DensityState,
    FactoredOperator,
    QuantumOperator,
    commutator,
    compose,
    identity_operator,
    momentum_operator,
    norms,
    operator_norm,
    position_operator,
    regularity,
    singular_values,
)
from wicklab.states import coherent_state, heisenberg_translate


def test_compose_with_identity(grid256):
    h = 0.5
    a = random_localized_operator(grid256, h, seed=1)
    ident = identity_operator(grid256, h)
    out = compose(a, ident)
    assert np.max(np.abs(out.kernel - a.kernel)) < 1e-12


def test_compose_dagger_rule(grid256):
    h = 0.5
    a = random_localized_operator(grid256, h, seed=2)
    b = random_localized_operator(grid256, h, seed=3)
    lhs = compose(a, b).dagger()
    rhs = compose(b.dagger(), a.dagger())
    assert np.max(np.abs(lhs.kernel - rhs.kernel)) < 1e-12


def test_canonical_commutation_on_coherent_state(grid256):
    h = 0.5
    q = position_operator(h, grid256)
    p = momentum_operator(h, grid256)
    psi = coherent_state(PhasePoint(0.0, 0.0), h, grid256)
    lhs = commutator(q, p).apply(psi)
    ref = 1j * h * psi.values
    rel = np.sqrt(np.sum(np.abs(lhs.values - ref) ** 2) / np.sum(np.abs(ref) ** 2))
    assert rel < 1e-4


def test_momentum_eigenvector(grid256):
    h = 0.5
    p = momentum_operator(h, grid256)
    # on-grid momentum: xi0 = h * (2 pi m / L)
    xi0 = h * 2.0 * np.pi * 5 / grid256.length
    vec = np.exp(1j * grid256.x * xi0 / h)
    out = p.weighted() @ vec
    assert np.max(np.abs(out - xi0 * vec)) < 1e-6


def test_norms_identity(grid256):
    h = 0.5
    ident = identity_operator(grid256, h)
    n = norms(ident)
    assert n["op"] == pytest.approx(1.0, abs=1e-10)
    assert ident.trace().real == pytest.approx(256.0, abs=1e-8)


def test_norms_rank_one_projector(grid256):
    h = 0.5
    psi = coherent_state(PhasePoint(0.3, -0.2), h, grid256)
    K = np.outer(psi.values, np.conj(psi.values))
    proj = QuantumOperator(K, grid256, h)
    n = norms(proj)
    for key in ("op", "hs", "tr"):
        assert n[key] == pytest.approx(1.0, abs=1e-6)
    assert proj.trace().real == pytest.approx(1.0, abs=1e-6)


def test_mehler_trace_value():
    # kernel e^{-(x^2+y^2) + 2 mu x y} at mu = 1/sqrt(5):
    # trace = sqrt(pi / (2 (1 - mu)))
    grid = PositionGrid(-8.0, 8.0, 256)
    mu = 1.0 / np.sqrt(5.0)
    x = grid.x
    K = np.exp(-(x[:, None] ** 2 + x[None, :] ** 2) + 2 * mu * x[:, None] * x[None, :])
    b = QuantumOperator(K, grid, 1.0)
    ref = np.sqrt(np.pi / (2.0 * (1.0 - mu)))
    assert b.trace().real == pytest.approx(ref, rel=1e-10)
    # it is PSD, so trace norm = trace
    assert norms(b)["tr"] == pytest.approx(ref, rel=1e-8)


def test_trace_norm_product_bound(grid256):
    h = 0.5
    a = random_localized_operator(grid256, h, seed=4)
    b = random_localized_operator(grid256, h, seed=5)
    na, nb = norms(a), norms(b)
    nab = norms(compose(a, b))
    assert nab["tr"] <= na["op"] * nb["tr"] + 1e-8


def test_trace_cyclicity(grid256):
    h = 0.5
    a = random_localized_operator(grid256, h, seed=6)
    b = random_localized_operator(grid256, h, seed=7)
    t1 = compose(a, b).trace()
    t2 = compose(b, a).trace()
    assert abs(t1 - t2) <= 1e-8 * max(abs(t1), 1.0)


def test_trace_norm_invariant_under_translation(grid256):
    h = 0.5
    a = random_localized_operator(grid256, h, seed=8, width=2.0)
    from wicklab.quantize import _translate_kernel

    moved = QuantumOperator(_translate_kernel(a.kernel, grid256, h, 0.9, -0.4), grid256, h)
    t0 = norms(a)["tr"]
    t1 = norms(moved)["tr"]
    assert abs(t1 - t0) / t0 < 1e-6


def test_operator_norm_power_iteration(grid256):
    h = 0.5
    a = random_localized_operator(grid256, h, seed=9)
    # near-degenerate leading singular values cap power iteration around 1e-5
    assert operator_norm(a) == pytest.approx(norms(a)["op"], rel=1e-3)


def test_regularity_identity(grid256):
    rep = regularity(identity_operator(grid256, 0.5))
    assert rep.i_inf < 1e-10
    assert rep.i_tr < 1e-8


def test_regularity_position(grid256):
    # physical-sector norm of [P, Q] is h, so the indicator is 1
    rep = regularity(position_operator(0.5, grid256), trace=False)
    assert rep.i_inf == pytest.approx(1.0, abs=1e-3)


def test_factored_matches_dense(grid256):
    h = 0.25
    f1 = coherent_state(PhasePoint(-1.0, 0.2), h, grid256).values
    f2 = coherent_state(PhasePoint(1.0, -0.3), h, grid256).values
    fo = FactoredOperator(np.stack([f1, f2], axis=1), np.stack([f2, f1], axis=1),
                          np.array([0.7, 0.3j]), grid256, h)
    dense = fo.to_dense()
    ref = 0.7 * np.outer(f1, np.conj(f2)) + 0.3j * np.outer(f2, np.conj(f1))
    assert np.max(np.abs(dense.kernel - ref)) < 1e-12
    assert fo.trace() == pytest.approx(dense.trace(), abs=1e-12)


def test_density_state_invariants(grid256):
    h = 0.25
    f1 = coherent_state(PhasePoint(-1.0, 0.0), h, grid256).values
    f2 = coherent_state(PhasePoint(1.0, 0.0), h, grid256).values
    # orthonormalize
    o = grid256.dx * np.sum(f2 * np.conj(f1))
    f2 = f2 - o * f1
    f2 /= np.sqrt(grid256.dx * np.sum(np.abs(f2) ** 2))
    rho = DensityState(grid256, h, orbitals=np.stack([f1, f2], axis=1),
                       occupations=np.array([0.6, 0.4]))
    assert rho.trace() == pytest.approx(1.0, abs=1e-10)
    dense = DensityState(grid256, h, kernel=rho.kernel)
    assert dense.eigenvalues().min() > -1e-8
    ev = np.sort(dense.eigenvalues())[-2:]
    assert np.allclose(ev, [0.4, 0.6], atol=1e-8)


def test_density_state_rejects_bad_trace(grid256):
    h = 0.25
    f1 = coherent_state(PhasePoint(0.0, 0.0), h, grid256).values
    with pytest.raises(ValueError):
        DensityState(grid256, h, orbitals=f1[:, None], occupations=np.array([0.5]))
