"""Bi-Wick symbols, the composition expansion, and the Wick transport PDE.

For an operator A the bi-symbol S(X, Y) = <A psi_X, psi_Y> / <psi_X, psi_Y>
is holomorphic in X = x + i xi and anti-holomorphic in Y, and restricts to
the Wick symbol on the diagonal.  Products expand as

    wick(A o B) = sum_{a < m} (2h)^a / a! * d^a wick(A) * dbar^a wick(B) + R_m,

exact (R_m = 0) whenever one symbol is a polynomial of degree < m; for
A quantized from a smooth symbol F and B trace class, the normalized L1
norm of R_m is controlled by  |B|_tr * sum_{m <= a <= max(m,2)} h^{a/2} |d^a F|_inf.

The Husimi density u of a mean-field state satisfies

    du/dt + 2 xi du/dx + h d^2u/dx dxi = (1/ih)(2 pi h)^-1 wick([Vq, rho]),

whose right side expands through the same composition series into
mean-field terms built from Phi(x) = (heat-smoothed V)(x) + (W * marginal).
"""

from __future__ import annotations

import numpy as np

from .grids import PhaseGrid, PhasePoint
from .operators import DensityState, FactoredOperator, QuantumOperator, compose
from .potentials import PotentialSpec, convolve_interaction
from .quantize import wick_symbol_direct
from .states import coherent_overlap, coherent_values
from .symbols import Symbol, spectral_derivative, wirtinger


class BiWickUnderflow(ValueError):
    """|X - Y|^2 too large: the overlap denominator underflows."""


def bi_wick_eval(a: QuantumOperator, X: PhasePoint, Y: PhasePoint) -> complex:
    X, Y = PhasePoint(*X), PhasePoint(*Y)
    h = a.h
    d2 = (X.x - Y.x) ** 2 + (X.xi - Y.xi) ** 2
    if d2 >= 4.0 * h * np.log(1e300):
        raise BiWickUnderflow(f"|X-Y|^2 = {d2:.3g} beyond the overflow guard")
    denom = coherent_overlap(X, Y, h)
    psi_x = coherent_values(a.grid.x, h, X)
    psi_y = coherent_values(a.grid.x, h, Y)
    num = a.grid.dx ** 2 * np.vdot(psi_y, a.kernel @ psi_x)
    return complex(num / denom)


def factored_compose(a: QuantumOperator, b: FactoredOperator) -> FactoredOperator:
    """A o B for factored B: rank preserved, left factors mapped through A."""
    new_left = (a.kernel * a.dx) @ b.left
    return FactoredOperator(new_left, b.right.copy(), b.coeffs.copy(), b.grid, b.h)


def diagonal_commutator(diag: np.ndarray, rho) -> FactoredOperator | QuantumOperator:
    """[D, rho] for a multiplication operator D = diag(d(x))."""
    if isinstance(rho, DensityState):
        if rho.orbitals is not None:
            L = rho.orbitals
            DL = diag[:, None] * L
            left = np.concatenate([DL, L], axis=1)
            right = np.concatenate([L, DL], axis=1)
            coeffs = np.concatenate([rho.occupations, -rho.occupations]).astype(complex)
            return FactoredOperator(left, right, coeffs, rho.grid, rho.h)
        rho = rho.as_operator()
    K = (diag[:, None] - diag[None, :]) * rho.kernel
    return QuantumOperator(K, rho.grid, rho.h)


def wick_compose_expand(a, b, m: int, pg: PhaseGrid, sig_a: Symbol | None = None,
                        sig_b: Symbol | None = None, method: str = "spectral",
                        method_a: str | None = None, method_b: str | None = None) -> Symbol:
    """Partial sum of the composition expansion up to orders < m.

    Derivative methods default to `method` but can be chosen per factor
    (stencils are exact for polynomial symbols, spectral for decaying ones).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if sig_a is None:
        sig_a = wick_symbol_direct(a, pg)
    if sig_b is None:
        sig_b = wick_symbol_direct(b, pg)
    method_a = method_a or method
    method_b = method_b or method
    h = a.h
    total = np.zeros((pg.nx, pg.nxi), dtype=complex)
    da = Symbol(np.asarray(sig_a.values, dtype=complex), pg)
    db = Symbol(np.asarray(sig_b.values, dtype=complex), pg)
    fact = 1.0
    for alpha in range(m):
        if alpha > 0:
            fact *= alpha
            da = wirtinger(da, 1, conjugate=False, method=method_a)
            db = wirtinger(db, 1, conjugate=True, method=method_b)
        total += ((2.0 * h) ** alpha / fact) * da.values * db.values
    return Symbol(total, pg, h_tag=h)


def remainder_index_set(m: int) -> list[int]:
    """Orders m..max(m, 2) entering the remainder bound (one dimension)."""
    return list(range(m, max(m, 2) + 1))


def composition_remainder(a: QuantumOperator, b, m: int, pg: PhaseGrid,
                          F: Symbol | None = None, sig_a: Symbol | None = None,
                          sig_b: Symbol | None = None, b_trace_norm: float | None = None,
                          method: str = "spectral", method_a: str | None = None,
                          method_b: str | None = None) -> dict:
    """Remainder of the order-m expansion of wick(A o B) plus its stated bound.

    Returns {"remainder": Symbol, "l1": normalized L1 norm, "bound_rhs": the
    |B|_tr-weighted derivative sum of the quantized symbol F (when given)}.
    """
    ab = factored_compose(a, b) if isinstance(b, FactoredOperator) else compose(a, b)
    sig_ab = wick_symbol_direct(ab, pg)
    partial = wick_compose_expand(a, b, m, pg, sig_a=sig_a, sig_b=sig_b, method=method,
                                  method_a=method_a, method_b=method_b)
    R = Symbol(sig_ab.values - partial.values, pg, h_tag=a.h)
    l1 = R.l1() / (2.0 * np.pi * a.h)
    bound = None
    if F is not None and b_trace_norm is not None:
        dF = Symbol(np.asarray(F.values, dtype=complex), F.pg)
        sup = {}
        order = 0
        for alpha in range(1, max(remainder_index_set(m)) + 1):
            dF = wirtinger(dF, 1, conjugate=False, method=method)
            sup[alpha] = dF.linf()
        bound = b_trace_norm * sum(a.h ** (alpha / 2.0) * sup[alpha]
                                   for alpha in remainder_index_set(m))
    return {"remainder": R, "l1": float(l1), "bound_rhs": bound}


# ---------------------------------------------------------------------------
# the Wick transport equation


def transport_lhs(u_prev: Symbol, u_now: Symbol, u_next: Symbol, dt: float,
                  h: float) -> Symbol:
    """du/dt (centered) + 2 xi du/dx + h d2u/dxdxi at the middle time."""
    pg = u_now.pg
    dudt = (np.asarray(u_next.values) - np.asarray(u_prev.values)) / (2.0 * dt)
    ux = spectral_derivative(u_now.values, pg.dx, axis=0)
    uxxi = spectral_derivative(ux, pg.dxi, axis=1)
    xi = pg.xi[None, :]
    vals = dudt + 2.0 * xi * ux + h * uxxi
    return Symbol(vals.real if not np.iscomplexobj(u_now.values) else vals, pg, h_tag=h)


def transport_rhs(rho: DensityState, pot: PotentialSpec, pg: PhaseGrid) -> Symbol:
    """(1/ih)(2 pi h)^-1 wick([Vq(rho), rho]); real up to roundoff."""
    from .quantum import mean_field_quantum

    vq = mean_field_quantum(rho, pot)
    C = diagonal_commutator(vq, rho)
    sig = wick_symbol_direct(C, pg)
    vals = sig.values / (1j * rho.h) / (2.0 * np.pi * rho.h)
    return Symbol(vals.real, pg, h_tag=rho.h)


def mean_field_wick_potential(u: Symbol, pot: PotentialSpec, h: float,
                              order: int = 0) -> np.ndarray:
    """Phi^(order)(x) = heat-smoothed V derivative + (W^(order) * marginal)."""
    pg = u.pg
    marginal = np.asarray(u.values).real.sum(axis=1) * pg.dxi
    out = pot.V.heat(pg.x, h, order)
    if pot.interacting:
        out = out + convolve_interaction(pot.W, marginal, pg.x, order)
    return out


def transport_rhs_truncated(u: Symbol, pot: PotentialSpec, h: float, m: int) -> Symbol:
    """Mean-field expansion of the commutator side through orders < m.

    For the x-only field Phi both complex derivatives equal Phi^(a)/2^a, so
    order a contributes  h^(a-1)/(i a!) Phi^(a) (dbar^a - d^a) u.
    """
    pg = u.pg
    uu = Symbol(np.asarray(u.values, dtype=complex), pg)
    total = np.zeros((pg.nx, pg.nxi), dtype=complex)
    d_u = uu
    db_u = uu
    fact = 1.0
    for alpha in range(1, m):
        fact *= alpha
        d_u = wirtinger(d_u, 1, conjugate=False)
        db_u = wirtinger(db_u, 1, conjugate=True)
        phi_a = mean_field_wick_potential(u, pot, h, order=alpha) / 2.0 ** alpha
        total += ((2.0 * h) ** alpha / fact) * phi_a[:, None] * (db_u.values - d_u.values)
    vals = total / (1j * h)
    return Symbol(vals.real, pg, h_tag=h)
