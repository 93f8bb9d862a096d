"""Weyl quantization, symbol extraction, Wick symbols, and smoothing operators.

Quantization follows the symmetric (midpoint) rule

    K(x, y) = (2 pi h)^-1 integral F((x+y)/2, xi) e^{i (x-y) xi / h} dxi,

realized as an exact DFT over the momentum grid conjugate to the position
grid (spacing pi*h/L over the full Nyquist band, 2N points).  Symbol
extraction inverts it through the anti-diagonal slices

    sigma(x, xi) = integral K(x + v/2, x - v/2) e^{-i v xi / h} dv,

with half-sample slices filled by periodic spectral shifts of the kernel
diagonals; this keeps delta-type kernels (identity, multiplication
operators) exact.  The Wick symbol is the diagonal coherent-state average
<A psi_X, psi_X>; it equals the heat smoothing e^{(h/4) Laplacian} of the
Weyl symbol, and both routes are implemented.

The smoothing operator is the Gaussian average of phase-space conjugations

    T A = (pi s)^-1 integral e^{-|X|^2/s} W_X A W_X^* dX,

with s = h and translations at h (the semiclassical smoothing), or s = lam
and translations at h = 1 (the fixed-scale variant).  Its fast path uses
the identity "Weyl symbol of T_h A = Wick symbol of A".
"""

from __future__ import annotations

import numpy as np

from .grids import PhaseGrid, PhasePoint, PositionGrid
from .operators import DensityState, FactoredOperator, QuantumOperator, compose
from .states import coherent_batch, coherent_overlap, coherent_values, symmetry_apply, WaveFunction
from .symbols import Symbol, heat_smooth, trig_resample


class BoundaryLeakError(ValueError):
    """Symbol or kernel does not decay (and is not periodic) at a boundary."""


# ---------------------------------------------------------------------------
# Weyl quantization


def _midpoint_samples(F: Symbol, mids: np.ndarray) -> np.ndarray:
    """Sample the symbol at kernel midpoints: trig if x-decaying, else cubic.

    Midpoints outside the phase grid's x window are zero for decaying
    symbols (periodic extension would replicate the field)."""
    v = np.asarray(F.values, dtype=complex)
    edge = max(np.max(np.abs(v[0, :])), np.max(np.abs(v[-1, :])))
    scale = max(np.max(np.abs(v)), 1e-300)
    window = (mids >= F.pg.x_min) & (mids < F.pg.x_max)
    if edge <= 1e-8 * scale:
        out = np.zeros((len(mids), v.shape[1]), dtype=complex)
        out[window, :] = trig_resample(v, F.pg.x_min, F.pg.dx, mids[window], axis=0)
        return out
    from scipy.interpolate import CubicSpline

    spl_r = CubicSpline(F.pg.x, v.real, axis=0, extrapolate=True)
    spl_i = CubicSpline(F.pg.x, v.imag, axis=0, extrapolate=True)
    return spl_r(mids) + 1j * spl_i(mids)


def _conjugate_xi_samples(Fm: np.ndarray, pg: PhaseGrid, xi_conj: np.ndarray) -> np.ndarray:
    """Resample the xi axis onto the conjugate momentum nodes.

    Decaying symbols extend by zero beyond the sampled window; symbols whose
    xi edges match (constant rows, periodically extendable fields) extend
    periodically.  Anything else cannot be quantized faithfully."""
    v = Fm
    edge = max(np.max(np.abs(v[:, 0])), np.max(np.abs(v[:, -1])))
    scale = max(np.max(np.abs(v)), 1e-300)
    inside = (xi_conj >= pg.xi_min) & (xi_conj < pg.xi_max)
    if edge <= 1e-8 * scale:
        out = np.zeros((v.shape[0], len(xi_conj)), dtype=complex)
        out[:, inside] = trig_resample(v, pg.xi_min, pg.dxi, xi_conj[inside], axis=1)
        return out
    if np.max(np.abs(v[:, 0] - v[:, -1])) <= 1e-7 * scale:
        return trig_resample(v, pg.xi_min, pg.dxi, xi_conj, axis=1)
    raise BoundaryLeakError(
        "symbol neither decays nor is periodically extendable along xi; "
        "pass a callable symbol or enlarge the phase grid"
    )


def weyl_quantize(F, grid: PositionGrid, h: float, pg: PhaseGrid | None = None,
                  hermitian_hint: bool = False) -> QuantumOperator:
    """Midpoint quantization of a symbol.

    F may be a Symbol (resampled onto the conjugate momentum grid) or a
    callable F(x, xi) evaluated exactly on midpoints x conjugate nodes.
    """
    N = grid.num_points
    L = grid.length
    mids = grid.midpoints()
    xi_c = (np.pi * h / L) * np.arange(-N, N)  # full band, 2N nodes
    if callable(F):
        Fm = np.asarray(F(mids[:, None], xi_c[None, :]), dtype=complex)
    else:
        if pg is None:
            pg = F.pg
        pg.check_alias(grid, h)
        Fm = _midpoint_samples(F, mids)
        Fm = _conjugate_xi_samples(Fm, pg, xi_c)
    # R[m, l] = dxi_c * sum_q Fm[m, q] e^{i pi l q / N}
    dxi_c = np.pi * h / L
    R = np.fft.ifft(np.fft.ifftshift(Fm, axes=1), axis=1) * (2 * N) * dxi_c
    i = np.arange(N)
    ii, jj = np.meshgrid(i, i, indexing="ij")
    K = R[ii + jj, (ii - jj) % (2 * N)] / (2.0 * np.pi * h)
    if hermitian_hint:
        K = 0.5 * (K + K.conj().T)
    return QuantumOperator(K, grid, h, hermitian_hint=hermitian_hint)


# ---------------------------------------------------------------------------
# Weyl symbol extraction


def _half_shift(seq: np.ndarray) -> np.ndarray:
    """Periodic band-limited samples of seq at index + 1/2."""
    n = len(seq)
    if n == 1:
        return seq.astype(complex)
    k = np.fft.fftfreq(n)
    ph = np.exp(2j * np.pi * k * 0.5)
    if n % 2 == 0:
        ph[n // 2] = 0.0  # cos(pi/2): Nyquist mode killed at half points
    return np.fft.ifft(np.fft.fft(seq) * ph)


def weyl_symbol_raw(a: QuantumOperator) -> tuple[np.ndarray, np.ndarray]:
    """Symbol on (grid.x, conjugate xi nodes); returns (values, xi_nodes)."""
    K = a.kernel
    N = a.grid.num_points
    R = np.zeros((N, N), dtype=complex)
    for l in range(-N // 2, N // 2):
        d = np.diagonal(K, offset=-l)  # d[j] = K[a, b] with a-b = l, m = j + |l|/2
        nb = len(d)
        if nb == 0:
            continue
        if l % 2 == 0:
            j = np.arange(nb)
            R[j + abs(l) // 2, l % N] = d
        else:
            dsh = _half_shift(np.ascontiguousarray(d))
            j = np.arange(nb)
            m_idx = j + (abs(l) + 1) // 2
            ok = m_idx < N
            R[m_idx[ok], l % N] = dsh[j[ok]]
    sig = np.fft.fftshift(np.fft.fft(R, axis=1), axes=1) * a.grid.dx
    return sig, a.grid.conjugate_xi(a.h)


def weyl_symbol(a: QuantumOperator, pg: PhaseGrid | None = None) -> Symbol:
    """Weyl symbol of a kernel operator.

    With pg=None the symbol is returned on the natural grid (position nodes
    x conjugate momentum nodes clipped to the guarded band).  With a pg the
    natural-grid symbol is trig-interpolated onto it (requires an operator
    whose symbol decays inside the natural window).
    """
    sig, xi_c = weyl_symbol_raw(a)
    if pg is None:
        from .grids import ALIAS_GUARD, PhaseGrid as PG

        keep = np.abs(xi_c) <= ALIAS_GUARD * a.grid.xi_nyquist(a.h)
        idx = np.nonzero(keep)[0]
        vals = sig[:, idx]
        dxi = xi_c[1] - xi_c[0]
        out_pg = PG(a.grid.x_min, a.grid.x_max, float(xi_c[idx[0]]),
                    float(xi_c[idx[-1]] + dxi), a.grid.num_points, len(idx))
        return Symbol(vals, out_pg, h_tag=a.h)
    pg.check_alias(a.grid, a.h)
    dxi = xi_c[1] - xi_c[0]
    tmp = trig_resample(sig, a.grid.x_min, a.grid.dx, pg.x, axis=0)
    vals = trig_resample(tmp, float(xi_c[0]), float(dxi), pg.xi, axis=1)
    return Symbol(vals, pg, h_tag=a.h)


def weyl_symbol_via_reflection(a: QuantumOperator, pg: PhaseGrid) -> Symbol:
    """Cross-check route: sigma(X) = 2 Tr(A compose S_X), S_X the reflection.

    Tr(A S_X) = dx * sum_v K_A(2 x0 - x_v, x_v) exp(2i (x_v - x0) xi0 / h);
    centers must align with the half-grid so the reflection is an index map.
    """
    pg.check_alias(a.grid, a.h)
    grid, h = a.grid, a.h
    x = grid.x
    out = np.empty((pg.nx, pg.nxi), dtype=complex)
    for ix, x0 in enumerate(pg.x):
        pos = (2.0 * x0 - 2.0 * grid.x_min) / grid.dx
        if abs(pos - round(pos)) > 1e-9:
            raise ValueError("reflection route needs centers aligned to the half-grid")
        idx = np.rint((2.0 * x0 - x - grid.x_min) / grid.dx).astype(int)
        inside = (idx >= 0) & (idx < grid.num_points)
        v = np.nonzero(inside)[0]
        diag = a.kernel[idx[v], v]
        for ixi, xi0 in enumerate(pg.xi):
            phase = np.exp(2j * (x[v] - x0) * xi0 / h)
            out[ix, ixi] = 2.0 * grid.dx * np.sum(diag * phase)
    return Symbol(out, pg, h_tag=h)


# ---------------------------------------------------------------------------
# Wick symbols


def wick_symbol_direct(a, pg: PhaseGrid) -> Symbol:
    """<A psi_X, psi_X> on the phase grid, two matvecs per column batch.

    Accepts QuantumOperator, FactoredOperator, or DensityState; factored
    operators use the O(rank) inner-product path.
    """
    if isinstance(a, DensityState):
        if a.orbitals is not None:
            fo = FactoredOperator(a.orbitals, a.orbitals,
                                  a.occupations.astype(complex), a.grid, a.h)
            return wick_symbol_direct(fo, pg)
        a = a.as_operator()
    grid, h = a.grid, a.h
    pg.check_alias(grid, h)
    dx = grid.dx
    xis = pg.xi
    out = np.empty((pg.nx, pg.nxi), dtype=complex)
    if isinstance(a, FactoredOperator):
        for ix, x0 in enumerate(pg.x):
            C = coherent_batch(grid, h, x0, xis)           # (N, nxi)
            ZL = dx * (C.conj().T @ a.left)                # <left_k, psi_X>* pieces
            ZR = dx * (C.conj().T @ a.right)
            out[ix, :] = np.sum(a.coeffs[None, :] * ZL * np.conj(ZR), axis=1)
        return Symbol(out, pg, h_tag=h)
    M = a.weighted()
    for ix, x0 in enumerate(pg.x):
        C = coherent_batch(grid, h, x0, xis)
        out[ix, :] = dx * np.sum(np.conj(C) * (M @ C), axis=0)
    return Symbol(out, pg, h_tag=h)


def wick_symbol_at(a, points_x: np.ndarray, points_xi: np.ndarray):
    """Pointwise <A psi_X, psi_X> at arbitrary phase points (for spot checks)."""
    if isinstance(a, DensityState):
        a = a.as_operator() if a.orbitals is None else FactoredOperator(
            a.orbitals, a.orbitals, a.occupations.astype(complex), a.grid, a.h)
    grid, h = a.grid, a.h
    dx = grid.dx
    vals = np.empty(len(points_x), dtype=complex)
    for i, (x0, xi0) in enumerate(zip(points_x, points_xi)):
        psi = coherent_values(grid.x, h, PhasePoint(float(x0), float(xi0)))
        if isinstance(a, FactoredOperator):
            zl = dx * (a.left.conj().T @ psi)
            zr = dx * (a.right.conj().T @ psi)
            vals[i] = np.sum(a.coeffs * np.conj(zl) * zr)
        else:
            vals[i] = dx * np.vdot(psi, a.weighted() @ psi)
    return vals


def wick_symbol_via_weyl(a, pg: PhaseGrid) -> Symbol:
    """Heat-smoothed Weyl symbol: e^{(h/4) Laplacian} sigma_weyl, on pg."""
    if isinstance(a, DensityState):
        a = a.as_operator()
    if isinstance(a, FactoredOperator):
        a = a.to_dense()
    natural = weyl_symbol(a)
    smooth = heat_smooth(natural, a.h)
    tmp = trig_resample(smooth.values, natural.pg.x_min, natural.pg.dx, pg.x, axis=0)
    vals = trig_resample(tmp, natural.pg.xi_min, natural.pg.dxi, pg.xi, axis=1)
    return Symbol(vals, pg, h_tag=a.h)


# ---------------------------------------------------------------------------
# smoothing operators (Gaussian averages of phase-space conjugations)


def smooth_fast(a: QuantumOperator, pg: PhaseGrid) -> QuantumOperator:
    """Fast path: quantize the Wick symbol (Weyl symbol of the smoothed
    operator equals the Wick symbol of the original)."""
    wick = wick_symbol_direct(a, pg)
    return weyl_quantize(wick, a.grid, a.h, pg=pg)


def _translate_kernel(K: np.ndarray, grid: PositionGrid, h_trans: float,
                      x0: float, xi0: float) -> np.ndarray:
    """Kernel of W_X A W_X^*: 2-D spectral shift by (x0, x0) then phase dress."""
    k = grid.k
    ph = np.exp(-1j * k * x0)  # pure phase: exactly unitary per axis
    Ks = np.fft.ifft(np.fft.fft(K, axis=0) * ph[:, None], axis=0)
    Ks = np.fft.ifft(np.fft.fft(Ks, axis=1) * ph[None, :], axis=1)
    w = np.exp(1j * grid.x * xi0 / h_trans)
    return w[:, None] * Ks * np.conj(w)[None, :]


def smooth_spectral(a: QuantumOperator, scale: float, h_trans: float | None = None) -> QuantumOperator:
    """Separable evaluation of the Gaussian conjugation average.

    The xi average is elementwise, exp(-scale (u-v)^2 / 4 h^2); the x average
    convolves along the kernel diagonal, a multiplier in the folded k1+k2
    frequency.  Exact for the periodic discretization (the identity is a
    machine-precision fixed point), and a positive combination of unitaries,
    hence contractive in every Schatten norm.
    """
    if h_trans is None:
        h_trans = a.h
    grid = a.grid
    x = grid.x
    G = np.exp(-scale * (x[:, None] - x[None, :]) ** 2 / (4.0 * h_trans ** 2))
    k = grid.k
    ksum = k[:, None] + k[None, :]
    fold = 2.0 * np.pi / grid.dx
    ksum = (ksum + fold / 2.0) % fold - fold / 2.0
    mult = np.exp(-scale * ksum ** 2 / 4.0)
    out = np.fft.ifft2(np.fft.fft2(a.kernel * G) * mult)
    return QuantumOperator(out, grid, a.h)


def smooth_quadrature(a: QuantumOperator, scale: float, h_trans: float | None = None,
                      nodes: int = 24) -> QuantumOperator:
    """Gauss-Hermite realization of the Gaussian conjugation average.

    scale is the Gaussian variance parameter (h for the semiclassical
    smoothing, lam for the fixed-scale variant); h_trans the h used inside
    the translations (defaults to a.h).  Positive weights summing to <= 1
    make this path contractive by construction.
    """
    if h_trans is None:
        h_trans = a.h
    t, w = np.polynomial.hermite.hermgauss(nodes)
    w = w / np.sqrt(np.pi)  # sum to 1 per axis
    shift = np.sqrt(scale) * t
    out = np.zeros_like(a.kernel)
    for ix, x0 in enumerate(shift):
        for ixi, xi0 in enumerate(shift):
            out += (w[ix] * w[ixi]) * _translate_kernel(a.kernel, a.grid, h_trans, x0, xi0)
    return QuantumOperator(out, a.grid, a.h)


def smooth_operator(a: QuantumOperator, pg: PhaseGrid | None = None,
                    method: str = "spectral", nodes: int = 24) -> QuantumOperator:
    """Semiclassical smoothing T_h: Gaussian width h, translations at h.

    Methods: "spectral" (separable exact evaluation, the default), "fast"
    (quantize the Wick symbol, needs a phase grid), "quadrature"
    (Gauss-Hermite over explicit conjugations, the validation path).
    """
    if method == "spectral":
        return smooth_spectral(a, scale=a.h, h_trans=a.h)
    if method == "fast":
        if pg is None:
            raise ValueError("fast path needs a phase grid for the Wick symbol")
        return smooth_fast(a, pg)
    if method == "quadrature":
        return smooth_quadrature(a, scale=a.h, h_trans=a.h, nodes=nodes)
    raise ValueError(f"unknown method {method!r}")


def smooth_operator_unit(a: QuantumOperator, lam: float, method: str = "spectral",
                         nodes: int = 24) -> QuantumOperator:
    """Fixed-scale smoothing: Gaussian width lam, translations at h = 1."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    if method == "spectral":
        return smooth_spectral(a, scale=lam, h_trans=1.0)
    return smooth_quadrature(a, scale=lam, h_trans=1.0, nodes=nodes)
