"""A trace-class operator whose Weyl symbol is not absolutely integrable.

At h = 1 the symbol p(x, xi) = e^{2 i x xi} (1 + x^2 + xi^2)^(-alpha) with
1/2 < alpha <= 1 fails to be L1 (its modulus decays like |X|^(-2 alpha)),
yet the operator it quantizes is trace class: it is the Gamma-weighted
resolvent-style average

    P = Gamma(alpha)^-1 integral_0^inf e^{-lam} lam^(alpha-1) A_lam dlam,

where A_lam quantizes e^{2 i x xi - lam (x^2 + xi^2)} and has the explicit
Gaussian kernel

    K_lam(x, y) = (4 pi lam)^(-1/2) exp(-(a x^2 + b y^2 + 2 c x y)),
    a = lam/4 + 1/lam,  b = c = lam/4,

with trace norm O(lam^(-1/2)) as lam -> 0.  The quadrature runs in
s = log(lam) with Gauss-Legendre nodes.  By contrast the Wick symbol of P
decays like a Gaussian (the e^{Lap/4} smoothing suppresses the e^{2ixxi}
oscillation by e^{-|X|^2}), so its ball masses saturate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn

from .grids import PhaseGrid, PositionGrid
from .operators import QuantumOperator


def weyl_symbol_p(x, xi, alpha: float):
    """The closed-form symbol of P."""
    return np.exp(2j * x * xi) / (1.0 + x ** 2 + xi ** 2) ** alpha


def gaussian_factor_kernel(grid: PositionGrid, lam: float) -> np.ndarray:
    """Kernel of A_lam (quantization of e^{2ixxi - lam|X|^2} at h = 1)."""
    a = lam / 4.0 + 1.0 / lam
    b = lam / 4.0
    c = lam / 4.0
    x = grid.x
    expo = -(a * x[:, None] ** 2 + b * x[None, :] ** 2 + 2.0 * c * np.outer(x, x))
    return (4.0 * np.pi * lam) ** -0.5 * np.exp(expo)


def factor_trace_closed_form(lam: float) -> float:
    """Tr(A_lam) = (1/2)(1 + lam^2)^(-1/2), matching the symbol integral."""
    return 0.5 / np.sqrt(1.0 + lam ** 2)


def factor_trace_norm_closed_form(lam: float, terms: int = 4000) -> float:
    """Trace norm of A_lam from the geometric singular-value ladder.

    A*A is a positive Gaussian (Mehler) kernel with eigenvalues
    mu0 q^k, so |A|_tr = pref * sqrt(mu0) / (1 - sqrt(q)).
    """
    a = lam / 4.0 + 1.0 / lam
    b = lam / 4.0
    c = lam / 4.0
    A2 = b - c ** 2 / (2.0 * a)
    B2 = c ** 2 / (2.0 * a)
    pref = (4.0 * np.pi * lam) ** -1.0 * np.sqrt(np.pi / (2.0 * a))
    kap = np.sqrt(A2 ** 2 - B2 ** 2)
    mu0 = np.sqrt(np.pi / (A2 + kap))
    q = B2 / (A2 + kap)
    return float(np.sqrt(pref * mu0) / (1.0 - np.sqrt(q)))


def log_gauss_legendre(lam_min: float, lam_max: float, n_nodes: int):
    """Nodes and weights for integral f(lam) dlam via s = log(lam)."""
    s_nodes, s_weights = np.polynomial.legendre.leggauss(n_nodes)
    s_lo, s_hi = np.log(lam_min), np.log(lam_max)
    s = 0.5 * (s_hi - s_lo) * s_nodes + 0.5 * (s_hi + s_lo)
    lam = np.exp(s)
    w = 0.5 * (s_hi - s_lo) * s_weights * lam  # dlam = lam ds
    return lam, w


@dataclass
class QuadratureSpec:
    lam_min: float = 1e-3
    lam_max: float = 30.0
    n_nodes: int = 200


def assemble_operator(grid: PositionGrid, alpha: float,
                      quad: QuadratureSpec) -> QuantumOperator:
    """Gauss-Legendre assembly of P on the given grid."""
    if not 0.5 < alpha <= 1.0:
        raise ValueError("alpha must lie in (1/2, 1]")
    lam, w = log_gauss_legendre(quad.lam_min, quad.lam_max, quad.n_nodes)
    weights = w * np.exp(-lam) * lam ** (alpha - 1.0) / gamma_fn(alpha)
    K = np.zeros((grid.num_points, grid.num_points))
    for lam_i, w_i in zip(lam, weights):
        K += w_i * gaussian_factor_kernel(grid, lam_i)
    return QuantumOperator(K, grid, 1.0)


def ball_masses(values: np.ndarray, pg: PhaseGrid, radii) -> np.ndarray:
    """cell_area-weighted integral of |values| over |X| < R for each R."""
    X, XI = pg.meshes()
    r2 = X ** 2 + XI ** 2
    out = []
    mags = np.abs(values)
    for R in radii:
        out.append(float(pg.cell_area * mags[r2 < R * R].sum()))
    return np.array(out)


def symbol_ball_masses(alpha: float, radii, extent: float = 64.0,
                       n: int = 4096) -> np.ndarray:
    """Direct 2-D quadrature of |p| over balls (the closed-form symbol)."""
    step = 2.0 * extent / n
    ax = -extent + step * (np.arange(n) + 0.5)
    X, XI = np.meshgrid(ax, ax, indexing="ij")
    mags = (1.0 + X ** 2 + XI ** 2) ** (-alpha)
    r2 = X ** 2 + XI ** 2
    out = []
    for R in radii:
        out.append(float(step * step * mags[r2 < R * R].sum()))
    return np.array(out)
