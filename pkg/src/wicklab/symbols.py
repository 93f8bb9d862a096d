"""Sampled phase-space functions and the operations that act on them.

A Symbol holds complex (or real) samples on a PhaseGrid.  Norms follow the
cell-area quadrature: L1 = cell_area * sum |F|, Linf = max |F|.  The
heat-semigroup smoothing exp(t*Laplacian) is a Gaussian blur implemented
spectrally with zero padding, and complex derivatives

    d   = (d/dx - i d/dxi)/2      dbar = (d/dx + i d/dxi)/2

are available spectrally (for decaying fields) or by 4th-order stencils.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import PhaseGrid


@dataclass
class Symbol:
    values: np.ndarray
    pg: PhaseGrid
    h_tag: float | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.pg.nx, self.pg.nxi):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.pg.nx}, {self.pg.nxi})"
            )

    def l1(self) -> float:
        return float(self.pg.cell_area * np.sum(np.abs(self.values)))

    def linf(self) -> float:
        return float(np.max(np.abs(self.values)))

    def integral(self) -> complex:
        return complex(self.pg.cell_area * np.sum(self.values))

    def copy_with(self, values: np.ndarray) -> "Symbol":
        return Symbol(values, self.pg, self.h_tag)


@dataclass
class PhaseDistribution(Symbol):
    """Nonnegative real Symbol of unit mass (a phase-space probability).

    neg_tol is the clip-free negativity floor: 1e-12 for analytically built
    densities, 1e-10 for spectrally computed coherent-state averages (their
    own tolerance).  Violations raise; nothing is clipped.
    """

    neg_tol: float = 1e-12
    MASS_TOL = 1e-4

    def __post_init__(self):
        super().__post_init__()
        v = np.asarray(self.values)
        if np.iscomplexobj(v):
            if np.max(np.abs(v.imag)) > 1e-10:
                raise ValueError("phase distribution has a non-real part")
            v = v.real
        floor = self.neg_tol * max(1.0, float(v.max()))
        if v.min() < -floor:
            raise ValueError(f"negative density {v.min():.3e} below -{floor:.3e}")
        self.values = v
        mass = self.pg.cell_area * float(v.sum())
        if abs(mass - 1.0) > self.MASS_TOL:
            raise ValueError(f"mass {mass} deviates from 1 beyond {self.MASS_TOL}")

    def mass(self) -> float:
        return float(self.pg.cell_area * self.values.sum())


def l1_distance(a: Symbol, b: Symbol) -> float:
    if a.pg != b.pg:
        raise ValueError("symbols live on different phase grids")
    return float(a.pg.cell_area * np.sum(np.abs(np.asarray(a.values) - np.asarray(b.values))))


# ---------------------------------------------------------------------------
# trigonometric (band-limited) resampling of uniform samples


def trig_modes(n: int) -> np.ndarray:
    return np.arange(-(n // 2), (n + 1) // 2)


def trig_coefficients(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Fourier-series coefficients c_m, m = -n/2..n/2-1, of uniform samples."""
    n = values.shape[axis]
    c = np.fft.fftshift(np.fft.fft(values, axis=axis), axes=axis) / n
    return c

def trig_eval_matrix(n: int, start: float, step: float, targets: np.ndarray) -> np.ndarray:
    """Matrix E with E[t, m] = e^{2 pi i m (targets[t]-start)/(n step)}, Nyquist as cosine."""
    period = n * step
    m = trig_modes(n).astype(float)
    theta = 2.0 * np.pi * np.subtract.outer(targets, start) / period
    E = np.exp(1j * theta[:, None] * m[None, :])
    if n % 2 == 0:
        E[:, 0] = np.cos(theta * m[0])  # unpaired -n/2 mode
    return E


def trig_resample(values: np.ndarray, start: float, step: float,
                  targets: np.ndarray, axis: int = -1) -> np.ndarray:
    """Evaluate the periodic band-limited interpolant at arbitrary targets."""
    values = np.asarray(values)
    moved = np.moveaxis(values, axis, -1)
    c = trig_coefficients(moved, axis=-1)
    E = trig_eval_matrix(values.shape[axis], start, step, np.asarray(targets, dtype=float))
    out = c @ E.T
    return np.moveaxis(out, -1, axis)


# ---------------------------------------------------------------------------
# heat semigroup and derivatives


def heat_smooth(F: Symbol, h: float) -> Symbol:
    """Gaussian blur exp((h/4) Laplacian): convolution with (pi h)^-1 e^{-|X|^2/h}.

    Implemented spectrally with zero padding (the field must decay at the
    phase-grid boundary).  Mass is preserved exactly up to the padding crop.
    """
    v = np.asarray(F.values, dtype=complex)
    nx, nxi = v.shape
    edge = max(np.max(np.abs(v[0, :])), np.max(np.abs(v[-1, :])),
               np.max(np.abs(v[:, 0])), np.max(np.abs(v[:, -1])))
    scale = max(np.max(np.abs(v)), 1e-300)
    if edge <= 1e-8 * scale:
        pad_x = int(np.ceil(4.0 * np.sqrt(h) / F.pg.dx)) + 4
        pad_xi = int(np.ceil(4.0 * np.sqrt(h) / F.pg.dxi)) + 4
    else:
        pad_x = pad_xi = 0  # periodic extension (exact for constant fields)
    big = np.zeros((nx + 2 * pad_x, nxi + 2 * pad_xi), dtype=complex)
    big[pad_x:pad_x + nx, pad_xi:pad_xi + nxi] = v
    kx = 2.0 * np.pi * np.fft.fftfreq(big.shape[0], d=F.pg.dx)
    kxi = 2.0 * np.pi * np.fft.fftfreq(big.shape[1], d=F.pg.dxi)
    mult = np.exp(-h * (kx[:, None] ** 2 + kxi[None, :] ** 2) / 4.0)
    sm = np.fft.ifft2(np.fft.fft2(big) * mult)
    out = sm[pad_x:pad_x + nx, pad_xi:pad_xi + nxi]
    if not np.iscomplexobj(F.values):
        out = out.real
    return F.copy_with(out)


def spectral_derivative(values: np.ndarray, step: float, axis: int, order: int = 1) -> np.ndarray:
    v = np.asarray(values, dtype=complex)
    n = v.shape[axis]
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=step)
    mult = (1j * k) ** order
    if n % 2 == 0 and order % 2 == 1:
        mult[n // 2] = 0.0  # odd derivative of the unpaired Nyquist mode
    shape = [1] * v.ndim
    shape[axis] = n
    return np.fft.ifft(np.fft.fft(v, axis=axis) * mult.reshape(shape), axis=axis)


def stencil_derivative(values: np.ndarray, step: float, axis: int) -> np.ndarray:
    """4th-order central differences, one-sided at the edges."""
    v = np.moveaxis(np.asarray(values, dtype=complex), axis, 0)
    out = np.empty_like(v)
    out[2:-2] = (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12 * step)
    # 4th-order one-sided stencils
    c = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12 * step)
    for i in (0, 1):
        out[i] = sum(cj * v[i + j] for j, cj in enumerate(c))
    for i in (-1, -2):
        out[i] = -sum(cj * v[i - j] for j, cj in enumerate(c))
    return np.moveaxis(out, 0, axis)


def wirtinger(F: Symbol, order: int = 1, conjugate: bool = False,
              method: str = "spectral") -> Symbol:
    """Apply d^order or dbar^order, d = (d/dx - i d/dxi)/2."""
    v = np.asarray(F.values, dtype=complex)
    sgn = 1j if conjugate else -1j
    for _ in range(order):
        if method == "spectral":
            vx = spectral_derivative(v, F.pg.dx, axis=0)
            vxi = spectral_derivative(v, F.pg.dxi, axis=1)
        elif method == "stencil":
            vx = stencil_derivative(v, F.pg.dx, axis=0)
            vxi = stencil_derivative(v, F.pg.dxi, axis=1)
        else:
            raise ValueError(f"unknown method {method!r}")
        v = 0.5 * (vx + sgn * vxi)
    return F.copy_with(v)


def phase_laplacian(F: Symbol) -> Symbol:
    v = np.asarray(F.values, dtype=complex)
    out = spectral_derivative(v, F.pg.dx, axis=0, order=2) \
        + spectral_derivative(v, F.pg.dxi, axis=1, order=2)
    return F.copy_with(out)
