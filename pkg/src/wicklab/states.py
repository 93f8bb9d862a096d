"""Coherent states, phase-space translations, and reflection operators.

The coherent state centered at X = (x0, xi0) is

    psi(u) = (pi*h)^(-1/4) exp(-(u-x0)^2 / 2h) exp(i*u*xi0/h - i*x0*xi0/2h),

a unit L2 vector.  Two of them overlap according to the closed form

    <psi_X, psi_Y> = exp(-|X-Y|^2/4h + (i/2h)(y*xi - x*eta)),

with X = (x, xi), Y = (y, eta).  The phase-space translation

    (W_X f)(u) = f(u-x) exp(i*u*xi/h - i*x*xi/2h)

is unitary and satisfies W_X W_Y = exp(i(y*xi - x*eta)/2h) W_{X+Y}; it maps
the origin-centered coherent state to psi_X.  The reflection through Y is

    (S_Y f)(u) = exp(2i(u-y)*eta/h) f(2y-u).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import PhaseGrid, PhasePoint, PositionGrid


class BoundaryError(ValueError):
    """State mass too close to the grid boundary for the requested operation."""


@dataclass
class WaveFunction:
    """Sampled complex wavefunction on a PositionGrid at parameter h."""

    values: np.ndarray
    grid: PositionGrid
    h: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.num_points,):
            raise ValueError("values must match the grid size")

    def norm(self) -> float:
        return float(np.sqrt(self.grid.dx * np.sum(np.abs(self.values) ** 2)))

    def inner(self, other: "WaveFunction") -> complex:
        """dx-weighted <self, other> (conjugation on the second slot)."""
        return complex(self.grid.dx * np.sum(self.values * np.conj(other.values)))

    def boundary_mass(self, width: float) -> float:
        """Fraction of |f|^2 mass within `width` of either grid edge."""
        x = self.grid.x
        edge = (x < self.grid.x_min + width) | (x > self.grid.x_max - width)
        total = np.sum(np.abs(self.values) ** 2)
        if total == 0:
            return 0.0
        return float(np.sum(np.abs(self.values[edge]) ** 2) / total)


def coherent_values(x: np.ndarray, h: float, X: PhasePoint) -> np.ndarray:
    """Raw coherent-state samples on abscissas x."""
    g = (np.pi * h) ** (-0.25) * np.exp(-((x - X.x) ** 2) / (2.0 * h))
    return g * np.exp(1j * x * X.xi / h - 0.5j * X.x * X.xi / h)


def coherent_state(X: PhasePoint, h: float, grid: PositionGrid) -> WaveFunction:
    """Gaussian wave packet of width sqrt(h) centered at the phase point X.

    Raises BoundaryError if the Gaussian envelope does not decay below 1e-12
    at the grid edges (its mass would wrap or be clipped).
    """
    X = PhasePoint(*X)
    if not 0 < h <= 1:
        raise ValueError(f"h must lie in (0, 1], got {h}")
    edge = max(
        np.exp(-((grid.x_min - X.x) ** 2) / (2 * h)),
        np.exp(-((grid.x_max - X.x) ** 2) / (2 * h)),
    )
    if edge > 1e-12:
        raise BoundaryError(
            f"coherent state at x = {X.x} decays only to {edge:.2e} at the "
            f"boundary of [{grid.x_min}, {grid.x_max}]"
        )
    return WaveFunction(coherent_values(grid.x, h, X), grid, h)


def coherent_batch(grid: PositionGrid, h: float, x0: float, xis: np.ndarray) -> np.ndarray:
    """Column-stacked coherent states sharing center x0: shape (N, len(xis))."""
    x = grid.x
    g = (np.pi * h) ** (-0.25) * np.exp(-((x - x0) ** 2) / (2.0 * h))
    phases = np.exp(1j * np.outer(x, xis) / h - 0.5j * x0 * xis[None, :] / h)
    return g[:, None] * phases


def coherent_overlap(X: PhasePoint, Y: PhasePoint, h: float) -> complex:
    """Closed-form <psi_X, psi_Y>."""
    X, Y = PhasePoint(*X), PhasePoint(*Y)
    d2 = (X.x - Y.x) ** 2 + (X.xi - Y.xi) ** 2
    symplectic = Y.x * X.xi - X.x * Y.xi
    return complex(np.exp(-d2 / (4.0 * h)) * np.exp(0.5j * symplectic / h))


def fractional_shift(values: np.ndarray, shift: float, dx: float) -> np.ndarray:
    """Spectral (periodic) translation: returns samples of f(u - shift).

    The pure phase ramp (Nyquist included) keeps the map exactly unitary.
    """
    n = len(values)
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
    return np.fft.ifft(np.fft.fft(values) * np.exp(-1j * k * shift))


def heisenberg_translate(X: PhasePoint, h: float, f: WaveFunction) -> WaveFunction:
    """Apply the phase-space translation W_X: spectral shift then phase ramp.

    Unitary on the discrete space.  Raises BoundaryError if the shifted state
    has noticeable mass at the periodic seam (wrap-around).
    """
    X = PhasePoint(*X)
    shifted = fractional_shift(f.values, X.x, f.grid.dx)
    out = shifted * np.exp(1j * f.grid.x * X.xi / h - 0.5j * X.x * X.xi / h)
    result = WaveFunction(out, f.grid, f.h)
    guard = 3.0 * np.sqrt(h)
    if f.boundary_mass(guard) < 1e-10 and result.boundary_mass(guard) > 1e-9:
        raise BoundaryError("translated support wrapped around the grid boundary")
    return result


def symmetry_apply(Y: PhasePoint, h: float, f: WaveFunction) -> WaveFunction:
    """Reflection through the phase point Y: u -> exp(2i(u-y)eta/h) f(2y-u).

    When 2y lands on the sample lattice the reflection is an exact index
    permutation (points reflected out of the domain are taken as 0, which is
    valid for states decaying at the boundary); otherwise the reflected
    samples are obtained by cubic interpolation and downstream tolerances
    relax to ~1e-4.
    """
    Y = PhasePoint(*Y)
    grid = f.grid
    x = grid.x
    target = 2.0 * Y.x - x
    pos = (2.0 * Y.x - 2.0 * grid.x_min) / grid.dx
    aligned = abs(pos - round(pos)) < 1e-9
    if aligned:
        idx = np.rint((target - grid.x_min) / grid.dx).astype(int)
        inside = (idx >= 0) & (idx < grid.num_points)
        vals = np.zeros_like(f.values)
        vals[inside] = f.values[idx[inside]]
    else:
        from scipy.interpolate import CubicSpline

        re = CubicSpline(x, f.values.real, extrapolate=False)(target)
        im = CubicSpline(x, f.values.imag, extrapolate=False)(target)
        vals = np.nan_to_num(re) + 1j * np.nan_to_num(im)
    vals = vals * np.exp(2j * (x - Y.x) * Y.xi / h)
    return WaveFunction(vals, grid, f.h)


def resolution_of_identity(f: WaveFunction, h: float, pg: PhaseGrid) -> float:
    """Riemann sum of |<f, psi_X>|^2 over pg, normalized by 2*pi*h.

    Equals ||f||^2 when pg covers the Husimi mass of f (the completeness
    relation of the coherent family).
    """
    pg.check_alias(f.grid, h)
    total = 0.0
    dx = f.grid.dx
    xis = pg.xi
    for x0 in pg.x:
        batch = coherent_batch(f.grid, h, x0, xis)  # (N, nxi)
        amps = dx * (np.conj(batch).T @ f.values)
        total += np.sum(np.abs(amps) ** 2)
    return float(total * pg.cell_area / (2.0 * np.pi * h))
