"""Position and phase-space grids.

Conventions used throughout the package:

* position grid: N uniform points x_j = x_min + j*dx, dx = (x_max-x_min)/N,
  N a power of two, FFT-compatible (the point x_max itself is not stored);
* discrete L2 inner product  <f, g> = dx * sum f * conj(g);
* a phase point is X = (x, xi), identified with the complex number x + i*xi;
* for semiclassical parameter h, the momentum resolvable on a grid of spacing
  dx is |xi| <= xi_nyq(h) = pi*h/dx.  Phase grids paired with (grid, h) must
  keep |xi| <= ALIAS_GUARD * xi_nyq.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

ALIAS_GUARD = 0.7


class GridError(ValueError):
    """Invalid grid construction or incompatible grid pairing."""


class AliasError(GridError):
    """Phase-grid momentum range exceeds the guarded Nyquist band."""


class PhasePoint(NamedTuple):
    x: float
    xi: float

    def as_complex(self) -> complex:
        return complex(self.x, self.xi)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PositionGrid:
    """Uniform periodic-layout discretization of the line."""

    x_min: float
    x_max: float
    num_points: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise GridError(f"need x_max > x_min, got [{self.x_min}, {self.x_max}]")
        if not _is_power_of_two(self.num_points):
            raise GridError(f"num_points must be a power of two, got {self.num_points}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.num_points

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.num_points)

    @property
    def k(self) -> np.ndarray:
        """Angular wavenumbers of the FFT modes (fft ordering)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.num_points, d=self.dx)

    def xi_nyquist(self, h: float) -> float:
        return np.pi * h / self.dx

    def conjugate_xi(self, h: float) -> np.ndarray:
        """Momentum nodes dual to this grid: spacing 2*pi*h/L over the full band."""
        n = self.num_points
        return (2.0 * np.pi * h / self.length) * np.arange(-n // 2, n // 2)

    def midpoints(self) -> np.ndarray:
        """The 2N-1 points x_min + r*dx/2 hosting kernel midpoints (x+y)/2."""
        return self.x_min + 0.5 * self.dx * np.arange(2 * self.num_points - 1)


@dataclass(frozen=True)
class PhaseGrid:
    """Rectangle of phase space sampled on an nx-by-nxi lattice (endpoint excluded)."""

    x_min: float
    x_max: float
    xi_min: float
    xi_max: float
    nx: int
    nxi: int

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.xi_max > self.xi_min):
            raise GridError("phase grid needs positive extents")
        if self.nx <= 0 or self.nxi <= 0:
            raise GridError("phase grid needs positive point counts")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def dxi(self) -> float:
        return (self.xi_max - self.xi_min) / self.nxi

    @property
    def cell_area(self) -> float:
        return self.dx * self.dxi

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.nx)

    @property
    def xi(self) -> np.ndarray:
        return self.xi_min + self.dxi * np.arange(self.nxi)

    def meshes(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.xi, indexing="ij")

    def check_alias(self, grid: PositionGrid, h: float) -> None:
        """Reject pairings whose momentum range exceeds the guarded band."""
        bound = ALIAS_GUARD * grid.xi_nyquist(h)
        worst = max(abs(self.xi_min), abs(self.xi_max))
        if worst > bound * (1 + 1e-12):
            raise AliasError(
                f"phase grid reaches |xi| = {worst:.4g} but the guarded band for "
                f"h = {h} on dx = {grid.dx:.4g} is {bound:.4g}"
            )


def centered_phase_grid(half_x: float, half_xi: float, nx: int, nxi: int) -> PhaseGrid:
    return PhaseGrid(-half_x, half_x, -half_xi, half_xi, nx, nxi)
