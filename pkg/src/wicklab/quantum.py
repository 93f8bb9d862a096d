"""Unitary Schrodinger propagation, mean-field density-matrix dynamics,
and the Husimi phase-space density.

The Hamiltonian is -h^2 Laplacian + V, propagated by e^{-i t H / h}; the
kinetic factor in Fourier space is e^{-i dt h k^2} (momentum variable
xi = h k, kinetic symbol xi^2).  The mean-field equation

    i h  drho/dt = [-h^2 Laplacian + Vq(rho), rho],
    Vq(x; rho) = V(x) + Tr(W_x rho) = V(x) + integral W(x-y) n(y) dy,

is a self-consistent unitary conjugation: one Strang-split step under the
field frozen at the midpoint (predictor: half-step, rebuild the field,
corrector: full step).  Hermiticity, positivity, trace, and the occupation
spectrum are preserved structurally.

The Husimi density is u(X) = (2 pi h)^-1 <rho psi_X, psi_X>: nonnegative
with unit mass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import PhaseGrid, PositionGrid
from .operators import DensityState
from .potentials import Potential, PotentialSpec, convolve_interaction
from .quantize import weyl_quantize, wick_symbol_direct, wick_symbol_via_weyl
from .states import WaveFunction
from .symbols import PhaseDistribution, Symbol


def mean_field_quantum(rho: DensityState, pot: PotentialSpec, order: int = 0) -> np.ndarray:
    """(d/dx)^order of Vq(x; rho) on the position grid."""
    grid = rho.grid
    out = pot.V.deriv(grid.x, order)
    if pot.interacting:
        density = rho.diagonal_density() * grid.dx  # unit-sum weights
        out = out + convolve_interaction(pot.W, density, grid.x, order) / grid.dx
    return out


def _split_factors(grid: PositionGrid, h: float, dt: float, Vx: np.ndarray):
    phase_v = np.exp(-0.5j * dt * Vx / h)
    phase_k = np.exp(-1j * dt * h * grid.k ** 2)
    return phase_v, phase_k


def apply_split_step(values: np.ndarray, grid: PositionGrid, h: float, dt: float,
                     Vx: np.ndarray) -> np.ndarray:
    """Strang-split e^{-i dt H / h} on column(s) of samples."""
    phase_v, phase_k = _split_factors(grid, h, dt, Vx)
    v = values if values.ndim == 2 else values[:, None]
    out = phase_v[:, None] * v
    out = np.fft.ifft(phase_k[:, None] * np.fft.fft(out, axis=0), axis=0)
    out = phase_v[:, None] * out
    return out if values.ndim == 2 else out[:, 0]


def schrodinger_step(f: WaveFunction, dt: float, Vx: np.ndarray, h: float) -> WaveFunction:
    return WaveFunction(apply_split_step(f.values, f.grid, h, dt, Vx), f.grid, h)


def conjugate_split_step(K: np.ndarray, grid: PositionGrid, h: float, dt: float,
                         Vx: np.ndarray) -> np.ndarray:
    """rho -> U rho U^H with the same Strang factors, on the dense kernel."""
    out = apply_split_step(K, grid, h, dt, Vx)
    out = apply_split_step(out.conj().T, grid, h, dt, Vx).conj().T
    return out


def free_evolve(values: np.ndarray, grid: PositionGrid, h: float, t: float) -> np.ndarray:
    """Exact kinetic-only propagation by arbitrary time t."""
    phase = np.exp(-1j * t * h * grid.k ** 2)
    return np.fft.ifft(phase * np.fft.fft(values, axis=0), axis=0)


@dataclass
class MeanFieldState:
    rho: DensityState
    t: float
    pot: PotentialSpec
    h: float


class TdhfPropagator:
    """Self-consistent mean-field stepping of a DensityState.

    States of modest rank propagate by their orbitals (O(r N log N) per
    step); dense kernels are conjugated with identical split factors, so
    both paths agree to roundoff.
    """

    def __init__(self, rho: DensityState, pot: PotentialSpec, dt: float,
                 rank_threshold: int = 16):
        self.grid = rho.grid
        self.h = rho.h
        self.pot = pot
        self.dt = dt
        self.t = 0.0
        self.low_rank = rho.orbitals is not None and rho.rank <= rank_threshold
        if self.low_rank:
            self.orbitals = rho.orbitals.copy()
            self.occupations = rho.occupations.copy()
            self._kernel = None
        else:
            self._kernel = rho.kernel.copy()
        self.energy_log: list[tuple[float, float]] = []

    def state(self) -> DensityState:
        if self.low_rank:
            return DensityState(self.grid, self.h, orbitals=self.orbitals,
                                occupations=self.occupations, validate=False)
        return DensityState(self.grid, self.h, kernel=self._kernel, validate=False)

    def _field(self, rho: DensityState) -> np.ndarray:
        return mean_field_quantum(rho, self.pot)

    def _advance(self, dt: float, Vx: np.ndarray) -> None:
        if self.low_rank:
            self.orbitals = apply_split_step(self.orbitals, self.grid, self.h, dt, Vx)
        else:
            self._kernel = conjugate_split_step(self._kernel, self.grid, self.h, dt, Vx)

    def _predicted_half(self, Vx: np.ndarray) -> DensityState:
        if self.low_rank:
            orbs = apply_split_step(self.orbitals, self.grid, self.h, 0.5 * self.dt, Vx)
            return DensityState(self.grid, self.h, orbitals=orbs,
                                occupations=self.occupations, validate=False)
        K = conjugate_split_step(self._kernel, self.grid, self.h, 0.5 * self.dt, Vx)
        return DensityState(self.grid, self.h, kernel=K, validate=False)

    def energy(self) -> float:
        """Tr(-h^2 Lap rho) + Tr(V rho) + (1/2) double-counted interaction."""
        rho = self.state()
        grid, h = self.grid, self.h
        n = rho.diagonal_density()
        if self.low_rank:
            dpsi = np.fft.ifft((1j * grid.k)[:, None] * np.fft.fft(self.orbitals, axis=0), axis=0)
            kin = h * h * grid.dx * np.sum(self.occupations * np.sum(np.abs(dpsi) ** 2, axis=0))
        else:
            K = np.fft.ifft((h * grid.k)[:, None] ** 2 * np.fft.fft(self._kernel, axis=0), axis=0)
            kin = grid.dx * np.trace(K).real
        pot_v = grid.dx * float(np.sum(self.pot.V(grid.x) * n))
        inter = 0.0
        if self.pot.interacting:
            conv = convolve_interaction(self.pot.W, n * grid.dx, grid.x, 0)
            inter = 0.5 * grid.dx * float(np.sum(conv * n))
        return float(kin + pot_v + inter)

    def step(self) -> None:
        V0 = self._field(self.state())
        if self.pot.interacting:
            half = self._predicted_half(V0)
            V_mid = self._field(half)
        else:
            V_mid = V0
        self._advance(self.dt, V_mid)
        self.t += self.dt
        self.energy_log.append((self.t, self.energy()))

    def run_until(self, t_end: float) -> None:
        while self.t < t_end - 1e-12:
            self.step()


def husimi_density(rho: DensityState, pg: PhaseGrid, route: str = "direct") -> PhaseDistribution:
    """(2 pi h)^-1 times the Wick symbol of the state: nonnegative, unit mass."""
    if route == "direct":
        sig = wick_symbol_direct(rho, pg)
    elif route == "via_weyl":
        sig = wick_symbol_via_weyl(rho, pg)
    else:
        raise ValueError(f"unknown route {route!r}")
    vals = sig.values.real / (2.0 * np.pi * rho.h)
    return PhaseDistribution(vals, pg, h_tag=rho.h, neg_tol=1e-10)


def thermal_gaussian_state(grid: PositionGrid, h: float, sigma: float = 1.0,
                           pg: PhaseGrid | None = None) -> DensityState:
    """Unit-trace positive state quantized from a broad Gaussian phase density.

    rho = (2 pi h) OpWeyl(F0) with F0 the isotropic normal density of width
    sigma in both x and xi; positive whenever sigma^2 >= h/2.  Positivity
    and trace are validated numerically at construction.
    """
    if pg is None:
        half_x = min(-grid.x_min, grid.x_max) * 0.9
        half_xi = 6.5 * sigma
        pg = PhaseGrid(-half_x, half_x, -half_xi, half_xi, 192, 256)
    X, XI = pg.meshes()
    F0 = np.exp(-(X ** 2 + XI ** 2) / (2.0 * sigma ** 2)) / (2.0 * np.pi * sigma ** 2)
    op = weyl_quantize(Symbol(F0, pg), grid, h, hermitian_hint=True)
    K = (2.0 * np.pi * h) * op.kernel
    return DensityState(grid, h, kernel=K)


def coherent_projector_state(grid: PositionGrid, h: float, x0: float = 0.0,
                             xi0: float = 0.0) -> DensityState:
    from .states import coherent_state
    from .grids import PhasePoint

    psi = coherent_state(PhasePoint(x0, xi0), h, grid)
    vals = psi.values / psi.norm()
    return DensityState(grid, h, orbitals=vals[:, None], occupations=np.array([1.0]))
