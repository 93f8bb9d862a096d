"""Dense operator algebra on a position grid.

An operator is stored as its continuum kernel sampled on grid nodes,
K[i, j] ~ K(x_i, x_j), and acts with the quadrature weight in the action:

    (A f)(x_i) = sum_j K[i, j] f(x_j) dx.

Consequently the matrix that acts on plain sample vectors is K*dx, and all
spectral quantities (operator/Hilbert-Schmidt/trace norms, eigenvalues) are
those of K*dx.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import PositionGrid
from .states import WaveFunction, coherent_batch


@dataclass
class QuantumOperator:
    kernel: np.ndarray
    grid: PositionGrid
    h: float
    hermitian_hint: bool = False

    def __post_init__(self):
        self.kernel = np.asarray(self.kernel, dtype=complex)
        n = self.grid.num_points
        if self.kernel.shape != (n, n):
            raise ValueError("kernel must be square and match the grid")
        if self.hermitian_hint:
            defect = np.max(np.abs(self.kernel - self.kernel.conj().T))
            scale = max(np.max(np.abs(self.kernel)), 1e-300)
            if defect > 1e-10 * scale:
                raise ValueError(f"hermitian_hint set but defect {defect:.2e} > 1e-10*max")

    @property
    def dx(self) -> float:
        return self.grid.dx

    def weighted(self) -> np.ndarray:
        """Matrix acting on plain sample vectors."""
        return self.kernel * self.dx

    def apply(self, f: WaveFunction) -> WaveFunction:
        return WaveFunction(self.weighted() @ f.values, self.grid, self.h)

    def dagger(self) -> "QuantumOperator":
        return QuantumOperator(self.kernel.conj().T, self.grid, self.h, self.hermitian_hint)

    def trace(self) -> complex:
        return complex(self.dx * np.trace(self.kernel))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.kernel - self.kernel.conj().T)))

    def __add__(self, other: "QuantumOperator") -> "QuantumOperator":
        _check_same(self, other)
        return QuantumOperator(self.kernel + other.kernel, self.grid, self.h)

    def __sub__(self, other: "QuantumOperator") -> "QuantumOperator":
        _check_same(self, other)
        return QuantumOperator(self.kernel - other.kernel, self.grid, self.h)

    def __mul__(self, c: complex) -> "QuantumOperator":
        return QuantumOperator(self.kernel * c, self.grid, self.h)

    __rmul__ = __mul__


def _check_same(a: QuantumOperator, b: QuantumOperator) -> None:
    if a.grid != b.grid:
        raise ValueError("operators live on different grids")
    if abs(a.h - b.h) > 1e-15:
        raise ValueError("operators carry different h")


def compose(a: QuantumOperator, b: QuantumOperator) -> QuantumOperator:
    """Operator product: kernel K_A diag(dx) K_B."""
    _check_same(a, b)
    return QuantumOperator(a.kernel @ b.kernel * a.dx, a.grid, a.h)


def commutator(a: QuantumOperator, b: QuantumOperator) -> QuantumOperator:
    return compose(a, b) - compose(b, a)


def identity_operator(grid: PositionGrid, h: float) -> QuantumOperator:
    return QuantumOperator(np.eye(grid.num_points) / grid.dx, grid, h, hermitian_hint=True)


def position_operator(h: float, grid: PositionGrid) -> QuantumOperator:
    return QuantumOperator(np.diag(grid.x) / grid.dx, grid, h, hermitian_hint=True)


def momentum_operator(h: float, grid: PositionGrid) -> QuantumOperator:
    """P = (h/i) d/dx realized by Fourier differentiation."""
    n = grid.num_points
    F = np.fft.fft(np.eye(n), axis=0)
    mat = np.fft.ifft((h * grid.k)[:, None] * F, axis=0)
    return QuantumOperator(mat / grid.dx, grid, h)


def laplacian_action(values: np.ndarray, grid: PositionGrid) -> np.ndarray:
    k = grid.k
    return np.fft.ifft(-(k ** 2) * np.fft.fft(values))


def apply_momentum_kernel(K: np.ndarray, grid: PositionGrid, h: float, side: str) -> np.ndarray:
    """P∘A (side='left') or A∘P (side='right') on the kernel array, via FFT."""
    hk = h * grid.k
    if side == "left":
        return np.fft.ifft(hk[:, None] * np.fft.fft(K, axis=0), axis=0)
    # A P = (P A^H)^H since P is self-adjoint
    KH = K.conj().T
    PKH = np.fft.ifft(hk[:, None] * np.fft.fft(KH, axis=0), axis=0)
    return PKH.conj().T


def momentum_commutator(a: QuantumOperator) -> QuantumOperator:
    """[P(h), A] without materializing the dense momentum matrix."""
    K = a.kernel
    out = apply_momentum_kernel(K, a.grid, a.h, "left") - apply_momentum_kernel(K, a.grid, a.h, "right")
    return QuantumOperator(out, a.grid, a.h)


def position_commutator(a: QuantumOperator) -> QuantumOperator:
    """[Q(h), A]: kernel (x - y) K(x, y)."""
    x = a.grid.x
    return QuantumOperator((x[:, None] - x[None, :]) * a.kernel, a.grid, a.h)


def singular_values(a: QuantumOperator) -> np.ndarray:
    return np.linalg.svd(a.weighted(), compute_uv=False)


def norms(a: QuantumOperator) -> dict:
    """Operator, Hilbert-Schmidt and trace norms from the singular values."""
    s = singular_values(a)
    return {"op": float(s[0]), "hs": float(np.sqrt(np.sum(s ** 2))), "tr": float(np.sum(s))}


def operator_norm(a: QuantumOperator, tol: float = 1e-10, max_iter: int = 300) -> float:
    """Largest singular value by power iteration on A^H A (no full SVD)."""
    M = a.weighted()
    rng = np.random.default_rng(7)
    v = rng.standard_normal(M.shape[0]) + 1j * rng.standard_normal(M.shape[0])
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(max_iter):
        w = M.conj().T @ (M @ v)
        nrm = np.linalg.norm(w)
        if nrm == 0:
            return 0.0
        v = w / nrm
        s = np.sqrt(nrm)
        if abs(s - prev) < tol * max(s, 1.0):
            return float(s)
        prev = s
    return float(prev)


@dataclass
class RegularityReport:
    i_inf: float
    i_tr: float | None = None


def _probe_family(grid: PositionGrid, h: float) -> np.ndarray:
    """Coherent probes spanning the physically resolvable sector."""
    span = 0.5 * grid.length
    xs = np.linspace(-0.55 * span, 0.55 * span, 7) + 0.5 * (grid.x_min + grid.x_max)
    xi_max = 0.5 * grid.xi_nyquist(h)
    xis = np.linspace(-xi_max, xi_max, 7)
    cols = []
    for x0 in xs:
        batch = coherent_batch(grid, h, x0, xis)
        cols.append(batch)
    probes = np.concatenate(cols, axis=1)
    nrm = np.sqrt(grid.dx * np.sum(np.abs(probes) ** 2, axis=0))
    return probes / nrm[None, :]


def sector_norm(a: QuantumOperator) -> float:
    """Operator norm measured on the coherent probe family.

    The fully discrete commutator [P, Q] carries a spurious Nyquist-edge
    direction (a finite-dimensional commutator is traceless), so raw SVD
    norms of commutators with the position/momentum operators are dominated
    by an unphysical O(N h) outlier.  Probing with coherent states measures
    the operator on smooth vectors only.
    """
    probes = _probe_family(a.grid, a.h)
    img = a.weighted() @ probes
    vals = np.sqrt(a.grid.dx * np.sum(np.abs(img) ** 2, axis=0))
    return float(vals.max())


def regularity(a: QuantumOperator, trace: bool = True) -> RegularityReport:
    """Rescaled commutator norms (1/h)(||[P,A]|| + ||[Q,A]||).

    The operator-norm indicator uses the coherent-probe sector norm; the
    trace-norm indicator uses the full singular-value sum.
    """
    cp = momentum_commutator(a)
    cq = position_commutator(a)
    i_inf = (sector_norm(cp) + sector_norm(cq)) / a.h
    i_tr = None
    if trace:
        i_tr = float((np.sum(singular_values(cp)) + np.sum(singular_values(cq))) / a.h)
    return RegularityReport(i_inf=float(i_inf), i_tr=i_tr)


@dataclass
class FactoredOperator:
    """Low-rank operator sum_k c_k |left_k><right_k| (columns of left/right)."""

    left: np.ndarray
    right: np.ndarray
    coeffs: np.ndarray
    grid: PositionGrid
    h: float

    def __post_init__(self):
        self.left = np.asarray(self.left, dtype=complex)
        self.right = np.asarray(self.right, dtype=complex)
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        n = self.grid.num_points
        if self.left.shape[0] != n or self.right.shape[0] != n:
            raise ValueError("factor columns must match the grid")
        if self.left.shape[1] != self.right.shape[1] or len(self.coeffs) != self.left.shape[1]:
            raise ValueError("left/right/coeffs ranks disagree")

    @property
    def rank(self) -> int:
        return self.left.shape[1]

    def to_dense(self) -> QuantumOperator:
        K = (self.left * self.coeffs[None, :]) @ self.right.conj().T
        return QuantumOperator(K, self.grid, self.h)

    def trace(self) -> complex:
        overlaps = self.grid.dx * np.sum(self.right.conj() * self.left, axis=0)
        return complex(np.sum(self.coeffs * overlaps))


class DensityState:
    """Trace-one nonnegative hermitian operator, optionally rank-factored.

    A factored state keeps orthonormal orbitals and occupations; the dense
    kernel is materialized on demand.
    """

    def __init__(self, grid: PositionGrid, h: float, kernel: np.ndarray | None = None,
                 orbitals: np.ndarray | None = None, occupations: np.ndarray | None = None,
                 validate: bool = True):
        self.grid = grid
        self.h = h
        self._kernel = None if kernel is None else np.asarray(kernel, dtype=complex)
        self.orbitals = None if orbitals is None else np.asarray(orbitals, dtype=complex)
        self.occupations = None if occupations is None else np.asarray(occupations, dtype=float)
        if (self._kernel is None) == (self.orbitals is None):
            if self._kernel is None:
                raise ValueError("provide kernel or orbitals")
        if validate:
            self.check_invariants()

    @property
    def rank(self) -> int | None:
        return None if self.orbitals is None else self.orbitals.shape[1]

    @property
    def kernel(self) -> np.ndarray:
        if self._kernel is None:
            self._kernel = (self.orbitals * self.occupations[None, :]) @ self.orbitals.conj().T
        return self._kernel

    def as_operator(self) -> QuantumOperator:
        return QuantumOperator(self.kernel, self.grid, self.h)

    def diagonal_density(self) -> np.ndarray:
        """n(x) = K(x, x), the position-space density."""
        if self.orbitals is not None:
            return np.sum(self.occupations[None, :] * np.abs(self.orbitals) ** 2, axis=1).real
        return np.real(np.diag(self.kernel))

    def trace(self) -> float:
        if self.orbitals is not None:
            nrm2 = self.grid.dx * np.sum(np.abs(self.orbitals) ** 2, axis=0)
            return float(np.sum(self.occupations * nrm2))
        return float(np.real(self.grid.dx * np.trace(self.kernel)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.kernel * self.grid.dx)

    def check_invariants(self, trace_tol: float = 1e-6, eig_tol: float = 1e-8,
                         herm_tol: float = 1e-10) -> None:
        tr = self.trace()
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"trace {tr} deviates from 1 by more than {trace_tol}")
        if self.orbitals is not None:
            if np.any(self.occupations < -eig_tol):
                raise ValueError("negative occupation")
            return
        K = self.kernel
        defect = np.max(np.abs(K - K.conj().T))
        if defect > herm_tol * max(np.max(np.abs(K)), 1e-300):
            raise ValueError(f"hermiticity defect {defect:.2e}")
        ev = self.eigenvalues()
        if ev.min() < -eig_tol:
            raise ValueError(f"negative eigenvalue {ev.min():.2e}")
