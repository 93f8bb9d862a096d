import numpy as np
import pytest

from wicklab.grids import PhaseGrid, PositionGrid


@pytest.fixture
def grid256():
    return PositionGrid(-8.0, 8.0, 256)


@pytest.fixture
def pg_default():
    return PhaseGrid(-5.0, 5.0, -2.0, 2.0, 100, 80)


def random_localized_operator(grid, h, seed=0, width=3.0, band=0.5):
    """Hermitian operator with decaying kernel and band-limited momentum content."""
    rng = np.random.default_rng(seed)
    n = grid.num_points
    raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    k = grid.k
    mask = np.abs(k) <= band * np.pi * h / grid.dx / h  # |xi| <= band * xi_nyq
    raw = np.fft.ifft(np.fft.fft(raw, axis=0) * mask[:, None], axis=0)
    raw = np.fft.ifft(np.fft.fft(raw, axis=1) * mask[None, :], axis=1)
    env = np.exp(-(grid.x / width) ** 4)
    K = env[:, None] * raw * env[None, :]
    K = 0.5 * (K + K.conj().T)
    from wicklab.operators import QuantumOperator, operator_norm

    op = QuantumOperator(K, grid, h)
    return QuantumOperator(K / operator_norm(op), grid, h)
