import numpy as np
import pytest

from wicklab.counterexample import (
    QuadratureSpec,
    assemble_operator,
    ball_masses,
    factor_trace_closed_form,
    factor_trace_norm_closed_form,
    gaussian_factor_kernel,
    symbol_ball_masses,
    weyl_symbol_p,
)
from wicklab.grids import PhaseGrid, PositionGrid
from wicklab.operators import QuantumOperator, norms
from wicklab.quantize import weyl_quantize


@pytest.fixture(scope="module")
def grid_ce():
    return PositionGrid(-36.0, 36.0, 1024)


def test_factor_kernel_trace(grid_ce):
    for lam in (0.05, 0.3, 1.0, 4.0):
        K = gaussian_factor_kernel(grid_ce, lam)
        tr = grid_ce.dx * np.trace(K)
        assert tr == pytest.approx(factor_trace_closed_form(lam), rel=1e-10)


def test_factor_kernel_matches_quantization(grid_ce):
    # the closed-form Gaussian kernel agrees with quantizing the symbol
    lam = 0.8
    a = weyl_quantize(lambda x, xi: np.exp(2j * x * xi - lam * (x ** 2 + xi ** 2)),
                      grid_ce, 1.0)
    K = gaussian_factor_kernel(grid_ce, lam)
    assert np.max(np.abs(a.kernel - K)) < 1e-10 * np.max(np.abs(K))


def test_factor_trace_norm_mehler(grid_ce):
    for lam in (0.1, 0.5, 2.0):
        K = gaussian_factor_kernel(grid_ce, lam)
        sv = np.linalg.svd(K * grid_ce.dx, compute_uv=False)
        assert sv.sum() == pytest.approx(factor_trace_norm_closed_form(lam), rel=1e-8)


def test_factor_trace_norm_small_lambda_slope(grid_ce):
    lams = np.geomspace(0.01, 0.2, 8)
    trn = [np.linalg.svd(gaussian_factor_kernel(grid_ce, lam) * grid_ce.dx,
                         compute_uv=False).sum() for lam in lams]
    slope = np.polyfit(np.log(lams), np.log(trn), 1)[0]
    assert -0.6 < slope < -0.4


def test_quadrature_node_doubling(grid_ce):
    p200 = assemble_operator(grid_ce, 1.0, QuadratureSpec(n_nodes=200))
    p400 = assemble_operator(grid_ce, 1.0, QuadratureSpec(n_nodes=400))
    t200 = norms(p200)["tr"]
    t400 = norms(p400)["tr"]
    assert abs(t200 - t400) / t400 < 1e-3


def test_symbol_mass_grows_logarithmically():
    radii = (2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
    masses = symbol_ball_masses(1.0, radii)
    # closed form for alpha = 1: pi * log(1 + R^2)
    ref = np.pi * np.log(1.0 + np.array(radii) ** 2)
    assert np.max(np.abs(masses - ref) / ref) < 1e-2
    fit = np.polyfit(np.log(radii), masses, 1)
    resid = masses - np.polyval(fit, np.log(radii))
    r2 = 1 - np.sum(resid ** 2) / np.sum((masses - masses.mean()) ** 2)
    assert fit[0] > 0
    assert r2 > 0.99
    # no saturation up to R = 64: the last increment is still sizeable
    assert masses[-1] - masses[-2] > 0.5 * (masses[-2] - masses[-3])
