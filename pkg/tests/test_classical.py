import numpy as np
import pytest
from scipy.special import erf

from wicklab.classical import VlasovSolver, flow_energy, hamiltonian_flow, mean_field_classical
from wicklab.grids import PhaseGrid
from wicklab.potentials import Potential, PotentialSpec, potential_preset
from wicklab.symbols import PhaseDistribution, Symbol, l1_distance


def gaussian_distribution(pg, x0=0.0, xi0=0.0, sx=0.6, sxi=0.6):
    X, XI = pg.meshes()
    vals = np.exp(-((X - x0) / sx) ** 2 / 2 - ((XI - xi0) / sxi) ** 2 / 2)
    vals /= vals.sum() * pg.cell_area
    return PhaseDistribution(vals, pg)


def test_free_flow_exact():
    V = potential_preset("zero")
    x, xi = hamiltonian_flow(np.array([1.0, -0.5]), np.array([0.3, 0.8]), 2.0, V, dt=0.05)
    assert np.allclose(x, [1.0 + 2 * 2.0 * 0.3, -0.5 + 2 * 2.0 * 0.8], atol=1e-12)
    assert np.allclose(xi, [0.3, 0.8], atol=1e-12)


def test_harmonic_flow_closed_form():
    V = potential_preset("harmonic", a=1.0)
    x0, xi0 = 0.7, -0.3
    t = 1.3
    x, xi = hamiltonian_flow(x0, xi0, t, V, dt=1e-4)
    assert abs(x - (x0 * np.cos(2 * t) + xi0 * np.sin(2 * t))) < 1e-6
    assert abs(xi - (xi0 * np.cos(2 * t) - x0 * np.sin(2 * t))) < 1e-6


def test_energy_conservation_cosine():
    V = potential_preset("cosine", a=1.0, b=1.0)
    x, xi = 0.4, 0.9
    e0 = flow_energy(x, xi, V)
    xt, xit = hamiltonian_flow(x, xi, 10.0, V, dt=1e-3)
    assert abs(flow_energy(xt, xit, V) - e0) < 1e-6


def test_mean_field_reduces_to_v():
    pg = PhaseGrid(-6.0, 6.0, -4.0, 4.0, 96, 64)
    pot = PotentialSpec.from_names("cosine", "zero")
    v = gaussian_distribution(pg)
    out = mean_field_classical(v, pot)
    assert np.allclose(out, np.cos(pg.x), atol=1e-12)


def test_mean_field_gaussian_convolution():
    # narrow phase density against a Gaussian kernel: closed-form convolution
    pg = PhaseGrid(-6.0, 6.0, -4.0, 4.0, 192, 96)
    c, s = 0.5, 1.2
    pot = PotentialSpec.from_names("zero", "gaussian_W", w_params={"c": c, "s": s})
    x0, sx = 0.8, 0.25
    v = gaussian_distribution(pg, x0=x0, sx=sx)
    out = mean_field_classical(v, pot)
    s_eff = np.sqrt(s ** 2 + 2 * sx ** 2)
    ref = c * s / s_eff * np.exp(-((pg.x - x0) / s_eff) ** 2)
    assert np.max(np.abs(out - ref)) < 1e-4


def test_mean_field_linearity():
    pg = PhaseGrid(-6.0, 6.0, -4.0, 4.0, 96, 64)
    pot = PotentialSpec.from_names("zero", "gaussian_W")
    v1 = gaussian_distribution(pg, x0=-0.7)
    v2 = gaussian_distribution(pg, x0=0.9)
    a = 0.3
    mix = Symbol(a * v1.values + (1 - a) * v2.values, pg)
    lhs = mean_field_classical(mix, pot)
    rhs = a * mean_field_classical(v1, pot) + (1 - a) * mean_field_classical(v2, pot)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_l1_distance_basics():
    pg = PhaseGrid(-6.0, 6.0, -4.0, 4.0, 192, 64)
    a = gaussian_distribution(pg, x0=-3.2, sx=0.45)
    b = gaussian_distribution(pg, x0=3.2, sx=0.45)
    assert l1_distance(a, a) == 0.0
    assert l1_distance(a, b) == pytest.approx(2.0, abs=1e-6)


def test_l1_distance_shifted_gaussian_closed_form():
    pg = PhaseGrid(-6.0, 6.0, -4.0, 4.0, 512, 192)
    s = 0.6
    c = 0.9
    a = gaussian_distribution(pg, x0=0.0, sx=s, sxi=s)
    b = gaussian_distribution(pg, x0=c, sx=s, sxi=s)
    # distance is the 1-D two-Gaussian overlap along the shift: 2 erf(c / (2 sqrt2 s))
    ref = 2.0 * erf(c / (2.0 * np.sqrt(2.0) * s))
    assert l1_distance(a, b) == pytest.approx(ref, abs=1e-4)


def test_vlasov_free_transport():
    pg = PhaseGrid(-8.0, 8.0, -3.0, 3.0, 256, 96)
    pot = PotentialSpec.from_names("zero", "zero")
    v0 = gaussian_distribution(pg, sx=0.8, sxi=0.5)
    solver = VlasovSolver(v0.values, pg, pot, dt=pg.dx / 6.0)
    for _ in range(100):
        solver.step()
    t = solver.t
    X, XI = pg.meshes()
    ref = np.exp(-((X - 2 * t * XI) / 0.8) ** 2 / 2 - (XI / 0.5) ** 2 / 2)
    ref /= ref.sum() * pg.cell_area
    assert np.max(np.abs(solver.values - ref)) < 1e-4 * ref.max()


def test_vlasov_harmonic_rotation():
    pg = PhaseGrid(-4.0, 4.0, -3.5, 3.5, 224, 160)
    pot = PotentialSpec.from_names("harmonic", "zero")
    v0 = gaussian_distribution(pg, x0=1.0, sx=0.5, sxi=0.5)
    period = np.pi
    n_steps = 640
    solver = VlasovSolver(v0.values, pg, pot, dt=period / n_steps)
    for _ in range(n_steps):
        solver.step()
    assert l1_distance(solver.distribution(), v0) < 1e-2


def test_vlasov_mass_conservation_interacting():
    # confining trap with a Gaussian interaction: a 5-unit-time run keeps
    # the mass and stays clear of the undershoot guard
    pg = PhaseGrid(-6.0, 6.0, -4.0, 4.0, 224, 192)
    pot = PotentialSpec.from_names("harmonic", "gaussian_W",
                                   v_params={"a": 0.5},
                                   w_params={"c": 0.3, "s": 1.0})
    v0 = gaussian_distribution(pg, x0=0.8, sx=0.7, sxi=0.6)
    solver = VlasovSolver(v0.values, pg, pot, dt=0.006)
    solver.run_until(5.0)
    mass = solver.values.sum() * pg.cell_area
    assert abs(mass - 1.0) < 1e-4
    assert min(r.min_value for r in solver.reports) > -1e-6 * solver.values.max()


def test_vlasov_step_jacobian_symplectic():
    # the frozen-field characteristic map has unit Jacobian to O(dt^3)
    pot = PotentialSpec.from_names("cosine", "zero")
    V = pot.V
    dt = 0.01
    eps = 1e-5

    def backward(x, xi):
        p_half = xi - 0.5 * dt * (-V.deriv(x, 1))
        x_f = x - 2.0 * dt * p_half
        xi_f = p_half - 0.5 * dt * (-V.deriv(x_f, 1))
        return x_f, xi_f

    for (x, xi) in ((0.3, 0.5), (-1.1, -0.2), (0.9, 1.4)):
        xp, _ = backward(x + eps, xi)
        xm, _ = backward(x - eps, xi)
        _, pp = backward(x, xi + eps)
        _, pm = backward(x, xi - eps)
        j11 = (xp - xm) / (2 * eps)
        j22 = (pp - pm) / (2 * eps)
        xpp, ppp = backward(x + eps, xi)
        xmm, pmm = backward(x - eps, xi)
        j21 = (ppp - pmm) / (2 * eps)
        xq, _ = backward(x, xi + eps)
        xr, _ = backward(x, xi - eps)
        j12 = (xq - xr) / (2 * eps)
        det = j11 * j22 - j12 * j21
        assert abs(det - 1.0) < 10 * dt ** 3 + 1e-8


def test_vlasov_time_reversibility():
    pg = PhaseGrid(-6.0, 6.0, -4.0, 4.0, 192, 128)
    pot = PotentialSpec.from_names("harmonic", "zero")
    v0 = gaussian_distribution(pg, x0=0.6, sx=0.6, sxi=0.6)
    fwd = VlasovSolver(v0.values, pg, pot, dt=0.01)
    f0 = fwd._force(fwd.values)
    ahead = fwd._advect(fwd.values, fwd.dt, f0)
    back = fwd._advect(ahead, -fwd.dt, f0)
    assert np.max(np.abs(back - v0.values)) < 1e-3 * v0.values.max()
