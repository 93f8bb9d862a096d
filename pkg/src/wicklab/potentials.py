"""Named potential presets with analytic derivatives and heat smoothings.

The external potential V and the even interaction kernel W come from a
fixed preset family (zero, harmonic, cosine, gaussian), so smoothness and
bounded derivatives hold by construction.  Each preset knows its
derivatives to 4th order and its 1-D heat smoothing

    (e^{(h/4) d^2/dx^2} V)(x),

needed by the mean-field comparisons: zero and x^2 + h/2 are exact, a
cosine picks up the factor e^{-h b^2/4}, a Gaussian widens.
"""

from __future__ import annotations

import numpy as np


class Potential:
    """One preset: value, derivatives to order 4, heat smoothing."""

    def __init__(self, preset: str, **params):
        self.preset = preset
        self.params = dict(params)
        if preset == "zero":
            pass
        elif preset == "harmonic":
            self.a = float(params.get("a", 1.0))
        elif preset == "cosine":
            self.a = float(params.get("a", 1.0))
            self.b = float(params.get("b", 1.0))
        elif preset == "gaussian":
            self.c = float(params.get("c", 0.5))
            self.s = float(params.get("s", 1.0))
        else:
            raise ValueError(f"unknown potential preset {preset!r}")

    def __call__(self, x):
        return self.deriv(x, 0)

    def deriv(self, x, order: int):
        x = np.asarray(x, dtype=float)
        if order > 4:
            raise ValueError("derivative tables stop at order 4")
        if self.preset == "zero":
            return np.zeros_like(x)
        if self.preset == "harmonic":
            a = self.a
            return {0: a * x * x, 1: 2 * a * x, 2: 2 * a * np.ones_like(x)}.get(
                order, np.zeros_like(x))
        if self.preset == "cosine":
            a, b = self.a, self.b
            cycle = [np.cos, lambda u: -np.sin(u), lambda u: -np.cos(u), np.sin]
            return a * b ** order * cycle[order % 4](b * x)
        # gaussian c*exp(-x^2/s^2)
        c, s = self.c, self.s
        g = np.exp(-(x / s) ** 2)
        t = x / s ** 2
        polys = {
            0: np.ones_like(x),
            1: -2 * t,
            2: 4 * t ** 2 - 2 / s ** 2,
            3: -8 * t ** 3 + 12 * t / s ** 2,
            4: 16 * t ** 4 - 48 * t ** 2 / s ** 2 + 12 / s ** 4,
        }
        return c * polys[order] * g

    def heat(self, x, h: float, order: int = 0):
        """(e^{(h/4) Dxx} V)^(order) evaluated at x."""
        x = np.asarray(x, dtype=float)
        if self.preset == "zero":
            return np.zeros_like(x)
        if self.preset == "harmonic":
            a = self.a
            if order == 0:
                return a * (x * x + h / 2.0)
            return Potential("harmonic", a=self.a).deriv(x, order)
        if self.preset == "cosine":
            damp = np.exp(-h * self.b ** 2 / 4.0)
            return damp * self.deriv(x, order)
        # gaussian: variance s^2/2 gains h/2, amplitude scales to keep mass
        s2 = self.s ** 2 + h
        eff = Potential("gaussian", c=self.c * self.s / np.sqrt(s2), s=np.sqrt(s2))
        return eff.deriv(x, order)

    def sup_norm(self, x_window: np.ndarray) -> float:
        return float(np.max(np.abs(self(x_window))))


def potential_preset(name: str, **params) -> Potential:
    alias = {"gaussian_W": "gaussian"}
    return Potential(alias.get(name, name), **params)


class PotentialSpec:
    """The pair (V, W): external potential and even interaction kernel."""

    def __init__(self, V: Potential, W: Potential):
        self.V = V
        self.W = W

    @classmethod
    def from_names(cls, v_name: str = "zero", w_name: str = "zero",
                   v_params: dict | None = None, w_params: dict | None = None):
        return cls(potential_preset(v_name, **(v_params or {})),
                   potential_preset(w_name, **(w_params or {})))

    @property
    def interacting(self) -> bool:
        return self.W.preset != "zero"


def convolve_interaction(W: Potential, density: np.ndarray, x: np.ndarray,
                         order: int = 0) -> np.ndarray:
    """(d/dx)^order of  integral W(x-y) density(y) dy  on the uniform grid x.

    Linear (non-periodic) convolution: the kernel derivative is evaluated
    analytically on the lag grid and summed against the density.
    """
    if W.preset == "zero":
        return np.zeros_like(x)
    from scipy.signal import fftconvolve

    dx = x[1] - x[0]
    n = len(x)
    lags = dx * np.arange(-(n - 1), n)
    ker = W.deriv(lags, order)
    # valid-mode entry i is sum_j density[j] * ker[(i-j) + (n-1)], the lag x_i - x_j
    return dx * fftconvolve(density, ker, mode="valid")
