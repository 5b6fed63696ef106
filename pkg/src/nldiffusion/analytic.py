"""Closed-form solutions used as oracles for dc/dt = div(D(c) grad c)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import beta as beta_fn

__all__ = ["HeatGaussian", "BarenblattPattle", "analytic_eval"]


@dataclass(frozen=True)
class HeatGaussian:
    """Spreading Gaussian for constant ``D0``; ``sigma0_sq`` is the per-axis
    variance at t = 0."""

    D0: float
    mass: float
    sigma0_sq: float
    center: tuple = None

    def __post_init__(self):
        if min(self.D0, self.mass, self.sigma0_sq) <= 0:
            raise ValueError("HeatGaussian parameters must be positive")

    @property
    def tau0(self):
        return self.sigma0_sq / (2.0 * self.D0)

    def __call__(self, grid, t):
        if t < 0:
            raise ValueError("t must be >= 0")
        s = 4.0 * self.D0 * (t + self.tau0)
        r2 = grid.radius(self.center) ** 2
        return self.mass * (math.pi * s) ** -1.5 * np.exp(-r2 / s)


@dataclass(frozen=True)
class BarenblattPattle:
    """Self-similar compact-support solution for ``D(c) = D0 c**m`` in 3D.

    ``c = s**-alpha * (C - k r^2 s**(-2 beta))_+ ** (1/m)`` with
    ``s = D0 (t + t0) / (m + 1)``, ``alpha = 3/(3m+2)``, ``beta = 1/(3m+2)``,
    ``k = m / (2 (m+1) (3m+2))`` and ``C`` fixed by the total mass.
    """

    D0: float
    m: float
    mass: float
    t0: float
    center: tuple = None

    def __post_init__(self):
        if min(self.D0, self.m, self.mass, self.t0) <= 0:
            raise ValueError("BarenblattPattle parameters must be positive")

    @property
    def alpha(self):
        return 3.0 / (3.0 * self.m + 2.0)

    @property
    def beta(self):
        return 1.0 / (3.0 * self.m + 2.0)

    @property
    def k(self):
        m = self.m
        return m / (2.0 * (m + 1.0) * (3.0 * m + 2.0))

    @property
    def C(self):
        # mass = 2 pi B(3/2, 1/m + 1) k^(-3/2) C^(1/m + 3/2)
        p = 1.0 / self.m
        unit = 2.0 * math.pi * beta_fn(1.5, p + 1.0) * self.k**-1.5
        return (self.mass / unit) ** (1.0 / (p + 1.5))

    def similarity_time(self, t):
        return self.D0 * (t + self.t0) / (self.m + 1.0)

    def front_radius(self, t):
        return math.sqrt(self.C / self.k) * self.similarity_time(t) ** self.beta

    def profile(self, r, t):
        if t + self.t0 <= 0:
            raise ValueError("need t + t0 > 0")
        s = self.similarity_time(t)
        core = self.C - self.k * np.asarray(r, dtype=float) ** 2 * s ** (-2.0 * self.beta)
        return s**-self.alpha * np.maximum(core, 0.0) ** (1.0 / self.m)

    def __call__(self, grid, t):
        return self.profile(grid.radius(self.center), t)


def analytic_eval(sol, grid, t):
    return sol(grid, t)
