"""Initial-condition builders shared by the command line and the demos."""
from __future__ import annotations

import math

import numpy as np

from .analytic import BarenblattPattle
from .diffusivity import PowerLaw
from .fieldio import read_csv, read_vtk

__all__ = ["initial_field", "gaussian", "step", "eigenmode", "barenblatt", "bump"]


def gaussian(grid, amplitude=1.0, sigma=0.15, background=0.0, center=None):
    r = grid.radius(center)
    return background + amplitude * np.exp(-(r**2) / sigma**2)


def bump(grid, radius=0.45, power=4, amplitude=1.0, center=None):
    """Compactly supported ``amplitude * (1 - r^2/radius^2)_+ ** power``."""
    r = grid.radius(center)
    return amplitude * np.clip(1.0 - r**2 / radius**2, 0.0, None) ** power


def step(grid, radius=0.2, inside=1.0, outside=0.0, center=None):
    """Ball of radius ``radius``: discontinuous initial data."""
    return np.where(grid.radius(center) <= radius, inside, outside).astype(float)


def eigenmode(grid, epsilon=0.1, background=1.0, mode=1, axis=0):
    """``background + epsilon * sin(2 pi mode x / L)`` along one axis."""
    x = grid.coords()[axis]
    L = grid.lengths[axis]
    return background + epsilon * np.sin(2.0 * math.pi * mode * x / L)


def eigenmode_rate(grid, D0=1.0, mode=1, axis=0):
    """Decay rate of :func:`eigenmode` under the discrete Laplacian times D0."""
    L = grid.lengths[axis]
    return -D0 * (2.0 - 2.0 * math.cos(2.0 * math.pi * mode * grid.h / L)) / grid.h**2


def barenblatt(grid, model, mass=0.03, t0=None, front_radius=0.25, center=None):
    """Barenblatt-Pattle profile at its own time zero.

    If ``t0`` is not given it is chosen so the front sits at ``front_radius``.
    Returns ``(field, solution)``.
    """
    if not isinstance(model, PowerLaw):
        raise ValueError("barenblatt initial data needs a power-law diffusivity")
    if t0 is None:
        probe = BarenblattPattle(model.D0, model.m, mass, 1.0)
        s = (front_radius / math.sqrt(probe.C / probe.k)) ** (1.0 / probe.beta)
        t0 = s * (model.m + 1.0) / model.D0
    sol = BarenblattPattle(model.D0, model.m, mass, t0, center)
    return sol(grid, 0.0), sol


def initial_field(grid, model, kind, **params):
    """Dispatch on ``kind``; returns ``(field, analytic solution or None)``."""
    kind = kind.lower()
    if kind == "gaussian":
        return gaussian(grid, **params), None
    if kind == "bump":
        return bump(grid, **params), None
    if kind == "step":
        return step(grid, **params), None
    if kind == "eigenmode":
        return eigenmode(grid, **params), None
    if kind == "constant":
        return np.full(grid.shape, float(params.get("value", 1.0))), None
    if kind == "barenblatt":
        return barenblatt(grid, model, **params)
    if kind == "from_file":
        path = str(params["path"])
        reader = read_vtk if path.endswith(".vtk") else read_csv
        values, file_grid = reader(path, grid.boundary)
        if values.shape != grid.shape:
            raise ValueError(f"{path}: field shape {values.shape} does not match grid {grid.shape}")
        return values, None
    raise ValueError(f"unknown initial condition kind {kind!r}")
