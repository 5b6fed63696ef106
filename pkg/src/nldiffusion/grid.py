"""Uniform Cartesian 3D grids and second-order difference operators.

Scalar fields are plain ``(nx, ny, nz)`` float arrays, vector fields are
``(3, nx, ny, nz)`` arrays.  Every operator takes the :class:`Grid3` they live
on.  Under ``Boundary.PERIODIC`` indices wrap; under ``Boundary.FREE_DECAY``
one ghost layer is filled with a constant (``fill``, zero by default), i.e.
the field is taken to sit at its far-field value outside the box.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Boundary",
    "Grid3",
    "laplacian",
    "gradient",
    "divergence",
    "div_coef_grad",
    "div_D_grad",
]


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    FREE_DECAY = "free_decay"


@dataclass(frozen=True)
class Grid3:
    nx: int
    ny: int
    nz: int
    h: float
    origin: tuple = (0.0, 0.0, 0.0)
    boundary: Boundary = Boundary.FREE_DECAY

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 3:
            raise ValueError("each axis needs at least 3 points")
        if not self.h > 0:
            raise ValueError("grid spacing must be positive")
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @classmethod
    def centered(cls, n, length=1.0, boundary=Boundary.FREE_DECAY):
        """``n**3`` cell-centred samples of the cube ``[-length/2, length/2]**3``."""
        h = length / n
        o = -0.5 * length + 0.5 * h
        return cls(n, n, n, h, (o, o, o), boundary)

    @property
    def shape(self):
        return (self.nx, self.ny, self.nz)

    @property
    def size(self):
        return self.nx * self.ny * self.nz

    @property
    def cell_volume(self):
        return self.h**3

    @property
    def lengths(self):
        return (self.nx * self.h, self.ny * self.h, self.nz * self.h)

    @property
    def center(self):
        return tuple(o + 0.5 * (n - 1) * self.h for o, n in zip(self.origin, self.shape))

    def axes(self):
        return tuple(o + self.h * np.arange(n) for o, n in zip(self.origin, self.shape))

    def coords(self):
        """Sample coordinates as three ``(nx, ny, nz)`` arrays."""
        return np.meshgrid(*self.axes(), indexing="ij")

    def radius(self, center=None):
        center = self.center if center is None else center
        x, y, z = self.coords()
        return np.sqrt((x - center[0]) ** 2 + (y - center[1]) ** 2 + (z - center[2]) ** 2)

    def interior(self, fraction=0.6):
        """Index slices of the central ``fraction`` of every axis."""
        def sl(n):
            lo = int((1.0 - fraction) / 2.0 * n)
            return slice(lo, n - lo)
        return (sl(self.nx), sl(self.ny), sl(self.nz))

    def refine(self):
        """The same box sampled with half the spacing."""
        h = self.h / 2
        origin = tuple(o - 0.5 * self.h + 0.5 * h for o in self.origin)
        return Grid3(2 * self.nx, 2 * self.ny, 2 * self.nz, h, origin, self.boundary)

    def zeros(self):
        return np.zeros(self.shape)


def _pad(f, grid, fill):
    if grid.boundary is Boundary.PERIODIC:
        return np.pad(f, 1, mode="wrap")
    return np.pad(f, 1, mode="constant", constant_values=fill)


def laplacian(f, grid, fill=0.0):
    """7-point second-order Laplacian."""
    p = _pad(np.asarray(f, dtype=float), grid, fill)
    c = p[1:-1, 1:-1, 1:-1]
    # differences first, so constants give exact zeros
    out = (
        ((p[2:, 1:-1, 1:-1] - c) + (p[:-2, 1:-1, 1:-1] - c))
        + ((p[1:-1, 2:, 1:-1] - c) + (p[1:-1, :-2, 1:-1] - c))
        + ((p[1:-1, 1:-1, 2:] - c) + (p[1:-1, 1:-1, :-2] - c))
    )
    return out / grid.h**2


def gradient(f, grid, fill=0.0):
    """Central-difference gradient, shape ``(3, nx, ny, nz)``."""
    p = _pad(np.asarray(f, dtype=float), grid, fill)
    inv = 0.5 / grid.h
    return np.stack([
        (p[2:, 1:-1, 1:-1] - p[:-2, 1:-1, 1:-1]) * inv,
        (p[1:-1, 2:, 1:-1] - p[1:-1, :-2, 1:-1]) * inv,
        (p[1:-1, 1:-1, 2:] - p[1:-1, 1:-1, :-2]) * inv,
    ])


def divergence(v, grid, fill=0.0):
    """Central-difference divergence of a ``(3, nx, ny, nz)`` field."""
    v = np.asarray(v, dtype=float)
    inv = 0.5 / grid.h
    px = _pad(v[0], grid, fill)
    py = _pad(v[1], grid, fill)
    pz = _pad(v[2], grid, fill)
    return (
        (px[2:, 1:-1, 1:-1] - px[:-2, 1:-1, 1:-1])
        + (py[1:-1, 2:, 1:-1] - py[1:-1, :-2, 1:-1])
        + (pz[1:-1, 1:-1, 2:] - pz[1:-1, 1:-1, :-2])
    ) * inv


def _face_mean(a, b, mean):
    if mean == "harmonic":
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 2.0 * a * b / (a + b)
        return np.where(a + b == 0, 0.0, out)
    return 0.5 * (a + b)


def div_coef_grad(coef, u, grid, coef_fill=0.0, u_fill=0.0, mean="arithmetic"):
    """Conservative flux form of ``div(coef * grad u)``.

    Face coefficients are the mean of the two adjacent cell values; the
    result is a difference of face fluxes, so on periodic grids it sums to
    zero up to round-off.
    """
    k = _pad(np.asarray(coef, dtype=float), grid, coef_fill)
    p = _pad(np.asarray(u, dtype=float), grid, u_fill)
    out = np.zeros(grid.shape)
    for axis in range(3):
        lo = [slice(1, -1)] * 3
        hi = [slice(1, -1)] * 3
        # faces between padded cells i and i+1 along this axis, i = 0..n
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        kf = _face_mean(k[tuple(lo)], k[tuple(hi)], mean)
        flux = kf * (p[tuple(hi)] - p[tuple(lo)])
        right = [slice(None)] * 3
        left = [slice(None)] * 3
        right[axis] = slice(1, None)
        left[axis] = slice(0, -1)
        out += flux[tuple(right)] - flux[tuple(left)]
    return out / grid.h**2


def div_D_grad(c, grid, model, mean="arithmetic", clamp=True):
    """``div(D(c) grad c)`` in flux form.

    The ghost layer of a free-decay grid holds the far-field concentration
    ``model.c_ref``.
    """
    c = np.asarray(c, dtype=float)
    cc = model.clamp(c) if clamp else c
    far = model.c_ref
    d = model.D(cc)
    return div_coef_grad(d, c, grid, coef_fill=model.D(model.clamp(far)), u_fill=far, mean=mean)
