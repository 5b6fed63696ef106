"""Free-space solution of lap V = -k with the kernel 1/(4 pi |r|).

Two routes evaluate the same discrete sum

    V_i = sum_{j != i} k_j h^3 / (4 pi |r_i - r_j|) + k_i S_cell,

where ``S_cell`` is the integral of the kernel over one cell centred on its
singularity.  :func:`greens_direct` sums pairs (O(n^2), use as an oracle on
small grids) and :func:`greens_fft` does the same linear convolution through
a zero-padded FFT on a doubled box.
"""
from __future__ import annotations

import enum
import functools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import fft, integrate

from .errors import UnsupportedBoundaryError
from .grid import Boundary, laplacian

__all__ = [
    "Method",
    "PoissonSolution",
    "self_cell_integral",
    "greens_direct",
    "greens_fft",
    "invert_for_F",
    "interior_residual",
    "gaussian_source_potential",
    "FACE_DECAY_THRESHOLD",
]

FACE_DECAY_THRESHOLD = 1e-6


class Method(str, enum.Enum):
    DIRECT_SUM = "direct_sum"
    FFT_CONVOLUTION = "fft_convolution"


@dataclass(frozen=True)
class PoissonSolution:
    V: np.ndarray
    method: Method
    residual_linf: float
    warnings: tuple = field(default=())


@functools.lru_cache(maxsize=None)
def _unit_cube_inverse_distance():
    # integral of 1/|r| over the unit cube centred at 0: split into 6 pyramids
    # with apex at the centre; the radial part integrates analytically.
    a = 0.5
    val, _ = integrate.dblquad(
        lambda z, y: 1.0 / math.sqrt(a * a + y * y + z * z),
        0.0, a, 0.0, a, epsabs=1e-14, epsrel=1e-13,
    )
    return 24.0 * 0.5 * a * val


def self_cell_integral(h):
    """Integral of ``1/(4 pi |r|)`` over a cube of side ``h`` centred at 0."""
    return h * h * _unit_cube_inverse_distance() / (4.0 * math.pi)


def _check_source(k, grid):
    if grid.boundary is not Boundary.FREE_DECAY:
        raise UnsupportedBoundaryError("free-space Green's function needs a free-decay grid")
    k = np.asarray(k, dtype=float)
    if k.shape != grid.shape:
        raise ValueError(f"source shape {k.shape} does not match grid {grid.shape}")
    notes = []
    kmax = np.max(np.abs(k))
    if kmax > 0:
        faces = max(
            np.max(np.abs(k[[0, -1], :, :])),
            np.max(np.abs(k[:, [0, -1], :])),
            np.max(np.abs(k[:, :, [0, -1]])),
        )
        if faces > FACE_DECAY_THRESHOLD * kmax:
            msg = (
                f"source does not decay at the box faces "
                f"(face/max = {faces / kmax:.3g}); free-space result is approximate"
            )
            warnings.warn(msg, RuntimeWarning, stacklevel=3)
            notes.append(msg)
    return k, tuple(notes)


def interior_residual(V, k, grid):
    """``max |lap V + k|`` over the inner 60% of each axis."""
    r = laplacian(V, grid) + k
    return float(np.max(np.abs(r[grid.interior()])))


def greens_direct(k, grid, chunk=512):
    """Pairwise summation of the discrete Green's-function convolution."""
    k, notes = _check_source(k, grid)
    idx = np.indices(grid.shape).reshape(3, -1).T.astype(float)
    src = k.ravel()
    nz = np.flatnonzero(src)
    V = np.zeros(grid.size)
    if nz.size:
        pts = idx[nz]
        w = src[nz] * grid.cell_volume / (4.0 * math.pi * grid.h)
        for start in range(0, grid.size, chunk):
            tgt = idx[start : start + chunk]
            dist = np.sqrt(((tgt[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1))
            with np.errstate(divide="ignore"):
                inv = 1.0 / dist
            inv[dist == 0] = 0.0
            V[start : start + chunk] = inv @ w
        V += src * self_cell_integral(grid.h)
    V = V.reshape(grid.shape)
    return PoissonSolution(V, Method.DIRECT_SUM, interior_residual(V, k, grid), notes)


@functools.lru_cache(maxsize=8)
def _kernel_hat(shape, h):
    axes = []
    for n in shape:
        off = np.arange(2 * n)
        off = np.where(off < n, off, off - 2 * n).astype(float)
        axes.append(off)
        # offset n never couples two in-box cells, so its value is irrelevant
    ix, iy, iz = np.meshgrid(*axes, indexing="ij", sparse=True)
    dist = h * np.sqrt(ix**2 + iy**2 + iz**2)
    with np.errstate(divide="ignore"):
        G = 1.0 / (4.0 * math.pi * dist)
    G[0, 0, 0] = self_cell_integral(h) / h**3
    return fft.rfftn(G)


def greens_fft(k, grid):
    """Zero-padded FFT evaluation of the same sum as :func:`greens_direct`."""
    k, notes = _check_source(k, grid)
    shape = grid.shape
    big = tuple(2 * n for n in shape)
    khat = fft.rfftn(k * grid.cell_volume, s=big)
    V = fft.irfftn(khat * _kernel_hat(shape, grid.h), s=big)
    V = np.ascontiguousarray(V[: shape[0], : shape[1], : shape[2]])
    return PoissonSolution(V, Method.FFT_CONVOLUTION, interior_residual(V, k, grid), notes)


def invert_for_F(dcdt, grid):
    """Field ``F`` with ``lap F = dcdt`` that decays at infinity.

    ``F = -(1/4 pi) * integral of dcdt(r') / |r - r'|``.
    """
    return greens_fft(-np.asarray(dcdt, dtype=float), grid).V


def gaussian_source_potential(r, sigma):
    """Free-space potential of the source ``exp(-r^2 / sigma^2)``.

    ``V(r) = sigma^3 sqrt(pi) erf(r / sigma) / (4 r)``, with ``V(0) = sigma^2 / 2``.
    """
    from scipy.special import erf

    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = sigma**3 * math.sqrt(math.pi) * erf(r / sigma) / (4.0 * r)
    return np.where(r == 0, 0.5 * sigma**2, v)
