"""MacLaurin-in-time solution of dc/dt = lap F(c).

Coefficients are kept in monomial form, ``c(t) = sum a_n t**n`` and
``F(c(t)) = sum f_n t**n``.  Writing the PDE order by order gives

    (n + 1) a_{n+1} = lap f_n
    (n + 1) f_{n+1} = sum_{k=0..n} d_{n-k} (k + 1) a_{k+1}      (F' = D c')

where ``d_n`` are the coefficients of ``D(c(t))``.  Starting from
``a_0 = c0`` the three sequences are filled in the order
a_0 -> f_0, d_0 -> a_1 -> d_1, f_1 -> a_2 -> ...
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SeriesDivergenceError
from .grid import laplacian

__all__ = [
    "TaylorState",
    "RemainderEstimate",
    "build_series",
    "evaluate",
    "evaluate_F",
    "remainder_estimate",
    "next_term_estimate",
    "convergence_radius",
    "DEFAULT_ORDER",
    "MAX_ORDER",
]

DEFAULT_ORDER = 12
MAX_ORDER = 30
OVERFLOW = 1e100


@dataclass(frozen=True)
class TaylorState:
    """Series coefficients about t = 0.

    ``a`` holds ``N + 2`` fields (through ``a_{N+1}``), ``f`` and ``d`` hold
    ``N + 1``.  ``f_next`` is ``f_{N+1}``, so that :func:`evaluate_F` can
    stop at the same power of t as :func:`evaluate`.  ``a_next`` is
    ``a_{N+2}``, kept only for the next-term magnitude reported next to the
    remainder estimate.
    """

    model: object
    grid: object
    order: int
    a: list
    f: list
    d: list
    a_next: np.ndarray
    f_next: np.ndarray = None
    clamped_cells: int = 0
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RemainderEstimate:
    field: np.ndarray
    linf: float
    next_term_linf: float


def _horner(coeffs, t):
    out = np.array(coeffs[-1], dtype=float, copy=True)
    for c in reversed(coeffs[:-1]):
        out *= t
        out += c
    return out


def build_series(c0, model, grid, order=DEFAULT_ORDER):
    """Taylor coefficients of the solution with initial field ``c0``.

    ``order`` is N in the truncated sum; coefficients up to ``a_{N+1}`` are
    produced.  Raises :class:`SeriesDivergenceError` when a coefficient
    overflows.
    """
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"series order must lie in [0, {MAX_ORDER}], got {order}")
    c0 = np.asarray(c0, dtype=float)
    if c0.shape != grid.shape:
        raise ValueError(f"field shape {c0.shape} does not match grid {grid.shape}")
    base = model.clamp(c0)
    clamped = int(np.count_nonzero(base != c0))

    a = [c0.copy()]
    f = [np.asarray(model.F(base), dtype=float)]
    d = [np.asarray(model.D(base), dtype=float)]
    # F(c_ref) = 0, so a zero ghost layer is the far field for every f_n
    for n in range(order + 1):
        a.append(laplacian(f[n], grid) / (n + 1))
        _check(a[-1], n + 1)
        if n > 0:
            d = model.compose([base] + a[1 : n + 1])
        acc = np.zeros(grid.shape)
        for k in range(n + 1):
            acc += d[n - k] * (k + 1) * a[k + 1]
        f.append(acc / (n + 1))
    a_next = laplacian(f[order + 1], grid) / (order + 2)
    _check(a_next, order + 2)
    return TaylorState(model, grid, order, a, f[: order + 1], d, a_next, f[order + 1], clamped)


def _check(coeff, n):
    scale = np.max(np.abs(coeff))
    if not np.isfinite(scale) or scale > OVERFLOW:
        raise SeriesDivergenceError(n)


def evaluate(state, t):
    """Truncated series ``sum_{n=0..N+1} a_n t**n``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return state.a[0].copy()
    return _horner(state.a, t)


def evaluate_F(state, t):
    """Truncated series ``sum_{n=0..N+1} f_n t**n`` for F(c(t))."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return state.f[0].copy()
    return _horner(state.f + [state.f_next], t)


def remainder_estimate(state, t):
    """Truncation remainder after order N.

    The returned field is ``t**(N+1) / (N+1)! * lap(d^N F/dt^N)`` at t = 0,
    which in monomial coefficients is ``t**(N+1) * lap(f_N) / (N+1)``,
    i.e. ``t**(N+1) * a_{N+1}``.  ``next_term_linf`` is the size of the first
    omitted term, ``|a_{N+2}| t**(N+2)``.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    n = state.order
    fld = laplacian(state.f[n], state.grid) / (n + 1) * t ** (n + 1)
    return RemainderEstimate(
        fld, float(np.max(np.abs(fld))), next_term_estimate(state, t)
    )


def next_term_estimate(state, t):
    return float(np.max(np.abs(state.a_next))) * t ** (state.order + 2)


def convergence_radius(state):
    """Heuristic series horizon from the coefficient ratio test.

    ``min ||a_n|| / ||a_{n+1}||`` over the last three available ratios
    (n = N-2 .. N).  Returns ``math.inf`` when every ``a_n`` with n >= 1
    vanishes (stationary data).
    """
    if state.order < 4:
        raise ValueError("convergence_radius needs order >= 4")
    norms = [float(np.max(np.abs(x))) for x in state.a]
    if all(v == 0.0 for v in norms[1:]):
        return math.inf
    ratios = [
        norms[n] / norms[n + 1]
        for n in range(state.order - 2, state.order + 1)
        if norms[n + 1] > 0
    ]
    return min(ratios) if ratios else math.inf
