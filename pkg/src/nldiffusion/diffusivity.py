"""Concentration-dependent diffusion laws D(c) and the Kirchhoff transform.

Each law knows its value, its derivatives in c, the transform

    F(c) = integral of D(s) ds from c_ref to c,

the inverse of that transform, and how to compose itself with a Taylor
series in time, i.e. how to turn the coefficients of c(t) into those of
D(c(t)).  All evaluation methods are vectorised over numpy arrays.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, RangeError, UnsupportedOrderError

__all__ = [
    "DiffusivityModel",
    "Constant",
    "PowerLaw",
    "Exponential",
    "Tabulated",
    "eval_D",
    "eval_D_derivs",
    "kirchhoff_F",
    "inverse_F",
    "taylor_compose_D",
    "model_from_params",
]


def _out(x, like):
    """Return a Python float for scalar input, an ndarray otherwise."""
    if np.ndim(like) == 0:
        return float(x)
    return x


@dataclass(frozen=True)
class DiffusivityModel:
    """Base class for diffusion laws.

    ``c_ref`` is the lower limit of the Kirchhoff integral.  ``c_min`` is the
    floor used by :meth:`clamp` for laws whose domain excludes ``c <= 0``.
    """

    c_ref: float = field(default=0.0, kw_only=True)
    c_min: float = field(default=1e-12, kw_only=True)

    kind = "abstract"
    max_order = None  # highest supported derivative order, None = unlimited

    # -- domain -----------------------------------------------------------
    def interval(self):
        """Validity interval as ``(lo, hi, lo_closed, hi_closed)``."""
        return -math.inf, math.inf, False, False

    def check_domain(self, c):
        lo, hi, lo_closed, hi_closed = self.interval()
        c = np.asarray(c, dtype=float)
        bad = (c < lo) if lo_closed else (c <= lo)
        bad |= (c > hi) if hi_closed else (c >= hi)
        if np.isfinite(lo) or np.isfinite(hi):
            if np.any(bad):
                worst = c[bad].flat[0]
                left = "[" if lo_closed else "("
                right = "]" if hi_closed else ")"
                raise DomainError(
                    f"{self.kind}: concentration {worst!r} outside validity "
                    f"interval {left}{lo}, {hi}{right}"
                )

    def clamp(self, c):
        """Clamp ``c`` into the validity interval (``c_min`` for open zero)."""
        lo, hi, lo_closed, hi_closed = self.interval()
        c = np.asarray(c, dtype=float)
        if np.isfinite(lo):
            c = np.maximum(c, lo if lo_closed else max(lo, self.c_min))
        if np.isfinite(hi):
            c = np.minimum(c, hi)
        return c

    # -- evaluation -------------------------------------------------------
    def D(self, c):
        return self.derivs(c, 0)[0]

    def derivs(self, c, order):
        """Return ``[D(c), D'(c), ..., D^(order)(c)]``."""
        if order < 0:
            raise ValueError("order must be >= 0")
        if self.max_order is not None and order > self.max_order:
            raise UnsupportedOrderError(
                f"{self.kind} supports derivatives up to order {self.max_order}, "
                f"got {order}"
            )
        self.check_domain(c)
        c_arr = np.asarray(c, dtype=float)
        return [_out(v, c) for v in self._derivs(c_arr, order)]

    def F(self, c):
        self.check_domain(c)
        return _out(self._F(np.asarray(c, dtype=float)), c)

    def inverse_F(self, f, rtol=1e-12, maxiter=200):
        """Solve ``F(c) = f`` by safeguarded Newton with bisection fallback."""
        f_arr = np.atleast_1d(np.asarray(f, dtype=float))
        lo, hi = self._bracket(f_arr)
        c = np.clip(np.full_like(f_arr, self.c_ref), lo, hi)
        c = np.where(np.isfinite(c), c, 0.5 * (lo + hi))
        tol = rtol * np.maximum(1.0, np.abs(f_arr))
        for _ in range(maxiter):
            g = self._F(c) - f_arr
            done = np.abs(g) <= tol
            if np.all(done):
                break
            hi = np.where(g > 0, c, hi)
            lo = np.where(g < 0, c, lo)
            d = self._derivs(c, 0)[0]
            with np.errstate(divide="ignore", invalid="ignore"):
                step = c - g / d
            bisect = 0.5 * (lo + hi)
            ok = np.isfinite(step) & (step > lo) & (step < hi)
            c = np.where(done, c, np.where(ok, step, bisect))
        # one polishing Newton step, kept only where it helps
        g = self._F(c) - f_arr
        with np.errstate(divide="ignore", invalid="ignore"):
            polished = c - g / self._derivs(c, 0)[0]
            better = np.abs(self._F(polished) - f_arr) < np.abs(g)
        c = np.where(np.isfinite(polished) & better, polished, c)
        return _out(c if np.ndim(f) else c[0], f)

    def _bracket(self, f):
        lo_c, hi_c, lo_closed, _ = self.interval()
        if np.isfinite(lo_c) and not lo_closed:
            lo_c = lo_c + self.c_min
        start = self.c_ref if np.isfinite(self.c_ref) else 0.0
        lo = np.full_like(f, lo_c)
        hi = np.full_like(f, hi_c)
        # grow unbounded ends geometrically until they enclose f
        for side, arr, sign in (("hi", hi, 1.0), ("lo", lo, -1.0)):
            unbounded = ~np.isfinite(arr)
            if not np.any(unbounded):
                continue
            width = 1.0
            probe = np.full_like(f, np.nan)
            todo = unbounded.copy()
            for _ in range(1100):
                probe[todo] = start + sign * width
                with np.errstate(over="ignore", invalid="ignore"):
                    val = self._F(probe)
                enclosed = (val >= f) if sign > 0 else (val <= f)
                todo &= ~enclosed
                if not np.any(todo) or not np.isfinite(width):
                    break
                width *= 2.0
            if np.any(todo):
                raise RangeError(f"{self.kind}: Kirchhoff potential outside range of F")
            arr[unbounded] = probe[unbounded]
        with np.errstate(over="ignore", invalid="ignore"):
            f_lo, f_hi = self._F(lo), self._F(hi)
        tol = 1e-12 * np.maximum(1.0, np.abs(f))
        if np.any(f < f_lo - tol) or np.any(f > f_hi + tol):
            raise RangeError(f"{self.kind}: Kirchhoff potential outside range of F")
        return lo, hi

    def compose(self, a):
        """Taylor coefficients of ``D(c(t))`` from those of ``c(t)``."""
        if len(a) == 0:
            raise ValueError("need at least one coefficient")
        a = [np.asarray(x, dtype=float) for x in a]
        a0 = self.clamp(a[0])
        d = self._compose(a0, a)
        return [_out(x, a[0]) if np.ndim(x) == 0 else x for x in d]

    # -- to implement -----------------------------------------------------
    def _derivs(self, c, order):
        raise NotImplementedError

    def _F(self, c):
        raise NotImplementedError

    def _compose(self, a0, a):
        raise NotImplementedError

    def params(self):
        """Parameters as a plain dict (for reports)."""
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(DiffusivityModel):
    D0: float = 1.0
    kind = "constant"

    def __post_init__(self):
        if not self.D0 > 0:
            raise ValueError("D0 must be positive")

    def _derivs(self, c, order):
        return [np.full_like(c, self.D0)] + [np.zeros_like(c) for _ in range(order)]

    def _F(self, c):
        return self.D0 * (c - self.c_ref)

    def _compose(self, a0, a):
        return [np.full_like(a0, self.D0)] + [np.zeros_like(a0) for _ in a[1:]]

    def params(self):
        return {"kind": self.kind, "D0": self.D0, "c_ref": self.c_ref}


@dataclass(frozen=True)
class PowerLaw(DiffusivityModel):
    """``D(c) = D0 * c**m``; non-integer ``m`` needs ``c > 0``."""

    D0: float = 1.0
    m: float = 1.0
    kind = "powerlaw"

    def __post_init__(self):
        if not self.D0 > 0:
            raise ValueError("D0 must be positive")

    @property
    def integer_exponent(self):
        return float(self.m).is_integer() and self.m >= 0

    def interval(self):
        return 0.0, math.inf, self.integer_exponent, False

    def _derivs(self, c, order):
        out = []
        coef = self.D0
        for k in range(order + 1):
            if coef == 0.0:
                out.append(np.zeros_like(c))
            else:
                out.append(coef * np.power(c, self.m - k))
            coef *= self.m - k
        return out

    def _F(self, c):
        if self.m == -1:
            return self.D0 * np.log(c / self.c_ref)
        p = self.m + 1.0
        return self.D0 * (np.power(c, p) - self.c_ref**p) / p

    def _compose(self, a0, a):
        n = len(a) - 1
        if self.integer_exponent:
            # c(t)**m by repeated Cauchy products; no division by a0
            series = [np.full_like(a0, self.D0)] + [np.zeros_like(a0) for _ in range(n)]
            base = [a0] + a[1:]
            for _ in range(int(self.m)):
                series = [
                    sum(series[j] * base[k - j] for j in range(k + 1)) for k in range(n + 1)
                ]
            return series
        d = [self.D0 * np.power(a0, self.m)]
        for k in range(1, n + 1):
            acc = np.zeros_like(a0)
            for j in range(1, k + 1):
                acc = acc + (self.m * j - (k - j)) * a[j] * d[k - j]
            d.append(acc / (k * a0))
        return d

    def params(self):
        return {"kind": self.kind, "D0": self.D0, "m": self.m, "c_ref": self.c_ref}


@dataclass(frozen=True)
class Exponential(DiffusivityModel):
    """``D(c) = D0 * exp(beta * c)``."""

    D0: float = 1.0
    beta: float = 1.0
    kind = "exponential"

    def __post_init__(self):
        if not self.D0 > 0:
            raise ValueError("D0 must be positive")

    def _derivs(self, c, order):
        base = self.D0 * np.exp(self.beta * c)
        return [base * self.beta**k for k in range(order + 1)]

    def _F(self, c):
        if self.beta == 0:
            return self.D0 * (c - self.c_ref)
        return self.D0 / self.beta * (np.exp(self.beta * c) - math.exp(self.beta * self.c_ref))

    def _compose(self, a0, a):
        # d' = beta * D * c'
        d = [self.D0 * np.exp(self.beta * a0)]
        for k in range(1, len(a)):
            acc = np.zeros_like(a0)
            for j in range(1, k + 1):
                acc = acc + j * a[j] * d[k - j]
            d.append(self.beta * acc / k)
        return d

    def params(self):
        return {"kind": self.kind, "D0": self.D0, "beta": self.beta, "c_ref": self.c_ref}


@dataclass(frozen=True)
class Tabulated(DiffusivityModel):
    """Monotone piecewise-cubic interpolant through ``(c_i, D_i)`` knots."""

    knots: tuple = ()
    kind = "tabulated"
    max_order = 2

    def __post_init__(self):
        knots = tuple((float(c), float(v)) for c, v in self.knots)
        if len(knots) < 2:
            raise ValueError("need at least two knots")
        cs = np.array([k[0] for k in knots])
        ds = np.array([k[1] for k in knots])
        if np.any(np.diff(cs) <= 0):
            raise ValueError("knot concentrations must be strictly increasing")
        if np.any(ds <= 0):
            raise ValueError("knot diffusivities must be positive")
        object.__setattr__(self, "knots", knots)
        interp = PchipInterpolator(cs, ds, extrapolate=False)
        object.__setattr__(self, "_interp", interp)
        object.__setattr__(self, "_derivatives", [interp, interp.derivative(1), interp.derivative(2)])
        object.__setattr__(self, "_antideriv", interp.antiderivative())

    @classmethod
    def from_csv(cls, path, **kwargs):
        """Read a two-column ``c,D`` CSV file with a header row."""
        with open(Path(path), newline="") as fh:
            reader = csv.reader(fh)
            header = [h.strip() for h in next(reader)]
            if header[:2] != ["c", "D"]:
                raise ValueError(f"{path}: expected header 'c,D', got {','.join(header)}")
            rows = [(float(r[0]), float(r[1])) for r in reader if r and r[0].strip()]
        return cls(knots=tuple(rows), **kwargs)

    def interval(self):
        return self.knots[0][0], self.knots[-1][0], True, True

    def _derivs(self, c, order):
        return [self._derivatives[k](c) for k in range(order + 1)]

    def _F(self, c):
        return self._antideriv(c) - self._antideriv(self.c_ref)

    def _compose(self, a0, a):
        n = len(a) - 1
        if n > 2:
            raise UnsupportedOrderError("tabulated laws compose only up to order 2")
        D, D1, D2 = self._derivs(a0, 2)
        d = [D]
        if n >= 1:
            d.append(D1 * a[1])
        if n >= 2:
            d.append(D1 * a[2] + 0.5 * D2 * a[1] ** 2)
        return d

    def params(self):
        return {"kind": self.kind, "knots": [list(k) for k in self.knots], "c_ref": self.c_ref}


def eval_D(model, c):
    return model.D(c)


def eval_D_derivs(model, c, order):
    return model.derivs(c, order)


def kirchhoff_F(model, c):
    return model.F(c)


def inverse_F(model, f):
    return model.inverse_F(f)


def taylor_compose_D(model, c_coeffs):
    return model.compose(c_coeffs)


def model_from_params(params):
    """Build a model from a flat mapping such as a config section.

    Recognised keys: ``kind`` plus ``D0``, ``m``, ``beta``, ``knots``,
    ``table_file``, ``c_ref`` and ``c_min``.
    """
    params = dict(params)
    kind = str(params.pop("kind")).lower()
    common = {k: float(params.pop(k)) for k in ("c_ref", "c_min") if k in params}
    if kind == "constant":
        return Constant(D0=float(params.pop("D0", 1.0)), **common)
    if kind == "powerlaw":
        return PowerLaw(D0=float(params.pop("D0", 1.0)), m=float(params.pop("m", 1.0)), **common)
    if kind == "exponential":
        return Exponential(
            D0=float(params.pop("D0", 1.0)), beta=float(params.pop("beta", 1.0)), **common
        )
    if kind == "tabulated":
        if "table_file" in params:
            return Tabulated.from_csv(params.pop("table_file"), **common)
        return Tabulated(knots=tuple(params.pop("knots")), **common)
    raise ValueError(f"unknown diffusivity kind {kind!r}")
