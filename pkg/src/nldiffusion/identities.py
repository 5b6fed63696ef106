"""Residuals of the integral and differential identities of nonlinear diffusion.

Each ``residual_*`` function takes a :class:`~nldiffusion.trajectory.Trajectory`
and a snapshot index, evaluates both sides of one identity with the grid
operators, and returns a :class:`ResidualReport`.  Time derivatives are
second-order three-point differences over the stored snapshots; norms are
taken over the inner 60% of each axis.

Free-decay conventions: the far-field concentration is ``model.c_ref``, so
``F`` vanishes outside the box and every ghost layer is filled with the value
the quantity takes at ``c_ref``.

Identity ids::

    E2200  c(t) = c(0) + lap int_0^t F(c) dt'
    E3090  F(c) = -(1/4 pi) int (dc/dt) / |r - r'|
    E4710  (dc/dt)/D - grad(ln D) . grad(c) = lap c
    E4720  c = -(1/4 pi) int [(dc/dt)/D - grad(ln D) . grad(c)] / |r - r'|
    E5020  dF/dt = D lap F
    E5100  F = -(1/4 pi) int (dF/dt) / (D |r - r'|)
    E5120  phi = (1/D) dF/dt,   phi = lap F
    E5160  D phi = -(1/4 pi) d/dt int phi / |r - r'|
    E5200  dphi/dt = lap(D phi)
    E5680  dD/dt = D' div(D grad(D) / D')
    E6690  dD^(N)/dt = D^(N+1) div(D grad(D^(N)) / D^(N+1))
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .diffusivity import Constant
from .errors import InsufficientDataError, NonlinearityRequiredError
from .grid import div_coef_grad, gradient, laplacian
from .poisson import greens_fft
from .taylor import TaylorState, evaluate

__all__ = [
    "EQUATIONS",
    "ResidualReport",
    "AuxiliaryField",
    "compute_phi",
    "time_derivative",
    "residual_E2200",
    "residual_E3090",
    "residual_E4710",
    "residual_E4720",
    "residual_E5020",
    "residual_E5100",
    "residual_E5120",
    "residual_E5160",
    "residual_E5100_E5160",
    "residual_E5200",
    "residual_E5680",
    "residual_E6690",
    "convergence_order",
    "run_suite",
]

EQUATIONS = (
    "E2200", "E3090", "E4710", "E4720", "E5020", "E5100",
    "E5120", "E5160", "E5200", "E5680", "E6690",
)


@dataclass(frozen=True)
class ResidualReport:
    equation: str
    t: float
    h: float
    dt: float
    norm_l2: float
    norm_linf: float
    normalization: float
    field: np.ndarray = field(default=None, repr=False, compare=False)
    notes: tuple = ()

    @property
    def rel_l2(self):
        return self.norm_l2 / self.normalization

    @property
    def rel_linf(self):
        return self.norm_linf / self.normalization


@dataclass(frozen=True)
class AuxiliaryField:
    phi: np.ndarray


def _report(equation, traj_or_grid, t, dt, residual, terms, notes=()):
    grid = getattr(traj_or_grid, "grid", traj_or_grid)
    inner = grid.interior()
    r = residual[inner]
    scale = max(float(np.max(np.abs(term[inner]))) for term in terms)
    notes = tuple(notes)
    if scale == 0.0:
        scale = 1.0
        notes += ("all terms vanish",)
    return ResidualReport(
        equation, float(t), grid.h, float(dt),
        float(np.sqrt(np.mean(r * r))), float(np.max(np.abs(r))), scale,
        residual, notes,
    )


def _clamped(model, c):
    return model.clamp(c)


def _F(model, c):
    return np.asarray(model.F(model.clamp(c)), dtype=float)


def _D(model, c):
    return np.asarray(model.D(model.clamp(c)), dtype=float)


def _far(model):
    return float(model.clamp(model.c_ref))


def _positive_D(model, c):
    """D(c) with cells where D vanishes (degenerate laws at c = 0) lifted to
    D(c_min), so that 1/D and ln D stay finite."""
    D = _D(model, c)
    bad = D <= 0
    if np.any(bad):
        D = np.where(bad, model.D(model.clamp(model.c_min)), D)
    return D, int(np.count_nonzero(bad))


def _check_index(traj, i, need=3):
    n = len(traj)
    if n < need:
        raise InsufficientDataError(f"need at least {need} snapshots, trajectory has {n}")
    if not -n <= i < n:
        raise IndexError(f"snapshot index {i} out of range for {n} snapshots")
    return i % n


def _stencil(times, i):
    """Indices and weights of the second-order three-point d/dt at ``i``."""
    n = len(times)
    if n < 3:
        raise InsufficientDataError("time derivatives need at least 3 snapshots")
    j = min(max(i - 1, 0), n - 3)
    t0, t1, t2 = times[j : j + 3]
    x = times[i]
    # derivative of the quadratic Lagrange interpolant through j..j+2
    w0 = ((x - t1) + (x - t2)) / ((t0 - t1) * (t0 - t2))
    w1 = ((x - t0) + (x - t2)) / ((t1 - t0) * (t1 - t2))
    w2 = ((x - t0) + (x - t1)) / ((t2 - t0) * (t2 - t1))
    return (j, j + 1, j + 2), (w0, w1, w2)


def time_derivative(traj, i, quantity=None):
    """d/dt of ``quantity(c)`` (identity by default) at snapshot ``i``."""
    (j0, j1, j2), (w0, _, w2) = _stencil(traj.times, i)
    q = quantity or (lambda c: c)
    mid = q(traj.fields[j1])
    # the weights sum to zero; differencing first keeps constants exact
    return w0 * (q(traj.fields[j0]) - mid) + w2 * (q(traj.fields[j2]) - mid)


def _local_dt(traj, i):
    idx, _ = _stencil(traj.times, i)
    return float(np.max(np.diff(traj.times[list(idx)])))


def _far_decay_note(F, grid, what="F"):
    fmax = float(np.max(np.abs(F)))
    if fmax == 0.0:
        return ()
    faces = max(
        np.max(np.abs(F[[0, -1], :, :])),
        np.max(np.abs(F[:, [0, -1], :])),
        np.max(np.abs(F[:, :, [0, -1]])),
    )
    if faces > 1e-6 * fmax:
        return (f"{what} does not decay at the box faces (face/max = {faces / fmax:.3g})",)
    return ()


def _convolve(u, grid):
    """``(1/4 pi) int u(r') / |r - r'| dr'`` via the FFT route."""
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return greens_fft(u, grid).V


def compute_phi(c, model, grid):
    """Auxiliary field ``phi = lap F(c)``."""
    return AuxiliaryField(laplacian(_F(model, c), grid))


# -- direct form and Kirchhoff Poisson form --------------------------------
def residual_E2200(traj, i):
    """``c(t) - c(0) - lap(trapezoid integral of F(c) over [0, t])``."""
    n = len(traj)
    if n < 2:
        raise InsufficientDataError("E2200 needs at least 2 snapshots")
    i = i % n
    if i < 1:
        raise InsufficientDataError("E2200 needs a snapshot after t = 0")
    model, grid = traj.model, traj.grid
    integral = np.zeros(grid.shape)
    Fprev = _F(model, traj.fields[0])
    for k in range(1, i + 1):
        Fk = _F(model, traj.fields[k])
        integral += 0.5 * (traj.times[k] - traj.times[k - 1]) * (Fprev + Fk)
        Fprev = Fk
    change = traj.fields[i] - traj.fields[0]
    lap_int = laplacian(integral, grid)
    dt = float(np.max(np.diff(traj.times[: i + 1])))
    return _report("E2200", traj, traj.times[i] - traj.times[0], dt, change - lap_int,
                   [change, lap_int])


def residual_E3090(traj, i):
    """``F(c) - F_rec`` where ``F_rec`` inverts ``lap F = dc/dt`` in free space."""
    i = _check_index(traj, i)
    model, grid = traj.model, traj.grid
    F = _F(model, traj.fields[i])
    dcdt = time_derivative(traj, i)
    rec = -_convolve(dcdt, grid)
    return _report("E3090", traj, traj.times[i], _local_dt(traj, i), F - rec, [F, rec],
                   _far_decay_note(F, grid))


# -- divided form ----------------------------------------------------------
def _e47_integrand(traj, i):
    model, grid = traj.model, traj.grid
    c = traj.fields[i]
    far = _far(model)
    D, lifted = _positive_D(model, c)
    D_far, _ = _positive_D(model, np.array(far))
    dcdt = time_derivative(traj, i)
    rate = dcdt / D
    drift = np.sum(
        gradient(np.log(D), grid, fill=float(np.log(D_far)))
        * gradient(c, grid, fill=model.c_ref),
        axis=0,
    )
    notes = ()
    clamped = int(np.count_nonzero(model.clamp(c) != c)) + lifted
    if clamped:
        notes = (f"{clamped} cells clamped before evaluating D",)
    return rate, drift, notes


def residual_E4710(traj, i):
    """Differential form: ``(dc/dt)/D - grad(ln D).grad(c) - lap c``."""
    i = _check_index(traj, i)
    rate, drift, notes = _e47_integrand(traj, i)
    lap_c = laplacian(traj.fields[i], traj.grid, fill=traj.model.c_ref)
    return _report("E4710", traj, traj.times[i], _local_dt(traj, i),
                   rate - drift - lap_c, [rate, drift, lap_c], notes)


def residual_E4720(traj, i):
    """Integral form: ``(c - c_far) + (1/4 pi) int g / |r - r'|``."""
    i = _check_index(traj, i)
    rate, drift, notes = _e47_integrand(traj, i)
    g = rate - drift
    rep = -_convolve(g, traj.grid)
    dev = traj.fields[i] - traj.model.c_ref
    return _report("E4720", traj, traj.times[i], _local_dt(traj, i), dev - rep, [dev, rep],
                   notes + _far_decay_note(dev, traj.grid, "c - c_ref"))


# -- time-derivative forms ---------------------------------------------------
def residual_E5020(src, i_or_t):
    """``dF/dt - D lap F`` on a trajectory (index) or a series (time)."""
    if isinstance(src, TaylorState):
        return _series_E5020(src, float(i_or_t))
    traj = src
    i = _check_index(traj, i_or_t)
    model, grid = traj.model, traj.grid
    c = traj.fields[i]
    dFdt = time_derivative(traj, i, lambda x: _F(model, x))
    rhs = _D(model, c) * laplacian(_F(model, c), grid)
    return _report("E5020", traj, traj.times[i], _local_dt(traj, i), dFdt - rhs, [dFdt, rhs])


def _series_dFdt(state, t):
    if t == 0:
        return state.f[1].copy() if state.order >= 1 else _series_f1(state)
    coeffs = [n * fn for n, fn in enumerate(state.f)][1:]
    out = np.array(coeffs[-1], copy=True)
    for cf in reversed(coeffs[:-1]):
        out = out * t + cf
    return out


def _series_f1(state):
    return state.d[0] * state.a[1]


def _series_E5020(state, t):
    model, grid = state.model, state.grid
    if t == 0:
        F, D = state.f[0], state.d[0]
    else:
        c = evaluate(state, t)
        F, D = _F(model, c), _D(model, c)
    dFdt = _series_dFdt(state, t)
    rhs = D * laplacian(F, grid)
    return _report("E5020", state, t, 0.0, dFdt - rhs, [dFdt, rhs], ("series",))


def residual_E5100(traj, i):
    """``F + (1/4 pi) int (1/D) dF/dt / |r - r'|`` with ``dF/dt = D dc/dt``."""
    i = _check_index(traj, i)
    model, grid = traj.model, traj.grid
    c = traj.fields[i]
    F = _F(model, c)
    D = _D(model, c)
    dFdt = D * time_derivative(traj, i)
    rec = -_convolve(dFdt / D, grid)
    return _report("E5100", traj, traj.times[i], _local_dt(traj, i), F - rec, [F, rec],
                   _far_decay_note(F, grid))


def residual_E5120(src, i_or_t):
    """``phi - (1/D) dF/dt`` with ``phi = lap F``."""
    if isinstance(src, TaylorState):
        state, t = src, float(i_or_t)
        if t == 0:
            phi = laplacian(state.f[0], state.grid)
            rate = _series_dFdt(state, 0.0) / state.d[0]
        else:
            c = evaluate(state, t)
            phi = compute_phi(c, state.model, state.grid).phi
            rate = _series_dFdt(state, t) / _D(state.model, c)
        return _report("E5120", state, t, 0.0, phi - rate, [phi, rate], ("series",))
    traj = src
    i = _check_index(traj, i_or_t)
    model, grid = traj.model, traj.grid
    c = traj.fields[i]
    phi = compute_phi(c, model, grid).phi
    rate = time_derivative(traj, i, lambda x: _F(model, x)) / _D(model, c)
    return _report("E5120", traj, traj.times[i], _local_dt(traj, i), phi - rate, [phi, rate])


def residual_E5160(traj, i):
    """``D phi + d/dt [(1/4 pi) int phi / |r - r'|]``."""
    i = _check_index(traj, i)
    model, grid = traj.model, traj.grid
    c = traj.fields[i]
    phi = compute_phi(c, model, grid).phi
    lhs = _D(model, c) * phi
    rate = time_derivative(
        traj, i, lambda x: _convolve(compute_phi(x, model, grid).phi, grid)
    )
    return _report("E5160", traj, traj.times[i], _local_dt(traj, i), lhs + rate, [lhs, rate])


def residual_E5100_E5160(traj, i):
    return residual_E5100(traj, i), residual_E5160(traj, i)


def residual_E5200(traj, i=None):
    """``dphi/dt - lap(D phi)``, by default at the middle snapshot."""
    i = len(traj) // 2 if i is None else i
    i = _check_index(traj, i)
    model, grid = traj.model, traj.grid
    c = traj.fields[i]
    phi = compute_phi(c, model, grid).phi
    dphi = time_derivative(traj, i, lambda x: compute_phi(x, model, grid).phi)
    rhs = laplacian(_D(model, c) * phi, grid)
    return _report("E5200", traj, traj.times[i], _local_dt(traj, i), dphi - rhs, [dphi, rhs])


# -- higher time derivatives ------------------------------------------------
def _derivative_equation(traj, i, N, equation):
    model, grid = traj.model, traj.grid
    if isinstance(model, Constant):
        raise NonlinearityRequiredError(
            f"{equation} needs a concentration-dependent diffusivity"
        )
    i = _check_index(traj, i)
    c = model.clamp(traj.fields[i])
    ders = model.derivs(c, N + 1)
    top = np.asarray(ders[N + 1])
    if np.any(top == 0):
        raise NonlinearityRequiredError(
            f"{equation}: D^({N + 1}) vanishes on the trajectory"
        )
    far = model.derivs(_far(model), N + 1)
    if far[N + 1] != 0:
        coef_far = far[0] / far[N + 1]
    elif far[0] == 0:
        coef_far = 0.0
    else:
        raise NonlinearityRequiredError(
            f"{equation}: D^({N + 1}) vanishes at the far-field concentration"
        )
    lhs = time_derivative(
        traj, i, lambda x: np.asarray(model.derivs(model.clamp(x), N)[N], dtype=float)
    )
    flux = div_coef_grad(np.asarray(ders[0]) / top, np.asarray(ders[N]), grid,
                         coef_fill=coef_far, u_fill=far[N])
    rhs = top * flux
    return _report(equation, traj, traj.times[i], _local_dt(traj, i), lhs - rhs, [lhs, rhs],
                   (f"N={N}",))


def residual_E5680(traj, i):
    """``dD/dt - D' div(D grad D / D')``; needs ``D' != 0``."""
    return _derivative_equation(traj, i, 0, "E5680")


def residual_E6690(traj, i, N):
    """The order-N generalisation of E5680; needs ``D^(N+1) != 0``."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return _derivative_equation(traj, i, N, "E6690")


# -- drivers ----------------------------------------------------------------
_DISPATCH = {
    "E2200": lambda tr, i, N: residual_E2200(tr, i),
    "E3090": lambda tr, i, N: residual_E3090(tr, i),
    "E4710": lambda tr, i, N: residual_E4710(tr, i),
    "E4720": lambda tr, i, N: residual_E4720(tr, i),
    "E5020": lambda tr, i, N: residual_E5020(tr, i),
    "E5100": lambda tr, i, N: residual_E5100(tr, i),
    "E5120": lambda tr, i, N: residual_E5120(tr, i),
    "E5160": lambda tr, i, N: residual_E5160(tr, i),
    "E5200": lambda tr, i, N: residual_E5200(tr, i),
    "E5680": lambda tr, i, N: residual_E5680(tr, i),
    "E6690": lambda tr, i, N: residual_E6690(tr, i, N),
}


def run_suite(traj, equations=EQUATIONS, index=None, N=1):
    """Reports for ``equations`` at snapshot ``index`` (middle by default).

    E2200 is evaluated at the last snapshot so the time integral spans the
    whole trajectory.
    """
    mid = len(traj) // 2 if index is None else index
    out = []
    for eq in equations:
        if eq not in _DISPATCH:
            raise KeyError(f"unknown identity {eq!r}")
        i = len(traj) - 1 if eq == "E2200" and index is None else mid
        out.append(_DISPATCH[eq](traj, i, N))
    return out


def convergence_order(coarse, fine, ratio=2.0):
    """Observed order ``log(r_coarse / r_fine) / log(ratio)`` of relative L2."""
    if fine.rel_l2 == 0.0:
        return math.inf if coarse.rel_l2 > 0 else 0.0
    return math.log(coarse.rel_l2 / fine.rel_l2) / math.log(ratio)
