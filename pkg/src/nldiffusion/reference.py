"""Explicit method-of-lines solver for dc/dt = div(D(c) grad c).

This is the independent cross-check for the series solution: forward Euler
in time with the step recomputed from the 3D explicit stability bound
``dt = cfl_safety * h^2 / (6 max D)`` on every step.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import InstabilityError, ShapeError
from .grid import div_D_grad, laplacian
from .trajectory import Trajectory

__all__ = ["Scheme", "SolverConfig", "solve", "compare", "ErrorRow"]

log = logging.getLogger(__name__)


class Scheme(str, enum.Enum):
    EXPLICIT_FLUX_FORM = "explicit_flux_form"
    KIRCHHOFF_EXPLICIT = "kirchhoff_explicit"


@dataclass(frozen=True)
class SolverConfig:
    t_end: float
    snapshot_times: tuple = ()
    cfl_safety: float = 0.5
    scheme: Scheme = Scheme.EXPLICIT_FLUX_FORM

    def __post_init__(self):
        if not 0 < self.cfl_safety <= 1:
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.t_end < 0:
            raise ValueError("t_end must be >= 0")
        snaps = tuple(float(s) for s in (self.snapshot_times or (0.0, self.t_end)))
        if any(b <= a for a, b in zip(snaps, snaps[1:])):
            raise ValueError("snapshot times must be increasing")
        if snaps[0] < 0 or snaps[-1] > self.t_end * (1 + 1e-12):
            raise ValueError("snapshot times must lie in [0, t_end]")
        object.__setattr__(self, "snapshot_times", snaps)
        object.__setattr__(self, "scheme", Scheme(self.scheme))


def _rhs(c, model, grid, scheme):
    if scheme is Scheme.KIRCHHOFF_EXPLICIT:
        return laplacian(model.F(model.clamp(c)), grid)
    return div_D_grad(c, grid, model)


def solve(c0, model, grid, config):
    """Integrate from ``c0`` and return snapshots at ``config.snapshot_times``.

    Snapshots between two steps are linear interpolants of the step
    endpoints.  Raises :class:`InstabilityError` on non-finite values.
    """
    c = np.array(c0, dtype=float, copy=True)
    if c.shape != grid.shape:
        raise ShapeError(f"initial field shape {c.shape} does not match grid {grid.shape}")
    if not np.all(np.isfinite(c)):
        raise InstabilityError(0, "initial field is not finite")
    snaps = list(config.snapshot_times)
    out_t, out_f = [], []
    t, step = 0.0, 0
    while snaps and snaps[0] <= 0.0:
        out_t.append(snaps.pop(0))
        out_f.append(c.copy())
    h2 = grid.h**2
    min_c = float(c.min())
    while snaps:
        dmax = float(np.max(model.D(model.clamp(c))))
        dt = config.cfl_safety * h2 / (6.0 * dmax) if dmax > 0 else config.t_end - t
        dt = min(dt, config.t_end - t)
        # land on t_end exactly instead of leaving a sliver step
        if config.t_end - (t + dt) < 1e-9 * dt:
            dt = config.t_end - t
        new = c + dt * _rhs(c, model, grid, config.scheme)
        step += 1
        if not np.all(np.isfinite(new)):
            raise InstabilityError(step)
        t_new = config.t_end if dt == config.t_end - t else t + dt
        while snaps and snaps[0] <= t_new:
            w = (snaps[0] - t) / dt if dt > 0 else 1.0
            out_t.append(snaps.pop(0))
            out_f.append(c + w * (new - c))
        c, t = new, t_new
        min_c = min(min_c, float(c.min()))
    log.debug("reference solve: %d steps to t=%g", step, t)
    meta = {"steps": step, "scheme": config.scheme.value, "cfl_safety": config.cfl_safety,
            "min_value": min_c}
    return Trajectory(model, grid, out_t, out_f, "reference", meta)


@dataclass(frozen=True)
class ErrorRow:
    t: float
    l1: float
    l2: float
    linf: float
    rel_l1: float
    rel_l2: float
    rel_linf: float
    mass_drift: float


def compare(traj, oracle):
    """Per-time error norms of ``traj`` against another trajectory or an
    analytic solution (anything callable as ``oracle(grid, t)``).

    Norms are grid integrals (``h^3`` weighted); relative ones divide by the
    oracle's norm.  ``mass_drift`` is the relative change of the discrete
    mass of ``traj`` since its first snapshot.
    """
    if isinstance(oracle, Trajectory):
        if oracle.grid != traj.grid:
            raise ShapeError("trajectories live on different grids")
        if len(oracle.times) != len(traj.times) or not np.allclose(oracle.times, traj.times,
                                                                    rtol=1e-12, atol=0):
            raise ShapeError("trajectories have different time stamps")
        ref = oracle.fields
    else:
        ref = [oracle(traj.grid, t) for t in traj.times]
    dv = traj.grid.cell_volume
    m0 = float(np.sum(traj.fields[0])) * dv
    rows = []
    for t, f, g in zip(traj.times, traj.fields, ref):
        e = np.abs(f - g)
        l1, l2, linf = e.sum() * dv, np.sqrt((e * e).sum() * dv), e.max()
        g_abs = np.abs(g)
        n1, n2, ninf = g_abs.sum() * dv, np.sqrt((g_abs * g_abs).sum() * dv), g_abs.max()
        mass = float(np.sum(f)) * dv
        rows.append(ErrorRow(
            float(t), float(l1), float(l2), float(linf),
            _ratio(l1, n1), _ratio(l2, n2), _ratio(linf, ninf),
            _ratio(mass - m0, abs(m0)),
        ))
    return rows


def _ratio(a, b):
    if b == 0:
        return 0.0 if a == 0 else float("inf")
    return float(a / b)
