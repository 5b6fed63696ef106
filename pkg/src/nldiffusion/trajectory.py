"""Time-stamped sequences of concentration fields."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Trajectory"]


@dataclass
class Trajectory:
    """Concentration snapshots ``fields[i]`` at ``times[i]`` on one grid.

    ``source`` names the producer (``"reference"``, ``"taylor"``,
    ``"analytic"`` or ``"manufactured"``).
    """

    model: object
    grid: object
    times: np.ndarray
    fields: list
    source: str = "reference"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.fields):
            raise ValueError("need one field per time stamp")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        for f in self.fields:
            if np.shape(f) != self.grid.shape:
                raise ValueError("all fields must live on the trajectory grid")

    def __len__(self):
        return len(self.times)

    @classmethod
    def from_function(cls, model, grid, times, func, source="analytic", **meta):
        """Sample ``func(t) -> field`` at each time."""
        return cls(model, grid, times, [np.asarray(func(t), dtype=float) for t in times],
                   source, dict(meta))

    @classmethod
    def from_series(cls, state, times):
        from .taylor import evaluate

        return cls(state.model, state.grid, times, [evaluate(state, t) for t in times],
                   "taylor", {"order": state.order})
