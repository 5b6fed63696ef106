"""Evaluate the identity residuals on reference trajectories at two
resolutions and estimate their convergence orders.
"""
import numpy as np

from nldiffusion import (
    Boundary, EQUATIONS, Grid3, PowerLaw, SolverConfig, convergence_order, run_suite, solve,
)
from nldiffusion.scenarios import gaussian

model = PowerLaw(1.0, 2.0)


def trajectory(n, spacing):
    grid = Grid3.centered(n, 1.0, Boundary.FREE_DECAY)
    times = tuple(np.arange(5) * spacing)
    return solve(gaussian(grid, sigma=0.15), model, grid, SolverConfig(times[-1], times))


# Halve h and the snapshot spacing together so space and time errors shrink alike.
coarse = run_suite(trajectory(16, 5e-4), N=1)
fine = run_suite(trajectory(32, 2.5e-4), N=1)
# With D = c^2 the divided form E4720 weights the far Gaussian tail by 1/D,
# so at these resolutions it converges slowly; D = c (m = 1) does not show this.
for a, b in zip(coarse, fine):
    print(f"{a.equation}: rel L2 {a.rel_l2:.2e} -> {b.rel_l2:.2e}, "
          f"order {convergence_order(a, b):.2f}")
assert [r.equation for r in coarse] == list(EQUATIONS)
