"""Cross-check the series solution against the reference solver.

The bound combines the series remainder with the reference solver's own
time-step error, measured by halving the CFL factor.
"""
import numpy as np

from nldiffusion import (
    Boundary, Grid3, PowerLaw, SolverConfig, build_series, evaluate, solve,
)
from nldiffusion.scenarios import gaussian
from nldiffusion.taylor import convergence_radius, remainder_estimate

grid = Grid3.centered(24, 1.0, Boundary.FREE_DECAY)
model = PowerLaw(1.0, 2.0)
c0 = gaussian(grid, sigma=0.15)
state = build_series(c0, model, grid, order=12)
t = convergence_radius(state) / 4

ref = solve(c0, model, grid, SolverConfig(t, (0.0, t), cfl_safety=0.2)).fields[-1]
half = solve(c0, model, grid, SolverConfig(t, (0.0, t), cfl_safety=0.1)).fields[-1]
ref_err = np.max(np.abs(ref - half))
rem = remainder_estimate(state, t).linf
diff = np.max(np.abs(evaluate(state, t) - half))
print(f"t = {t:.3e}: |series - reference| = {diff:.2e}")
print(f"remainder {rem:.2e}, reference step error {ref_err:.2e}")
print("within bound" if diff <= 10 * max(rem, ref_err) else "outside bound")
