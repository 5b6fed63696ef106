"""Build a Taylor-in-time series for a porous-medium blob and watch it converge.

Run with ``python3 demos/series_walkthrough.py``.
"""
import numpy as np

from nldiffusion import Boundary, Grid3, PowerLaw, build_series, evaluate
from nldiffusion.scenarios import gaussian
from nldiffusion.taylor import convergence_radius, remainder_estimate

grid = Grid3.centered(24, 1.0, Boundary.FREE_DECAY)
model = PowerLaw(1.0, 2.0)
c0 = gaussian(grid, sigma=0.15)

# The coefficients come from two coupled recurrences, one for c and one for F.
state = build_series(c0, model, grid, order=12)
for n, a in enumerate(state.a):
    print(f"|a_{n}|_inf = {np.max(np.abs(a)):.3e}")

R = convergence_radius(state)
print(f"\nestimated convergence radius R = {R:.3e}")

# Inside R the truncation error shrinks with the order; past it the series is useless.
for frac in (0.1, 0.25, 0.5):
    t = frac * R
    c = evaluate(state, t)
    rem = remainder_estimate(state, t)
    print(f"t = {frac:>4} R: max c = {c.max():.6f}, remainder ~ {rem.linf:.2e}")

low = build_series(c0, model, grid, order=6)
t = 0.25 * R
print(f"\norder 6 vs order 12 at R/4: {np.max(np.abs(evaluate(low, t) - evaluate(state, t))):.2e}")
