"""Free-space Poisson solve by zero-padded FFT convolution.

The FFT result is checked against the O(n^6) direct sum and against the
closed-form potential of a Gaussian source.
"""
import numpy as np

from nldiffusion import Boundary, Grid3, greens_direct, greens_fft
from nldiffusion.poisson import gaussian_source_potential
from nldiffusion.scenarios import bump, gaussian

grid = Grid3.centered(16, 1.0, Boundary.FREE_DECAY)
source = gaussian(grid, sigma=0.1)
fast = greens_fft(source, grid)
slow = greens_direct(source, grid)
print(f"FFT vs direct sum: {np.max(np.abs(fast.V - slow.V)) / np.max(np.abs(slow.V)):.1e}")

exact = gaussian_source_potential(grid.radius(), 0.1)
print(f"FFT vs closed form: {np.max(np.abs(fast.V - exact)) / exact.max():.2%}")

# The discrete Laplacian of V reproduces the source to second order in h.
prev = None
for n in (16, 32, 64):
    g = Grid3.centered(n, 1.0, Boundary.FREE_DECAY)
    k = bump(g)
    res = greens_fft(k, g).residual_linf / k.max()
    print(f"n = {n}: residual {res:.2e}" + (f", ratio {prev / res:.2f}" if prev else ""))
    prev = res
