"""Nonlinear diffusion toolkit.

Kirchhoff-transformed MacLaurin series for dc/dt = div(D(c) grad c) in three
dimensions, a free-space Poisson solver, an explicit reference solver with
analytic oracles, and numerical checks of the identities that tie them together.
"""
__version__ = "0.1.0"

from .diffusivity import (
    Constant,
    DiffusivityModel,
    Exponential,
    PowerLaw,
    Tabulated,
    eval_D,
    eval_D_derivs,
    inverse_F,
    kirchhoff_F,
    model_from_params,
    taylor_compose_D,
)
from .grid import Boundary, Grid3, div_D_grad, divergence, gradient, laplacian
from .taylor import (
    TaylorState,
    build_series,
    convergence_radius,
    evaluate,
    evaluate_F,
    remainder_estimate,
)
from .poisson import greens_direct, greens_fft, invert_for_F
from .trajectory import Trajectory
from .analytic import BarenblattPattle, HeatGaussian, analytic_eval
from .reference import Scheme, SolverConfig, compare, solve
from .identities import EQUATIONS, ResidualReport, convergence_order, run_suite
