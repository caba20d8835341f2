"""Mean first passage times for Brownian motion in a disk with a small absorbing arc."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .asymptotics import (
    AsymptoticRegimeWarning,
    AsymptoticValue,
    FluxExpansion,
    boundary_layer_width,
    flux_asymptotic,
    lambda0_estimate,
    mfpt_center,
    mfpt_max,
    mfpt_uniform,
    q_function,
    v_ray_exact,
    v_ray_inner,
    v_ray_outer,
)
from .grid import ComparisonReport, PolarGrid, SingularGridError, compare_methods, solve_grid
from .montecarlo import (
    CensoringError,
    ExitHistogram,
    McConfig,
    McEstimate,
    Start,
    simulate_exit_angles,
    simulate_mfpt,
    step_reflect,
)
from .quadrature import QuadratureError, QuadratureResult, QuadratureSpec, integrate, integrate_sqrt_singular, legendre_p
from .series import (
    Geometry,
    H1Evaluator,
    SeriesSolution,
    a0_exact,
    boundary_derivative,
    compute_series,
    eval_u,
    eval_v,
    flux_series,
    h1_eval,
    rescale,
)
