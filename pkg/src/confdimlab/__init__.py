"""Numerical tools for conformal dimension: Hölder separation, combinatorial
modulus, closed-form exponents and polygonal-complex cocycles."""

__version__ = "0.1.0"

from .closed_forms import (  # noqa: E402
    BoundReport,
    CoxeterGraph,
    building_confdim,
    coxeter_global_bound,
    coxeter_local_bound,
    elementary_exponent,
    elementary_exponent_interval,
    hausdorff_visual_lower,
    polygonal_bound,
)
from .approx import ApproxGraph, carpet_approximation, grid_approximation  # noqa: E402
from .cocycle import build_shell_complex, cocycle_energy, separation_witness  # noqa: E402
from .confdim import DecaySeries, estimate_confdim, fit_decay_rate  # noqa: E402
from .holder import build_holder, choose_parameters, verify_certificate  # noqa: E402
from .metric import FiniteMetricSpace, SetCollection, min_pairwise_separation, relative_distance  # noqa: E402
from .modulus import CurveFamilySpec, brute_force_modulus, modulus_sweep, solve_modulus  # noqa: E402

__all__ = [
    "__version__",
    "ApproxGraph",
    "BoundReport",
    "CoxeterGraph",
    "CurveFamilySpec",
    "DecaySeries",
    "FiniteMetricSpace",
    "SetCollection",
    "brute_force_modulus",
    "build_holder",
    "build_shell_complex",
    "building_confdim",
    "carpet_approximation",
    "choose_parameters",
    "cocycle_energy",
    "coxeter_global_bound",
    "coxeter_local_bound",
    "elementary_exponent",
    "elementary_exponent_interval",
    "estimate_confdim",
    "fit_decay_rate",
    "grid_approximation",
    "hausdorff_visual_lower",
    "min_pairwise_separation",
    "modulus_sweep",
    "polygonal_bound",
    "relative_distance",
    "separation_witness",
    "solve_modulus",
    "verify_certificate",
]
