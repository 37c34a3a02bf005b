"""Densities of powers of the integrated exponential of Brownian motion.

Two independent representations (Yor's contour form and a Hermite-function
form), the special functions they need, a Monte Carlo oracle and checks of
the associated Laplace-transform identities.
"""

from .contour import ContourSpec
from .density import (
    EvalResult,
    ModelParams,
    conditional_density,
    density,
    density_hermite,
    density_saddle,
    density_yor,
    f_function,
    hankel_kernel,
    mean_a,
    mixing_density,
    moment,
    p_function,
    prefactor,
)
from .errors import AsiaDensError
from .quadrature import QuadratureConfig

__version__ = "0.1.0"

__all__ = [
    "AsiaDensError",
    "ContourSpec",
    "EvalResult",
    "ModelParams",
    "QuadratureConfig",
    "conditional_density",
    "density",
    "density_hermite",
    "density_saddle",
    "density_yor",
    "f_function",
    "hankel_kernel",
    "mean_a",
    "mixing_density",
    "moment",
    "p_function",
    "prefactor",
]
