"""Annihilating differential operators for periods of rational integrals.

The package computes, for a parametric rational function a/f^q, a linear
differential operator in t and d/dt that annihilates every period of the
integral, by reducing pole orders of differential forms against the
Jacobian module of f and closing the derivative iteration in the reduced
space.  Two drivers are provided: an exact one over Q(t) and a randomized
evaluation-interpolation one working modulo primes.
"""

from .algebra import QQ, PrimeField, RatFunField, poly_ring
from .driver import (
    PicardFuchsResult,
    homogenize,
    picard_fuchs,
    picard_fuchs_smooth,
    verify_certificates,
)
from .errors import PicardFuchsError
from .forms import Form, FormSpace
from .modular import picard_fuchs_modular
from .operators import DiffOperator
from .reduction import (
    ReductionEngine,
    dim_A,
    dim_E,
    dim_S,
    oracle_W,
    reduce_gd,
    reduce_r,
)
from .series import (
    LaurentPoly,
    algebraic_to_rational,
    constant_term_series,
    laurent_to_rational,
    operator_annihilates_series,
)

__version__ = "0.1.0"

__all__ = [
    "QQ",
    "PrimeField",
    "RatFunField",
    "poly_ring",
    "PicardFuchsResult",
    "homogenize",
    "picard_fuchs",
    "picard_fuchs_smooth",
    "picard_fuchs_modular",
    "verify_certificates",
    "PicardFuchsError",
    "Form",
    "FormSpace",
    "DiffOperator",
    "ReductionEngine",
    "dim_A",
    "dim_E",
    "dim_S",
    "oracle_W",
    "reduce_gd",
    "reduce_r",
    "LaurentPoly",
    "algebraic_to_rational",
    "constant_term_series",
    "laurent_to_rational",
    "operator_annihilates_series",
    "__version__",
]
