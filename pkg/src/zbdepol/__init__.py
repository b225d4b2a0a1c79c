"""Qubit depolarization channels driven by zero-bandwidth classical noise."""

__version__ = "0.1.0"

from .channel import (  # noqa: E402
    KrausCoefficients,
    apply_single,
    apply_two_qubit,
    cp_check,
    divisibility_check,
    kraus_from_lambda,
)
from .noise import (  # noqa: E402
    GaussianAniso,
    LambdaVector,
    Lorentzian3Axis,
    RadialCustom,
    TelegraphAxis,
    asymptotic_lambda,
    lambda_analytic,
    lambda_quadrature,
    sample_r,
)
