"""Torsion of finite-dimensional Hilbert complexes, exact sequences and θ-gluing."""

from .complex import (
    ComplexError,
    HilbertComplex,
    betti_numbers,
    euler_characteristic,
    hodge,
    log_torsion,
    log_torsion_det,
    log_torsion_zeta,
    random_complex,
)
from .gluing import GluingData, PreconditionError, gluing_residuals, theta_complex
from .sequences import ChainMap, ShortExactSequence, build_les, milnor_residual
from .simplicial import LocalSystem, SimplicialComplex, builtin, cochain_complex

__all__ = [
    "ChainMap",
    "ComplexError",
    "GluingData",
    "HilbertComplex",
    "LocalSystem",
    "PreconditionError",
    "ShortExactSequence",
    "SimplicialComplex",
    "betti_numbers",
    "build_les",
    "builtin",
    "cochain_complex",
    "euler_characteristic",
    "gluing_residuals",
    "hodge",
    "log_torsion",
    "log_torsion_det",
    "log_torsion_zeta",
    "milnor_residual",
    "random_complex",
    "theta_complex",
]
