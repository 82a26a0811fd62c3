"""Computer algebra in prime characteristic.

Sparse polynomials over F_p with Gröbner bases, Frobenius powers and roots,
bounded closure tests, Fedder's F-purity test, and F-coherence classifiers
for affine semigroup rings and one-dimensional curve algebras.
"""

__version__ = "0.1.0"

from .errors import (
    FcharError,
    ParseError,
    PreconditionError,
    ResourceCapError,
)
from .groebner import Ideal, QuotientRing, Subalgebra
from .polyring import MonomialOrder, Polynomial, PolynomialRing
from .semigroup import AffineSemigroup
from .onedim import CurvePresentation, NumericalSemigroup

__all__ = [
    "AffineSemigroup",
    "CurvePresentation",
    "FcharError",
    "Ideal",
    "MonomialOrder",
    "NumericalSemigroup",
    "ParseError",
    "Polynomial",
    "PolynomialRing",
    "PreconditionError",
    "QuotientRing",
    "ResourceCapError",
    "Subalgebra",
    "__version__",
]
