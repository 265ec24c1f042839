"""focklab: Toeplitz, Hankel and H-Toeplitz operators on the Fock space F²_α."""

from .errors import (
    DimensionMismatch,
    FocklabError,
    KindError,
    QuadratureDegreeError,
    SizeLimitError,
    StabilityError,
    UnboundedSymbolError,
)
from .fock_core import FockVector, FockWeight, MixedVector
from .operators import TruncatedOperator, build
from .symbols import HarmonicSymbol, SymbolSyntaxError, parse, render

__version__ = "0.1.0"

__all__ = [
    "DimensionMismatch",
    "FockVector",
    "FockWeight",
    "FocklabError",
    "HarmonicSymbol",
    "KindError",
    "MixedVector",
    "QuadratureDegreeError",
    "SizeLimitError",
    "StabilityError",
    "SymbolSyntaxError",
    "TruncatedOperator",
    "UnboundedSymbolError",
    "build",
    "parse",
    "render",
]
