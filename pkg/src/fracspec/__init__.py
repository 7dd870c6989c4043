"""fracspec: fractional powers and transforms of m-accretive operator
matrices, with spectral verification diagnostics."""

from .config import DEFAULT, Tolerances
from .discretize import Grid1D, GridFunction, OperatorMatrix
from .fracpow import BalakrishnanConfig, GLCoefficients
from .numcore import InnerProduct
from .semigroup import SemigroupSpec
from .transform import ClassReport, Model, TransformSpec

__all__ = [
    "DEFAULT",
    "Tolerances",
    "Grid1D",
    "GridFunction",
    "OperatorMatrix",
    "BalakrishnanConfig",
    "GLCoefficients",
    "InnerProduct",
    "SemigroupSpec",
    "ClassReport",
    "Model",
    "TransformSpec",
]

__version__ = "0.1.0"
