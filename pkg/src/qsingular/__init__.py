"""Point singularities on the line: spectra, holonomies, supersymmetry, caustics and statistical forces."""

from . import anholonomy, caustics, specfun, spectra, statforce, susy
from .errors import (
    ConvergenceError,
    NotAnholonomyError,
    NumericalError,
    PoleError,
    TooManyRootsError,
    TrackingAmbiguityError,
)
from .singularity import (
    BoundaryVectors,
    CharacteristicMatrix,
    SingularityParams,
    build_characteristic_matrix,
    classify,
    connection_residual,
    decompose_characteristic_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "anholonomy",
    "caustics",
    "specfun",
    "spectra",
    "statforce",
    "susy",
    "BoundaryVectors",
    "CharacteristicMatrix",
    "SingularityParams",
    "build_characteristic_matrix",
    "classify",
    "connection_residual",
    "decompose_characteristic_matrix",
    "ConvergenceError",
    "NotAnholonomyError",
    "NumericalError",
    "PoleError",
    "TooManyRootsError",
    "TrackingAmbiguityError",
]
