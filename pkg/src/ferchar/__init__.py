"""Exact verification of graded character identities.

Brute-force construction of graded commutative algebras from their
defining relations, closed fermionic sum evaluation, and windowed
cross-checks between the two.
"""

from __future__ import annotations

from .errors import ConfigurationError, ResourceLimitError, StabilizationError
from .exactlin import FieldMode
from .fermionic import (
    character_A_lambda,
    character_A_lambda_cd,
    character_L_fusion,
    character_W_fusion,
    gordon_character,
    lattice_principal_character,
)
from .fusion import principal_fusion_character
from .gradedchar import GradedCharacter, Truncation, compare
from .presented import (
    InitialConditions,
    Partition,
    Presentation,
    build_presentation_A,
    build_presentation_quadratic,
    graded_character,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "ResourceLimitError",
    "StabilizationError",
    "FieldMode",
    "GradedCharacter",
    "Truncation",
    "compare",
    "Partition",
    "InitialConditions",
    "Presentation",
    "build_presentation_A",
    "build_presentation_quadratic",
    "graded_character",
    "gordon_character",
    "character_A_lambda",
    "character_A_lambda_cd",
    "character_W_fusion",
    "character_L_fusion",
    "lattice_principal_character",
    "principal_fusion_character",
    "__version__",
]
