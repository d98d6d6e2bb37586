"""Cube terms, crosses and cube term blockers for finite idempotent algebras."""

from .absorption import Blocker, absorbing_variables, is_absorbing, verify_blocker
from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    Signature,
    Subset,
    all_subuniverses,
    generate_subuniverse,
    product,
    signature_stats,
)
from .blockers import (
    blocker_of_factor,
    blocker_of_subalgebra,
    blocker_preimage,
    find_blocker,
    semilattice_section,
)
from .crosses import (
    Cross,
    absorption_deficiency,
    hall_matching,
    is_compatible_cross,
    is_compatible_cross_oracle,
    pullback_cross,
    symmetric_cross_blocker,
    symmetrize_cross,
)
from .cube import (
    CubeStatus,
    build_cross_sequence_witness,
    find_compatible_cross,
    has_cube_term,
    min_cube_dimension,
)
from .errors import CapExceeded, CubeTermError, WorkCapExceeded
from .fileformat import dumps_algebra, load_algebra, loads_algebra, save_algebra
from .subpower import TermWitness, close, evaluate_witness, free_algebra_on_two

__version__ = "0.1.0"

__all__ = [
    "Blocker", "CapExceeded", "Cross", "CubeStatus", "CubeTermError", "FiniteAlgebra",
    "Homomorphism", "Signature", "Subset", "TermWitness", "WorkCapExceeded",
    "absorbing_variables", "absorption_deficiency", "all_subuniverses", "blocker_of_factor",
    "blocker_of_subalgebra", "blocker_preimage", "build_cross_sequence_witness", "close",
    "dumps_algebra", "evaluate_witness", "find_blocker", "find_compatible_cross",
    "free_algebra_on_two", "generate_subuniverse", "hall_matching", "has_cube_term",
    "is_absorbing", "is_compatible_cross", "is_compatible_cross_oracle", "load_algebra",
    "loads_algebra", "min_cube_dimension", "product", "pullback_cross", "save_algebra",
    "semilattice_section", "signature_stats", "symmetric_cross_blocker", "symmetrize_cross",
    "verify_blocker",
]
