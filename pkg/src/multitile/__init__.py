"""Exponential Riesz bases on domains that tile multiply under a lattice.

A domain here is a finite union of boxes inside the fundamental cell of
a full-rank lattice, each box carrying k integer translates, so that
the translated boxes cover space exactly k times.  The package builds
shifted exponential systems on such domains, decides when a shift
parameter is admissible, produces the dual generators in closed form,
bounds the system's Riesz constants, and reconstructs functions from
pointwise or truncated spectral data through nested one-dimensional
Vandermonde solves.
"""

from .admissibility import (
    AdmissibilityCertificate,
    AdmissibilityFailure,
    LevelWitness,
    check,
    find_pair,
    perfect_shift_1d,
)
from .domain import (
    Cell,
    MultiTileDomain,
    cell_index_at,
    make_cell,
    make_domain,
    offsets_at,
    omega,
    omega_inverse,
    sample_grid,
    validate,
)
from .errors import (
    DimensionMismatch,
    DuplicateNodes,
    DuplicateOffset,
    IllConditionedWarning,
    InconsistentK,
    MultitileError,
    NoPairFound,
    NonUniformShifts,
    NotATiling,
    OutOfDomain,
    PointOnGap,
    SingularBasis,
    SingularCell,
    SingularMatrix,
    SpecFormatError,
)
from .expsystem import (
    CellBounds,
    PointSystem,
    RieszBounds,
    ShiftSet,
    cell_system,
    dual_eval,
    frequency_vector,
    gram,
    is_orthogonal,
    make_shifts,
    riesz_bounds,
    verify_biorthogonality,
)
from .formats import (
    atomic_write_text,
    canonical_json,
    domain_to_obj,
    load_domain,
    parse_domain,
    read_samples,
    save_domain,
    write_result,
    write_samples,
)
from .freqtree import (
    FrequencySet,
    FrequencyTree,
    ShiftIndexSet,
    build_tree,
    make_frequency_set,
    shift_index_set,
)
from .lattice import Lattice, dual_point, make_lattice, reduce_point
from .reconstruction import (
    ReconstructionResult,
    SpectralData,
    coefficient_data,
    flatten_grid,
    forward_data,
    reconstruct_direct,
    reconstruct_grid,
    reconstruct_point,
)
from .vandermonde import (
    block_conditions,
    block_norms,
    nested_solve,
    solve_vandermonde_1d,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityCertificate",
    "AdmissibilityFailure",
    "Cell",
    "CellBounds",
    "DimensionMismatch",
    "DuplicateNodes",
    "DuplicateOffset",
    "FrequencySet",
    "FrequencyTree",
    "IllConditionedWarning",
    "InconsistentK",
    "Lattice",
    "LevelWitness",
    "MultiTileDomain",
    "MultitileError",
    "NoPairFound",
    "NonUniformShifts",
    "NotATiling",
    "OutOfDomain",
    "PointOnGap",
    "PointSystem",
    "ReconstructionResult",
    "RieszBounds",
    "ShiftIndexSet",
    "ShiftSet",
    "SingularBasis",
    "SingularCell",
    "SingularMatrix",
    "SpecFormatError",
    "SpectralData",
    "block_conditions",
    "block_norms",
    "build_tree",
    "atomic_write_text",
    "canonical_json",
    "cell_index_at",
    "cell_system",
    "check",
    "coefficient_data",
    "domain_to_obj",
    "dual_eval",
    "dual_point",
    "find_pair",
    "flatten_grid",
    "forward_data",
    "frequency_vector",
    "gram",
    "is_orthogonal",
    "load_domain",
    "make_cell",
    "make_domain",
    "make_frequency_set",
    "make_lattice",
    "make_shifts",
    "offsets_at",
    "omega",
    "omega_inverse",
    "parse_domain",
    "perfect_shift_1d",
    "read_samples",
    "reconstruct_direct",
    "reconstruct_grid",
    "reconstruct_point",
    "reduce_point",
    "riesz_bounds",
    "sample_grid",
    "save_domain",
    "shift_index_set",
    "solve_vandermonde_1d",
    "validate",
    "verify_biorthogonality",
    "write_result",
    "write_samples",
]
