"""Unextendible product bases, bound entangled states and their certificates."""

__version__ = "0.1.0"

from .bestate import (
    PPTReport,
    RangeReport,
    WitnessReport,
    is_edge_candidate,
    is_ppt,
    noisy_mix,
    upb_complement_state,
    verify_range_criterion,
    witness_detects,
    witness_gamma,
)
from .catalog import (
    TileParams,
    entangled_complement_3x4,
    entangled_complement_generalized,
    generalized_tiles,
    irreducible_2x2x3,
    irreducible_3x4,
    missing_states_3x4,
    missing_states_generalized,
    reducible_2x2x3,
    reducible_3x4,
    shift_3qubit,
    tiles_3x3,
)
from .linalg import complement_basis, gram_rank, hermitian_eigs, kron_flatten, partial_transpose
from .locc import eliminate_states, is_trivial_party, opm_solution_space, reducibility_report
from .seesaw import max_product_overlap
from .states import DensityMatrix, LocalVector, ProductBasisSet, ProductState
from .verify import check_orthogonal, complete_to_full_basis, is_unextendible, stopper_removal_completable
