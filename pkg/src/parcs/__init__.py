"""parcs: column-parallel compressed sensing of 2D signals with
sparsity-balancing permutations, plus a permuted-spectrum image/video codec.
"""

from ._kernels import BACKEND
from .core import (
    Signal2D,
    SparsityVector,
    SupportSet,
    best_s_term,
    layer_of,
    layer_sizes,
    sparsity_vector,
    threshold_support,
)
from .layermodel import (
    BoundAuxiliaries,
    LayerModelParams,
    acceptance_lower_bound,
    bound_auxiliaries,
    empirical_layer_profile,
    exact_acceptance_small,
    layer_probabilities,
    layer_probability,
    monte_carlo_acceptance,
    row_iid_statistics,
    sample_support,
)
from .permute import (
    PermutationMap,
    construct_optimal_permutation,
    group_scan_permutation,
    identity_permutation,
    is_acceptable,
    is_optimal_sparsity,
    zigzag_permutation,
)
from .recon import (
    BasisPursuitResult,
    OmpResult,
    ParallelReconstruction,
    SolverOptions,
    reconstruct_2d,
    reconstruct_parallel,
    solve_basis_pursuit,
    solve_omp,
)
from .sensing import (
    MeasurementBatch,
    SensingMatrix,
    gaussian_sensing,
    required_k,
    restricted_isometry_constant,
    sample_parallel,
)

__version__ = "0.1.0"
