"""Matrix sensing via multi-penalty alternating minimization."""

from .analysis import (
    C21,
    BoundParams,
    RipProbeReport,
    check_boundedness,
    check_sparsity_control,
    corollary_bound,
    misfit_bound_rhs,
    relative_error,
    rip_probe,
    success,
    theorem_bound,
)
from .atlas import (
    Decomposition,
    DivergenceError,
    ProximalConfig,
    SolveReport,
    SolverConfig,
    atlas_run,
    balanced_rescale,
    extract_normalized,
    init_leading_singular,
    objective,
)
from .measurement import (
    Ensemble,
    MeasurementOperator,
    NoisySample,
    add_noise,
    sample_operator,
)
from .models import (
    GroundTruth,
    GroundTruthSpec,
    MatrixClass,
    SingularModelError,
    SparseDecomposition,
    assemble_matrix,
    effective_sparsity_ratio,
    gramian_constants,
    sample_effectively_sparse_unit_vector,
    sample_ground_truth,
    sample_sparse_unit_vector,
    schatten_quasi_norm,
)
from .solvers import (
    KERNEL_BACKEND,
    IstaConfig,
    StepSizeError,
    asym_soft_threshold,
    ista,
    soft_threshold,
    tikhonov_solve,
)

__version__ = "0.1.0"
