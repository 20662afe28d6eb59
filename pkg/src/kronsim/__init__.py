"""Desk-scale emulator and resource estimator for Hamiltonian simulation
over sums of Kronecker-product terms."""

__version__ = "0.1.0"

from .blockenc import (
    BlockEncoding,
    be_amplify,
    be_density_from_purification,
    be_lcu,
    be_negate,
    be_product,
    be_rescale,
    be_swap_permute,
    be_tensor,
    be_with_scale,
    dilate,
    slot_permutation_matrix,
    swap_count,
)
from .errors import (
    AmplificationOverflow,
    BadPermutation,
    CoefficientsMissing,
    DegreeOverflow,
    DimensionMismatch,
    InvalidFactor,
    KronsimError,
    MixedScales,
    NegativeEigenvalueProduct,
    NormExceedsScale,
    NormPremiseViolated,
    NotCommuting,
    NotHermitian,
    NotHermitianBlock,
    NotSquare,
    NotUnit,
    NotUnitary,
    NumericalError,
    ParseError,
    SparsityOutOfRange,
    ValidationError,
    WeightsNotNormalized,
)
from .hamspec import (
    parse_hamiltonian,
    parse_hamiltonian_file,
    parse_vector,
    parse_vector_file,
)
from .ledger import ResourceLedger, amplification_rounds
from .model import (
    TensorFactorHamiltonian,
    TensorTerm,
    TimeCoefficient,
    assemble_dense,
    assemble_weighted,
    check_pairwise_commuting,
    evaluate_coefficient,
    integrate_coefficient,
    make_hamiltonian,
    make_term,
)
from .pipelines import (
    MCSampleRecord,
    PipelineConfig,
    PipelineResult,
    run_pipeline,
    simplify_term,
)
from .qsvt import ChebPoly, apply_poly, bessel_j, jacobi_anger
from .resources import ScalingReport, compare, oracle_evolution
from .truncation import (
    EnsembleMember,
    SparseEnsemble,
    check_appendix_b,
    ensemble_prepare,
    randomized_truncate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
