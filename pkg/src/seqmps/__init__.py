"""Sequential generation and compression of multiqubit matrix product states."""

import os as _os

# Honor the thread cap before numpy initializes its BLAS backend.
_threads = _os.environ.get("SEQMPS_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)
del _os, _threads

from .compress import (
    CompressionReport,
    compress_truncation,
    compress_variational,
)
from .config import OptimizationConfig
from .errors import (
    CapacityError,
    DegenerateStateError,
    InvalidInputError,
    NumericalFailureError,
    SeqmpsError,
)
from .linalg import (
    SvdResult,
    eigh,
    expm_hermitian,
    haar_unitary,
    procrustes_unitary,
    svd,
    unitary_completion,
)
from .mps import (
    GAUGE_LEFT,
    GAUGE_NONE,
    Mps,
    canonicalize_left,
    from_state_vector,
    norm,
    normalize,
    overlap,
    to_state_vector,
    truncate_per_matrix,
)
from .seqgen import (
    CNOT,
    FidelityReport,
    GeneratorModel,
    Protocol,
    ancilla_operator_basis,
    build_step_unitary,
    default_config,
    fidelity,
    fidelity_vector,
    make_protocol,
    optimize,
    optimize_full_local,
    pauli_coefficients,
    simulate,
)
from .states import (
    TargetSpec,
    cluster_state,
    ghz_state,
    make_target,
    random_mps,
    w_state,
    xxz_dense_hamiltonian,
    xxz_ground,
    xxz_ground_vector,
)

__version__ = "0.1.0"

__all__ = [
    "CNOT",
    "CapacityError",
    "CompressionReport",
    "DegenerateStateError",
    "FidelityReport",
    "GAUGE_LEFT",
    "GAUGE_NONE",
    "GeneratorModel",
    "InvalidInputError",
    "Mps",
    "NumericalFailureError",
    "OptimizationConfig",
    "Protocol",
    "SeqmpsError",
    "SvdResult",
    "TargetSpec",
    "ancilla_operator_basis",
    "build_step_unitary",
    "canonicalize_left",
    "cluster_state",
    "compress_truncation",
    "compress_variational",
    "default_config",
    "eigh",
    "expm_hermitian",
    "fidelity",
    "fidelity_vector",
    "from_state_vector",
    "ghz_state",
    "haar_unitary",
    "make_protocol",
    "make_target",
    "norm",
    "normalize",
    "optimize",
    "optimize_full_local",
    "overlap",
    "pauli_coefficients",
    "procrustes_unitary",
    "random_mps",
    "simulate",
    "svd",
    "to_state_vector",
    "truncate_per_matrix",
    "unitary_completion",
    "w_state",
    "xxz_dense_hamiltonian",
    "xxz_ground",
    "xxz_ground_vector",
]
