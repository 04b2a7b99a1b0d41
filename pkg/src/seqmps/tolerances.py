"""Numerical tolerances and size caps used across the package.

Every default tolerance lives in this one table so that nothing is tuned
ad hoc at call sites.  Values are absolute unless noted otherwise.
"""

# Input validation for the dense linear algebra kernels.
HERMITICITY_ATOL = 1e-12      # max |h - h^dag| accepted by eigh, relative to max(1, |h|)
UNITARITY_ATOL = 1e-12        # max |u^dag u - 1| accepted where a unitary is required
STATE_NORM_ATOL = 1e-12       # single-system state vectors must be normalized to this

# Rank decisions: singular values below RANK_RTOL * s_max are treated as zero.
RANK_RTOL = 1e-12

# MPS gauge and reconstruction guarantees.
ISOMETRY_ATOL = 1e-10         # per-site isometry residual of a left-canonical MPS
RECONSTRUCTION_ATOL = 1e-10   # round-trip state-vector error, max-norm
NORM_ATOL = 1e-10             # norm of a normalized MPS is 1 within this

# Monotone sweep assertions (exact local minimization plus roundoff).
MONOTONE_SLACK = 1e-12

# Variational compression defaults.
COMPRESS_TOL = 1e-10          # relative error-change convergence threshold
COMPRESS_MAX_SWEEPS = 200

# Sequential-generation optimizer defaults.
SEQGEN_TOL = 1e-12            # |delta cost| over a full sweep
SEQGEN_MAX_SWEEPS = 500
SEQGEN_RESTARTS = 5
GOOD_ENOUGH_COST = 1e-10      # skip remaining restarts once cost is below this

# Ground-state degeneracy detection.
DEGENERACY_GAP = 1e-10

# Size caps for dense conversions.
MAX_DENSE_QUBITS = 20
MAX_XXZ_QUBITS = 14
