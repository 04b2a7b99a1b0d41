"""Dense complex linear algebra kernels.

Every other module funnels its matrix work through the four operations here:
singular value decomposition, Hermitian eigendecomposition, the Hermitian
matrix exponential exp(-i * scale * h), and the closed-form unitary
Procrustes update.  The heavy lifting is delegated to LAPACK via
numpy.linalg; this module owns input validation, the error contract, and the
conventions (descending singular values, ascending eigenvalues).

All functions treat their inputs as read-only and return fresh arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalFailureError
from .tolerances import HERMITICITY_ATOL, RANK_RTOL

# Pauli matrices sigma_0..sigma_3 in the computational basis |0>, |1>.
SIGMA = (
    np.eye(2, dtype=complex),
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)
# Raising/lowering combinations (sigma_1 +- i sigma_2) / 2.
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


def _as_matrix(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise InvalidInputError(f"{name} must be a 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True)
class SvdResult:
    """Economy SVD factors a = u @ diag(s) @ vdag.

    u has orthonormal columns, vdag orthonormal rows, and s is real,
    non-negative and sorted in descending order.  Ordering among exactly
    degenerate singular values is implementation defined.
    """

    u: np.ndarray
    s: np.ndarray
    vdag: np.ndarray

    def rank(self, rtol: float = RANK_RTOL) -> int:
        """Number of singular values above rtol * s_max."""
        if self.s.size == 0 or self.s[0] == 0.0:
            return 0
        return int(np.count_nonzero(self.s > rtol * self.s[0]))


def svd(a) -> SvdResult:
    """Economy singular value decomposition of a rectangular complex matrix.

    Raises InvalidInputError for non-finite or non-2-D input and
    NumericalFailureError if the LAPACK kernel does not converge.
    """
    a = _as_matrix(a, "a")
    try:
        u, s, vdag = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        # LAPACK does not expose its iteration count; forward its diagnostic.
        raise NumericalFailureError(f"SVD did not converge: {exc}") from exc
    return SvdResult(u=u, s=s, vdag=vdag)


def eigh(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with real eigenvalues in ascending
    order and eigenvectors as the columns of a unitary matrix.  The input
    must be Hermitian within HERMITICITY_ATOL (scaled by max(1, |h|)).
    """
    h = _as_matrix(h, "h")
    if h.shape[0] != h.shape[1]:
        raise InvalidInputError(f"h must be square, got shape {h.shape}")
    scale = max(1.0, float(np.abs(h).max(initial=0.0)))
    if np.abs(h - h.conj().T).max(initial=0.0) > HERMITICITY_ATOL * scale:
        raise InvalidInputError("h is not Hermitian within tolerance")
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigh did not converge: {exc}") from exc
    return w, v


def expm_hermitian(h, scale: float = 1.0) -> np.ndarray:
    """Unitary exp(-i * scale * h) for Hermitian h, via eigendecomposition."""
    w, v = eigh(h)
    phases = np.exp(-1j * scale * w)
    return (v * phases) @ v.conj().T


def procrustes_unitary(env) -> np.ndarray:
    """Unitary u maximizing Re tr(u @ env) over the full unitary group.

    If svd(env^dag) = (u, s, vdag) the maximizer is u @ vdag and the attained
    maximum is sum(s).  env must be square; a zero env yields an arbitrary
    (but deterministic) unitary, which is consistent with the objective being
    constant in that case.
    """
    env = _as_matrix(env, "env")
    if env.shape[0] != env.shape[1]:
        raise InvalidInputError(f"env must be square, got shape {env.shape}")
    f = svd(env.conj().T)
    return f.u @ f.vdag


def unitary_completion(isometry) -> np.ndarray:
    """Extend a matrix with orthonormal columns to a full unitary.

    The first r columns of the result equal the input exactly; the remaining
    columns are an orthonormal basis of the complement, chosen
    deterministically.
    """
    v = _as_matrix(isometry, "isometry")
    m, r = v.shape
    if r > m:
        raise InvalidInputError("isometry has more columns than rows")
    gram = v.conj().T @ v
    if np.abs(gram - np.eye(r)).max(initial=0.0) > 1e-10:
        raise InvalidInputError("columns are not orthonormal")
    if r == m:
        return v.copy()
    # Orthonormal basis of the orthogonal complement from the SVD of the
    # projector I - v v^dag (its rank-(m-r) range).
    proj = np.eye(m) - v @ v.conj().T
    f = svd(proj)
    comp = f.u[:, : m - r]
    out = np.concatenate([v, comp], axis=1)
    return out


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed random unitary (QR of a Ginibre matrix, phase-fixed)."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
