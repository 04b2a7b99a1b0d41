"""Finite matrix-product states with explicit boundary vectors.

Storage convention
------------------
A state on n qubits is stored as site tensors ``tensors[k-1]`` for sites
k = 1..n, each of shape (2, D_k, D_{k-1}): physical index first, then the
left bond (toward ``phi_f``), then the right bond (toward ``phi_i``).  The
amplitude of the basis state |i_n ... i_1> (site 1 is the least significant
bit of the state-vector index) is the right-to-left matrix product

    c(i_n, ..., i_1) = phi_f^dag . A^{i_n} . ... . A^{i_1} . phi_i

so the index arithmetic matches the product order literally: site 1 acts on
phi_i first.  ``phi_f`` is stored as a ket and enters the contraction
conjugated; ``phi_f = None`` marks an open final bond (an undischarged
ancilla index), which only the sequential-generation module produces.

Worked 2-site example: with

    A^{0}_[1] = [[1/sqrt(2)], [0]],   A^{1}_[1] = [[0], [1/sqrt(2)]]
    A^{0}_[2] = [[1, 0]],             A^{1}_[2] = [[0, 1]]
    phi_i = [1],  phi_f = [1]

the nonzero amplitudes are c(0,0) = phi_f^dag A^0_[2] A^0_[1] phi_i
= 1/sqrt(2) and c(1,1) = 1/sqrt(2): the two-qubit GHZ state.  Each stacked
matrix [A^0; A^1] (stacking the (i, left) rows) has orthonormal columns, so
the example is in left-canonical gauge: sum_i A^{i dag} A^{i} = identity.

Left-canonical gauge means exactly that per-site isometry condition; with
unit-norm boundaries it implies the state itself has norm 1.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import CapacityError, DegenerateStateError, InvalidInputError
from .serialize import SCHEMA, complex_to_pairs, pairs_to_complex
from .tolerances import MAX_DENSE_QUBITS, RANK_RTOL

GAUGE_NONE = "none"
GAUGE_LEFT = "left-canonical"


class Mps:
    """Immutable matrix-product state (see module docstring for conventions).

    Attributes:
        tensors: per-site arrays of shape (2, D_k, D_{k-1}).
        phi_i: right boundary vector, length D_0.
        phi_f: left boundary ket, length D_n, or None for an open final bond.
        gauge_tag: "none" or "left-canonical".
    """

    __slots__ = ("tensors", "phi_i", "phi_f", "gauge_tag")

    def __init__(self, tensors, phi_i, phi_f, gauge_tag: str = GAUGE_NONE):
        tensors = [np.array(t, dtype=complex) for t in tensors]
        if not tensors:
            raise InvalidInputError("an MPS needs at least one site")
        for k, t in enumerate(tensors):
            if t.ndim != 3 or t.shape[0] != 2:
                raise InvalidInputError(
                    f"site {k + 1} tensor must have shape (2, D_k, D_k-1), got {t.shape}"
                )
            if not np.all(np.isfinite(t)):
                raise InvalidInputError(f"site {k + 1} tensor has non-finite entries")
        for k in range(1, len(tensors)):
            if tensors[k].shape[2] != tensors[k - 1].shape[1]:
                raise InvalidInputError(
                    f"bond mismatch between sites {k} and {k + 1}: "
                    f"{tensors[k - 1].shape[1]} vs {tensors[k].shape[2]}"
                )
        phi_i = np.array(phi_i, dtype=complex).reshape(-1)
        if phi_i.shape[0] != tensors[0].shape[2]:
            raise InvalidInputError("phi_i length does not match the first bond")
        if phi_f is not None:
            phi_f = np.array(phi_f, dtype=complex).reshape(-1)
            if phi_f.shape[0] != tensors[-1].shape[1]:
                raise InvalidInputError("phi_f length does not match the last bond")
            if not np.all(np.isfinite(phi_f)):
                raise InvalidInputError("phi_f has non-finite entries")
        if not np.all(np.isfinite(phi_i)):
            raise InvalidInputError("phi_i has non-finite entries")
        if gauge_tag not in (GAUGE_NONE, GAUGE_LEFT):
            raise InvalidInputError(f"unknown gauge_tag {gauge_tag!r}")
        for t in tensors:
            t.flags.writeable = False
        phi_i.flags.writeable = False
        if phi_f is not None:
            phi_f.flags.writeable = False
        object.__setattr__(self, "tensors", tuple(tensors))
        object.__setattr__(self, "phi_i", phi_i)
        object.__setattr__(self, "phi_f", phi_f)
        object.__setattr__(self, "gauge_tag", gauge_tag)

    def __setattr__(self, name, value):
        raise AttributeError("Mps is immutable")

    @property
    def n(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> list[int]:
        """[D_0, D_1, ..., D_n]."""
        dims = [self.tensors[0].shape[2]]
        dims.extend(t.shape[1] for t in self.tensors)
        return dims

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims)

    @property
    def open_final(self) -> bool:
        return self.phi_f is None

    def with_phi_f(self, phi_f) -> "Mps":
        """Same tensors with the final boundary replaced (closes an open MPS)."""
        return Mps(self.tensors, self.phi_i, phi_f, self.gauge_tag)

    def site(self, k: int) -> np.ndarray:
        """Tensor of site k (1-based)."""
        return self.tensors[k - 1]

    def to_json(self) -> str:
        doc = {
            "schema": SCHEMA,
            "n": self.n,
            "bond_dims": self.bond_dims,
            "tensors": [complex_to_pairs(t) for t in self.tensors],
            "phi_i": complex_to_pairs(self.phi_i),
            "phi_f": None if self.phi_f is None else complex_to_pairs(self.phi_f),
            "gauge_tag": self.gauge_tag,
        }
        return json.dumps(doc)

    @staticmethod
    def from_json(text: str) -> "Mps":
        doc = json.loads(text)
        if doc.get("schema") != SCHEMA:
            raise InvalidInputError(f"unsupported schema {doc.get('schema')!r}")
        phi_f = doc["phi_f"]
        return Mps(
            [pairs_to_complex(t) for t in doc["tensors"]],
            pairs_to_complex(doc["phi_i"]),
            None if phi_f is None else pairs_to_complex(phi_f),
            doc["gauge_tag"],
        )


def _require_closed(m: Mps, op: str) -> None:
    if m.open_final:
        raise InvalidInputError(f"{op} requires a closed MPS (phi_f is open)")


def from_state_vector(psi, max_bond: int | None = None) -> Mps:
    """Exact left-canonical MPS of a dense state vector.

    psi must have length 2**n with 1 <= n <= MAX_DENSE_QUBITS and must not be
    the zero vector.  Sites are split off from site n downward by successive
    economy SVDs; the orthonormal-row factor becomes the site tensor, so every
    site satisfies the isometry condition exactly and the bond dimensions are
    the minimal ones (2**min(k, n-k) capped by max_bond when given).  The
    final leftover scalar (norm and global phase) is stored in phi_i, so the
    reconstruction is exact even for non-normalized input.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(psi)):
        raise InvalidInputError("psi contains non-finite entries")
    n = int(np.log2(psi.shape[0]))
    if 2**n != psi.shape[0] or psi.shape[0] < 2:
        raise InvalidInputError(f"length {psi.shape[0]} is not 2**n with n >= 1")
    if n > MAX_DENSE_QUBITS:
        raise CapacityError(f"n = {n} exceeds the dense cap of {MAX_DENSE_QUBITS}")
    if not np.any(psi):
        raise InvalidInputError("psi is the zero vector")
    if max_bond is not None and max_bond < 1:
        raise InvalidInputError("max_bond must be >= 1")

    tensors: list[np.ndarray] = []
    work = psi.reshape(2**n, 1)
    for _ in range(n, 0, -1):
        rows, d_out = work.shape
        mat = work.reshape(2, rows // 2, d_out).transpose(1, 0, 2).reshape(rows // 2, 2 * d_out)
        u, s, vdag = np.linalg.svd(mat, full_matrices=False)
        r = int(np.count_nonzero(s > RANK_RTOL * s[0]))
        r = max(r, 1)
        if max_bond is not None:
            r = min(r, max_bond)
        # vdag rows are the (i, left-bond) groups: reshaping gives the site
        # tensor with the isometry condition holding exactly.
        site = vdag[:r].reshape(r, 2, d_out).transpose(1, 2, 0)
        tensors.append(site)
        work = u[:, :r] * s[:r]
    tensors.reverse()
    phi_i = work.reshape(-1)  # leftover scalar, length 1
    return Mps(tensors, phi_i, np.ones(1, dtype=complex), GAUGE_LEFT)


def to_state_vector(m: Mps) -> np.ndarray:
    """Dense state vector of a closed MPS (index i_1 least significant)."""
    _require_closed(m, "to_state_vector")
    if m.n > MAX_DENSE_QUBITS:
        raise CapacityError(f"n = {m.n} exceeds the dense cap of {MAX_DENSE_QUBITS}")
    part = m.phi_i.reshape(1, -1)
    for t in m.tensors:
        # part[(i_{k-1}..i_1), b] -> sum_b t[i, a, b] part[p, b]
        part = np.einsum("iab,pb->ipa", t, part).reshape(-1, t.shape[1])
    return part @ m.phi_f.conj()


def overlap(a: Mps, b: Mps) -> complex:
    """Physical inner product <a|b> of two closed MPS on the same n."""
    _require_closed(a, "overlap")
    _require_closed(b, "overlap")
    if a.n != b.n:
        raise InvalidInputError(f"site counts differ: {a.n} vs {b.n}")
    trans = np.outer(b.phi_i, a.phi_i.conj())
    for ta, tb in zip(a.tensors, b.tensors):
        trans = np.einsum("iac,cd,ibd->ab", tb, trans, ta.conj())
    return complex(np.einsum("a,ab,b->", b.phi_f.conj(), trans, a.phi_f))


def norm(m: Mps) -> float:
    """Euclidean norm of the represented state."""
    return float(np.sqrt(max(overlap(m, m).real, 0.0)))


def normalize(m: Mps) -> Mps:
    """Rescale phi_i so the state has norm 1; gauge is untouched."""
    nm = norm(m)
    if nm < 1e-300:
        raise DegenerateStateError("cannot normalize a (numerically) zero state")
    return Mps(m.tensors, m.phi_i / nm, m.phi_f, m.gauge_tag)


def canonicalize_left(m: Mps) -> Mps:
    """Gauge-equivalent MPS satisfying the isometry condition at every site.

    Sweeps from site n down to site 1, splitting each stacked matrix
    [A^0; A^1] by SVD: the orthonormal-column factor stays as the site
    tensor and the remainder flows toward phi_i, which finally absorbs the
    norm and phase.  Singular values below RANK_RTOL * s_max are dropped, so
    bond dimensions never grow and redundant rank is trimmed.  The physical
    state is unchanged (exactly, up to floating-point error).
    """
    carry = np.eye(m.tensors[-1].shape[1], dtype=complex)
    new_tensors: list[np.ndarray] = []
    for t in reversed(m.tensors):
        w = np.einsum("ab,ibc->iac", carry, t)
        rows = w.shape[0] * w.shape[1]
        stacked = w.reshape(rows, w.shape[2])
        u, s, vdag = np.linalg.svd(stacked, full_matrices=False)
        if s.size == 0 or s[0] == 0.0:
            r = 1
        else:
            r = max(int(np.count_nonzero(s > RANK_RTOL * s[0])), 1)
        new_tensors.append(u[:, :r].reshape(2, w.shape[1], r))
        carry = s[:r, None] * vdag[:r]
    new_tensors.reverse()
    phi_i = carry @ m.phi_i
    return Mps(new_tensors, phi_i, m.phi_f, GAUGE_LEFT)


def truncate_per_matrix(m: Mps, keep: int) -> Mps:
    """SVD-truncate each site's stacked matrix to rank ``keep``.

    The boundary vectors are absorbed and the norm is first pushed into the
    top site by an LQ sweep, leaving every lower site row-orthonormal.  A
    downward sweep then splits each stacked matrix [A^0; A^1] by SVD; at
    that moment its singular values are exactly the Schmidt coefficients of
    the bond below, so keeping the ``keep`` largest is the optimal local
    rank reduction.  Requires a left-canonical closed input; the result is
    left-canonical, normalized, with trivial boundary vectors and all bond
    dimensions <= keep.
    """
    if keep < 1:
        raise InvalidInputError(f"keep must be >= 1, got {keep}")
    if m.gauge_tag != GAUGE_LEFT:
        raise InvalidInputError("truncate_per_matrix requires a left-canonical MPS")
    _require_closed(m, "truncate_per_matrix")
    ts = [t.copy() for t in m.tensors]
    ts[0] = np.einsum("iab,b->ia", ts[0], m.phi_i)[:, :, None]
    ts[-1] = np.einsum("a,iab->ib", m.phi_f.conj(), ts[-1])[:, None, :]
    # Upward LQ pass: rows become orthonormal, the norm collects at the top.
    for k in range(len(ts) - 1):
        t = ts[k]
        mat = t.transpose(1, 0, 2).reshape(t.shape[1], 2 * t.shape[2])
        q, r = np.linalg.qr(mat.conj().T)
        rank = q.shape[1]
        ts[k] = q.conj().T.reshape(rank, 2, t.shape[2]).transpose(1, 0, 2)
        ts[k + 1] = np.einsum("iab,bc->iac", ts[k + 1], r.conj().T)
    # Downward pass: SVD each stacked matrix, keep the largest singular
    # values, push the remainder into the site below.
    for k in range(len(ts) - 1, 0, -1):
        t = ts[k]
        stacked = t.reshape(2 * t.shape[1], t.shape[2])
        u, s, vdag = np.linalg.svd(stacked, full_matrices=False)
        r = min(keep, int(s.size))
        ts[k] = u[:, :r].reshape(2, t.shape[1], r)
        ts[k - 1] = np.einsum("ab,ibc->iac", s[:r, None] * vdag[:r], ts[k - 1])
    t = ts[0]
    stacked = t.reshape(2 * t.shape[1], t.shape[2])
    u, s, vdag = np.linalg.svd(stacked, full_matrices=False)
    # Keeping the top singular direction normalizes; vdag preserves phase.
    ts[0] = (u[:, :1] * vdag[0, 0]).reshape(2, t.shape[1], 1)
    return Mps(ts, np.ones(1, dtype=complex), np.ones(1, dtype=complex), GAUGE_LEFT)
