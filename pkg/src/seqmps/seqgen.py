"""Sequential generation of multiqubit states and protocol optimization.

A protocol prepares n qubits by coupling each in turn to a D-level ancilla:
step k applies a unitary built as

    U_[k] = (U^A x 1) . (1 x U^{B_I}) . exp(-i Hbar(couplings_k)) . (1 x U^{B_F})

to ancilla x qubit_k, with the qubit starting in a fixed single-qubit state.
Sandwiching the step unitary with the qubit's initial state yields the step
isometry

    V^{i}_[k] [a, b] = sum_j  U_[k][(a, i), (b, j)] <j | init_k>

which is exactly a left-canonical MPS site tensor, so the joint state after
all n steps is an Mps whose final ancilla index stays open (phi_f = None).

Fidelity against a closed target is F = ||v|| where v is the ancilla vector
left over from contracting the target bra against the joint state; the
best final ancilla measurement/rotation is phi_f = v / ||v|| and the cost of
the protocol is 2 (1 - F), the squared distance between the joint state and
(best phi_f) x target.

The optimizer sweeps step by step.  Local unitary factors are updated in
closed form by a unitary Procrustes step against their linear environment,
computed with phi_f frozen at its current optimum; freezing makes the
objective Re tr(U . env), and re-eliminating phi_f afterwards can only help,
so every update weakly increases F (alternating ascent).  For the
Bell-diagonal generators each scalar coupling is solved exactly: the squared
overlap is a trigonometric polynomial with harmonics {0, 1, 2} over the
coupling period, pinned by five samples.  The dense-generator kind falls
back to a guarded line search.  After every full sweep a safeguarded
geodesic extrapolation (kept only when it lowers the cost) jumps along the
slow near-linear mode that plain coordinate sweeps crawl down.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .config import OptimizationConfig
from .errors import InvalidInputError
from .linalg import SIGMA, SIGMA_MINUS, SIGMA_PLUS, eigh, expm_hermitian, haar_unitary, procrustes_unitary
from .mps import GAUGE_LEFT, Mps
from .serialize import SCHEMA, complex_to_pairs, pairs_to_complex
from .tolerances import (
    MONOTONE_SLACK,
    SEQGEN_MAX_SWEEPS,
    SEQGEN_RESTARTS,
    SEQGEN_TOL,
    STATE_NORM_ATOL,
    UNITARITY_ATOL,
)

MODEL_KINDS = ("xy", "xxz", "ion_xy", "full_pauli")

# Common eigenbasis (Bell basis) of the three restricted generators.  Columns:
# (|00>+|11>)/sqrt2, (|00>-|11>)/sqrt2, (|01>+|10>)/sqrt2, (|01>-|10>)/sqrt2.
_BELL = np.array(
    [
        [1.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, 1.0, -1.0],
        [1.0, -1.0, 0.0, 0.0],
    ]
) / np.sqrt(2.0)
_LAMBDA_XY = np.array([0.0, 0.0, 2.0, -2.0])   # sigma1 sigma1 + sigma2 sigma2
_LAMBDA_ZZ = np.array([1.0, 1.0, -1.0, -1.0])  # sigma3 sigma3
_LAMBDA_ION = np.array([1.0, -1.0, 0.0, 0.0])  # sigma+ sigma+ + sigma- sigma-

# CNOT with the ancilla as control and the qubit as target (basis |a, q>).
CNOT = np.kron(np.diag([1.0, 0.0]), SIGMA[0]) + np.kron(np.diag([0.0, 1.0]), SIGMA[1])


def ancilla_operator_basis(d: int) -> list[np.ndarray]:
    """Hermitian operator basis for a d-level ancilla.

    For d = 2 this is exactly (sigma0..sigma3); for larger d it is the
    identity plus the generalized Gell-Mann matrices.
    """
    basis = [np.eye(d, dtype=complex)]
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            basis.append(sym)
            anti = np.zeros((d, d), dtype=complex)
            anti[j, k] = -1.0j
            anti[k, j] = 1.0j
            basis.append(anti)
    for l in range(1, d):
        diag = np.zeros((d, d), dtype=complex)
        for m in range(l):
            diag[m, m] = 1.0
        diag[l, l] = -float(l)
        basis.append(np.sqrt(2.0 / (l * (l + 1))) * diag)
    # Reorder so d = 2 gives (I, s1, s2, s3).
    return basis


def pauli_coefficients(h) -> np.ndarray:
    """Expand a two-qubit Hermitian matrix in the sigma_j x sigma_k basis.

    Returns the real (4, 4) coefficient table c with
    h = sum_{j,k} c[j, k] sigma_j x sigma_k.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (4, 4):
        raise InvalidInputError("pauli_coefficients expects a 4x4 matrix")
    coeffs = np.empty((4, 4))
    for j in range(4):
        for k in range(4):
            coeffs[j, k] = np.trace(np.kron(SIGMA[j], SIGMA[k]) @ h).real / 4.0
    return coeffs


@dataclass(frozen=True)
class GeneratorModel:
    """Family of two-body entangling generators Hbar(couplings).

    kind "xy":      hbar1 (s1 x s1 + s2 x s2)                (1 coupling)
    kind "xxz":     xy + hbar2 (s3 x s3)                     (2 couplings)
    kind "ion_xy":  hbar1 (s+ x s+ + s- x s-)                (1 coupling)
    kind "full_pauli": sum_{jk} hbar_jk  B_j x sigma_k        (4 d^2 couplings)

    The first factor acts on the ancilla.  d_ancilla must be 2 except for
    full_pauli.  Couplings absorb the interaction time (hbar = h * t).
    """

    kind: str
    d_ancilla: int = 2

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise InvalidInputError(f"unknown model kind {self.kind!r}")
        if self.d_ancilla < 2:
            raise InvalidInputError("d_ancilla must be >= 2")
        if self.d_ancilla != 2 and self.kind != "full_pauli":
            raise InvalidInputError(f"kind {self.kind!r} requires d_ancilla = 2")

    @property
    def param_count(self) -> int:
        if self.kind == "xy" or self.kind == "ion_xy":
            return 1
        if self.kind == "xxz":
            return 2
        return 4 * self.d_ancilla**2

    def coupling_interval(self) -> tuple[float, float]:
        """Search box for a single coupling.

        xy/xxz are exactly pi-periodic up to a global phase (spectra {0, +-2}
        and {+-1} on top).  ion_xy has spectrum {0, 0, +-1}, so only the full
        2 pi period is phase-equivalent.  full_pauli has no exact period; a
        symmetric box is used.
        """
        if self.kind in ("xy", "xxz"):
            return (0.0, np.pi)
        if self.kind == "ion_xy":
            return (0.0, 2.0 * np.pi)
        return (-np.pi, np.pi)

    def _params(self, params) -> np.ndarray:
        p = np.asarray(params, dtype=float).reshape(-1)
        if p.shape[0] != self.param_count:
            raise InvalidInputError(
                f"{self.kind} takes {self.param_count} couplings, got {p.shape[0]}"
            )
        return p

    def generator(self, params) -> np.ndarray:
        """Hermitian Hbar(params) on ancilla x qubit."""
        p = self._params(params)
        if self.kind == "xy":
            return p[0] * (np.kron(SIGMA[1], SIGMA[1]) + np.kron(SIGMA[2], SIGMA[2]))
        if self.kind == "xxz":
            return p[0] * (
                np.kron(SIGMA[1], SIGMA[1]) + np.kron(SIGMA[2], SIGMA[2])
            ) + p[1] * np.kron(SIGMA[3], SIGMA[3])
        if self.kind == "ion_xy":
            return p[0] * (
                np.kron(SIGMA_PLUS, SIGMA_PLUS) + np.kron(SIGMA_MINUS, SIGMA_MINUS)
            )
        basis = ancilla_operator_basis(self.d_ancilla)
        h = np.zeros((2 * self.d_ancilla, 2 * self.d_ancilla), dtype=complex)
        table = p.reshape(self.d_ancilla**2, 4)
        for j, b in enumerate(basis):
            for k in range(4):
                if table[j, k] != 0.0:
                    h += table[j, k] * np.kron(b, SIGMA[k])
        return h

    def entangler(self, params) -> np.ndarray:
        """Unitary exp(-i Hbar(params)).

        The three restricted kinds share the Bell eigenbasis, so their
        exponential is three small matrix products; full_pauli goes through
        a fresh eigendecomposition.
        """
        p = self._params(params)
        if self.kind == "xy":
            lam = p[0] * _LAMBDA_XY
        elif self.kind == "xxz":
            lam = p[0] * _LAMBDA_XY + p[1] * _LAMBDA_ZZ
        elif self.kind == "ion_xy":
            lam = p[0] * _LAMBDA_ION
        else:
            return expm_hermitian(self.generator(p))
        return (_BELL * np.exp(-1j * lam)) @ _BELL.T


def build_step_unitary(
    model: GeneratorModel,
    params=None,
    ua=None,
    ub_pre=None,
    ub_post=None,
    fixed_gate=None,
) -> np.ndarray:
    """Assemble one step unitary (U^A x 1)(1 x U^{B_I}) C (1 x U^{B_F}).

    C is exp(-i Hbar(params)) or, when fixed_gate is given, that gate
    verbatim (params are then ignored and may be None).  Omitted local
    factors are identities.  The result is unitary by construction.
    """
    d = model.d_ancilla
    if fixed_gate is not None:
        core = np.asarray(fixed_gate, dtype=complex)
        if core.shape != (2 * d, 2 * d):
            raise InvalidInputError(f"fixed_gate must be {2 * d}x{2 * d}")
        if np.abs(core.conj().T @ core - np.eye(2 * d)).max() > 1e-8:
            raise InvalidInputError("fixed_gate is not unitary")
    else:
        if params is None:
            raise InvalidInputError("params required when no fixed_gate is given")
        core = model.entangler(params)
    u = core
    if ub_post is not None:
        u = u @ np.kron(np.eye(d), ub_post)
    if ub_pre is not None:
        u = np.kron(np.eye(d), ub_pre) @ u
    if ua is not None:
        u = np.kron(ua, np.eye(2)) @ u
    return u


def _step_isometry(step_u: np.ndarray, init: np.ndarray, d: int) -> np.ndarray:
    """Contract the qubit init into a step unitary: (2, d, d) site tensor."""
    u4 = step_u.reshape(d, 2, d, 2)
    return np.tensordot(u4, init, axes=([3], [0])).transpose(1, 0, 2)


def _check_unit(vec, name: str, length: int) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    if v.shape[0] != length:
        raise InvalidInputError(f"{name} must have length {length}")
    if abs(np.linalg.norm(v) - 1.0) > STATE_NORM_ATOL:
        raise InvalidInputError(f"{name} must be normalized")
    return v


def _check_unitary_stack(arr, name: str, n: int, dim: int):
    if arr is None:
        return None
    a = np.asarray(arr, dtype=complex)
    if a.shape != (n, dim, dim):
        raise InvalidInputError(f"{name} must have shape ({n}, {dim}, {dim})")
    eye = np.eye(dim)
    for k in range(n):
        if np.abs(a[k].conj().T @ a[k] - eye).max() > 1e3 * UNITARITY_ATOL:
            raise InvalidInputError(f"{name}[{k}] is not unitary")
    return a


@dataclass(frozen=True)
class Protocol:
    """A complete sequential-generation recipe.

    couplings has one row of model parameters per step (None only with a
    fixed_gate).  Local unitary families are optional: None means "absent and
    not optimized", an (n, dim, dim) stack means "present".  qubit_inits are
    the per-step initial qubit states, phi_i the initial ancilla state.
    """

    n: int
    model: GeneratorModel
    couplings: np.ndarray | None
    qubit_inits: np.ndarray
    phi_i: np.ndarray
    local_ancilla: np.ndarray | None = None
    local_qubit_pre: np.ndarray | None = None
    local_qubit_post: np.ndarray | None = None
    fixed_gate: np.ndarray | None = None

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("protocols need n >= 1")
        d = self.model.d_ancilla
        if self.fixed_gate is None:
            if self.couplings is None:
                raise InvalidInputError("couplings required without a fixed_gate")
            c = np.asarray(self.couplings, dtype=float)
            if c.shape != (self.n, self.model.param_count):
                raise InvalidInputError(
                    f"couplings must have shape ({self.n}, {self.model.param_count})"
                )
            object.__setattr__(self, "couplings", c)
        else:
            gate = np.asarray(self.fixed_gate, dtype=complex)
            if gate.shape != (2 * d, 2 * d):
                raise InvalidInputError(f"fixed_gate must be {2 * d}x{2 * d}")
            object.__setattr__(self, "fixed_gate", gate)
            if self.couplings is not None:
                raise InvalidInputError("couplings and fixed_gate are exclusive")
        inits = np.asarray(self.qubit_inits, dtype=complex)
        if inits.shape != (self.n, 2):
            raise InvalidInputError(f"qubit_inits must have shape ({self.n}, 2)")
        for k in range(self.n):
            _check_unit(inits[k], f"qubit_inits[{k}]", 2)
        object.__setattr__(self, "qubit_inits", inits)
        object.__setattr__(self, "phi_i", _check_unit(self.phi_i, "phi_i", d))
        object.__setattr__(
            self, "local_ancilla", _check_unitary_stack(self.local_ancilla, "local_ancilla", self.n, d)
        )
        object.__setattr__(
            self,
            "local_qubit_pre",
            _check_unitary_stack(self.local_qubit_pre, "local_qubit_pre", self.n, 2),
        )
        object.__setattr__(
            self,
            "local_qubit_post",
            _check_unitary_stack(self.local_qubit_post, "local_qubit_post", self.n, 2),
        )

    def step_unitary(self, k: int) -> np.ndarray:
        """Full unitary of step k (1-based)."""
        i = k - 1
        return build_step_unitary(
            self.model,
            None if self.couplings is None else self.couplings[i],
            None if self.local_ancilla is None else self.local_ancilla[i],
            None if self.local_qubit_pre is None else self.local_qubit_pre[i],
            None if self.local_qubit_post is None else self.local_qubit_post[i],
            self.fixed_gate,
        )

    def step_isometry(self, k: int) -> np.ndarray:
        """Site tensor of step k: V^i[a, b] = sum_j U[(a i), (b j)] init_j."""
        return _step_isometry(self.step_unitary(k), self.qubit_inits[k - 1], self.model.d_ancilla)

    def to_json(self) -> str:
        doc = {
            "schema": SCHEMA,
            "n": self.n,
            "model": {"kind": self.model.kind, "d_ancilla": self.model.d_ancilla},
            "couplings": None if self.couplings is None else self.couplings.tolist(),
            "qubit_inits": complex_to_pairs(self.qubit_inits),
            "phi_i": complex_to_pairs(self.phi_i),
            "local_ancilla": None
            if self.local_ancilla is None
            else complex_to_pairs(self.local_ancilla),
            "local_qubit_pre": None
            if self.local_qubit_pre is None
            else complex_to_pairs(self.local_qubit_pre),
            "local_qubit_post": None
            if self.local_qubit_post is None
            else complex_to_pairs(self.local_qubit_post),
            "fixed_gate": None if self.fixed_gate is None else complex_to_pairs(self.fixed_gate),
        }
        return json.dumps(doc)

    @staticmethod
    def from_json(text: str) -> "Protocol":
        doc = json.loads(text)
        if doc.get("schema") != SCHEMA:
            raise InvalidInputError(f"unsupported schema {doc.get('schema')!r}")

        def opt(key):
            return None if doc[key] is None else pairs_to_complex(doc[key])

        return Protocol(
            n=doc["n"],
            model=GeneratorModel(doc["model"]["kind"], doc["model"]["d_ancilla"]),
            couplings=None if doc["couplings"] is None else np.asarray(doc["couplings"]),
            qubit_inits=pairs_to_complex(doc["qubit_inits"]),
            phi_i=pairs_to_complex(doc["phi_i"]),
            local_ancilla=opt("local_ancilla"),
            local_qubit_pre=opt("local_qubit_pre"),
            local_qubit_post=opt("local_qubit_post"),
            fixed_gate=opt("fixed_gate"),
        )


def make_protocol(
    model: GeneratorModel,
    n: int,
    qubit_inits=None,
    phi_i=None,
    with_ancilla: bool = False,
    with_qubit_pre: bool = False,
    with_qubit_post: bool = False,
    fixed_gate=None,
) -> Protocol:
    """Identity-initialized protocol: zero couplings, identity locals.

    qubit_inits defaults to all |0>, phi_i to the ancilla |0>.  Enabled local
    families start as identities so the initial protocol is a deterministic,
    well-defined starting point for optimization.
    """
    d = model.d_ancilla
    if qubit_inits is None:
        qubit_inits = np.zeros((n, 2), dtype=complex)
        qubit_inits[:, 0] = 1.0
    if phi_i is None:
        phi_i = np.zeros(d, dtype=complex)
        phi_i[0] = 1.0
    eye_stack = lambda dim: np.broadcast_to(np.eye(dim, dtype=complex), (n, dim, dim)).copy()
    return Protocol(
        n=n,
        model=model,
        couplings=None if fixed_gate is not None else np.zeros((n, model.param_count)),
        qubit_inits=qubit_inits,
        phi_i=phi_i,
        local_ancilla=eye_stack(d) if with_ancilla else None,
        local_qubit_pre=eye_stack(2) if with_qubit_pre else None,
        local_qubit_post=eye_stack(2) if with_qubit_post else None,
        fixed_gate=fixed_gate,
    )


def simulate(p: Protocol) -> Mps:
    """Joint ancilla+qubits state after all steps, as an open-boundary MPS.

    The site tensors are the step isometries, phi_i is the protocol's initial
    ancilla state, and the final ancilla index is left open (phi_f = None);
    the joint state always has norm 1.
    """
    tensors = [p.step_isometry(k) for k in range(1, p.n + 1)]
    return Mps(tensors, p.phi_i, None, GAUGE_LEFT)


@dataclass(frozen=True)
class FidelityReport:
    """Outcome of a fidelity evaluation or protocol optimization.

    fidelity = ||v|| for the leftover ancilla vector v, cost = 2 (1 - F),
    phi_f_optimal = v / ||v||.  history holds per-update cost values of the
    winning run (non-increasing within MONOTONE_SLACK); sweeps counts its
    full sweeps.
    """

    fidelity: float
    cost: float
    phi_f_optimal: np.ndarray
    history: list[float] = field(default_factory=list)
    sweeps: int = 0
    converged: bool = True
    restarts_used: int = 0

    def __post_init__(self):
        if not -1e-9 <= self.fidelity <= 1.0 + 1e-9:
            raise InvalidInputError(f"fidelity {self.fidelity} outside [0, 1]")
        if abs(self.cost - 2.0 * (1.0 - self.fidelity)) > 1e-12:
            raise InvalidInputError("cost is not 2 (1 - fidelity)")
        h = np.asarray(self.history, dtype=float)
        if h.size and np.any(np.diff(h) > MONOTONE_SLACK):
            raise InvalidInputError("history is not non-increasing")

    @property
    def one_minus_f(self) -> float:
        return 1.0 - self.fidelity

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "fidelity": self.fidelity,
            "cost": self.cost,
            "one_minus_f": self.one_minus_f,
            "phi_f_optimal": complex_to_pairs(self.phi_f_optimal),
            "sweeps": self.sweeps,
            "converged": self.converged,
            "restarts_used": self.restarts_used,
            "history_length": len(self.history),
        }


def _target_arrays(target: Mps):
    if target.open_final:
        raise InvalidInputError("target must be a closed MPS")
    return list(target.tensors), target.phi_i, target.phi_f


def _transfer_up(left, v_site, a_site):
    # left[b, c] -> sum_i V^i @ left @ A^i(dag):  [a, d]
    return np.einsum("iab,bc,idc->ad", v_site, left, a_site.conj())


def _transfer_down(tail, v_site, a_site):
    # tail[g, p, q] composed with the site transfer: [g, b, c]
    return np.einsum("gpq,ipb,iqc->gbc", tail, v_site, a_site.conj())


def fidelity_vector(p: Protocol, target: Mps) -> np.ndarray:
    """Leftover ancilla vector v with v[a] = <target| (joint state, ancilla a)>."""
    if target.n != p.n:
        raise InvalidInputError(f"target has {target.n} sites, protocol has {p.n}")
    a_tensors, a_phi_i, a_phi_f = _target_arrays(target)
    left = np.outer(p.phi_i, a_phi_i.conj())
    for k in range(1, p.n + 1):
        left = _transfer_up(left, p.step_isometry(k), a_tensors[k - 1])
    return left @ a_phi_f


def fidelity(p: Protocol, target: Mps) -> FidelityReport:
    """Fidelity of a protocol against a closed, normalized target MPS."""
    v = fidelity_vector(p, target)
    f = float(np.linalg.norm(v))
    f = min(f, 1.0 + 1e-9)
    phi_f = v / f if f > 1e-300 else _basis_vec(p.model.d_ancilla)
    return FidelityReport(
        fidelity=f, cost=2.0 * (1.0 - f), phi_f_optimal=phi_f, history=[2.0 * (1.0 - f)]
    )


def _basis_vec(d: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[0] = 1.0
    return e


class _SweepState:
    """Mutable working copy of a protocol during optimization."""

    def __init__(self, p: Protocol, target: Mps):
        self.model = p.model
        self.d = p.model.d_ancilla
        self.n = p.n
        self.fixed_gate = p.fixed_gate
        self.couplings = None if p.couplings is None else p.couplings.copy()
        self.ua = None if p.local_ancilla is None else p.local_ancilla.copy()
        self.ub_pre = None if p.local_qubit_pre is None else p.local_qubit_pre.copy()
        self.ub_post = None if p.local_qubit_post is None else p.local_qubit_post.copy()
        self.inits = p.qubit_inits.copy()
        self.phi_i = p.phi_i.copy()
        self.at, self.at_phi_i, self.at_phi_f = _target_arrays(target)
        self.v_sites = [self._isometry(k) for k in range(1, self.n + 1)]
        self.history: list[float] = []

    def _unitary(self, k: int) -> np.ndarray:
        i = k - 1
        return build_step_unitary(
            self.model,
            None if self.couplings is None else self.couplings[i],
            None if self.ua is None else self.ua[i],
            None if self.ub_pre is None else self.ub_pre[i],
            None if self.ub_post is None else self.ub_post[i],
            self.fixed_gate,
        )

    def _isometry(self, k: int) -> np.ndarray:
        return _step_isometry(self._unitary(k), self.inits[k - 1], self.d)

    def left_seed(self) -> np.ndarray:
        return np.outer(self.phi_i, self.at_phi_i.conj())

    def tail_seed(self) -> np.ndarray:
        tm = np.zeros((self.d, self.d, self.at_phi_f.shape[0]), dtype=complex)
        tm[np.arange(self.d), np.arange(self.d), :] = self.at_phi_f[None, :]
        return tm

    def current_v(self) -> np.ndarray:
        left = self.left_seed()
        for k in range(1, self.n + 1):
            left = _transfer_up(left, self.v_sites[k - 1], self.at[k - 1])
        return left @ self.at_phi_f

    def to_protocol(self) -> Protocol:
        return Protocol(
            n=self.n,
            model=self.model,
            couplings=self.couplings,
            qubit_inits=self.inits,
            phi_i=self.phi_i,
            local_ancilla=self.ua,
            local_qubit_pre=self.ub_pre,
            local_qubit_post=self.ub_post,
            fixed_gate=self.fixed_gate,
        )


def _golden_min(f, lo: float, hi: float, evals: int = 24) -> float:
    """Coarse grid + golden-section + 3 Newton polish steps on [lo, hi]."""
    xs = np.linspace(lo, hi, evals, endpoint=False)
    vals = [f(x) for x in xs]
    best = int(np.argmin(vals))
    step = (hi - lo) / evals
    a = xs[best] - step
    b = xs[best] + step
    # Golden-section shrink; invphi ~ 0.618.
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(40):
        if b - a < 1e-11 * max(1.0, abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = c if fc < fd else d
    fx = min(fc, fd)
    # Newton polish on the smooth 1-D cost.
    h = 1e-6
    for _ in range(3):
        fp = f(x + h)
        fm = f(x - h)
        d1 = (fp - fm) / (2.0 * h)
        d2 = (fp - 2.0 * fx + fm) / (h * h)
        if not np.isfinite(d2) or d2 <= 1e-18:
            break
        delta = np.clip(-d1 / d2, -step, step)
        cand = x + delta
        fcand = f(cand)
        if fcand < fx:
            x, fx = cand, fcand
        else:
            break
    return float(x)


def _coupling_argmax(f2, period: float) -> float:
    """Exact maximizer of a coupling's squared overlap over one period.

    For the Bell-diagonal entanglers the squared overlap is a trigonometric
    polynomial with harmonics {0, 1, 2} in 2*pi*theta/period, so five samples
    determine it exactly; the maximum is then refined analytically.
    """
    samples = np.array([f2(j * period / 5.0) for j in range(5)])
    coef = np.fft.fft(samples) / 5.0
    c1, c2 = coef[1], coef[2]
    grid = np.linspace(0.0, 2.0 * np.pi, 128, endpoint=False)
    vals = (
        coef[0].real
        + 2.0 * (c1 * np.exp(1j * grid)).real
        + 2.0 * (c2 * np.exp(2j * grid)).real
    )
    ph = float(grid[int(np.argmax(vals))])
    for _ in range(4):
        e1 = c1 * np.exp(1j * ph)
        e2 = c2 * np.exp(2j * ph)
        d1 = -2.0 * e1.imag - 4.0 * e2.imag
        d2 = -2.0 * e1.real - 8.0 * e2.real
        if d2 >= -1e-18:
            break
        ph -= d1 / d2
    return float((ph % (2.0 * np.pi)) * period / (2.0 * np.pi))


def _sweep_once(st: _SweepState, up: bool) -> float:
    """One half-sweep (all steps, ascending or descending); returns last cost."""
    n, d = st.n, st.d
    eye_d = np.eye(d)
    eye_2 = np.eye(2)
    if up:
        tails = [None] * (n + 1)
        tails[n] = st.tail_seed()
        for k in range(n - 1, 0, -1):
            tails[k] = _transfer_down(tails[k + 1], st.v_sites[k], st.at[k])
        left = st.left_seed()
        order = range(1, n + 1)
    else:
        lefts = [st.left_seed()]
        for k in range(1, n):
            lefts.append(_transfer_up(lefts[-1], st.v_sites[k - 1], st.at[k - 1]))
        tail = st.tail_seed()
        order = range(n, 0, -1)

    cost = st.history[-1] if st.history else None
    for k in order:
        if up:
            l_env = left
            t_env = tails[k]
        else:
            l_env = lefts[k - 1]
            t_env = tail
        cost = _update_step(st, k, l_env, t_env, eye_d, eye_2)
        if up:
            left = _transfer_up(l_env, st.v_sites[k - 1], st.at[k - 1])
        else:
            tail = _transfer_down(t_env, st.v_sites[k - 1], st.at[k - 1])
    return cost


def _update_step(st: _SweepState, k: int, l_env, t_env, eye_d, eye_2) -> float:
    """Optimize all enabled factors of step k against fixed environments."""
    i = k - 1
    d = st.d
    a_site = st.at[i]
    s = st.inits[i]
    # bt[i] = l_env @ A^i(dag): the target side folded into the environment.
    bt = np.einsum("bc,idc->ibd", l_env, a_site.conj())
    tm_mat = t_env.reshape(d, -1)

    def v_of_unitary(u):
        v_site = _step_isometry(u, s, d)
        x = np.tensordot(v_site, bt, axes=([0, 2], [0, 1]))
        return tm_mat @ x.reshape(-1)

    def assemble(core):
        u = core
        if st.ub_post is not None:
            u = u @ np.kron(eye_d, st.ub_post[i])
        if st.ub_pre is not None:
            u = np.kron(eye_d, st.ub_pre[i]) @ u
        if st.ua is not None:
            u = np.kron(st.ua[i], eye_2) @ u
        return u

    def core_now():
        if st.fixed_gate is not None:
            return st.fixed_gate
        return st.model.entangler(st.couplings[i])

    core = core_now()
    v = v_of_unitary(assemble(core))
    fnorm = np.linalg.norm(v)

    def record():
        st.history.append(2.0 * (1.0 - min(fnorm, 1.0 + 1e-9)))

    def env_for_total():
        # Environment of the full step unitary with phi_f frozen at v/||v||:
        # Re tr(U_total @ env) is the frozen objective.
        phi = v / fnorm if fnorm > 1e-300 else _basis_vec(d)
        u_fold = np.einsum("g,gbc->bc", phi.conj(), t_env)
        w = np.einsum("ipc,bc->ipb", bt, u_fold)  # w[i, b', b] = (bt_i @ u^T)
        env = np.einsum("j,ipb->pjbi", s, w).reshape(2 * d, 2 * d)
        return env

    # Factor updates: ancilla local, qubit pre-local, couplings, qubit
    # post-local.  Each is a closed-form ascent step, so the cost history
    # stays non-increasing.
    if st.ua is not None:
        env = env_for_total()
        m = (np.kron(eye_d, st.ub_pre[i]) if st.ub_pre is not None else np.eye(2 * d)) @ core
        if st.ub_post is not None:
            m = m @ np.kron(eye_d, st.ub_post[i])
        m = (m @ env).reshape(d, 2, d, 2)
        st.ua[i] = procrustes_unitary(np.einsum("aibi->ab", m))
        v = v_of_unitary(assemble(core))
        fnorm = np.linalg.norm(v)
        record()

    if st.ub_pre is not None:
        env = env_for_total()
        m = core
        if st.ub_post is not None:
            m = m @ np.kron(eye_d, st.ub_post[i])
        m = m @ env
        if st.ua is not None:
            m = m @ np.kron(st.ua[i], eye_2)
        m = m.reshape(d, 2, d, 2)
        st.ub_pre[i] = procrustes_unitary(np.einsum("ajai->ji", m))
        v = v_of_unitary(assemble(core))
        fnorm = np.linalg.norm(v)
        record()

    if st.couplings is not None and st.fixed_gate is None:
        lo, hi = st.model.coupling_interval()
        exact = st.model.kind != "full_pauli"
        for m_idx in range(st.model.param_count):
            params = st.couplings[i]

            def f2_of(theta, m_idx=m_idx, params=params):
                trial = params.copy()
                trial[m_idx] = theta
                vv = v_of_unitary(assemble(st.model.entangler(trial)))
                return float(np.linalg.norm(vv) ** 2)

            # Only accept the line-search result if it beats the current
            # value, so the cost stays non-increasing.
            if exact:
                cand = _coupling_argmax(f2_of, hi - lo)
                if f2_of(cand) >= f2_of(params[m_idx]):
                    st.couplings[i, m_idx] = cand
            else:

                def cost_of(theta, f2_of=f2_of):
                    return 2.0 * (1.0 - np.sqrt(max(f2_of(theta), 0.0)))

                cand = _golden_min(cost_of, lo, hi)
                if cost_of(cand) <= cost_of(params[m_idx]):
                    st.couplings[i, m_idx] = cand
        core = core_now()
        v = v_of_unitary(assemble(core))
        fnorm = np.linalg.norm(v)
        record()

    if st.ub_post is not None:
        env = env_for_total()
        m = env
        if st.ua is not None:
            m = m @ np.kron(st.ua[i], eye_2)
        if st.ub_pre is not None:
            m = m @ np.kron(eye_d, st.ub_pre[i])
        m = (m @ core).reshape(d, 2, d, 2)
        st.ub_post[i] = procrustes_unitary(np.einsum("ajai->ji", m))
        v = v_of_unitary(assemble(core))
        fnorm = np.linalg.norm(v)
        record()

    if not st.history:
        record()
    st.v_sites[i] = _step_isometry(assemble(core), s, d)
    return st.history[-1]


def _update_phi_i(st: _SweepState) -> None:
    """Closed-form update of the initial ancilla vector (top singular vector)."""
    d = st.d
    cols = []
    for b in range(d):
        left = np.outer(np.eye(d, dtype=complex)[b], st.at_phi_i.conj())
        for k in range(1, st.n + 1):
            left = _transfer_up(left, st.v_sites[k - 1], st.at[k - 1])
        cols.append(left @ st.at_phi_f)
    z = np.stack(cols, axis=1)  # v = z @ phi_i
    u, sing, vdag = np.linalg.svd(z)
    phi = vdag[0].conj()
    # Fix the overall phase for determinism (largest component real positive).
    j = int(np.argmax(np.abs(phi)))
    phi = phi * (abs(phi[j]) / phi[j])
    st.phi_i = phi
    st.history.append(2.0 * (1.0 - min(float(sing[0]), 1.0 + 1e-9)))


def _unitary_power(delta: np.ndarray, beta: float) -> np.ndarray:
    """delta**beta for unitary delta (principal branch), exactly unitary."""
    tmat, z = scipy.linalg.schur(delta, output="complex")
    phases = np.exp(1j * beta * np.angle(np.diagonal(tmat)))
    return (z * phases) @ z.conj().T


def _snapshot(st: _SweepState):
    return (
        None if st.ua is None else st.ua.copy(),
        None if st.ub_pre is None else st.ub_pre.copy(),
        None if st.ub_post is None else st.ub_post.copy(),
        None if st.couplings is None else st.couplings.copy(),
    )


def _load_snapshot(st: _SweepState, snap) -> None:
    ua, ub_pre, ub_post, couplings = snap
    if ua is not None:
        st.ua[:] = ua
    if ub_pre is not None:
        st.ub_pre[:] = ub_pre
    if ub_post is not None:
        st.ub_post[:] = ub_post
    if couplings is not None:
        st.couplings[:] = couplings
    eye_d = np.eye(st.d)
    eye_2 = np.eye(2)
    for i in range(st.n):
        if st.fixed_gate is not None:
            u = st.fixed_gate
        else:
            u = st.model.entangler(st.couplings[i])
        if st.ub_post is not None:
            u = u @ np.kron(eye_d, st.ub_post[i])
        if st.ub_pre is not None:
            u = np.kron(eye_d, st.ub_pre[i]) @ u
        if st.ua is not None:
            u = np.kron(st.ua[i], eye_2) @ u
        st.v_sites[i] = _step_isometry(u, st.inits[i], st.d)


def _extrapolated(st: _SweepState, prev, cur, beta: float):
    """Geodesic extrapolation cur + beta * (cur - prev) of all parameters."""
    out = []
    for p_stack, c_stack in zip(prev[:3], cur[:3]):
        if c_stack is None:
            out.append(None)
            continue
        out.append(
            np.stack(
                [
                    c @ _unitary_power(p.conj().T @ c, beta)
                    for p, c in zip(p_stack, c_stack)
                ]
            )
        )
    if cur[3] is None:
        out.append(None)
    else:
        step = cur[3] - prev[3]
        if st.model.kind == "full_pauli":
            out.append(cur[3] + beta * step)
        else:
            lo, hi = st.model.coupling_interval()
            width = hi - lo
            step = (step + width / 2.0) % width - width / 2.0
            out.append(lo + (cur[3] + beta * step - lo) % width)
    return tuple(out)


def _current_cost(st: _SweepState) -> float:
    v = st.current_v()
    return 2.0 * (1.0 - min(float(np.linalg.norm(v)), 1.0 + 1e-9))


_EXTRAP_BETA_MAX = 256.0
_EXTRAP_MEMORY = 9


def _extrapolate_sweep(st: _SweepState, snaps, cost: float) -> float:
    """Safeguarded extrapolation through recent parameter moves.

    Tries cur + beta * (cur - base) along unitary geodesics with doubling
    beta, for two secant baselines: the previous sweep and the oldest
    retained snapshot (the longer baseline averages out the sweep-to-sweep
    zigzag and points down the slow valley).  Only candidates that strictly
    lower the cost are kept, so the recorded history stays non-increasing.
    """
    cur = _snapshot(st)
    best_cost, best_snap = cost, None
    bases = (snaps[-1],) if len(snaps) == 1 else (snaps[-1], snaps[0])
    for base in bases:
        beta = 1.0
        while beta <= _EXTRAP_BETA_MAX:
            cand = _extrapolated(st, base, cur, beta)
            _load_snapshot(st, cand)
            c = _current_cost(st)
            if c < best_cost:
                best_cost, best_snap = c, cand
                beta *= 2.0
            else:
                break
    if best_snap is None:
        _load_snapshot(st, cur)
        return cost
    _load_snapshot(st, best_snap)
    st.history.append(best_cost)
    return best_cost


def _run_sweeps(st: _SweepState, cfg: OptimizationConfig) -> tuple[int, bool]:
    """Alternate up/down half-sweeps until the cost stalls."""
    v0 = st.current_v()
    st.history.append(2.0 * (1.0 - min(float(np.linalg.norm(v0)), 1.0 + 1e-9)))
    prev = st.history[-1]
    sweeps = 0
    converged = False
    snaps = [_snapshot(st)]
    for sweep in range(cfg.max_sweeps):
        _sweep_once(st, up=True)
        cost = _sweep_once(st, up=False)
        if cfg.vary_phi_i:
            _update_phi_i(st)
            cost = st.history[-1]
        cost = _extrapolate_sweep(st, snaps, cost)
        snaps.append(_snapshot(st))
        if len(snaps) > _EXTRAP_MEMORY:
            snaps.pop(0)
        sweeps = sweep + 1
        if cfg.good_enough is not None and cost <= cfg.good_enough:
            converged = True
            break
        if abs(prev - cost) <= cfg.tol * (1.0 + abs(cost)):
            converged = True
            break
        prev = cost
    return sweeps, converged


def _randomized(p: Protocol, rng: np.random.Generator) -> Protocol:
    """Random restart point with the same structure as p."""
    d = p.model.d_ancilla
    lo, hi = p.model.coupling_interval()
    couplings = None
    if p.couplings is not None:
        couplings = rng.uniform(lo, hi, size=p.couplings.shape)
    stack = lambda dim: np.stack([haar_unitary(dim, rng) for _ in range(p.n)])
    return Protocol(
        n=p.n,
        model=p.model,
        couplings=couplings,
        qubit_inits=p.qubit_inits,
        phi_i=p.phi_i,
        local_ancilla=None if p.local_ancilla is None else stack(d),
        local_qubit_pre=None if p.local_qubit_pre is None else stack(2),
        local_qubit_post=None if p.local_qubit_post is None else stack(2),
        fixed_gate=p.fixed_gate,
    )


def default_config(**overrides) -> OptimizationConfig:
    """Optimizer defaults for protocol search (tighter than compression)."""
    base = dict(
        tol=SEQGEN_TOL, max_sweeps=SEQGEN_MAX_SWEEPS, restarts=SEQGEN_RESTARTS, seed=0
    )
    base.update(overrides)
    return OptimizationConfig(**base)


def optimize(
    p0: Protocol, target: Mps, cfg: OptimizationConfig | None = None
) -> tuple[Protocol, FidelityReport]:
    """Coordinate-sweep optimization of a protocol against a target MPS.

    Sweeps step 1..n..1; per step, enabled local unitaries get Procrustes
    updates and scalar couplings a bounded line search (see module
    docstring).  cfg.restarts independent runs are performed (the first from
    p0 itself, the rest from seeded random points) and the best final
    fidelity wins.  Returns the optimized protocol and its report.
    """
    if cfg is None:
        cfg = default_config()
    if target.n != p0.n:
        raise InvalidInputError(f"target has {target.n} sites, protocol has {p0.n}")
    seeds = np.random.SeedSequence(cfg.seed).spawn(max(cfg.restarts, 1))
    best = None
    restarts_used = 0
    for r in range(cfg.restarts):
        start = p0 if r == 0 else _randomized(p0, np.random.default_rng(seeds[r]))
        st = _SweepState(start, target)
        sweeps, converged = _run_sweeps(st, cfg)
        cost = st.history[-1]
        restarts_used = r + 1
        if best is None or cost < best[0]:
            best = (cost, st, sweeps, converged)
        if cfg.good_enough is not None and best[0] <= cfg.good_enough:
            break
    cost, st, sweeps, converged = best
    p_opt = st.to_protocol()
    v = fidelity_vector(p_opt, target)
    f = min(float(np.linalg.norm(v)), 1.0 + 1e-9)
    phi_f = v / f if f > 1e-300 else _basis_vec(p_opt.model.d_ancilla)
    report = FidelityReport(
        fidelity=f,
        cost=2.0 * (1.0 - f),
        phi_f_optimal=phi_f,
        history=st.history,
        sweeps=sweeps,
        converged=converged,
        restarts_used=restarts_used,
    )
    return p_opt, report


def optimize_full_local(
    p0: Protocol, target: Mps, cfg: OptimizationConfig | None = None
) -> tuple[Protocol, FidelityReport]:
    """optimize() over couplings plus all three local unitary families.

    Requires the xy model with a 2-level ancilla (the regime in which this
    augmentation generates arbitrary bond-2 targets).  Missing local families
    in p0 are enabled as identities.
    """
    if p0.model.kind != "xy" or p0.model.d_ancilla != 2:
        raise InvalidInputError("optimize_full_local requires the xy model with d_ancilla = 2")
    n = p0.n
    eye_stack = lambda dim: np.broadcast_to(np.eye(dim, dtype=complex), (n, dim, dim)).copy()
    p_full = Protocol(
        n=n,
        model=p0.model,
        couplings=p0.couplings,
        qubit_inits=p0.qubit_inits,
        phi_i=p0.phi_i,
        local_ancilla=p0.local_ancilla if p0.local_ancilla is not None else eye_stack(2),
        local_qubit_pre=p0.local_qubit_pre if p0.local_qubit_pre is not None else eye_stack(2),
        local_qubit_post=p0.local_qubit_post if p0.local_qubit_post is not None else eye_stack(2),
        fixed_gate=None,
    )
    return optimize(p_full, target, cfg)
