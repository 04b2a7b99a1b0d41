"""Bond-dimension compression of matrix product states.

Both routes take a normalized left-canonical target and a bond cap d_prime
and return a normalized left-canonical approximation with every bond at most
d_prime, plus a report.  The error measure throughout is the squared
distance

    error = || |target> - |trial> ||^2 = 2 (1 - Re <target|trial>)

which for the variational route (whose overlap is real non-negative by
construction) equals 2 (1 - fidelity).

compress_truncation keeps, at every site independently, the d_prime largest
singular values of the stacked site matrix and re-canonicalizes.

compress_variational does alternating least squares in mixed-canonical
gauge: with all other sites isometric, the optimal tensor at the active site
is simply the target's environment there, and its Frobenius norm is the
overlap.  Each half-sweep walks the chain once (up: site 1 to n, down: n to
1), moving the gauge center by QR as it goes.  Initialized from the
truncation result (default) its error can only improve on truncation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import OptimizationConfig
from .errors import InvalidInputError
from .mps import GAUGE_LEFT, Mps, canonicalize_left, norm, normalize, overlap, truncate_per_matrix
from .serialize import SCHEMA
from .tolerances import MONOTONE_SLACK

METHOD_TRUNCATION = "truncation"
METHOD_VARIATIONAL = "variational"


@dataclass(frozen=True)
class CompressionReport:
    """Outcome of a compression run.

    error = 2 (1 - Re <target|trial>), clamped at 0 against roundoff;
    fidelity = |<target|trial>|.  sweep_history holds the error after each
    half-sweep of the winning run (empty for truncation and for zero-sweep
    returns); it is non-increasing within MONOTONE_SLACK.
    """

    d_prime: int
    method: str
    error: float
    fidelity: float
    sweeps: int = 0
    converged: bool = True
    sweep_history: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.method not in (METHOD_TRUNCATION, METHOD_VARIATIONAL):
            raise InvalidInputError(f"unknown compression method {self.method!r}")
        if self.d_prime < 1:
            raise InvalidInputError("d_prime must be >= 1")
        if not -1e-9 <= self.fidelity <= 1.0 + 1e-9:
            raise InvalidInputError(f"fidelity {self.fidelity} outside [0, 1]")
        object.__setattr__(self, "error", max(float(self.error), 0.0))
        h = np.asarray(self.sweep_history, dtype=float)
        if h.size and np.any(np.diff(h) > MONOTONE_SLACK):
            raise InvalidInputError("sweep_history is not non-increasing")

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "d_prime": self.d_prime,
            "method": self.method,
            "error": self.error,
            "fidelity": self.fidelity,
            "sweeps": self.sweeps,
            "converged": self.converged,
            "sweep_history": list(map(float, self.sweep_history)),
        }


def _check_target(target: Mps) -> None:
    if target.open_final:
        raise InvalidInputError("compression target must be a closed MPS")
    if target.gauge_tag != GAUGE_LEFT:
        raise InvalidInputError("compression target must be left-canonical")
    if abs(norm(target) - 1.0) > 1e-8:
        raise InvalidInputError("compression target must be normalized")


def _error_from_overlap(ov: complex) -> float:
    return max(2.0 * (1.0 - ov.real), 0.0)


def compress_truncation(target: Mps, d_prime: int) -> tuple[Mps, CompressionReport]:
    """Per-site singular value truncation to bond dimension d_prime."""
    _check_target(target)
    trial = truncate_per_matrix(target, d_prime)
    ov = overlap(target, trial)
    return trial, CompressionReport(
        d_prime=d_prime,
        method=METHOD_TRUNCATION,
        error=_error_from_overlap(ov),
        fidelity=min(float(abs(ov)), 1.0 + 1e-9),
    )


def _random_trial(target: Mps, d_prime: int, rng: np.random.Generator) -> Mps:
    """Random left-canonical trial with the capped bond profile of the target."""
    dims = [min(int(d), d_prime) for d in target.bond_dims]
    tensors = []
    for k in range(1, target.n + 1):
        shape = (2, dims[k], dims[k - 1])
        t = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        tensors.append(t)
    phi_i = rng.standard_normal(dims[0]) + 1j * rng.standard_normal(dims[0])
    phi_f = rng.standard_normal(dims[-1]) + 1j * rng.standard_normal(dims[-1])
    return normalize(canonicalize_left(Mps(tensors, phi_i, phi_f)))


def _absorb_boundaries(m: Mps) -> list[np.ndarray]:
    """Tensors of m with phi_i and conj(phi_f) contracted into the edge sites.

    The result represents the same state with 1-dimensional boundary vectors
    equal to 1, which simplifies the sweep bookkeeping.
    """
    ts = [t.copy() for t in m.tensors]
    ts[0] = np.einsum("iab,b->ia", ts[0], m.phi_i)[:, :, None]
    ts[-1] = np.einsum("a,iab->ib", m.phi_f.conj(), ts[-1])[:, None, :]
    return ts


def _gauge_to_site1(ts: list[np.ndarray]) -> None:
    """QR-orthogonalize sites n..2 in place, leaving the gauge center at 1.

    Absorbing a non-unit phi_f breaks the isometry of site n, and the first
    up half-sweep needs every site above the center isometric; this exact
    gauge pass restores that without changing the state.
    """
    for k in range(len(ts), 1, -1):
        t = ts[k - 1]
        q, r = np.linalg.qr(t.reshape(2 * t.shape[1], t.shape[2]))
        ts[k - 1] = q.reshape(2, t.shape[1], -1)
        ts[k - 2] = np.einsum("ab,ibc->iac", r, ts[k - 2])


def compress_variational(
    target: Mps, d_prime: int, cfg: OptimizationConfig | None = None
) -> tuple[Mps, CompressionReport]:
    """Alternating-least-squares compression to bond dimension d_prime.

    cfg.init picks the starting trial ("truncation" or "random"); with
    random init, cfg.restarts independent seeded runs are performed and the
    lowest final error wins.  Convergence: the error change over one full
    sweep is at most cfg.tol * (1 + error).  If the initial trial already
    matches the target to within 1e-12 in error, it is returned with zero
    sweeps.
    """
    if cfg is None:
        cfg = OptimizationConfig()
    _check_target(target)
    if d_prime < 1:
        raise InvalidInputError("d_prime must be >= 1")

    at = _absorb_boundaries(target)
    runs = cfg.restarts if cfg.init == "random" else 1
    seeds = np.random.SeedSequence(cfg.seed).spawn(max(runs, 1))
    best = None
    for r in range(runs):
        if cfg.init == "truncation":
            start, _ = compress_truncation(target, d_prime)
        else:
            start = _random_trial(target, d_prime, np.random.default_rng(seeds[r]))
        result = _als_run(target, at, start, d_prime, cfg)
        if best is None or result[1].error < best[1].error:
            best = result
        if cfg.good_enough is not None and best[1].error <= cfg.good_enough:
            break
    return best


def _als_run(
    target: Mps, at: list[np.ndarray], start: Mps, d_prime: int, cfg: OptimizationConfig
) -> tuple[Mps, CompressionReport]:
    n = target.n
    ov0 = overlap(target, start)
    err0 = _error_from_overlap(ov0)
    if err0 <= 1e-12:
        return start, CompressionReport(
            d_prime=d_prime,
            method=METHOD_VARIATIONAL,
            error=err0,
            fidelity=min(float(abs(ov0)), 1.0 + 1e-9),
        )

    ts = _absorb_boundaries(start)
    _gauge_to_site1(ts)
    history: list[float] = []
    prev = err0
    converged = False
    sweeps = 0
    final_f = 0.0
    for sweep in range(cfg.max_sweeps):
        final_f = _half_sweep(at, ts, up=True)
        history.append(2.0 * (1.0 - min(final_f, 1.0 + 1e-9)))
        final_f = _half_sweep(at, ts, up=False)
        err = 2.0 * (1.0 - min(final_f, 1.0 + 1e-9))
        history.append(err)
        sweeps = sweep + 1
        if abs(prev - err) <= cfg.tol * (1.0 + abs(err)):
            converged = True
            break
        prev = err

    # After a down half-sweep the gauge center sits at site 1; normalizing it
    # makes every site isometric, i.e. the chain is left-canonical.
    fnorm = np.linalg.norm(ts[0])
    if fnorm < 1e-300:
        raise InvalidInputError("variational trial collapsed to the zero state")
    ts[0] = ts[0] / fnorm
    trial = Mps(
        ts, np.ones(1, dtype=complex), np.ones(1, dtype=complex), GAUGE_LEFT
    )
    err = history[-1]
    return trial, CompressionReport(
        d_prime=d_prime,
        method=METHOD_VARIATIONAL,
        error=err,
        fidelity=min(final_f, 1.0 + 1e-9),
        sweeps=sweeps,
        converged=converged,
        sweep_history=history,
    )


def _env_up(a_site, m_prev, x_site):
    # M_k = sum_i A^i M_{k-1} X^i(dag)
    return np.einsum("iab,bc,idc->ad", a_site, m_prev, x_site.conj())


def _env_down(a_site, n_next, x_site):
    # N_{k-1} = sum_i X^i(dag) N_k A^i
    return np.einsum("iab,ac,icd->bd", x_site.conj(), n_next, a_site)


def _half_sweep(at: list[np.ndarray], ts: list[np.ndarray], up: bool) -> float:
    """One half-sweep of local updates; returns the last overlap value.

    The active site is set to its environment E (the exact local optimum),
    then split by QR to move the gauge center one site along the sweep
    direction.  ||E|| equals the overlap with the target, so it can only
    grow from one update to the next.
    """
    n = len(at)
    fnorm = 0.0
    if up:
        envs = [None] * (n + 1)
        envs[n] = np.eye(1, dtype=complex)
        for j in range(n, 1, -1):
            envs[j - 1] = _env_down(at[j - 1], envs[j], ts[j - 1])
        m_prev = np.eye(1, dtype=complex)
        for k in range(1, n + 1):
            e = np.einsum("ab,ibc,cd->iad", envs[k], at[k - 1], m_prev)
            fnorm = np.linalg.norm(e)
            if k < n:
                dk, dkm1 = e.shape[1], e.shape[2]
                h = e.transpose(1, 0, 2).reshape(dk, 2 * dkm1)
                q, r = np.linalg.qr(h.conj().T)
                ts[k - 1] = q.conj().T.reshape(-1, 2, dkm1).transpose(1, 0, 2)
                ts[k] = np.einsum("iab,bc->iac", ts[k], r.conj().T)
                m_prev = _env_up(at[k - 1], m_prev, ts[k - 1])
            else:
                ts[k - 1] = e
    else:
        envs = [None] * (n + 1)
        envs[0] = np.eye(1, dtype=complex)
        for j in range(1, n):
            envs[j] = _env_up(at[j - 1], envs[j - 1], ts[j - 1])
        n_next = np.eye(1, dtype=complex)
        for k in range(n, 0, -1):
            e = np.einsum("ab,ibc,cd->iad", n_next, at[k - 1], envs[k - 1])
            fnorm = np.linalg.norm(e)
            if k > 1:
                dk, dkm1 = e.shape[1], e.shape[2]
                q, r = np.linalg.qr(e.reshape(2 * dk, dkm1))
                ts[k - 1] = q.reshape(2, dk, -1)
                ts[k - 2] = np.einsum("ab,ibc->iac", r, ts[k - 2])
                n_next = _env_down(at[k - 1], n_next, ts[k - 1])
            else:
                ts[k - 1] = e
    return float(fnorm)
