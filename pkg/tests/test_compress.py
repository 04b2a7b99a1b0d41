"""Compression routines against dense distances and brute-force optima."""

import numpy as np
import pytest

import seqmps
from seqmps import InvalidInputError, Mps, OptimizationConfig

from oracles import brute_force_fidelity, dense_from_mps, schmidt_values


def dense_distance_sq(a, b):
    return float(np.linalg.norm(dense_from_mps(a) - dense_from_mps(b)) ** 2)


def test_truncation_report_matches_dense_distance():
    target = seqmps.xxz_ground(8, 1.0)
    for d_prime in (1, 2, 4):
        trial, report = seqmps.compress_truncation(target, d_prime)
        assert report.method == "truncation"
        assert report.d_prime == d_prime
        assert trial.max_bond <= d_prime
        assert abs(report.error - dense_distance_sq(target, trial)) < 1e-10
        assert abs(report.fidelity - abs(seqmps.overlap(target, trial))) < 1e-12
        assert report.sweeps == 0
        assert report.sweep_history == []


def test_variational_dominates_truncation():
    targets = [
        seqmps.xxz_ground(8, 1.0),
        seqmps.random_mps(7, 6, seed=5),
        seqmps.cluster_state(6),
    ]
    for target in targets:
        for d_prime in (1, 2, 3):
            _, tr = seqmps.compress_truncation(target, d_prime)
            _, var = seqmps.compress_variational(target, d_prime)
            assert var.error <= tr.error + 1e-12


def test_variational_report_contract():
    target = seqmps.xxz_ground(8, 1.0)
    trial, report = seqmps.compress_variational(target, 3)
    assert report.method == "variational"
    assert trial.max_bond <= 3
    assert trial.gauge_tag == seqmps.GAUGE_LEFT
    assert abs(seqmps.norm(trial) - 1.0) < 1e-10
    assert abs(report.error - dense_distance_sq(target, trial)) < 1e-8
    history = np.asarray(report.sweep_history)
    assert history.size == 2 * report.sweeps
    assert np.all(np.diff(history) <= 1e-12)
    assert report.error == history[-1]
    assert report.converged


def test_variational_zero_sweeps_when_capacity_suffices():
    target = seqmps.random_mps(6, 3, seed=2)
    trial, report = seqmps.compress_variational(target, 3)
    assert report.sweeps == 0
    assert report.error <= 1e-12
    assert abs(abs(seqmps.overlap(target, trial)) - 1.0) < 1e-10


def test_variational_single_cut_hits_schmidt_optimum():
    psi = seqmps.to_state_vector(seqmps.random_mps(2, 2, seed=11))
    target = seqmps.from_state_vector(psi)
    _, report = seqmps.compress_variational(target, 1)
    top = schmidt_values(psi, 1)[0]
    assert abs(report.fidelity - top) < 1e-10


@pytest.mark.parametrize("d_prime", [1, 2])
def test_variational_matches_brute_force(d_prime):
    # A generic descent over raw tensors must not find a better bond-d'
    # approximation than the sweeping solver.
    target = seqmps.random_mps(4, 4, seed=23)
    _, report = seqmps.compress_variational(target, d_prime)
    bf = brute_force_fidelity(seqmps.to_state_vector(target), d_prime, tries=4, seed=1)
    assert report.fidelity >= bf - 1e-6


def test_variational_random_init_is_seeded():
    target = seqmps.xxz_ground(8, 1.0)
    cfg = OptimizationConfig(init="random", restarts=3, seed=99)
    _, a = seqmps.compress_variational(target, 2, cfg)
    _, b = seqmps.compress_variational(target, 2, cfg)
    assert a.error == b.error
    assert a.sweeps == b.sweeps
    cfg2 = OptimizationConfig(init="random", restarts=3, seed=100)
    _, c = seqmps.compress_variational(target, 2, cfg2)
    assert abs(c.error - a.error) < 1e-6


def test_variational_improves_on_bad_start():
    # From a random start the first sweeps must strictly reduce the error
    # for a target that truncation already approximates well.
    target = seqmps.xxz_ground(8, 0.5)
    cfg = OptimizationConfig(init="random", restarts=1, seed=0)
    _, report = seqmps.compress_variational(target, 2, cfg)
    assert report.sweep_history[0] > report.error
    _, default = seqmps.compress_variational(target, 2)
    assert report.error <= default.error + 1e-6


def test_compression_input_validation():
    target = seqmps.ghz_state(4)
    with pytest.raises(InvalidInputError):
        seqmps.compress_truncation(target, 0)
    with pytest.raises(InvalidInputError):
        seqmps.compress_variational(target, 0)
    raw = Mps([np.ones((2, 1, 1)) / np.sqrt(2.0)] * 3, [1.0], [1.0])
    with pytest.raises(InvalidInputError):
        seqmps.compress_variational(raw, 1)
    unnormalized = Mps(
        [t.copy() for t in target.tensors], 2.0 * target.phi_i, target.phi_f, target.gauge_tag
    )
    with pytest.raises(InvalidInputError):
        seqmps.compress_variational(unnormalized, 2)


def test_compression_report_validation():
    from seqmps.compress import CompressionReport

    with pytest.raises(InvalidInputError):
        CompressionReport(d_prime=1, method="magic", error=0.0, fidelity=1.0)
    with pytest.raises(InvalidInputError):
        CompressionReport(d_prime=0, method="truncation", error=0.0, fidelity=1.0)
    with pytest.raises(InvalidInputError):
        CompressionReport(d_prime=1, method="truncation", error=0.0, fidelity=2.0)
    with pytest.raises(InvalidInputError):
        CompressionReport(
            d_prime=1, method="variational", error=0.1, fidelity=0.9,
            sweep_history=[0.1, 0.3],
        )
    # Roundoff-negative errors clamp to zero instead of failing.
    r = CompressionReport(d_prime=1, method="truncation", error=-1e-12, fidelity=1.0)
    assert r.error == 0.0
    doc = r.to_json_dict()
    assert doc["method"] == "truncation"
    assert doc["error"] == 0.0


def test_variational_error_decreases_with_d_prime():
    target = seqmps.xxz_ground(8, 1.0)
    errors = []
    for d_prime in range(1, 6):
        _, report = seqmps.compress_variational(target, d_prime)
        errors.append(report.error)
    assert all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))
