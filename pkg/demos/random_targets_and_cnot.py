#!/usr/bin/env python3
"""Reachability of random bond-2 targets, and a gate set that falls short.

First part: the xy entangler dressed with all three local unitary families
(ancilla, qubit before, qubit after) generates arbitrary bond-2 MPS.  A
batch of seeded random targets per qubit count all converge to errors near
machine precision.

Second part: freezing the entangler to a CNOT (ancilla = control) while
keeping all local unitaries free is not enough.  Some random bond-2 targets
get stuck at errors above 1e-3 however many restarts are granted, while
product states remain trivially reachable.
"""

import numpy as np

import seqmps


def main():
    print("Random bond-2 targets, xy entangler + full local unitaries")
    print(f"{'n':>3} {'targets':>8} {'max 1-F':>12}")
    for n in range(2, 6):
        worst = 0.0
        for idx in range(5):
            target = seqmps.random_mps(n, 2, seed=1000 * n + idx)
            p0 = seqmps.make_protocol(seqmps.GeneratorModel("xy"), n)
            _, report = seqmps.optimize_full_local(p0, target, seqmps.default_config(seed=idx))
            worst = max(worst, report.one_minus_f)
        print(f"{n:>3} {5:>8} {worst:>12.3e}")

    print("\nFixed CNOT entangler + local unitaries, n = 4, 10 restarts")
    model = seqmps.GeneratorModel("xy")
    cfg = seqmps.default_config(seed=0, restarts=10)
    stuck = 0
    for idx in range(6):
        target = seqmps.random_mps(4, 2, seed=idx)
        p0 = seqmps.make_protocol(
            model, 4, with_ancilla=True, with_qubit_pre=True, with_qubit_post=True,
            fixed_gate=seqmps.CNOT,
        )
        _, report = seqmps.optimize(p0, target, cfg)
        tag = "stuck" if report.one_minus_f > 1e-3 else "ok"
        if report.one_minus_f > 1e-3:
            stuck += 1
        print(f"  target seed {idx}: 1 - F = {report.one_minus_f:.6e}  [{tag}]")
    print(f"{stuck} of 6 targets stuck above 1e-3: CNOT + locals is not universal")

    # Product states need no entangling power at all.
    psi = np.zeros(2**4, dtype=complex)
    psi[0] = 1.0
    product = seqmps.normalize(seqmps.from_state_vector(psi))
    p0 = seqmps.make_protocol(
        model, 4, with_ancilla=True, with_qubit_pre=True, with_qubit_post=True,
        fixed_gate=seqmps.CNOT,
    )
    _, report = seqmps.optimize(p0, product, cfg)
    print(f"product state |0000>: 1 - F = {report.one_minus_f:.3e}")


if __name__ == "__main__":
    main()
