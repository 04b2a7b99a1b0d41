#!/usr/bin/env python3
"""Sequential W-state generation with restricted entanglers.

Three experiments on the W state:

1. xy couplings alone, everything initialized in |0>: the xy entangler
   annihilates |00>, so the chain never leaves the initial product state and
   the error stays pinned at 1 - F = 1.
2. xy couplings plus one ancilla unitary per step (ancilla seeded in |1>):
   the optimizer finds an exact protocol, error at numerical noise.
3. The ion-chain variant: pair-creation entangler sigma+ sigma+ + h.c.,
   last qubit prepared in |1>, couplings only.
"""

import numpy as np

import seqmps


def w_protocol_error(n, variant):
    model = seqmps.GeneratorModel("xy")
    target = seqmps.w_state(n)
    if variant == "couplings_plus_ancilla":
        p0 = seqmps.make_protocol(model, n, phi_i=[0.0, 1.0], with_ancilla=True)
    else:
        p0 = seqmps.make_protocol(model, n)
    p, report = seqmps.optimize(p0, target, seqmps.default_config(seed=0))
    return p, report


def main():
    print("W-state generation error, xy entangler")
    print(f"{'n':>3} {'couplings only':>16} {'with ancilla rotations':>24}")
    for n in range(2, 7):
        _, bare = w_protocol_error(n, "couplings_only")
        _, augmented = w_protocol_error(n, "couplings_plus_ancilla")
        print(f"{n:>3} {bare.one_minus_f:>16.6e} {augmented.one_minus_f:>24.6e}")

    n = 4
    p, report = w_protocol_error(n, "couplings_plus_ancilla")
    print(f"\nConverged W({n}) protocol (ancilla-augmented), "
          f"1 - F = {report.one_minus_f:.3e} after {report.sweeps} sweeps:")
    for k in range(1, n + 1):
        theta = p.couplings[k - 1, 0]
        print(f"  step {k}: coupling {theta:+.6f} rad")
    print(f"  optimal final ancilla state: {np.round(report.phi_f_optimal, 6)}")

    # Ion chain: the pair-creation entangler moves the seed excitation from
    # the last step's qubit onto the ancilla and back down the chain.
    n = 5
    target = seqmps.w_state(n)
    inits = np.zeros((n, 2), dtype=complex)
    inits[:, 0] = 1.0
    inits[n - 1] = (0.0, 1.0)
    p0 = seqmps.make_protocol(seqmps.GeneratorModel("ion_xy"), n, qubit_inits=inits)
    p, report = seqmps.optimize(p0, target, seqmps.default_config(seed=0))
    print(f"\nIon-chain W({n}): 1 - F = {report.one_minus_f:.3e} "
          f"({report.sweeps} sweeps, {report.restarts_used} restart(s))")

    # The protocol is a complete recipe: re-simulating it from scratch and
    # closing with the reported ancilla state reproduces the fidelity.
    m = seqmps.simulate(p).with_phi_f(report.phi_f_optimal)
    print(f"re-simulated overlap with W({n}): {abs(seqmps.overlap(target, m)):.15f}")


if __name__ == "__main__":
    main()
