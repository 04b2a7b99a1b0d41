"""Command-line front end.

One entry point (``seqmps``) with a --command selector:

  compress      compress a factory target to a given bond dimension
  generate      optimize a sequential-generation protocol for a target
  fig1          compression error vs bond cap for an XXZ ground state and a
                random MPS, truncation vs variational
  fig3          W-state generation error vs qubit count, couplings-only vs
                couplings plus ancilla unitaries
  random-suite  batch protocol optimization over seeded random bond-2 targets
  cnot-test     fixed CNOT entangler plus local unitaries against random
                targets (expected to fail on some of them)

Output is CSV or JSON (--format); every document carries schema "seqmps/1"
and floats are serialized with 17 significant digits.  Runs are
deterministic given the flags and --seed.  The process exits 0 iff all of
the command's internal assertions pass; otherwise a machine-readable failure
JSON goes to stderr and the exit code is nonzero.

SEQMPS_THREADS caps BLAS/OpenMP parallelism (read at package import).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .compress import compress_truncation, compress_variational
from .config import OptimizationConfig
from .errors import SeqmpsError
from .mps import Mps, from_state_vector, normalize
from .seqgen import (
    CNOT,
    GeneratorModel,
    Protocol,
    default_config,
    fidelity,
    make_protocol,
    optimize,
    optimize_full_local,
    simulate,
)
from .serialize import SCHEMA, fmt17
from .states import KINDS, TargetSpec, make_target
from .tolerances import (
    COMPRESS_MAX_SWEEPS,
    COMPRESS_TOL,
    SEQGEN_MAX_SWEEPS,
    SEQGEN_RESTARTS,
    SEQGEN_TOL,
)

VARIANTS = ("couplings_only", "couplings_plus_ancilla", "full_local")


def _fmt_cell(x) -> str:
    if isinstance(x, float):
        return fmt17(x)
    return str(x)


def _csv_text(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt_cell(row[c]) for c in columns])
    return buf.getvalue()


def _json_text(command: str, rows: list[dict], summary: dict | None = None) -> str:
    doc = {"schema": SCHEMA, "command": command, "rows": rows}
    if summary is not None:
        doc["summary"] = summary
    return json.dumps(doc, indent=2) + "\n"


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _target_from_args(args) -> Mps:
    spec = TargetSpec(
        kind=args.target, n=args.n, bond=args.bond, seed=args.seed, delta=args.delta
    )
    return make_target(spec)


def _derived_seed(master: int, n: int, index: int) -> int:
    # Stable per-target seeds so suites are reproducible row by row.
    return master * 1_000_000 + n * 1_000 + index


def _initial_protocol(model: GeneratorModel, n: int, variant: str) -> Protocol:
    """Starting protocol for a variant.

    The xy/xxz entanglers annihilate |00> and the per-step ancilla unitary
    acts after the entangler, so a couplings_plus_ancilla protocol with
    everything in |0> could never excite the first qubit; it starts the
    ancilla in |1> instead (one excitation to distribute down the chain).
    couplings_only keeps the default |0> everywhere: with no local
    unitaries at all the excitationless start is frozen, which is the point
    of that variant.  full_local starts from |0> since its qubit
    pre-rotations unfreeze every step.  ion_xy pair-creation protocols
    excite the last step's qubit (the final step can then erase the
    leftover ancilla excitation).
    """
    d = model.d_ancilla
    qubit_inits = np.zeros((n, 2), dtype=complex)
    qubit_inits[:, 0] = 1.0
    phi_i = np.zeros(d, dtype=complex)
    if model.kind == "ion_xy":
        qubit_inits[n - 1] = (0.0, 1.0)
        phi_i[0] = 1.0
    elif variant == "couplings_plus_ancilla" and model.kind in ("xy", "xxz"):
        phi_i[1] = 1.0
    else:
        phi_i[0] = 1.0
    return make_protocol(
        model,
        n,
        qubit_inits=qubit_inits,
        phi_i=phi_i,
        with_ancilla=variant in ("couplings_plus_ancilla", "full_local"),
        with_qubit_pre=variant == "full_local",
        with_qubit_post=variant == "full_local",
    )


def cmd_compress(args, failures: list) -> tuple[list[str], list[dict], dict | None]:
    target = _target_from_args(args)
    d_prime = args.dprime if args.dprime is not None else max(1, target.max_bond // 2)
    if args.method == "truncation":
        _, report = compress_truncation(target, d_prime)
    else:
        cfg = OptimizationConfig(
            tol=args.tol if args.tol is not None else COMPRESS_TOL,
            max_sweeps=args.max_sweeps if args.max_sweeps is not None else COMPRESS_MAX_SWEEPS,
            restarts=args.restarts if args.restarts is not None else 1,
            seed=args.seed,
        )
        _, report = compress_variational(target, d_prime, cfg)
    row = {
        "state": args.target,
        "method": report.method,
        "d_prime": report.d_prime,
        "error": report.error,
        "fidelity": report.fidelity,
        "sweeps": report.sweeps,
        "converged": report.converged,
    }
    return ["state", "method", "d_prime", "error", "fidelity", "sweeps", "converged"], [row], None


def _seqgen_config(args, default_restarts: int) -> OptimizationConfig:
    restarts = args.restarts
    if restarts is None:
        restarts = 4 * default_restarts if args.strict else default_restarts
    return default_config(
        tol=args.tol if args.tol is not None else SEQGEN_TOL,
        max_sweeps=args.max_sweeps if args.max_sweeps is not None else SEQGEN_MAX_SWEEPS,
        restarts=restarts,
        seed=args.seed,
    )


def cmd_generate(args, failures: list) -> tuple[list[str], list[dict], dict | None]:
    target = _target_from_args(args)
    model = GeneratorModel(args.model)
    p0 = _initial_protocol(model, args.n, args.variant)
    cfg = _seqgen_config(args, SEQGEN_RESTARTS)
    if args.variant == "full_local" and model.kind == "xy":
        p_opt, report = optimize_full_local(p0, target, cfg)
    else:
        p_opt, report = optimize(p0, target, cfg)
    row = {
        "target": args.target,
        "n": args.n,
        "model": model.kind,
        "variant": args.variant,
        "one_minus_f": report.one_minus_f,
        "fidelity": report.fidelity,
        "sweeps": report.sweeps,
        "converged": report.converged,
        "restarts_used": report.restarts_used,
    }
    summary = {"report": report.to_json_dict(), "protocol": json.loads(p_opt.to_json())}
    columns = [
        "target",
        "n",
        "model",
        "variant",
        "one_minus_f",
        "fidelity",
        "sweeps",
        "converged",
        "restarts_used",
    ]
    return columns, [row], summary


def cmd_fig1(args, failures: list) -> tuple[list[str], list[dict], dict | None]:
    n = args.n if args.n is not None else 10
    bond = args.bond if args.bond is not None else 16
    cfg = OptimizationConfig(
        tol=args.tol if args.tol is not None else COMPRESS_TOL,
        max_sweeps=args.max_sweeps if args.max_sweeps is not None else COMPRESS_MAX_SWEEPS,
        seed=args.seed,
    )
    xxz = make_target(TargetSpec(kind="xxz", n=n, bond=bond, delta=args.delta, seed=args.seed))
    rnd = make_target(TargetSpec(kind="random", n=n, bond=bond, seed=args.seed))
    rows = []
    errors = {}
    for state_name, target in (("xxz", xxz), ("random", rnd)):
        for d_prime in range(1, bond + 1):
            _, rep_t = compress_truncation(target, d_prime)
            _, rep_v = compress_variational(target, d_prime, cfg)
            for rep in (rep_t, rep_v):
                rows.append(
                    {
                        "state": state_name,
                        "method": rep.method,
                        "d_prime": d_prime,
                        "error": rep.error,
                        "fidelity": rep.fidelity,
                    }
                )
                errors[(state_name, rep.method, d_prime)] = rep.error

    for state_name in ("xxz", "random"):
        for method in ("truncation", "variational"):
            for d_prime in range(1, bond):
                lo, hi = errors[(state_name, method, d_prime + 1)], errors[(state_name, method, d_prime)]
                if lo > hi + 1e-12:
                    failures.append(
                        {
                            "check": "error_monotone_in_d_prime",
                            "detail": {"state": state_name, "method": method, "d_prime": d_prime + 1},
                        }
                    )
        for d_prime in range(1, bond + 1):
            tr = errors[(state_name, "truncation", d_prime)]
            va = errors[(state_name, "variational", d_prime)]
            if va > tr + 1e-12:
                failures.append(
                    {
                        "check": "variational_beats_truncation",
                        "detail": {"state": state_name, "d_prime": d_prime, "truncation": tr, "variational": va},
                    }
                )
        for method in ("truncation", "variational"):
            if errors[(state_name, method, bond)] >= 1e-10:
                failures.append(
                    {
                        "check": "full_bond_error_small",
                        "detail": {"state": state_name, "method": method, "error": errors[(state_name, method, bond)]},
                    }
                )
    return ["state", "method", "d_prime", "error", "fidelity"], rows, None


def cmd_fig3(args, failures: list) -> tuple[list[str], list[dict], dict | None]:
    n_max = args.n if args.n is not None else 8
    if n_max < 2:
        raise SeqmpsError("fig3 needs --n >= 2")
    cfg = _seqgen_config(args, SEQGEN_RESTARTS)
    model = GeneratorModel("xy")
    rows = []
    values = {}
    for n in range(2, n_max + 1):
        target = make_target(TargetSpec(kind="w", n=n))
        for variant in ("couplings_only", "couplings_plus_ancilla"):
            p0 = _initial_protocol(model, n, variant)
            _, report = optimize(p0, target, cfg)
            rows.append(
                {
                    "n": n,
                    "variant": variant,
                    "one_minus_f": report.one_minus_f,
                    "sweeps": report.sweeps,
                    "restarts": report.restarts_used,
                }
            )
            values[(n, variant)] = report.one_minus_f

    aug_threshold = 1e-8 if args.strict else 1e-6
    if n_max >= 4:
        aug = values[(4, "couplings_plus_ancilla")]
        only = values[(4, "couplings_only")]
        if aug >= aug_threshold:
            failures.append(
                {"check": "augmented_reaches_target", "detail": {"n": 4, "one_minus_f": aug}}
            )
        if only < 1e3 * aug:
            failures.append(
                {
                    "check": "couplings_only_worse_by_1e3",
                    "detail": {"n": 4, "couplings_only": only, "couplings_plus_ancilla": aug},
                }
            )
        for variant in ("couplings_only", "couplings_plus_ancilla"):
            if values[(2, variant)] > values[(4, variant)] + 1e-12:
                failures.append(
                    {
                        "check": "smaller_n_no_worse",
                        "detail": {
                            "variant": variant,
                            "n2": values[(2, variant)],
                            "n4": values[(4, variant)],
                        },
                    }
                )
    return ["n", "variant", "one_minus_f", "sweeps", "restarts"], rows, None


def cmd_random_suite(args, failures: list) -> tuple[list[str], list[dict], dict | None]:
    n_max = args.n if args.n is not None else 5
    count = args.count if args.count is not None else 20
    cfg = _seqgen_config(args, SEQGEN_RESTARTS)
    model = GeneratorModel("xy")
    threshold = 1e-8 if args.strict else 1e-6
    rows = []
    max_per_n = {}
    for n in range(2, n_max + 1):
        worst = 0.0
        for idx in range(count):
            seed = _derived_seed(args.seed, n, idx)
            target = make_target(TargetSpec(kind="random", n=n, bond=2, seed=seed))
            p0 = _initial_protocol(model, n, "full_local")
            _, report = optimize_full_local(p0, target, cfg)
            rows.append(
                {
                    "seed": seed,
                    "n": n,
                    "one_minus_f": report.one_minus_f,
                    "restarts_used": report.restarts_used,
                }
            )
            worst = max(worst, report.one_minus_f)
        max_per_n[n] = worst
        if worst >= threshold:
            failures.append(
                {"check": "random_targets_reachable", "detail": {"n": n, "max_one_minus_f": worst}}
            )
    summary = {
        "max_one_minus_f_per_n": {str(n): v for n, v in max_per_n.items()},
        "threshold": threshold,
        "count_per_n": count,
    }
    return ["seed", "n", "one_minus_f", "restarts_used"], rows, summary


def cmd_cnot_test(args, failures: list) -> tuple[list[str], list[dict], dict | None]:
    n = args.n if args.n is not None else 4
    count = args.count if args.count is not None else 20
    cfg = _seqgen_config(args, 10)
    model = GeneratorModel("xy")
    rows = []
    above = 0
    for idx in range(count):
        seed = _derived_seed(args.seed, n, idx)
        target = make_target(TargetSpec(kind="random", n=n, bond=2, seed=seed))
        p0 = make_protocol(
            model,
            n,
            with_ancilla=True,
            with_qubit_pre=True,
            with_qubit_post=True,
            fixed_gate=CNOT,
        )
        _, report = optimize(p0, target, cfg)
        rows.append({"seed": seed, "n": n, "one_minus_f": report.one_minus_f})
        if report.one_minus_f > 1e-3:
            above += 1

    # Product states need no entangler at all, so CNOT + locals must manage.
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    product = normalize(from_state_vector(psi))
    p0 = make_protocol(
        model, n, with_ancilla=True, with_qubit_pre=True, with_qubit_post=True, fixed_gate=CNOT
    )
    _, product_report = optimize(p0, product, cfg)

    if above == 0:
        failures.append(
            {"check": "cnot_fails_some_target", "detail": {"count": count, "above_1e-3": above}}
        )
    if product_report.one_minus_f >= 1e-8:
        failures.append(
            {
                "check": "cnot_handles_product_state",
                "detail": {"one_minus_f": product_report.one_minus_f},
            }
        )
    summary = {
        "targets": count,
        "above_threshold": above,
        "failure_threshold": 1e-3,
        "max_one_minus_f": max(r["one_minus_f"] for r in rows),
        "min_one_minus_f": min(r["one_minus_f"] for r in rows),
        "product_state_one_minus_f": product_report.one_minus_f,
    }
    return ["seed", "n", "one_minus_f"], rows, summary


COMMANDS = {
    "compress": (cmd_compress, "json"),
    "generate": (cmd_generate, "json"),
    "fig1": (cmd_fig1, "csv"),
    "fig3": (cmd_fig3, "csv"),
    "random-suite": (cmd_random_suite, "csv"),
    "cnot-test": (cmd_cnot_test, "json"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqmps",
        description="MPS compression and sequential-generation protocol optimization.",
    )
    parser.add_argument("--command", required=True, choices=sorted(COMMANDS))
    parser.add_argument("--target", choices=KINDS, default="random", help="target state family")
    parser.add_argument("--model", choices=("xy", "xxz", "ion_xy", "full_pauli"), default="xy")
    parser.add_argument("--variant", choices=VARIANTS, default="couplings_plus_ancilla")
    parser.add_argument("--n", type=int, default=None, help="qubit count (or max n for suites)")
    parser.add_argument("--delta", type=float, default=1.0, help="XXZ anisotropy")
    parser.add_argument(
        "--bond", type=int, default=None,
        help="target bond dimension (default: exact for xxz, 2 for random, 16 for fig1)",
    )
    parser.add_argument("--dprime", type=int, default=None, help="compression bond cap")
    parser.add_argument("--method", choices=("truncation", "variational"), default="variational")
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--max-sweeps", type=int, default=None)
    parser.add_argument("--restarts", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--count", type=int, default=None, help="targets per n in suites")
    parser.add_argument("--out", default=None, help="output path (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    parser.add_argument("--strict", action="store_true", help="tighter thresholds, more restarts")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.n is None and args.command in ("compress", "generate"):
        args.n = 4
    handler, default_format = COMMANDS[args.command]
    fmt = args.format if args.format is not None else default_format

    failures: list[dict] = []
    try:
        columns, rows, summary = handler(args, failures)
    except SeqmpsError as exc:
        doc = {
            "schema": SCHEMA,
            "command": args.command,
            "status": "error",
            "error": type(exc).__name__,
            "message": str(exc),
        }
        sys.stderr.write(json.dumps(doc) + "\n")
        return 2

    if fmt == "csv":
        _write_output(_csv_text(columns, rows), args.out)
        if summary is not None and args.out is not None:
            with open(args.out + ".summary.json", "w") as fh:
                json.dump({"schema": SCHEMA, "command": args.command, "summary": summary}, fh, indent=2)
    else:
        _write_output(_json_text(args.command, rows, summary), args.out)

    if failures:
        doc = {
            "schema": SCHEMA,
            "command": args.command,
            "status": "failed",
            "failures": failures,
        }
        sys.stderr.write(json.dumps(doc) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
