"""Command-line interface.

Subcommands:

* ``symdyn povm build|verify``     construct or re-check symmetric POVMs
* ``symdyn channel classify``      positivity/entanglement tests of mixtures
* ``symdyn dynamics classify``     divisibility time series for a trajectory
* ``symdyn dynamics example``      fixed reference scenarios

Reports are deterministic JSON (sorted keys) for fixed inputs and seed;
wall time goes to stderr.  Exit codes: 0 success, 1 reference-scenario or
residual mismatch, 2 usage errors.  The default tolerance may be
overridden with the ``SYMDYN_TOL`` environment variable; a ``--tol`` flag
wins over it.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time

import numpy as np

from . import dyn, golden, matcore, serialize
from .chan import (
    build_family,
    cp_exact,
    cp_sufficient,
    eb_sufficient,
    fujiwara_algoet,
    mixture_channel,
    mixture_from_probs,
    ppt_necessary,
    spec_from_eigenvalues,
)
from .measure import (
    conical_design_check,
    gellmann_mum_povm,
    mub_povm,
    pauli_15_2_povm,
    povm_from_basis,
    verify_symmetric,
)

TOL_ENV = "SYMDYN_TOL"

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return matcore.DEFAULT_PSD_TOL
    try:
        return float(raw)
    except ValueError as exc:
        raise UsageError(f"{TOL_ENV} must be a real number, got {raw!r}") from exc


def _parse_vector(text: str, expected: int, what: str) -> np.ndarray:
    try:
        values = np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"could not parse {what}: {exc}") from exc
    if values.size != expected:
        raise UsageError(f"{what} must have {expected} entries, got {values.size}")
    return values


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("grid must be start:stop:intervals, e.g. 0:1:100")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"could not parse grid: {exc}") from exc
    if start != 0.0:
        raise UsageError("trajectories start at t = 0")
    if stop <= start or count < 1:
        raise UsageError("grid needs stop > 0 and at least one interval")
    return np.linspace(start, stop, count + 1)


def _load_povm(path: str):
    import json

    try:
        with open(path) as handle:
            return serialize.povm_from_dict(json.load(handle))
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"could not load POVM from {path}: {exc}") from exc


def _load_trajectory(path: str) -> dyn.RateTrajectory:
    try:
        with open(path, newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader)
            if not header or header[0].strip() != "t":
                raise UsageError("trajectory CSV must start with header 't,gamma_1,...'")
            rows = [[float(v) for v in row] for row in reader if row]
    except OSError as exc:
        raise UsageError(f"could not read {path}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"could not parse {path}: {exc}") from exc
    data = np.asarray(rows)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise UsageError("trajectory CSV rows do not match the header")
    try:
        return dyn.RateTrajectory(times=data[:, 0], rates=data[:, 1:])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _base_report(command: str, inputs: dict, tol: float, seed=None) -> dict:
    return {
        "schema_version": serialize.SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "provenance": {
            "seed": seed,
            "tolerances": {
                "psd": tol,
                "boundary": golden.BOUNDARY_TOL,
                "residual": golden.RESIDUAL_TOL,
            },
        },
    }


# ---------------------------------------------------------------------------
# povm


def _build_povm_from_args(args) -> tuple:
    if args.family == "mub":
        if args.d is None:
            raise UsageError("--family mub requires --d")
        try:
            return mub_povm(args.d), {"family": "mub", "d": args.d}
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if args.family == "gellmann-mum":
        d = args.d if args.d is not None else 3
        try:
            povm = gellmann_mum_povm(d, t=args.t)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return povm, {"family": "gellmann-mum", "d": d, "t": povm.t}
    if args.family == "pauli-15-2":
        return pauli_15_2_povm(), {"family": "pauli-15-2", "d": 4}
    # custom
    if args.basis_file is None or args.n is None or args.m is None or args.t is None:
        raise UsageError("--family custom requires --basis-file, --N, --M and --t")
    import json

    try:
        with open(args.basis_file) as handle:
            basis = serialize.basis_from_dict(json.load(handle))
        povm = povm_from_basis(basis, args.n, args.m, args.t)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    return povm, {
        "family": "custom",
        "basis_file": args.basis_file,
        "N": args.n,
        "M": args.m,
        "t": args.t,
    }


def _povm_report(povm, tol: float) -> tuple[dict, bool]:
    symmetry = verify_symmetric(povm)
    design = conical_design_check(povm)
    results = {
        "symmetry": {
            "x": symmetry.x,
            "y": symmetry.y,
            "z": symmetry.z,
            "residual": symmetry.residual,
            "info_complete": symmetry.info_complete,
        },
        "design": {
            "kappa_plus": design.kappa_plus,
            "kappa_minus": design.kappa_minus,
            "residual": design.residual,
            "channel_identity_residual": design.channel_identity_residual,
            "info_complete": design.info_complete,
        },
    }
    ok = symmetry.residual <= tol
    if design.info_complete:
        ok = ok and design.residual <= tol and design.channel_identity_residual <= tol
    return results, ok


def cmd_povm(args) -> int:
    tol = args.tol if args.tol is not None else _default_tol()
    if args.action == "build":
        povm, inputs = _build_povm_from_args(args)
    else:
        if args.povm_file is None:
            raise UsageError("povm verify requires --povm-file")
        povm = _load_povm(args.povm_file)
        inputs = {"povm_file": args.povm_file}
    report = _base_report(f"povm {args.action}", inputs, tol)
    report["results"], ok = _povm_report(povm, tol)
    if args.action == "build" and args.out:
        serialize.write_output(serialize.povm_to_dict(povm), args.out)
        report["outputs"] = {"povm_file": args.out}
        serialize.write_output(report, None)
    else:
        serialize.write_output(report, args.out if args.action == "verify" else None)
    return EXIT_OK if ok else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# channel


def cmd_channel(args) -> int:
    tol = args.tol if args.tol is not None else _default_tol()
    povm = _load_povm(args.povm_file)
    fam = build_family(povm)
    variant = "lambda" if args.variant == "L" else "lambda_tilde"

    if (args.eigenvalues is None) == (args.probs is None):
        raise UsageError("provide exactly one of --lambda or --probs")
    if args.eigenvalues is not None:
        lam = _parse_vector(args.eigenvalues, fam.n_povms, "--lambda")
        spec = spec_from_eigenvalues(fam, lam, variant)
        inputs = {"eigenvalues": lam.tolist()}
    else:
        probs = _parse_vector(args.probs, fam.n_povms + 1, "--probs")
        spec = mixture_from_probs(fam, probs, variant)
        inputs = {"probs": probs.tolist()}
    inputs.update({"povm_file": args.povm_file, "variant": args.variant})

    superop, lam = mixture_channel(fam, spec, validate=False)
    is_cp, min_choi = cp_exact(superop, tol)
    try:
        fa = fujiwara_algoet(fam, lam)
    except ValueError:
        fa = None
    ppt_ok, ppt_min = ppt_necessary(superop, tol)

    report = _base_report("channel classify", inputs, tol)
    report["results"] = {
        "family": {
            "d": fam.d,
            "n_povms": fam.n_povms,
            "n_outcomes": fam.n_outcomes,
            "x": fam.povm.x,
            "y": fam.povm.y,
            "z": fam.povm.z,
            "kappa_plus": fam.kappa_plus,
            "kappa_minus": fam.kappa_minus,
            # the entanglement-breaking bound sums over every POVM index
            "eb_sum_indices": fam.n_povms,
        },
        "eigenvalues": lam.tolist(),
        "probs": spec.probs.tolist(),
        "valid_probability": spec.valid_probability,
        "cp_sufficient": cp_sufficient(fam, spec),
        "cp_exact": bool(is_cp),
        "min_choi_eigenvalue": float(min_choi),
        "fujiwara_algoet": fa,
        "eb_sufficient": eb_sufficient(fam, lam),
        "ppt_necessary": bool(ppt_ok),
        "min_ppt_eigenvalue": float(ppt_min),
    }
    serialize.write_output(report, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# dynamics


def cmd_dynamics(args) -> int:
    tol = args.tol if args.tol is not None else _default_tol()
    if args.action == "example":
        if args.example is None:
            raise UsageError("dynamics example requires --example")
        if args.example == "mub-qutrit":
            result = golden.mub_qutrit_scenario()
        elif args.example == "mum-gellmann":
            result = golden.mum_gellmann_scenario(
                n_samples=args.samples or 10_000, seed=args.seed
            )
        else:
            result = golden.ququart_scenario(seed=args.seed)
        report = _base_report("dynamics example", {"example": args.example}, tol, args.seed)
        report["results"] = result
        serialize.write_output(report, args.out)
        return EXIT_OK if result["ok"] else EXIT_MISMATCH

    # classify
    povm = _load_povm(args.povm_file)
    fam = build_family(povm)
    sources = [s for s in (args.gamma_csv, args.gamma_const, args.gamma_json) if s is not None]
    if len(sources) != 1:
        raise UsageError("provide exactly one of --gamma-csv, --gamma-const or --gamma-json")
    if args.gamma_csv is not None:
        traj = _load_trajectory(args.gamma_csv)
        inputs = {"gamma_csv": args.gamma_csv}
    elif args.gamma_json is not None:
        import json

        try:
            doc = json.loads(args.gamma_json)
            traj = dyn.RateTrajectory(times=doc["times"], rates=doc["rates"])
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"could not parse --gamma-json: {exc}") from exc
        inputs = {"gamma_json": doc}
    else:
        gamma = _parse_vector(args.gamma_const, fam.n_povms, "--gamma-const")
        if args.grid is None:
            raise UsageError("--gamma-const requires --grid start:stop:intervals")
        times = _parse_grid(args.grid)
        traj = dyn.RateTrajectory(times=times, rates=np.tile(gamma, (times.size, 1)))
        inputs = {"gamma_const": gamma.tolist(), "grid": args.grid}
    if traj.n_rates != fam.n_povms:
        raise UsageError(
            f"trajectory has {traj.n_rates} rate columns, family needs {fam.n_povms}"
        )
    inputs["povm_file"] = args.povm_file

    violations = dyn.tracenorm_falsifier(fam, traj, samples=args.samples or 20, seed=args.seed)
    by_time: dict[float, int] = {}
    for v in violations:
        by_time[v.time] = by_time.get(v.time, 0) + 1

    reports = []
    for k, t in enumerate(traj.times):
        rep = dyn.classify_rates(fam, traj.rates[k], time=float(t), tol=tol)
        entry = rep.__dict__.copy()
        entry["trace_norm_violations"] = by_time.get(float(t), 0)
        reports.append(entry)

    report = _base_report("dynamics classify", inputs, tol, args.seed)
    report["results"] = {
        "times": traj.times.tolist(),
        "snapshots": reports,
        "trace_norm_violations_total": len(violations),
    }
    if args.csv_out:
        _write_timeseries_csv(args.csv_out, fam, reports)
        report["outputs"] = {"csv_file": args.csv_out}
    serialize.write_output(report, args.out)
    return EXIT_OK


def _write_timeseries_csv(path: str, fam, reports) -> None:
    """Flat per-time CSV of the classification flags and spectra, for plotting."""
    n = fam.n_povms
    n_rates = fam.d * fam.d - 1
    header = (
        ["t", "cp_sufficient", "cp_exact", "p_necessary", "p_sufficient",
         "d_sufficient", "min_rate", "d_min_eigenvalue", "trace_norm_violations"]
        + [f"xi_{a + 1}" for a in range(n)]
        + [f"rate_{i + 1}" for i in range(n_rates)]
    )
    lines = [",".join(header)]
    for rep in reports:
        row = [
            repr(rep["time"]),
            str(int(rep["cp_sufficient"])),
            str(int(rep["cp_exact"])),
            str(int(rep["p_necessary"])),
            str(int(rep["p_sufficient"])),
            str(int(rep["d_sufficient"])),
            repr(rep["min_rate"]),
            repr(rep["d_min_eigenvalue"]),
            str(rep["trace_norm_violations"]),
        ]
        row += [repr(v) for v in rep["xi"]]
        row += [repr(v) for v in rep["rates"]]
        lines.append(",".join(row))
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symdyn",
        description="Symmetric measurements, their channels, and divisibility analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    povm = sub.add_parser("povm", help="build or verify symmetric POVMs")
    povm.add_argument("action", choices=["build", "verify"])
    povm.add_argument("--family", choices=["mub", "gellmann-mum", "pauli-15-2", "custom"])
    povm.add_argument("--d", type=int)
    povm.add_argument("--M", dest="m", type=int)
    povm.add_argument("--N", dest="n", type=int)
    povm.add_argument("--t", type=float)
    povm.add_argument("--basis-file")
    povm.add_argument("--povm-file")
    povm.add_argument("--out")
    povm.add_argument("--tol", type=float)
    povm.set_defaults(func=cmd_povm)

    chan_p = sub.add_parser("channel", help="classify mixture channels")
    chan_p.add_argument("action", choices=["classify"])
    chan_p.add_argument("--povm-file", required=True)
    chan_p.add_argument("--lambda", dest="eigenvalues")
    chan_p.add_argument("--probs")
    chan_p.add_argument("--variant", choices=["L", "Ltilde"], default="L")
    chan_p.add_argument("--out")
    chan_p.add_argument("--tol", type=float)
    chan_p.set_defaults(func=cmd_channel)

    dyn_p = sub.add_parser("dynamics", help="divisibility analysis of trajectories")
    dyn_p.add_argument("action", choices=["classify", "example"])
    dyn_p.add_argument("--povm-file")
    dyn_p.add_argument("--gamma-csv")
    dyn_p.add_argument("--gamma-const")
    dyn_p.add_argument("--gamma-json")
    dyn_p.add_argument("--grid")
    dyn_p.add_argument("--samples", type=int)
    dyn_p.add_argument("--seed", type=int, default=20240901)
    dyn_p.add_argument(
        "--example", choices=["mub-qutrit", "mum-gellmann", "ququart-15-2"]
    )
    dyn_p.add_argument("--out")
    dyn_p.add_argument("--csv-out")
    dyn_p.add_argument("--tol", type=float)
    dyn_p.set_defaults(func=cmd_dynamics)

    return parser


_VALUE_FLAGS = ("--lambda", "--probs", "--gamma-const", "--t")


def _join_value_flags(argv):
    """Glue value flags to their argument so leading minus signs parse."""
    out = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if token in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{token}={argv[i + 1]}")
            skip = True
        else:
            out.append(token)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_join_value_flags(list(argv)))
    except SystemExit as exc:
        # argparse exits with its own code; normalize usage failures to 2
        return EXIT_USAGE if exc.code not in (0, None) else 0
    start = time.monotonic()
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"completed in {1000 * (time.monotonic() - start):.1f} ms", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
