"""JSON schemas for operators, POVMs, bases and CLI reports.

Complex numbers serialize as two-element ``[re, im]`` arrays.  Reports are
rendered with sorted keys and a trailing newline so identical inputs give
byte-identical output; files are written atomically.
"""

from __future__ import annotations

import json
import os
import sys
import tempfile

import numpy as np

from .measure import HermitianBasis, SymmetricPOVM

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "basis_from_dict",
    "canonical_json",
    "matrix_from_json",
    "matrix_to_json",
    "povm_from_dict",
    "povm_to_dict",
    "write_output",
]


def matrix_to_json(a: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a, dtype=complex)]


def matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(entry[0], entry[1]) for entry in row] for row in rows])


def povm_to_dict(povm: SymmetricPOVM) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "symmetric_povm",
        "d": povm.d,
        "n_povms": povm.n_povms,
        "n_outcomes": povm.n_outcomes,
        "t": float(povm.t),
        "x": float(povm.x),
        "y": float(povm.y),
        "z": float(povm.z),
        "operators": [
            [matrix_to_json(povm.ops[a, k]) for k in range(povm.n_outcomes)]
            for a in range(povm.n_povms)
        ],
    }


def povm_from_dict(data: dict) -> SymmetricPOVM:
    if data.get("kind") != "symmetric_povm":
        raise ValueError("not a symmetric POVM document")
    n, m, d = data["n_povms"], data["n_outcomes"], data["d"]
    ops = np.empty((n, m, d, d), dtype=complex)
    for a in range(n):
        for k in range(m):
            ops[a, k] = matrix_from_json(data["operators"][a][k])
    return SymmetricPOVM(
        d=d, n_povms=n, n_outcomes=m, t=float(data["t"]), ops=ops,
        x=float(data["x"]), y=float(data["y"]), z=float(data["z"]),
    )


def basis_from_dict(data: dict) -> HermitianBasis:
    """Load a grouped Hermitian basis: ``{"d": d, "groups": [[matrix, ...], ...]}``."""
    groups = tuple(
        tuple(matrix_from_json(mat) for mat in group) for group in data["groups"]
    )
    basis = HermitianBasis(d=int(data["d"]), groups=groups)
    basis.validate()
    return basis


def _plain(obj):
    """Recursively convert numpy scalars/arrays so json can serialize them.

    Non-finite floats become null: the reports must stay strict JSON.
    """
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if np.isfinite(value) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def canonical_json(data) -> str:
    return json.dumps(_plain(data), indent=2, sort_keys=True) + "\n"


def write_output(data, out_path: str | None) -> None:
    """Write canonical JSON to a file (atomically) or to stdout."""
    text = canonical_json(data)
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out_path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, out_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
