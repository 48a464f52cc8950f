"""Kernel selection for the Hermitian eigensolver.

Imports the compiled Jacobi kernel when present and falls back to the
pure-Python reference otherwise.  Set ``SYMDYN_PURE_KERNEL=1`` to force
the reference kernel (used by the parity tests and the benchmark).
"""

from __future__ import annotations

import os

if os.environ.get("SYMDYN_PURE_KERNEL", "") not in ("", "0"):
    from ._jacobi_py import jacobi_eigh

    KERNEL_BACKEND = "python (forced)"
else:
    try:
        from ._jacobi import jacobi_eigh  # type: ignore[no-redef]

        KERNEL_BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build environment
        from ._jacobi_py import jacobi_eigh  # type: ignore[no-redef]

        KERNEL_BACKEND = "python"

__all__ = ["jacobi_eigh", "KERNEL_BACKEND"]
