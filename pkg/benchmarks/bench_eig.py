"""Benchmark: compiled Jacobi kernel vs the pure-Python reference.

Times the Hermitian eigensolver on the matrix sizes that dominate the
package's positivity scans (Choi and Kossakowski matrices for d <= 4),
then one end-to-end workload: a 1000-sample Kossakowski-spectrum scan.

Run:  python benchmarks/bench_eig.py
"""

import time

import numpy as np

from symdyn import chan, dyn, measure
from symdyn._jacobi_py import jacobi_eigh as jacobi_py

try:
    from symdyn._jacobi import jacobi_eigh as jacobi_cy
except ImportError:
    jacobi_cy = None

SIZES = (4, 8, 9, 15, 16)
BATCH = 200


def random_hermitian_batch(n, count, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        out.append((g + g.conj().T) / 2)
    return out


def time_kernel(kernel, mats, vectors):
    start = time.perf_counter()
    for m in mats:
        kernel(m, vectors)
    return (time.perf_counter() - start) / len(mats)


def bench_kernels():
    print(f"{'n':>4} {'compiled (us)':>14} {'pure (us)':>11} {'speedup':>8}   per eigensystem")
    for vectors in (False, True):
        label = "with eigenvectors" if vectors else "eigenvalues only"
        print(f"-- {label}")
        for n in SIZES:
            mats = random_hermitian_batch(n, BATCH, seed=n)
            t_py = time_kernel(jacobi_py, mats, vectors)
            if jacobi_cy is None:
                print(f"{n:>4} {'n/a':>14} {1e6 * t_py:>11.1f} {'n/a':>8}")
                continue
            t_cy = time_kernel(jacobi_cy, mats, vectors)
            print(f"{n:>4} {1e6 * t_cy:>14.1f} {1e6 * t_py:>11.1f} {t_py / t_cy:>7.1f}x")


def bench_scan():
    """1000-sample CP-divisibility oracle scan on the (15,2) family."""
    fam = chan.build_family(measure.pauli_15_2_povm())
    blocks = []
    for a in range(fam.n_povms):
        unit = np.zeros(fam.n_povms)
        unit[a] = 1.0
        blocks.append(dyn.generator_at(fam, unit).kossakowski)
    blocks = np.array(blocks)
    rng = np.random.default_rng(0)
    gammas = rng.uniform(-2, 2, size=(1000, fam.n_povms))
    ks = np.einsum("sa,aij->sij", gammas, blocks)

    for name, kernel in (("compiled", jacobi_cy), ("pure", jacobi_py)):
        if kernel is None:
            continue
        start = time.perf_counter()
        accepted = sum(kernel(k, False)[0][0] >= -1e-9 for k in ks)
        elapsed = time.perf_counter() - start
        print(f"(15,2) scan, 1000 spectra, {name:>8}: {elapsed:6.3f} s "
              f"({accepted} of Lindblad type)")


if __name__ == "__main__":
    if jacobi_cy is None:
        print("compiled kernel not available; timing the pure kernel only")
    bench_kernels()
    print()
    bench_scan()
