import numpy as np
import pytest

from symdyn import build_family, gellmann_mum_povm, mub_povm, pauli_15_2_povm


@pytest.fixture(scope="session")
def mub2_family():
    return build_family(mub_povm(2))


@pytest.fixture(scope="session")
def mub3_family():
    return build_family(mub_povm(3))


@pytest.fixture(scope="session")
def mum3_family():
    return build_family(gellmann_mum_povm(3))


@pytest.fixture(scope="session")
def pauli15_family():
    return build_family(pauli_15_2_povm())


@pytest.fixture(scope="session")
def all_families(mub2_family, mub3_family, mum3_family, pauli15_family):
    return {
        "mub-2": mub2_family,
        "mub-3": mub3_family,
        "mum-3": mum3_family,
        "pauli-15-2": pauli15_family,
    }


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2
