"""Symmetric measurements, their channels, and divisibility of qudit dynamics.

The package is organized bottom-up:

* :mod:`symdyn.matcore`  dense complex kernel (Jacobi eigensolver, tensor
  algebra, Choi/superoperator conversion, positivity checks);
* :mod:`symdyn.measure`  Hermitian operator bases and (N,M)-POVMs;
* :mod:`symdyn.chan`     the channel families an (N,M)-POVM generates;
* :mod:`symdyn.dyn`      time-local generators and divisibility tests;
* :mod:`symdyn.golden`   fixed reference scenarios;
* :mod:`symdyn.cli`      the ``symdyn`` command-line tool.
"""

from ._eig import KERNEL_BACKEND
from .chan import (
    ChannelFamily,
    MixtureSpec,
    build_family,
    choi_of_eigenvalues,
    composition_check,
    cp_exact,
    cp_sufficient,
    eb_sufficient,
    eigen_ops,
    fujiwara_algoet,
    mixture_channel,
    mixture_from_probs,
    ppt_necessary,
    spec_from_eigenvalues,
)
from .dyn import (
    DivisibilityReport,
    GeneratorSnapshot,
    RateTrajectory,
    classify_rates,
    cpdiv_exact,
    cpdiv_sufficient,
    ddiv_sufficient,
    dynamical_map_at,
    evolve_eigenvalues,
    generator_at,
    pdiv_necessary,
    pdiv_sufficient,
    propagator_cp_check,
    tracenorm_falsifier,
)
from .measure import (
    DesignReport,
    HermitianBasis,
    SymmetricPOVM,
    SymmetryReport,
    conical_design_check,
    gellmann_basis,
    gellmann_mum_povm,
    max_admissible_t,
    mub_bases,
    mub_povm,
    pauli_15_2_povm,
    pauli_product_basis,
    povm_from_basis,
    verify_symmetric,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "ChannelFamily",
    "DesignReport",
    "DivisibilityReport",
    "GeneratorSnapshot",
    "HermitianBasis",
    "MixtureSpec",
    "RateTrajectory",
    "SymmetricPOVM",
    "SymmetryReport",
    "__version__",
    "build_family",
    "choi_of_eigenvalues",
    "classify_rates",
    "composition_check",
    "conical_design_check",
    "cp_exact",
    "cp_sufficient",
    "cpdiv_exact",
    "cpdiv_sufficient",
    "ddiv_sufficient",
    "dynamical_map_at",
    "eb_sufficient",
    "eigen_ops",
    "evolve_eigenvalues",
    "fujiwara_algoet",
    "gellmann_basis",
    "gellmann_mum_povm",
    "generator_at",
    "max_admissible_t",
    "mixture_channel",
    "mixture_from_probs",
    "mub_bases",
    "mub_povm",
    "pauli_15_2_povm",
    "pauli_product_basis",
    "pdiv_necessary",
    "pdiv_sufficient",
    "povm_from_basis",
    "ppt_necessary",
    "propagator_cp_check",
    "spec_from_eigenvalues",
    "tracenorm_falsifier",
    "verify_symmetric",
]
