"""Truncated Fock-space models: construction, certification, propagation.

The package builds finite matrix models of particles coupled to quantized
fields (a Dirac particle in a photon field, a Dirac particle in a scalar
field, and a single-mode toy), checks the operator assumptions those models
are expected to satisfy, and propagates states with an interaction-picture
Dyson series whose truncation error is tracked through the grading bands.
"""

from .bundle import ModelBundle, canonical_json, toy_single_mode
from .certification import (
    CertificationReport,
    certify,
    check_band_shift,
    check_nonnegative,
    check_relative_bound,
    check_strong_commutation,
)
from .config import TOLS, Tolerances
from .dirac import (
    ConjugationData,
    GammaSet,
    PositionLattice,
    PotentialSpec,
    coulomb_values,
    cp_invariant,
    dirac_hamiltonian,
    gamma_set,
    pauli_matrix,
    potential_from_matrix_file,
    table_potential,
    zero_potential,
)
from .dyson import (
    DysonDivergenceError,
    DysonRun,
    cocycle_check,
    dyson_propagate,
    dyson_term,
    exact_solution,
    interaction_generator,
    oracle_compare,
    picard_endpoint,
    schroedinger_solution,
)
from .field import (
    CoupledSpace,
    Cutoff,
    Polarization,
    coupling_function,
    dirac_klein_gordon_bundle,
    dirac_maxwell_bundle,
    interaction,
    photon_space,
    polarization_vectors,
    quantized_field,
    scalar_coupling_function,
)
from .fock import (
    FockBasis,
    OnePhotonSpace,
    annihilator,
    basis_lines,
    build_basis,
    creator,
    number_operator,
    save_basis,
    second_quantize,
    segal_field,
)
from .linalg import (
    ComplexSparseMatrix,
    SpectralDecomposition,
    load_matrix,
    matexp,
    max_abs_entry,
    save_matrix,
    spectral_decomposition,
    spectral_projection,
)

__version__ = "0.1.0"

__all__ = [
    "CertificationReport",
    "ComplexSparseMatrix",
    "ConjugationData",
    "CoupledSpace",
    "Cutoff",
    "DysonDivergenceError",
    "DysonRun",
    "FockBasis",
    "GammaSet",
    "ModelBundle",
    "OnePhotonSpace",
    "Polarization",
    "PositionLattice",
    "PotentialSpec",
    "SpectralDecomposition",
    "TOLS",
    "Tolerances",
    "annihilator",
    "basis_lines",
    "build_basis",
    "canonical_json",
    "certify",
    "check_band_shift",
    "check_nonnegative",
    "check_relative_bound",
    "check_strong_commutation",
    "cocycle_check",
    "coulomb_values",
    "coupling_function",
    "cp_invariant",
    "creator",
    "dirac_hamiltonian",
    "dirac_klein_gordon_bundle",
    "dirac_maxwell_bundle",
    "dyson_propagate",
    "dyson_term",
    "exact_solution",
    "gamma_set",
    "interaction",
    "interaction_generator",
    "load_matrix",
    "matexp",
    "max_abs_entry",
    "number_operator",
    "oracle_compare",
    "pauli_matrix",
    "photon_space",
    "picard_endpoint",
    "polarization_vectors",
    "potential_from_matrix_file",
    "quantized_field",
    "save_basis",
    "save_matrix",
    "scalar_coupling_function",
    "schroedinger_solution",
    "second_quantize",
    "segal_field",
    "spectral_decomposition",
    "spectral_projection",
    "table_potential",
    "toy_single_mode",
    "zero_potential",
]
