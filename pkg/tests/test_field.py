import math

import numpy as np
import pytest

from fockdyn.dirac import PositionLattice, gamma_set
from fockdyn.field import (
    CoupledSpace,
    Cutoff,
    coupling_function,
    dirac_klein_gordon_bundle,
    dirac_maxwell_bundle,
    interaction,
    photon_space,
    polarization_vectors,
    quantized_field,
    scalar_coupling_function,
)
from fockdyn.fock import FockBasis, build_basis, segal_field
from fockdyn.linalg import spectral_decomposition


@pytest.fixture(scope="module")
def lat3():
    return PositionLattice(3, 1.0)


# --- polarization frame -------------------------------------------------------

def test_polarization_frame_orthonormal_transverse(lat3):
    grid = lat3.photon_momentum_grid()
    pol = polarization_vectors(grid)
    khat = grid / np.linalg.norm(grid, axis=1)[:, None]
    assert np.abs((pol.e1 * grid).sum(axis=1)).max() < 1e-13
    assert np.abs((pol.e2 * grid).sum(axis=1)).max() < 1e-13
    assert np.abs((pol.e1 * pol.e2).sum(axis=1)).max() < 1e-13
    assert np.abs(np.linalg.norm(pol.e1, axis=1) - 1).max() < 1e-13
    assert np.abs(np.linalg.norm(pol.e2, axis=1) - 1).max() < 1e-13
    assert np.abs(pol.e2 - np.cross(khat, pol.e1)).max() < 1e-13
    assert np.allclose(pol.component(0, 1), pol.e1[:, 1])


def test_polarization_rejects_k3_axis():
    with pytest.raises(ValueError):
        polarization_vectors([[0.0, 0.0, 2.0]])


# --- cutoff profiles -----------------------------------------------------------

def test_cutoff_validation():
    with pytest.raises(ValueError):
        Cutoff.gaussian(0.0)
    with pytest.raises(ValueError):
        Cutoff.sharp(-1.0)
    with pytest.raises(ValueError):
        Cutoff("weird", 1.0).chi_hat([[1.0, 0.0, 0.0]])


def test_default_cutoff_suppression_at_grid_edge(lat3):
    grid = lat3.photon_momentum_grid()
    cut = Cutoff.default_for(grid)
    chi = cut.chi_hat(grid)
    edge = np.argmax(np.linalg.norm(grid, axis=1))
    assert np.allclose(chi[edge], 1e-6, rtol=1e-9)
    assert chi.max() <= 1.0


def test_sharp_cutoff_is_indicator(lat3):
    grid = lat3.photon_momentum_grid()
    radii = np.linalg.norm(grid, axis=1)
    cut = Cutoff.sharp(np.median(radii))
    chi = cut.chi_hat(grid)
    assert set(np.unique(chi)) <= {0.0, 1.0}
    assert np.array_equal(chi, (radii <= cut.scale).astype(float))


# --- coupling functions ---------------------------------------------------------

def test_coupling_norm_is_translation_invariant(lat3):
    space = photon_space(lat3)
    pol = polarization_vectors(space.grid)
    cut = Cutoff.default_for(space.grid)
    for j in range(3):
        ref = np.linalg.norm(coupling_function(np.zeros(3), j, space, pol, cut))
        for x in lat3.sites[::5]:
            assert abs(np.linalg.norm(coupling_function(x, j, space, pol, cut)) - ref) < 1e-13 * ref


def test_scalar_coupling_norm_formula(lat3):
    space = photon_space(lat3, polarizations=1)
    cut = Cutoff.sharp(1e9)
    chi = scalar_coupling_function(lat3.sites[7], space, cut)
    omega = np.linalg.norm(space.grid, axis=1)
    expect = math.sqrt(space.cell_volume) * np.sqrt((1.0 / omega).sum())
    assert abs(np.linalg.norm(chi) - expect) < 1e-12 * expect


def test_coupling_function_validation(lat3):
    space = photon_space(lat3)
    pol = polarization_vectors(space.grid)
    cut = Cutoff.sharp(1.0)
    with pytest.raises(ValueError):
        coupling_function(np.zeros(3), 3, space, pol, cut)
    scalar_space = photon_space(lat3, polarizations=1)
    with pytest.raises(ValueError):
        coupling_function(np.zeros(3), 0, scalar_space, pol, cut)
    with pytest.raises(ValueError):
        scalar_coupling_function(np.zeros(3), space, cut)


def test_quantized_field_vacuum_column_is_coupling_vector():
    lat = PositionLattice(1, 1.0)
    space = photon_space(lat)
    basis = build_basis(space, 2)
    pol = polarization_vectors(space.grid)
    cut = Cutoff.sharp(1e9)
    x = lat.sites[0]
    g = coupling_function(x, 1, space, pol, cut)
    field = quantized_field(x, 1, basis, pol, cut).toarray()
    for mode in range(space.dim_h):
        single = tuple(1 if m == mode else 0 for m in range(space.dim_h))
        idx = basis.index[single]
        assert abs(field[idx, 0] - g[mode] / math.sqrt(2)) < 1e-14
    assert abs(np.linalg.norm(field[:, 0]) - np.linalg.norm(g) / math.sqrt(2)) < 1e-13


def test_quantized_field_requires_photon_space():
    basis = FockBasis(4, 2)  # no one-photon space attached
    with pytest.raises(ValueError):
        quantized_field(np.zeros(3), 0, basis, None, Cutoff.sharp(1.0))


# --- coupled bundles ---------------------------------------------------------

def test_coupled_space_dimensions(lat3):
    basis = build_basis(photon_space(lat3), 1)
    coupled = CoupledSpace(lat3, basis)
    assert coupled.dirac_dim == 108
    assert coupled.dim == 108 * basis.size


def test_interaction_needs_two_polarizations(lat3):
    basis = build_basis(photon_space(lat3, polarizations=1), 1)
    coupled = CoupledSpace(lat3, basis)
    with pytest.raises(ValueError):
        interaction(coupled, 0.1, None, Cutoff.sharp(1.0))


def test_zero_charge_interaction_vanishes():
    lat = PositionLattice(1, 1.0)
    bundle = dirac_maxwell_bundle(lat, 3, mass=1.0, charge=0.0)
    assert bundle.h1.nnz == 0
    assert bundle.analytic_bound() == (0.0, 0.0)


def test_free_total_spectrum_is_outer_sum():
    lat = PositionLattice(1, 1.0)
    bundle = dirac_maxwell_bundle(lat, 3, mass=1.0, charge=0.0)
    ours = np.sort(spectral_decomposition(bundle.h0).eigenvalues)
    from fockdyn.dirac import dirac_hamiltonian
    from fockdyn.fock import second_quantize

    dirac_eigs = spectral_decomposition(dirac_hamiltonian(lat, 1.0)).eigenvalues
    space = photon_space(lat)
    basis = build_basis(space, 3)
    rad = second_quantize(basis, np.diag(space.frequencies())).diagonal().real
    expect = np.sort(np.add.outer(dirac_eigs, rad).ravel())
    assert np.abs(ours - expect).max() < 1e-12


def test_h0_kron_structure_exact():
    lat = PositionLattice(1, 1.0)
    bundle = dirac_maxwell_bundle(lat, 2, mass=1.0, charge=0.2, cutoff=Cutoff.sharp(1e9))
    from fockdyn.dirac import dirac_hamiltonian
    from fockdyn.fock import second_quantize

    hd = dirac_hamiltonian(lat, 1.0).toarray()
    space = photon_space(lat)
    basis = build_basis(space, 2)
    rad = second_quantize(basis, np.diag(space.frequencies())).diagonal()
    expect = np.kron(hd, np.eye(basis.size)) + np.kron(np.eye(4), np.diag(rad))
    assert np.abs(bundle.h0.toarray() - expect).max() == 0.0
    # grading = 1 (x) N in the same index convention
    expect_grading = np.kron(np.eye(4), np.diag(basis.totals.astype(complex)))
    assert np.abs(bundle.grading.toarray() - expect_grading).max() == 0.0


def test_interaction_kron_structure_single_site():
    lat = PositionLattice(1, 1.0)
    charge = 0.37
    cut = Cutoff.sharp(1e9)
    bundle = dirac_maxwell_bundle(lat, 2, mass=1.0, charge=charge, cutoff=cut)
    space = photon_space(lat)
    basis = build_basis(space, 2)
    pol = polarization_vectors(space.grid)
    g = gamma_set()
    expect = sum(
        np.kron(
            -charge * g.alpha[j],
            segal_field(basis, coupling_function(lat.sites[0], j, space, pol, cut)).toarray(),
        )
        for j in range(3)
    )
    assert np.abs(bundle.h1.toarray() - expect).max() < 1e-15


def test_dkg_kron_structure_single_site():
    lat = PositionLattice(1, 1.0)
    lam = 0.21
    cut = Cutoff.sharp(1e9)
    bundle = dirac_klein_gordon_bundle(lat, 3, mass=1.0, coupling=lam, cutoff=cut)
    space = photon_space(lat, polarizations=1)
    basis = build_basis(space, 3)
    phi = segal_field(basis, scalar_coupling_function(lat.sites[0], space, cut)).toarray()
    expect = np.kron(lam * gamma_set().beta, phi)
    assert np.abs(bundle.h1.toarray() - expect).max() < 1e-15


def test_manifest_analytic_pair_matches_coupling_norms(lat3):
    charge = 0.2
    bundle = dirac_maxwell_bundle(lat3, 1, mass=1.0, charge=charge)
    space = photon_space(lat3)
    pol = polarization_vectors(space.grid)
    cut = Cutoff(bundle.manifest["cutoff"]["kind"], bundle.manifest["cutoff"]["scale"])
    norms = [
        np.linalg.norm(coupling_function(np.zeros(3), j, space, pol, cut))
        for j in range(3)
    ]
    assert np.allclose(bundle.manifest["coupling_norms"], norms, rtol=1e-13)
    a_ref, b_ref = bundle.analytic_bound()
    assert abs(a_ref - 2 * charge * sum(norms)) < 1e-13
    assert abs(b_ref - charge * sum(norms)) < 1e-13
    assert a_ref == 2 * b_ref


def test_dkg_manifest_analytic_pair():
    lat = PositionLattice(1, 1.0)
    lam = 0.4
    bundle = dirac_klein_gordon_bundle(lat, 2, mass=1.0, coupling=lam)
    space = photon_space(lat, polarizations=1)
    cut = Cutoff(bundle.manifest["cutoff"]["kind"], bundle.manifest["cutoff"]["scale"])
    chi_norm = np.linalg.norm(scalar_coupling_function(np.zeros(3), space, cut))
    a_ref, b_ref = bundle.analytic_bound()
    assert abs(a_ref - 2 * lam * chi_norm) < 1e-13
    assert abs(b_ref - lam * chi_norm) < 1e-13


def test_bundle_dimensions_in_manifest(lat3):
    bundle = dirac_maxwell_bundle(lat3, 1, mass=2.0, charge=0.05)
    assert bundle.manifest["dim"] == bundle.dim == 108 * bundle.manifest["fock_dim"]
    assert bundle.manifest["fock_dim"] == math.comb(1 + 54, 54)
    assert bundle.manifest["polarizations"] == 2
    assert bundle.manifest["mass"] == 2.0
