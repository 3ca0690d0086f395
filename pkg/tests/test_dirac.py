import itertools
import math

import numpy as np
import pytest
import scipy.sparse as sp

from fockdyn.dirac import (
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
from fockdyn.linalg import ComplexSparseMatrix, save_matrix, spectral_decomposition

FINE_STRUCTURE = 1.0 / 137.036


# --- gamma algebra (exact integer arithmetic) -------------------------------

def test_metric_signature():
    g = gamma_set()
    assert np.array_equal(g.metric, np.diag([1.0, -1.0, -1.0, -1.0]))


def test_gamma_anticommutation_exact():
    g = gamma_set()
    all_gammas = (g.gamma0,) + g.gamma
    for mu in range(4):
        for nu in range(4):
            anti = all_gammas[mu] @ all_gammas[nu] + all_gammas[nu] @ all_gammas[mu]
            expect = 2 * g.metric[mu, nu] * np.eye(4)
            assert np.abs(anti - expect).max() == 0.0


def test_alpha_beta_algebra_exact():
    g = gamma_set()
    for i in range(3):
        assert np.abs(g.alpha[i] @ g.alpha[i] - np.eye(4)).max() == 0.0
        assert np.abs(g.alpha[i] @ g.beta + g.beta @ g.alpha[i]).max() == 0.0
        assert np.abs(g.alpha[i] - g.alpha[i].conj().T).max() == 0.0
        for j in range(i + 1, 3):
            assert np.abs(g.alpha[i] @ g.alpha[j] + g.alpha[j] @ g.alpha[i]).max() == 0.0
    assert np.abs(g.beta @ g.beta - np.eye(4)).max() == 0.0


# --- conjugation intertwiner: exhaustive signed-permutation oracle ----------

def _signed_permutations():
    for perm in itertools.permutations(range(4)):
        for signs in itertools.product((1.0, -1.0), repeat=4):
            m = np.zeros((4, 4))
            for row, (col, s) in enumerate(zip(perm, signs)):
                m[row, col] = s
            yield m


def test_conjugation_matrix_found_by_exhaustive_search():
    g = gamma_set()
    found = []
    for m in _signed_permutations():  # all 384 real monomial candidates
        if np.abs(m @ m - np.eye(4)).max() != 0.0:
            continue
        if any(np.abs(m @ a @ m - a.conj()).max() != 0.0 for a in g.alpha):
            continue
        if np.abs(m @ g.beta @ m + g.beta.conj()).max() != 0.0:
            continue
        found.append(m)
    u = pauli_matrix().matrix
    assert len(found) == 2  # unique up to overall sign
    assert any(np.array_equal(m, u) for m in found)
    assert any(np.array_equal(m, -u) for m in found)


def test_conjugation_defects_exactly_zero():
    data = pauli_matrix()
    assert set(data.defects) == {
        "reality", "involution", "alpha_conjugation", "beta_conjugation"
    }
    assert all(v == 0.0 for v in data.defects.values())
    assert data.matrix.dtype == float


# --- lattice geometry --------------------------------------------------------

def test_lattice_validation():
    with pytest.raises(ValueError):
        PositionLattice(4, 1.0)  # even
    with pytest.raises(ValueError):
        PositionLattice(0, 1.0)
    with pytest.raises(ValueError):
        PositionLattice(3, 0.0)


def test_no_site_at_origin_and_count():
    lat = PositionLattice(3, 0.7)
    assert lat.n_sites == 27 and lat.sites.shape == (27, 3)
    assert np.linalg.norm(lat.sites, axis=1).min() > 0.0


def test_negation_map_is_an_involution_realizing_minus_x():
    lat = PositionLattice(3, 0.7)
    assert np.array_equal(lat.negation_map[lat.negation_map], np.arange(27))
    half = lat.points_per_axis * lat.spacing / 2
    mirrored = -lat.sites
    mirrored[mirrored <= -half + 1e-12] += 2 * half  # wrap to (-La/2, La/2]
    assert np.allclose(lat.sites[lat.negation_map], mirrored, atol=1e-12)


def test_dual_momentum_grid_is_integer_multiples_with_zero():
    lat = PositionLattice(5, 1.3)
    axis = lat.dual_momentum_axis()
    unit = 2 * np.pi / (5 * 1.3)
    assert np.allclose(axis / unit, np.arange(-2, 3), atol=1e-13)
    grid = lat.dual_momentum_grid()
    assert grid.shape == (125, 3)
    assert np.any(np.all(grid == 0.0, axis=1))


def test_photon_grid_avoids_zero_components():
    lat = PositionLattice(3, 1.0)
    grid = lat.photon_momentum_grid()
    assert grid.shape == (27, 3)
    assert np.abs(grid).min() > 0.0  # no component vanishes: k3-axis excluded
    dk = 2 * np.pi / 3
    assert np.allclose(lat.momentum_cell_volume, dk ** 3)
    # half-offset: components are odd multiples of dk/2
    ratio = grid / (dk / 2)
    assert np.allclose(ratio, np.round(ratio), atol=1e-12)
    assert np.all(np.abs(np.round(ratio).astype(int)) % 2 == 1)


# --- potentials --------------------------------------------------------------

def test_coulomb_gate_accepts_z68_rejects_z69():
    lat = PositionLattice(3, 1.0)
    charge = math.sqrt(FINE_STRUCTURE)
    pot = coulomb_values(lat, 68, charge)
    assert pot.kind == "coulomb"
    with pytest.raises(ValueError, match="1/2"):
        coulomb_values(lat, 69, charge)
    with pytest.raises(ValueError):
        coulomb_values(lat, -1, charge)


def test_coulomb_values_formula():
    lat = PositionLattice(3, 1.0)
    pot = coulomb_values(lat, 10, 0.1)
    i = 5
    r = np.linalg.norm(lat.sites[i])
    assert np.allclose(pot.values[i], (-10 * 0.01 / r) * np.eye(4), atol=1e-15)


def test_potential_block_validation():
    lat = PositionLattice(1, 1.0)
    bad = np.zeros((1, 4, 4), dtype=complex)
    bad[0, 0, 1] = 1.0  # not hermitian
    with pytest.raises(ValueError):
        PotentialSpec("table", bad)
    with pytest.raises(ValueError):
        table_potential(lat, np.zeros((2, 4, 4)))


def test_potential_matrix_file_round_trip(tmp_path, rng):
    lat = PositionLattice(3, 1.0)
    ns = lat.n_sites
    blocks = rng.standard_normal((ns, 4, 4)) + 1j * rng.standard_normal((ns, 4, 4))
    blocks = (blocks + blocks.conj().transpose(0, 2, 1)) / 2
    rows, cols, data = [], [], []
    for x in range(ns):
        for s1 in range(4):
            for s2 in range(4):
                rows.append(s1 * ns + x)
                cols.append(s2 * ns + x)
                data.append(blocks[x, s1, s2])
    m = ComplexSparseMatrix(
        sp.coo_matrix((data, (rows, cols)), shape=(4 * ns, 4 * ns)), hermitian=True
    )
    path = tmp_path / "v.coo"
    save_matrix(path, m)
    pot = potential_from_matrix_file(lat, path)
    assert np.abs(pot.values - blocks).max() == 0.0


def test_potential_matrix_file_rejects_site_coupling(tmp_path):
    lat = PositionLattice(3, 1.0)
    ns = lat.n_sites
    m = ComplexSparseMatrix(
        sp.coo_matrix(([1.0], ([0], [1])), shape=(4 * ns, 4 * ns))
    )
    path = tmp_path / "nonlocal.coo"
    save_matrix(path, m)
    with pytest.raises(ValueError, match="site"):
        potential_from_matrix_file(lat, path)


def test_potential_matrix_file_rejects_wrong_dimension(tmp_path):
    m = ComplexSparseMatrix(sp.identity(8, dtype=complex, format="csr"), hermitian=True)
    path = tmp_path / "wrong.coo"
    save_matrix(path, m)
    with pytest.raises(ValueError, match="dimension"):
        potential_from_matrix_file(PositionLattice(3, 1.0), path)


# --- free Hamiltonian dispersion oracle --------------------------------------

def test_free_spectrum_matches_per_momentum_blocks():
    lat = PositionLattice(3, 0.7)
    mass = 1.3
    h = dirac_hamiltonian(lat, mass)
    assert h.hermitian and h.dim == 4 * 27
    ours = np.sort(spectral_decomposition(h).eigenvalues)

    g = gamma_set()
    blocks = []
    for k in lat.dual_momentum_grid():
        hk = sum(k[j] * g.alpha[j] for j in range(3)) + mass * g.beta
        blocks.append(np.linalg.eigvalsh(hk))
    assert np.abs(ours - np.sort(np.concatenate(blocks))).max() < 1e-12


def test_free_spectrum_closed_form():
    lat = PositionLattice(3, 0.7)
    mass = 1.3
    ours = np.sort(spectral_decomposition(dirac_hamiltonian(lat, mass)).eigenvalues)
    energies = np.sqrt((lat.dual_momentum_grid() ** 2).sum(axis=1) + mass ** 2)
    expect = np.sort(np.concatenate([energies, energies, -energies, -energies]))
    assert np.abs(ours - expect).max() < 1e-12


def test_dirac_hamiltonian_validation():
    lat = PositionLattice(1, 1.0)
    with pytest.raises(ValueError):
        dirac_hamiltonian(lat, 0.0)
    with pytest.raises(ValueError):
        dirac_hamiltonian(lat, 1.0, zero_potential(PositionLattice(3, 1.0)))


def test_coulomb_shifts_spectrum_downwards():
    lat = PositionLattice(3, 1.0)
    free = np.sort(spectral_decomposition(dirac_hamiltonian(lat, 1.0)).eigenvalues)
    pot = coulomb_values(lat, 40, math.sqrt(FINE_STRUCTURE))
    dressed = np.sort(
        spectral_decomposition(dirac_hamiltonian(lat, 1.0, pot)).eigenvalues
    )
    assert dressed[0] < free[0]  # attractive potential lowers the bottom


# --- charge-parity check ------------------------------------------------------

def test_cp_invariance_zero_and_coulomb():
    lat = PositionLattice(3, 0.7)
    ok0, defect0 = cp_invariant(lat, zero_potential(lat))
    assert ok0 and defect0 == 0.0
    pot = coulomb_values(lat, 30, 0.1)
    ok, defect = cp_invariant(lat, pot)
    assert ok and defect < 1e-12


def test_cp_violation_detected_for_odd_potential():
    # V(x) = x1 * beta is CP-odd at the self-paired wrap-edge sites: there
    # x1 = L*a/2 is its own negation image, so the defect is exactly
    # 2 * (L*a/2) * ||beta|| = L*a.
    lat = PositionLattice(3, 0.7)
    beta = gamma_set().beta
    vals = lat.sites[:, 0, None, None] * beta[None, :, :]
    ok, defect = cp_invariant(lat, table_potential(lat, vals))
    assert not ok
    assert abs(defect - 3 * 0.7) < 1e-12


def test_cp_requires_matching_sites():
    with pytest.raises(ValueError):
        cp_invariant(PositionLattice(3, 1.0), zero_potential(PositionLattice(1, 1.0)))
