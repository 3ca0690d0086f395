"""Quantized transverse field coupled to the lattice Dirac sector.

Couplings are momentum-space vectors g^j_x with components
sqrt(cell_volume) * chi_hat(k) * e^j_(r)(k) * exp(-i k.x) / sqrt(omega(k)),
omega(k) = |k|; the field at a site is the Segal operator of that vector.
The interaction is H1 = -q sum_j alpha^j (x) A^j with A^j block-diagonal
over sites, which shifts the photon number band by exactly one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .bundle import ModelBundle
from .dirac import (
    GammaSet,
    PositionLattice,
    PotentialSpec,
    dirac_hamiltonian,
    gamma_set,
    zero_potential,
)
from .fock import (
    FockBasis,
    OnePhotonSpace,
    build_basis,
    number_operator,
    second_quantize,
    segal_field,
)
from .linalg import ComplexSparseMatrix


@dataclass(frozen=True)
class Polarization:
    """Transverse frame per grid point: e1 prop (-k2, k1, 0), e2 = khat x e1,
    so {e1, e2, khat} is right-handed and orthonormal."""

    e1: np.ndarray
    e2: np.ndarray

    def component(self, r: int, j: int) -> np.ndarray:
        return (self.e1, self.e2)[r][:, j]


def polarization_vectors(grid) -> Polarization:
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    kperp = np.hypot(grid[:, 0], grid[:, 1])
    if np.any(kperp == 0.0):
        raise ValueError("grid point on the k3-axis: polarization frame undefined")
    e1 = np.column_stack([-grid[:, 1], grid[:, 0], np.zeros(len(grid))]) / kperp[:, None]
    khat = grid / np.linalg.norm(grid, axis=1)[:, None]
    e2 = np.cross(khat, e1)
    e1.flags.writeable = False
    e2.flags.writeable = False
    return Polarization(e1=e1, e2=e2)


@dataclass(frozen=True)
class Cutoff:
    """Real radial UV cutoff profile chi_hat(|k|)."""

    kind: str     # "gaussian" | "sharp"
    scale: float  # sigma, or k_max

    @classmethod
    def gaussian(cls, sigma: float) -> "Cutoff":
        if not sigma > 0:
            raise ValueError("sigma must be positive")
        return cls("gaussian", float(sigma))

    @classmethod
    def sharp(cls, k_max: float) -> "Cutoff":
        if not k_max > 0:
            raise ValueError("k_max must be positive")
        return cls("sharp", float(k_max))

    @classmethod
    def default_for(cls, grid) -> "Cutoff":
        # gaussian wide enough to resolve the grid, suppressed below 1e-6
        # at the outermost grid point
        k_edge = float(np.linalg.norm(np.atleast_2d(grid), axis=1).max())
        return cls.gaussian(k_edge / math.sqrt(2 * math.log(1e6)))

    def chi_hat(self, grid) -> np.ndarray:
        k = np.linalg.norm(np.atleast_2d(np.asarray(grid, dtype=float)), axis=1)
        if self.kind == "gaussian":
            return np.exp(-(k ** 2) / (2 * self.scale ** 2))
        if self.kind == "sharp":
            return (k <= self.scale).astype(float)
        raise ValueError(f"unknown cutoff kind {self.kind!r}")


def photon_space(lattice: PositionLattice, polarizations: int = 2) -> OnePhotonSpace:
    """One-photon space on the lattice's offset momentum grid (no component
    is 0, so k = 0 and the k3-axis are excluded by construction)."""
    return OnePhotonSpace(
        lattice.photon_momentum_grid(),
        polarizations=polarizations,
        cell_volume=lattice.momentum_cell_volume,
    )


def coupling_function(
    x, j: int, space: OnePhotonSpace, pol: Polarization, cutoff: Cutoff
) -> np.ndarray:
    """g^j_x over modes (point-major, polarization within point).

    ||g^j_x|| is independent of x (the phases are unimodular).
    """
    if space.polarizations != 2:
        raise ValueError("vector coupling needs a 2-polarization space")
    if j not in (0, 1, 2):
        raise ValueError("direction j must be 0, 1 or 2")
    x = np.asarray(x, dtype=float)
    omega = np.linalg.norm(space.grid, axis=1)
    radial = math.sqrt(space.cell_volume) * cutoff.chi_hat(space.grid) / np.sqrt(omega)
    phase = np.exp(-1j * (space.grid @ x))
    g = np.empty(space.dim_h, dtype=complex)
    g[0::2] = radial * pol.e1[:, j] * phase
    g[1::2] = radial * pol.e2[:, j] * phase
    return g


def scalar_coupling_function(x, space: OnePhotonSpace, cutoff: Cutoff) -> np.ndarray:
    """Scalar-field coupling chi_x(k) = chi_hat(k) exp(-i k.x)/sqrt(omega)."""
    if space.polarizations != 1:
        raise ValueError("scalar coupling needs a 1-polarization space")
    x = np.asarray(x, dtype=float)
    omega = np.linalg.norm(space.grid, axis=1)
    radial = math.sqrt(space.cell_volume) * cutoff.chi_hat(space.grid) / np.sqrt(omega)
    return radial * np.exp(-1j * (space.grid @ x))


def quantized_field(
    x, j: int, basis: FockBasis, pol: Polarization, cutoff: Cutoff
) -> ComplexSparseMatrix:
    """A^j(x) = phi(g^j_x): Hermitian, couples photon bands n <-> n+-1 only."""
    if basis.one_photon is None:
        raise ValueError("basis carries no one-photon space")
    return segal_field(basis, coupling_function(x, j, basis.one_photon, pol, cutoff))


class CoupledSpace:
    """Dirac sector (spinor (x) sites) tensored with a photon Fock basis.

    Index convention: dirac-major, I = (spinor * n_sites + site) * fock + f.
    """

    def __init__(self, lattice: PositionLattice, basis: FockBasis,
                 gammas: GammaSet | None = None):
        self.lattice = lattice
        self.basis = basis
        self.gammas = gammas or gamma_set()
        self.dirac_dim = 4 * lattice.n_sites
        self.dim = self.dirac_dim * basis.size

    def __repr__(self):
        return f"CoupledSpace(dirac_dim={self.dirac_dim}, fock={self.basis.size})"


def _site_blocks(coupled: CoupledSpace, spinor_ops, fock_per_site) -> sp.coo_matrix:
    """sum_x spinor_op (x) |x><x| (x) fock_op(x), assembled as one COO batch."""
    ns = coupled.lattice.n_sites
    fdim = coupled.basis.size
    rows, cols, data = [], [], []
    for x_idx in range(ns):
        fop = fock_per_site[x_idx].tocoo()
        for s_op in spinor_ops:
            sr, sc = np.nonzero(s_op)
            sv = s_op[sr, sc]
            for r4, c4, v4 in zip(sr, sc, sv):
                rows.append((r4 * ns + x_idx) * fdim + fop.row)
                cols.append((c4 * ns + x_idx) * fdim + fop.col)
                data.append(v4 * fop.data)
    dim = coupled.dim
    if not rows:
        return sp.coo_matrix((dim, dim), dtype=complex)
    return sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )


def interaction(
    coupled: CoupledSpace, charge: float, pol: Polarization, cutoff: Cutoff
) -> ComplexSparseMatrix:
    """H1 = -q sum_j alpha^j (x) A^j, with A^j block-diagonal over sites."""
    charge = float(charge)
    basis = coupled.basis
    space = basis.one_photon
    if space is None or space.polarizations != 2:
        raise ValueError("interaction needs a basis over a 2-polarization space")
    total = None
    for j in range(3):
        fields = [
            segal_field(basis, coupling_function(x, j, space, pol, cutoff)).matrix
            for x in coupled.lattice.sites
        ]
        block = _site_blocks(coupled, [-charge * coupled.gammas.alpha[j]], fields)
        total = block if total is None else total + block
    return ComplexSparseMatrix(total, hermitian=True)


def _assemble_bundle(coupled, hd, hrad_diag, h1, manifest, basis) -> ModelBundle:
    fdim = basis.size
    h0 = sp.kron(hd.matrix, sp.identity(fdim, dtype=complex, format="csr"), format="csr")
    h0 = h0 + sp.diags(np.tile(hrad_diag, coupled.dirac_dim), format="csr")
    grading = sp.diags(np.tile(basis.totals.astype(complex), coupled.dirac_dim), format="csr")
    return ModelBundle(
        h0=ComplexSparseMatrix(h0, hermitian=True),
        h1=h1,
        grading=ComplexSparseMatrix(grading, hermitian=True),
        manifest=manifest,
        basis=basis,
    )


def dirac_maxwell_bundle(
    lattice: PositionLattice,
    n_max: int,
    *,
    mass: float = 1.0,
    charge: float = 0.0,
    potential: PotentialSpec | None = None,
    cutoff: Cutoff | None = None,
    gammas: GammaSet | None = None,
) -> ModelBundle:
    """Lattice Dirac particle coupled to the quantized transverse field.

    H0 = H_D(V) (x) 1 + 1 (x) dGamma(omega), H1 the minimal coupling above,
    grading = 1 (x) number operator.
    """
    space = photon_space(lattice, polarizations=2)
    cutoff = cutoff or Cutoff.default_for(space.grid)
    potential = potential or zero_potential(lattice)
    basis = build_basis(space, n_max)
    coupled = CoupledSpace(lattice, basis, gammas)
    pol = polarization_vectors(space.grid)

    hd = dirac_hamiltonian(lattice, mass, potential, coupled.gammas)
    hrad_diag = second_quantize(basis, np.diag(space.frequencies())).diagonal()
    h1 = interaction(coupled, charge, pol, cutoff)

    norms = [
        float(np.linalg.norm(coupling_function(np.zeros(3), j, space, pol, cutoff)))
        for j in range(3)
    ]
    alpha_norm = max(
        float(np.linalg.norm(a, ord=2)) for a in coupled.gammas.alpha
    )  # = 1 in the Dirac representation
    manifest = {
        "model": "dirac_maxwell",
        "points_per_axis": lattice.points_per_axis,
        "spacing": lattice.spacing,
        "n_max": int(n_max),
        "mass": float(mass),
        "charge": charge,
        "potential": {"kind": potential.kind, **{
            k: v for k, v in potential.metadata.items() if isinstance(v, (int, float, str))
        }},
        "cutoff": {"kind": cutoff.kind, "scale": cutoff.scale},
        "polarizations": 2,
        "dim": coupled.dim,
        "fock_dim": basis.size,
        "coupling_norms": norms,
        "analytic_bound_a": 2 * abs(charge) * alpha_norm * sum(norms),
        "analytic_bound_b": abs(charge) * alpha_norm * sum(norms),
    }
    return _assemble_bundle(coupled, hd, hrad_diag, h1, manifest, basis)


def dirac_klein_gordon_bundle(
    lattice: PositionLattice,
    n_max: int,
    *,
    mass: float = 1.0,
    coupling: float = 0.0,
    potential: PotentialSpec | None = None,
    cutoff: Cutoff | None = None,
    gammas: GammaSet | None = None,
) -> ModelBundle:
    """Lattice Dirac particle Yukawa-coupled to a scalar field:
    H1 = lambda sum_x beta (x) |x><x| (x) phi(chi_x), same certification
    structure as the vector model (band shift 1)."""
    space = photon_space(lattice, polarizations=1)
    cutoff = cutoff or Cutoff.default_for(space.grid)
    potential = potential or zero_potential(lattice)
    basis = build_basis(space, n_max)
    coupled = CoupledSpace(lattice, basis, gammas)

    hd = dirac_hamiltonian(lattice, mass, potential, coupled.gammas)
    hrad_diag = second_quantize(basis, np.diag(space.frequencies())).diagonal()
    fields = [
        segal_field(basis, scalar_coupling_function(x, space, cutoff)).matrix
        for x in lattice.sites
    ]
    lam = float(coupling)
    h1 = ComplexSparseMatrix(
        _site_blocks(coupled, [lam * coupled.gammas.beta], fields), hermitian=True
    )

    chi_norm = float(np.linalg.norm(scalar_coupling_function(np.zeros(3), space, cutoff)))
    beta_norm = float(np.linalg.norm(coupled.gammas.beta, ord=2))
    manifest = {
        "model": "dirac_klein_gordon",
        "points_per_axis": lattice.points_per_axis,
        "spacing": lattice.spacing,
        "n_max": int(n_max),
        "mass": float(mass),
        "coupling": lam,
        "potential": {"kind": potential.kind, **{
            k: v for k, v in potential.metadata.items() if isinstance(v, (int, float, str))
        }},
        "cutoff": {"kind": cutoff.kind, "scale": cutoff.scale},
        "polarizations": 1,
        "dim": coupled.dim,
        "fock_dim": basis.size,
        "coupling_norms": [chi_norm],
        "analytic_bound_a": 2 * abs(lam) * beta_norm * chi_norm,
        "analytic_bound_b": abs(lam) * beta_norm * chi_norm,
    }
    return _assemble_bundle(coupled, hd, hrad_diag, h1, manifest, basis)
