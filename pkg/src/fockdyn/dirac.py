"""Dirac operator on a periodic cubic lattice, gamma algebra, and the
discrete conjugation symmetry used for charge-parity checks.

Conventions: metric diag(1,-1,-1,-1); gamma^0 Hermitian, gamma^j
anti-Hermitian, {gamma^mu, gamma^nu} = 2 g^{mu nu}; alpha^j = gamma^0 gamma^j,
beta = gamma^0; H_D(V) = alpha.p + M beta + V with mass M > 0.

The lattice carries half-spacing offset sites a*(n + 1/2), wrapped to the
minimal image: no site sits at the origin (Coulomb values stay finite) and
x -> -x is a bijection of sites.  The derivative alpha.p acts by exact
multiplication with alpha.k in the discrete-Fourier momentum basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import TOLS
from .linalg import ComplexSparseMatrix

_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

_ID2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class GammaSet:
    gamma0: np.ndarray
    gamma: tuple      # (gamma^1, gamma^2, gamma^3)
    alpha: tuple      # alpha^j = gamma^0 gamma^j
    beta: np.ndarray  # = gamma^0
    metric: np.ndarray = field(
        default_factory=lambda: np.diag([1.0, -1.0, -1.0, -1.0])
    )


def gamma_set() -> GammaSet:
    """Gamma matrices in the Dirac representation; entries in {0, +-1, +-i},
    so all algebra identities hold exactly in floating point."""
    gamma0 = np.block([[_ID2, np.zeros((2, 2))], [np.zeros((2, 2)), -_ID2]])
    gammas = tuple(
        np.block([[np.zeros((2, 2)), s], [-s, np.zeros((2, 2))]]) for s in _SIGMA
    )
    alphas = tuple(gamma0 @ g for g in gammas)
    for m in (gamma0, *gammas, *alphas):
        m.flags.writeable = False
    return GammaSet(gamma0=gamma0, gamma=gammas, alpha=alphas, beta=gamma0)


class PositionLattice:
    """Cubic periodic lattice, odd points per axis, half-spacing offset sites.

    Site index runs row-major over the three axis indices; ``negation_map``
    gives the site index of -x (mod the torus), which per axis is simply
    n -> L-1-n.
    """

    def __init__(self, points_per_axis: int, spacing: float):
        L = int(points_per_axis)
        a = float(spacing)
        if L < 1 or L % 2 == 0:
            raise ValueError(f"points_per_axis must be odd and >= 1, got {L}")
        if not a > 0:
            raise ValueError("spacing must be positive")
        self.points_per_axis = L
        self.spacing = a
        self.n_sites = L ** 3

        coords = a * (np.arange(L) + 0.5)
        coords[coords > L * a / 2] -= L * a  # minimal image in (-La/2, La/2]
        self.axis_coords = coords
        self.axis_coords.flags.writeable = False

        n = np.arange(L)
        i1, i2, i3 = np.meshgrid(n, n, n, indexing="ij")
        self.sites = np.column_stack(
            [coords[i1.ravel()], coords[i2.ravel()], coords[i3.ravel()]]
        )
        self.sites.flags.writeable = False

        rev = L - 1 - n
        self.negation_map = (
            (rev[i1.ravel()] * L + rev[i2.ravel()]) * L + rev[i3.ravel()]
        )
        self.negation_map.flags.writeable = False

    def dual_momentum_axis(self) -> np.ndarray:
        """1-D Fourier-dual momenta: integer multiples of 2 pi/(L a),
        symmetric around 0 (periodic plane waves; used for alpha.p)."""
        L, a = self.points_per_axis, self.spacing
        m = np.arange(L) - (L - 1) // 2
        return 2 * np.pi / (L * a) * m

    def dual_momentum_grid(self) -> np.ndarray:
        k = self.dual_momentum_axis()
        k1, k2, k3 = np.meshgrid(k, k, k, indexing="ij")
        return np.column_stack([k1.ravel(), k2.ravel(), k3.ravel()])

    def photon_momentum_axis(self) -> np.ndarray:
        """Photon quadrature momenta: same spacing as the dual grid but
        offset half a cell, so no component is ever 0."""
        L, a = self.points_per_axis, self.spacing
        dk = 2 * np.pi / (L * a)
        k = dk * (np.arange(L) + 0.5)
        k[k > L * dk / 2] -= L * dk
        return k

    def photon_momentum_grid(self) -> np.ndarray:
        k = self.photon_momentum_axis()
        k1, k2, k3 = np.meshgrid(k, k, k, indexing="ij")
        return np.column_stack([k1.ravel(), k2.ravel(), k3.ravel()])

    @property
    def momentum_cell_volume(self) -> float:
        return (2 * np.pi / (self.points_per_axis * self.spacing)) ** 3

    def __repr__(self):
        return (f"PositionLattice(points_per_axis={self.points_per_axis}, "
                f"spacing={self.spacing})")


class PotentialSpec:
    """External potential: one Hermitian 4x4 block per lattice site."""

    def __init__(self, kind: str, values: np.ndarray, metadata: dict | None = None):
        values = np.asarray(values, dtype=complex)
        if values.ndim != 3 or values.shape[1:] != (4, 4):
            raise ValueError(f"values must have shape (n_sites, 4, 4), got {values.shape}")
        defect = np.abs(values - values.conj().transpose(0, 2, 1)).max() if values.size else 0.0
        if defect > TOLS.hermiticity:
            raise ValueError(f"potential blocks not hermitian, defect {defect:.3e}")
        values.flags.writeable = False
        self.kind = kind
        self.values = values
        self.metadata = dict(metadata or {})

    @property
    def n_sites(self) -> int:
        return self.values.shape[0]

    def __repr__(self):
        return f"PotentialSpec(kind={self.kind!r}, n_sites={self.n_sites})"


def zero_potential(lattice: PositionLattice) -> PotentialSpec:
    return PotentialSpec("zero", np.zeros((lattice.n_sites, 4, 4), dtype=complex))


def coulomb_values(lattice: PositionLattice, z: float, charge: float) -> PotentialSpec:
    """Coulomb potential -Z q^2 / |x| (scalar times the identity spinor block).

    The strict gate Z q^2 < 1/2 is the threshold below which the whole
    construction downstream is certified; at q^2 = 1/137.036 that admits
    Z <= 68 and rejects Z = 69.
    """
    z = float(z)
    q = float(charge)
    if z < 0:
        raise ValueError("z must be non-negative")
    strength = z * q * q
    if not strength < 0.5:
        raise ValueError(
            f"coulomb strength Z q^2 = {strength:.6f} is not < 1/2; "
            f"the certified construction requires Z q^2 < 1/2"
        )
    r = np.linalg.norm(lattice.sites, axis=1)  # never 0 on the offset lattice
    vals = (-strength / r)[:, None, None] * np.eye(4, dtype=complex)[None, :, :]
    return PotentialSpec("coulomb", vals, {"z": z, "charge": q})


def table_potential(lattice: PositionLattice, values) -> PotentialSpec:
    values = np.asarray(values, dtype=complex)
    if values.shape[0] != lattice.n_sites:
        raise ValueError(
            f"table has {values.shape[0]} blocks, lattice has {lattice.n_sites} sites"
        )
    return PotentialSpec("table", values)


def potential_from_matrix_file(lattice: PositionLattice, path) -> PotentialSpec:
    """Import per-site 4x4 blocks from one coordinate-format file of the
    block-diagonal potential (dimension 4 * n_sites, spinor-major index
    spinor * n_sites + site, matching dirac_hamiltonian)."""
    from .linalg import load_matrix

    ns = lattice.n_sites
    m = load_matrix(path)
    if m.dim != 4 * ns:
        raise ValueError(f"{path}: dimension {m.dim} != 4 * n_sites = {4 * ns}")
    coo = m.matrix.tocoo()
    site_r, site_c = coo.row % ns, coo.col % ns
    if np.any(site_r != site_c):
        raise ValueError(f"{path}: entries couple different sites; not a local potential")
    vals = np.zeros((ns, 4, 4), dtype=complex)
    vals[site_r, coo.row // ns, coo.col // ns] = coo.data
    return PotentialSpec("table", vals, {"source": str(path)})


def _momentum_multipliers(lattice: PositionLattice) -> list[np.ndarray]:
    """Dense n_sites x n_sites matrices of p_j = F^dagger k_j F per axis."""
    L = lattice.points_per_axis
    x = lattice.axis_coords
    k = lattice.dual_momentum_axis()
    F = np.exp(-1j * np.outer(k, x)) / np.sqrt(L)
    d1 = F.conj().T @ (k[:, None] * F)
    d1 = (d1 + d1.conj().T) / 2
    eye = np.eye(L)
    return [
        np.kron(np.kron(d1, eye), eye),
        np.kron(np.kron(eye, d1), eye),
        np.kron(np.kron(eye, eye), d1),
    ]


def dirac_hamiltonian(
    lattice: PositionLattice,
    mass: float,
    potential: PotentialSpec | None = None,
    gammas: GammaSet | None = None,
) -> ComplexSparseMatrix:
    """H_D(V) = alpha.p + M beta + V on spinor (x) sites (spinor-major).

    With V = 0 the spectrum is +-sqrt(|k|^2 + M^2) over the dual grid,
    each twice.
    """
    mass = float(mass)
    if not mass > 0:
        raise ValueError("mass must be positive")
    g = gammas or gamma_set()
    potential = potential or zero_potential(lattice)
    ns = lattice.n_sites
    if potential.n_sites != ns:
        raise ValueError("potential and lattice disagree on the number of sites")

    p = _momentum_multipliers(lattice)
    h = sum(np.kron(g.alpha[j], p[j]) for j in range(3))
    h = h + mass * np.kron(g.beta, np.eye(ns))
    idx = np.arange(ns)
    for s1 in range(4):
        for s2 in range(4):
            h[s1 * ns + idx, s2 * ns + idx] += potential.values[:, s1, s2]
    h = (h + h.conj().T) / 2
    return ComplexSparseMatrix(h, hermitian=True)


@dataclass(frozen=True)
class ConjugationData:
    """Real involution U with U alpha^j U = conj(alpha^j), U beta U = -conj(beta).

    UC = CU for the entrywise conjugation C is equivalent to U being real.
    """

    matrix: np.ndarray
    defects: dict


def pauli_matrix(gammas: GammaSet | None = None) -> ConjugationData:
    """The conjugation intertwiner, built as U = i alpha^2 beta.

    In the Dirac representation this is a real signed permutation matrix;
    all four defining identities are verified exactly before returning.
    """
    g = gammas or gamma_set()
    u = 1j * g.alpha[1] @ g.beta
    defects = {
        "reality": float(np.abs(u.imag).max()),
        "involution": float(np.abs(u @ u - np.eye(4)).max()),
        "alpha_conjugation": max(
            float(np.abs(u @ a @ u - a.conj()).max()) for a in g.alpha
        ),
        "beta_conjugation": float(np.abs(u @ g.beta @ u + g.beta.conj()).max()),
    }
    worst = max(defects.values())
    if worst > 0.0:
        raise ValueError(f"conjugation identities not exact, worst defect {worst:.3e}")
    u = u.real.astype(float)
    u.flags.writeable = False
    return ConjugationData(matrix=u, defects=defects)


def cp_invariant(
    lattice: PositionLattice,
    potential: PotentialSpec,
    conjugation: ConjugationData | None = None,
):
    """Check U^-1 V(x) U = conj(V(-x)) over the site negation bijection.

    Returns (ok, defect): defect is the max over sites of the spectral norm
    of the difference; ok iff defect < TOLS.cp_defect.
    """
    if potential.n_sites != lattice.n_sites:
        raise ValueError("potential and lattice disagree on the number of sites")
    neg = lattice.negation_map
    if len(np.unique(neg)) != lattice.n_sites:
        raise ValueError("lattice negation map is not a site bijection")
    u = (conjugation or pauli_matrix()).matrix
    left = np.einsum("ij,sjk,kl->sil", u, potential.values, u)  # U^-1 = U
    right = potential.values[neg].conj()
    diff = left - right
    defect = max(
        (float(np.linalg.norm(d, ord=2)) for d in diff), default=0.0
    )
    return defect < TOLS.cp_defect, defect
