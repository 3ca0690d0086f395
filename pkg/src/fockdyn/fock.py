"""Truncated bosonic Fock space over a finite one-photon space.

The basis is the set of occupation tuples (n_1, ..., n_d) with
sum(n_i) <= n_max, ordered by total occupation and then lexicographically,
so index 0 is always the vacuum.  Ladder operators follow the convention
that the annihilator is antilinear in its argument,

    a(F) = sum_i conj(F_i) a_i,      a(F)^dagger = sum_i F_i a_i^dagger,

which makes [a(F), a(G)^dagger] = <F, G> on states safely below the
truncation band.  Creation amplitudes that would leave the truncated basis
are dropped (projection truncation), so creator == annihilator^dagger holds
exactly on the retained block.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from .config import TOLS
from .linalg import ComplexSparseMatrix


class OnePhotonSpace:
    """Finite sampling of the one-photon momentum space.

    Parameters
    ----------
    grid : (n_points, 3) array
        Momentum sample points.  Points must be distinct, nonzero, and for
        two transverse polarization components no point may sit on the
        k3-axis (where the polarization frame is singular).
    polarizations : 1 or 2
        2 for a transverse vector field, 1 for a scalar field.
    cell_volume : float
        Quadrature weight of each grid cell; folded into coupling vectors
        as sqrt(cell_volume) so vector norms approximate L^2 integrals.

    Modes are indexed point-major: mode = point_index * polarizations + r.
    """

    def __init__(self, grid, polarizations: int = 2, cell_volume: float = 1.0):
        grid = np.atleast_2d(np.asarray(grid, dtype=float))
        if grid.ndim != 2 or grid.shape[1] != 3:
            raise ValueError(f"grid must have shape (n, 3), got {grid.shape}")
        if not np.all(np.isfinite(grid)):
            raise ValueError("grid contains non-finite entries")
        if len(np.unique(grid, axis=0)) != len(grid):
            raise ValueError("grid points must be distinct")
        omega = np.linalg.norm(grid, axis=1)
        if np.any(omega == 0.0):
            raise ValueError("grid must not contain k = 0 (dispersion 1/sqrt|k| diverges)")
        if polarizations not in (1, 2):
            raise ValueError("polarizations must be 1 or 2")
        if polarizations == 2 and np.any(np.hypot(grid[:, 0], grid[:, 1]) == 0.0):
            raise ValueError("grid point on the k3-axis: transverse polarization undefined")
        if not cell_volume > 0:
            raise ValueError("cell_volume must be positive")
        grid.flags.writeable = False
        self.grid = grid
        self.polarizations = int(polarizations)
        self.cell_volume = float(cell_volume)
        self.n_points = grid.shape[0]
        self.dim_h = self.n_points * self.polarizations

    def frequencies(self) -> np.ndarray:
        """omega(k) = |k| per mode (point-major, repeated per polarization)."""
        return np.repeat(np.linalg.norm(self.grid, axis=1), self.polarizations)

    def __repr__(self):
        return (f"OnePhotonSpace(n_points={self.n_points}, "
                f"polarizations={self.polarizations}, dim_h={self.dim_h})")


def _compositions(total: int, parts: int):
    # weak compositions of `total` into `parts` slots, lexicographically ascending
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class FockBasis:
    """Occupation-number basis with total occupation <= n_max."""

    def __init__(self, dim_h: int, n_max: int, one_photon: OnePhotonSpace | None = None):
        dim_h, n_max = int(dim_h), int(n_max)
        if dim_h < 1:
            raise ValueError("dim_h must be >= 1")
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        size = math.comb(n_max + dim_h, dim_h)
        if size > TOLS.basis_size_limit:
            raise ValueError(
                f"basis would hold {size} states "
                f"(dim_h={dim_h}, n_max={n_max}), above the limit "
                f"{TOLS.basis_size_limit}"
            )
        states = []
        for total in range(n_max + 1):
            states.extend(_compositions(total, dim_h))
        self.dim_h = dim_h
        self.n_max = n_max
        self.one_photon = one_photon
        self.states = tuple(states)
        self.index = {s: i for i, s in enumerate(self.states)}
        self.occupations = np.array(self.states, dtype=np.int64)
        self.occupations.flags.writeable = False
        self.totals = self.occupations.sum(axis=1)
        self.totals.flags.writeable = False
        self._lowering = None  # lazy (mode, row, col, amp) arrays

    @property
    def size(self) -> int:
        return len(self.states)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.size, dtype=complex)
        v[0] = 1.0
        return v

    def _lowering_arrays(self):
        """COO template of all single-mode lowering amplitudes.

        Entry: a_i takes state `col` to state `row` with amplitude sqrt(n_i);
        the mode array lets a(F) be assembled by one vectorized scale-and-sum.
        """
        if self._lowering is None:
            mode, row, col, amp = [], [], [], []
            for j, s in enumerate(self.states):
                for i, n_i in enumerate(s):
                    if n_i:
                        lowered = s[:i] + (n_i - 1,) + s[i + 1:]
                        mode.append(i)
                        row.append(self.index[lowered])
                        col.append(j)
                        amp.append(math.sqrt(n_i))
            self._lowering = (
                np.array(mode, dtype=np.int64),
                np.array(row, dtype=np.int64),
                np.array(col, dtype=np.int64),
                np.array(amp, dtype=float),
            )
        return self._lowering

    def __repr__(self):
        return f"FockBasis(dim_h={self.dim_h}, n_max={self.n_max}, size={self.size})"


def build_basis(space: OnePhotonSpace, n_max: int) -> FockBasis:
    return FockBasis(space.dim_h, n_max, one_photon=space)


def _check_vector(basis: FockBasis, f) -> np.ndarray:
    f = np.asarray(f, dtype=complex).ravel()
    if f.shape != (basis.dim_h,):
        raise ValueError(f"one-photon vector must have length {basis.dim_h}, got {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError("one-photon vector has non-finite entries")
    return f


def annihilator(basis: FockBasis, f) -> ComplexSparseMatrix:
    """Matrix of a(F) = sum_i conj(F_i) a_i on the truncated basis."""
    f = _check_vector(basis, f)
    mode, row, col, amp = basis._lowering_arrays()
    data = np.conj(f)[mode] * amp
    m = sp.coo_matrix((data, (row, col)), shape=(basis.size, basis.size))
    return ComplexSparseMatrix(m, hermitian=False)


def creator(basis: FockBasis, f) -> ComplexSparseMatrix:
    """Adjoint of the annihilator; amplitudes leaving the basis are dropped."""
    return ComplexSparseMatrix(annihilator(basis, f).matrix.getH(), hermitian=False)


def segal_field(basis: FockBasis, f) -> ComplexSparseMatrix:
    """phi(F) = (a(F) + a(F)^dagger) / sqrt(2); Hermitian by construction."""
    a = annihilator(basis, f).matrix
    return ComplexSparseMatrix((a + a.getH()) / math.sqrt(2), hermitian=True)


def _mode_lowering(basis: FockBasis, i: int):
    mode, row, col, amp = basis._lowering_arrays()
    pick = mode == i
    return sp.coo_matrix(
        (amp[pick].astype(complex), (row[pick], col[pick])),
        shape=(basis.size, basis.size),
    ).tocsr()


def second_quantize(basis: FockBasis, h) -> ComplexSparseMatrix:
    """dGamma(h) = sum_ij h_ij a_i^dagger a_j for a Hermitian one-photon h.

    Exact on the truncated basis (the total occupation is preserved, so no
    amplitude is clipped).  Diagonal h takes a vectorized path; a general h
    is assembled mode pair by mode pair, fine at test scale.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (basis.dim_h, basis.dim_h):
        raise ValueError(f"one-photon operator must be {basis.dim_h} x {basis.dim_h}")
    defect = np.abs(h - h.conj().T).max() if h.size else 0.0
    if defect > TOLS.hermiticity:
        raise ValueError(f"one-photon operator not hermitian, defect {defect:.3e}")

    diag_part = basis.occupations @ h.diagonal().real
    off = h - np.diag(h.diagonal())
    if np.count_nonzero(off) == 0:
        m = sp.diags(diag_part.astype(complex), format="csr")
        return ComplexSparseMatrix(m, hermitian=True)

    m = sp.diags(diag_part.astype(complex), format="csr")
    for i, j in zip(*np.nonzero(off)):
        m = m + off[i, j] * (_mode_lowering(basis, int(i)).getH() @ _mode_lowering(basis, int(j)))
    return ComplexSparseMatrix(m, hermitian=True)


def number_operator(basis: FockBasis) -> ComplexSparseMatrix:
    """dGamma(1): diagonal total-occupation operator, vacuum eigenvalue 0."""
    return ComplexSparseMatrix(
        sp.diags(basis.totals.astype(complex), format="csr"), hermitian=True
    )


def basis_lines(basis: FockBasis) -> list[str]:
    """One text line per state: ``index : (n_1,...,n_d)``."""
    return [
        f"{i} : ({','.join(str(n) for n in s)})"
        for i, s in enumerate(basis.states)
    ]


def save_basis(path, basis: FockBasis) -> None:
    with open(path, "w") as f:
        f.write("\n".join(basis_lines(basis)) + "\n")
