"""Sparse complex matrices with Hermiticity bookkeeping, and the dense
spectral operations built on them (matrix exponential, spectral projections).

Everything downstream stores operators as :class:`ComplexSparseMatrix`; the
dense eigendecomposition routines refuse dimensions above
``TOLS.dense_dim_limit`` instead of thrashing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .config import TOLS


class ComplexSparseMatrix:
    """Square complex sparse matrix with a declared Hermiticity flag.

    Construction coalesces duplicates, drops explicitly stored zeros and,
    when ``hermitian=True``, verifies M = M^dagger entrywise within
    ``TOLS.hermiticity`` (raising with the max asymmetry otherwise).
    """

    def __init__(self, matrix, hermitian: bool = False):
        m = sp.csr_matrix(matrix, dtype=np.complex128)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix must be square, got shape {m.shape}")
        m.sum_duplicates()
        m.eliminate_zeros()
        if hermitian:
            defect = _max_abs(m - m.getH())
            if defect > TOLS.hermiticity:
                raise ValueError(
                    f"matrix declared hermitian but max |M - M^dagger| = {defect:.3e} "
                    f"exceeds {TOLS.hermiticity:.0e}"
                )
        self.matrix = m
        self.hermitian = bool(hermitian)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def dagger(self) -> "ComplexSparseMatrix":
        return ComplexSparseMatrix(self.matrix.getH(), hermitian=self.hermitian)

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def is_diagonal(self) -> bool:
        coo = self.matrix.tocoo()
        return bool(np.all(coo.row == coo.col))

    def __repr__(self):
        return (f"ComplexSparseMatrix(dim={self.dim}, nnz={self.nnz}, "
                f"hermitian={self.hermitian})")


def _max_abs(m) -> float:
    """Largest |entry| of a scipy sparse matrix (0 for an empty one)."""
    if m.nnz == 0:
        return 0.0
    return float(np.abs(m.tocoo().data).max())


def max_abs_entry(m) -> float:
    if isinstance(m, ComplexSparseMatrix):
        return _max_abs(m.matrix)
    if sp.issparse(m):
        return _max_abs(m)
    m = np.asarray(m)
    return float(np.abs(m).max()) if m.size else 0.0


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix: eigenvalues ascending,
    eigenvector columns unitary."""

    eigenvalues: np.ndarray
    vectors: np.ndarray

    def propagator(self, t: float) -> np.ndarray:
        """Dense unitary e^{-i t M}."""
        phase = np.exp(-1j * t * self.eigenvalues)
        return (self.vectors * phase) @ self.vectors.conj().T


def _require_hermitian(m: ComplexSparseMatrix, what: str):
    if not isinstance(m, ComplexSparseMatrix):
        raise TypeError(f"{what} expects a ComplexSparseMatrix")
    if not m.hermitian:
        defect = _max_abs(m.matrix - m.matrix.getH())
        raise ValueError(
            f"{what} requires a hermitian-flagged matrix; "
            f"max |M - M^dagger| = {defect:.3e}"
        )


def _require_dense_ok(dim: int, what: str):
    if dim > TOLS.dense_dim_limit:
        raise ValueError(
            f"{what}: dimension {dim} exceeds the dense eigendecomposition "
            f"guard {TOLS.dense_dim_limit}; this operation is meant for "
            f"reduced models"
        )


def spectral_decomposition(m: ComplexSparseMatrix) -> SpectralDecomposition:
    _require_hermitian(m, "spectral_decomposition")
    _require_dense_ok(m.dim, "spectral_decomposition")
    vals, vecs = np.linalg.eigh(m.toarray())
    vals.flags.writeable = False
    vecs.flags.writeable = False
    return SpectralDecomposition(vals, vecs)


def matexp(m: ComplexSparseMatrix, t: float) -> np.ndarray:
    """Dense e^{-i t M} for Hermitian M, via full eigendecomposition.

    Unitary to ~TOLS.unitarity; rejects non-Hermitian input with the max
    asymmetry in the message.
    """
    return spectral_decomposition(m).propagator(float(t))


def spectral_projection(m: ComplexSparseMatrix, lo: float, hi: float) -> ComplexSparseMatrix:
    """Orthogonal projection onto the eigenspaces with eigenvalue in the
    closed interval [lo, hi].

    Warns when an interval endpoint sits within TOLS.boundary_warn of an
    eigenvalue: the answer is then convention-sensitive.
    """
    if not lo <= hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    dec = spectral_decomposition(m)
    vals = dec.eigenvalues
    near = np.minimum(np.abs(vals - lo), np.abs(vals - hi))
    if np.any(near < TOLS.boundary_warn):
        warnings.warn(
            f"spectral_projection: eigenvalue within {TOLS.boundary_warn:.0e} "
            f"of an interval endpoint [{lo}, {hi}]",
            RuntimeWarning,
            stacklevel=2,
        )
    sel = (vals >= lo) & (vals <= hi)
    cols = dec.vectors[:, sel]
    p = cols @ cols.conj().T
    p = (p + p.conj().T) / 2  # exact Hermitian symmetry
    return ComplexSparseMatrix(p, hermitian=True)


# ---------------------------------------------------------------------------
# coordinate-format text exchange
#
# header "dim nnz hermitian", then one "row col re im" line per entry,
# indices 0-based, %.17g round-trips float64 exactly.

def save_matrix(path, m: ComplexSparseMatrix) -> None:
    coo = m.matrix.tocoo()
    with open(path, "w") as f:
        f.write(f"{m.dim} {coo.nnz} {int(m.hermitian)}\n")
        if coo.nnz:
            table = np.column_stack(
                [coo.row, coo.col, coo.data.real, coo.data.imag]
            )
            np.savetxt(f, table, fmt=["%d", "%d", "%.17g", "%.17g"])


def load_matrix(path) -> ComplexSparseMatrix:
    with open(path) as f:
        header = f.readline().split()
        if len(header) != 3:
            raise ValueError(f"{path}: bad header, expected 'dim nnz hermitian'")
        dim, nnz, herm = int(header[0]), int(header[1]), int(header[2])
        if nnz:
            table = np.loadtxt(f, ndmin=2)
        else:
            table = np.zeros((0, 4))
    if table.shape != (nnz, 4):
        raise ValueError(f"{path}: expected {nnz} entries, found {table.shape[0]}")
    rows = table[:, 0].astype(np.int64)
    cols = table[:, 1].astype(np.int64)
    if nnz and (rows.min() < 0 or cols.min() < 0 or rows.max() >= dim or cols.max() >= dim):
        raise ValueError(f"{path}: entry index out of range for dim {dim}")
    data = table[:, 2] + 1j * table[:, 3]
    m = sp.coo_matrix((data, (rows, cols)), shape=(dim, dim))
    return ComplexSparseMatrix(m, hermitian=bool(herm))
