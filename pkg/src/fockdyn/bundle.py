"""Model bundles: the (H0, H1, grading) operator triple on one space,
plus a manifest describing how it was built.

``grading`` is the non-negative operator whose integer spectral bands
organize both the certification checks and the Dyson trust accounting
(for the field models it is 1 (x) number operator).
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

from .fock import FockBasis, number_operator, second_quantize, segal_field
from .linalg import ComplexSparseMatrix, load_matrix, save_matrix

_FILES = {"h0": "h0.coo", "h1": "h1.coo", "grading": "grading.coo"}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class ModelBundle:
    h0: ComplexSparseMatrix
    h1: ComplexSparseMatrix
    grading: ComplexSparseMatrix
    manifest: dict
    basis: FockBasis | None = field(default=None, repr=False)

    def __post_init__(self):
        dims = {self.h0.dim, self.h1.dim, self.grading.dim}
        if len(dims) != 1:
            raise ValueError(f"operators live on different spaces: dims {sorted(dims)}")
        for name in ("h0", "h1", "grading"):
            if not getattr(self, name).hermitian:
                raise ValueError(f"{name} must carry the hermitian flag")

    @property
    def dim(self) -> int:
        return self.h0.dim

    def manifest_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.manifest).encode()).hexdigest()

    def analytic_bound(self):
        """(a, b) of the guaranteed bound ||H1 v|| <= a ||grading^(1/2) v|| + b ||v||,
        or None when the manifest does not carry one (external bundles)."""
        a = self.manifest.get("analytic_bound_a")
        b = self.manifest.get("analytic_bound_b")
        if a is None or b is None:
            return None
        return float(a), float(b)

    def save(self, directory) -> None:
        os.makedirs(directory, exist_ok=True)
        for attr, fname in _FILES.items():
            save_matrix(os.path.join(directory, fname), getattr(self, attr))
        manifest = dict(self.manifest)
        manifest["manifest_hash"] = self.manifest_hash()
        with open(os.path.join(directory, "manifest.json"), "w") as f:
            json.dump(manifest, f, sort_keys=True, indent=2)
            f.write("\n")

    @classmethod
    def load(cls, directory) -> "ModelBundle":
        with open(os.path.join(directory, "manifest.json")) as f:
            manifest = json.load(f)
        manifest.pop("manifest_hash", None)
        ops = {
            attr: load_matrix(os.path.join(directory, fname))
            for attr, fname in _FILES.items()
        }
        return cls(manifest=manifest, **ops)


def toy_single_mode(
    omega: float = 1.0, coupling: float = 0.1, n_max: int = 14
) -> ModelBundle:
    """Single bosonic mode: H0 = omega a^dagger a, H1 = coupling * phi(1),
    grading = number operator.  The workhorse for exact-oracle comparisons."""
    omega, coupling = float(omega), float(coupling)
    if not omega > 0:
        raise ValueError("omega must be positive")
    basis = FockBasis(1, n_max)
    h0 = second_quantize(basis, [[omega]])
    phi = segal_field(basis, [1.0])
    h1 = ComplexSparseMatrix(coupling * phi.matrix, hermitian=True)
    manifest = {
        "model": "toy_single_mode",
        "omega": omega,
        "coupling": coupling,
        "n_max": int(n_max),
        "dim": basis.size,
        "coupling_norms": [1.0],
        "analytic_bound_a": 2.0 * abs(coupling),
        "analytic_bound_b": abs(coupling),
    }
    return ModelBundle(
        h0=h0, h1=h1, grading=number_operator(basis), manifest=manifest, basis=basis
    )
