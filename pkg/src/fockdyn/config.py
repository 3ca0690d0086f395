"""Centralized numerical tolerances and size guards.

Every module reads its thresholds from the single instance ``TOLS`` so a
deliberate loosening or tightening happens in exactly one place.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # construction / decomposition checks
    hermiticity: float = 1e-13          # M = M^dagger, max entry
    unitarity: float = 1e-11            # propagators, DFT matrices
    projector: float = 1e-12            # P^2 = P = P^dagger
    boundary_warn: float = 1e-9         # spectral interval endpoint close to an eigenvalue

    # certification checks
    commutator: float = 1e-12           # [grading, H0], max entry
    projection_commutator: float = 1e-11
    nonnegative: float = 1e-12          # smallest eigenvalue >= -nonnegative
    band_residual: float = 1e-12        # operator norm of the out-of-band block
    level_tie: float = 1e-9             # eigenvalue grouping into levels
    relative_bound_slack: float = 1e-9  # measured slope vs analytic slope
    cp_defect: float = 1e-12

    # dynamics checks
    picard_agreement: float = 1e-10

    # size guards (refuse, never thrash)
    basis_size_limit: int = 2_000_000
    dense_dim_limit: int = 6000


TOLS = Tolerances()
