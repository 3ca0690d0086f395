import numpy as np
import pytest

from fockdyn.bundle import toy_single_mode
from fockdyn.dirac import PositionLattice
from fockdyn.field import Cutoff, dirac_maxwell_bundle


@pytest.fixture(scope="session")
def toy14():
    """Single-mode bundle: omega = 1, coupling 0.1, n_max = 14."""
    return toy_single_mode(omega=1.0, coupling=0.1, n_max=14)


@pytest.fixture(scope="session")
def dm_small():
    """Smallest lattice Dirac-Maxwell bundle with a non-trivial coupling."""
    return dirac_maxwell_bundle(
        PositionLattice(1, 1.0), 4, mass=1.0, charge=0.1, cutoff=Cutoff.sharp(1e9)
    )


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
