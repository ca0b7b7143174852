import numpy as np
import pytest

from mfig.energies import Interaction, Linear, shannon
from mfig.graphs import build_standard
from mfig.means import Arithmetic, Geometric, Logarithmic, SpectralGraph

K2 = build_standard("K_n", 2)
K3 = build_standard("K_n", 3)
C4 = build_standard("cycle_n", 4)
Q3 = build_standard("hypercube_d", 3)

BUILTIN_MEANS = [Arithmetic(), Geometric(), Logarithmic(), SpectralGraph()]


def random_energy(kind, n, rng):
    if kind == "linear":
        return Linear(rng.standard_normal(n))
    if kind == "interaction":
        w = rng.standard_normal((n, n))
        return Interaction(w + w.T)
    return shannon()


def interior_point(n, rng, floor=0.02):
    p = rng.dirichlet(np.ones(n))
    p = floor + (1.0 - n * floor) * p
    return p / p.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
