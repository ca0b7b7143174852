import numpy as np
import pytest

from mfig.energies import Linear, shannon
from mfig.errors import InvalidArgumentError, PreconditionError
from mfig.means import Arithmetic, Logarithmic
from mfig.products import (c4_gap, c4_gap_closed_form, c4_property_check, product_bound_check,
                           product_decomposition, product_energy, regrouping_identity)
from mfig.search import SearchConfig

from conftest import K2, interior_point
from mfig.graphs import build_standard


def test_regrouping_identity(rng):
    for _ in range(50):
        lhs, rhs = regrouping_identity(rng.random(4), rng.standard_normal(4))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_gap_closed_form(rng):
    for _ in range(50):
        p, f = interior_point(4, rng), rng.standard_normal(4)
        assert c4_gap(Logarithmic(), shannon(), p, f) == pytest.approx(c4_gap_closed_form(Logarithmic(), p, f), abs=1e-12)


def test_property_check_small():
    rep = c4_property_check(Logarithmic(), shannon(), samples=500)
    assert rep.passed and rep.worst_gap >= 0.0


def test_property_needs_compatible_pair():
    with pytest.raises(PreconditionError):
        c4_property_check(Arithmetic(), shannon(), samples=10)


def test_decomposition_exact(rng):
    g, h = build_standard("path_n", 3), K2
    p, f = interior_point(6, rng), rng.standard_normal(6)
    full, fibres, corr = product_decomposition(g, h, Logarithmic(), shannon(), p, f)
    assert full == pytest.approx(fibres + corr, rel=1e-12)


def test_product_energy_refuses_to_guess():
    assert product_energy(shannon(), 4) is not None
    with pytest.raises(InvalidArgumentError):
        product_energy(Linear([0.0, 1.0]), 4)
    with pytest.raises(InvalidArgumentError):
        product_energy(Linear([0.0, 1.0]), 4, Linear([0.0, 1.0, 2.0]))


def test_product_bound_k2_k2():
    rep = product_bound_check(K2, K2, Logarithmic(), shannon(), search=SearchConfig(grid_per_dim=9))
    assert rep.passed and rep.kappa_product == pytest.approx(2.0, abs=1e-4)
