import math

import pytest

from mfig.energies import Linear, energy_from_config, shannon
from mfig.errors import BoundaryError, InvalidArgumentError
from mfig.means import Arithmetic, Logarithmic, TransportInformation
from mfig.two_point import (TwoPointProblem, constant_curvature_distance, effectiveness, kappa_grid,
                            kappa_k2, kappa_min_upper_bound, transport_distance)


def test_arithmetic_distance_is_linear():
    prob = TwoPointProblem(Arithmetic(), shannon())
    assert transport_distance(prob, 0.2, 0.7) == pytest.approx(0.5 * math.sqrt(2), rel=1e-12)


def test_distance_is_additive():
    prob = TwoPointProblem(Logarithmic(), shannon())
    whole = transport_distance(prob, 0.0, 1.0)
    parts = transport_distance(prob, 0.0, 0.3) + transport_distance(prob, 0.3, 1.0)
    assert whole == pytest.approx(parts, abs=2e-9)


def test_kappa_formula_against_arithmetic():
    prob = TwoPointProblem(Arithmetic(), shannon())
    assert kappa_k2(prob, 0.25) == pytest.approx(8 / 3, rel=1e-12)
    xs, ks = kappa_grid(prob, 11)
    assert len(xs) == 11 and min(ks) == pytest.approx(2.0)
    with pytest.raises(BoundaryError):
        kappa_k2(prob, 0.0)


def test_upper_bound_and_effectiveness():
    prob = TwoPointProblem(Arithmetic(), shannon())
    assert kappa_min_upper_bound(prob) == pytest.approx(4 * math.log(2), rel=1e-12)
    rep = effectiveness(prob, kappa_min=2.0)
    assert rep.efct == pytest.approx(1 / (2 * math.log(2)), rel=1e-12)


def test_constant_curvature_distance_matches_quadrature():
    prob = TwoPointProblem(TransportInformation(shannon()), shannon())
    for a, b in [(0.0, 1.0), (0.0, 0.5), (0.2, 0.9)]:
        assert constant_curvature_distance(prob, a, b) == pytest.approx(transport_distance(prob, a, b), abs=1e-8)


def test_asymmetric_energy_rejected():
    e = energy_from_config({"kind": "sum", "parts": ["shannon", {"kind": "linear", "V": [0, 1]}]})
    with pytest.raises(InvalidArgumentError):
        kappa_min_upper_bound(TwoPointProblem(Arithmetic(), e))
    with pytest.raises(InvalidArgumentError):
        TwoPointProblem(Arithmetic(), Linear([1.0, 2.0, 3.0]))
