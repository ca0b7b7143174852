import math

import numpy as np
import pytest

from mfig.dynamics import (costa_check, costa_constant, costa_identity_residual, costa_oracle_k2,
                           de_bruijn_check, dissipation_certificate, equilibrium, fisher_information,
                           fisher_information_closed_form, gradient_flow, heat_flow,
                           heat_reduction_residual, log_sobolev_check, project_simplex)
from mfig.energies import Interaction, Linear, energy_from_config, shannon
from mfig.errors import PreconditionError
from mfig.gamma import build_context
from mfig.means import Arithmetic, Logarithmic

from conftest import C4, K2, K3, interior_point


def test_project_simplex():
    q = project_simplex(np.array([0.8, 0.6, -0.5]))
    assert np.allclose(q, [0.6, 0.4, 0.0])


def test_equilibria():
    assert np.allclose(equilibrium(shannon(), 4), 0.25)
    assert np.allclose(equilibrium(Linear([0.0, 1.0, 2.0]), 3), [1.0, 0.0, 0.0], atol=1e-9)
    tilted = energy_from_config({"kind": "sum", "parts": ["shannon", {"kind": "linear", "V": [0.0, math.log(2.0)]}]})
    assert np.allclose(equilibrium(tilted, 2), [2 / 3, 1 / 3], atol=1e-9)


def test_fisher_closed_form(rng):
    for e in (shannon(), Linear([0.0, 1.0, -1.0, 2.0]), Interaction(np.eye(4))):
        ctx = build_context(C4, Logarithmic(), e, interior_point(4, rng))
        assert fisher_information_closed_form(ctx) == pytest.approx(fisher_information(ctx), rel=1e-12)


def test_heat_reduction(rng):
    assert heat_reduction_residual(C4, shannon(), interior_point(4, rng)) < 1e-14


def test_gradient_flow_decreases_energy():
    tr = gradient_flow(K3, Logarithmic(), shannon(), [0.7, 0.2, 0.1], 1.0, 1e-2)
    assert np.all(np.diff(tr.E) < 0)
    assert np.allclose(tr.states.sum(axis=1), 1.0)


def test_de_bruijn_second_order():
    coarse = de_bruijn_check(gradient_flow(K2, Logarithmic(), shannon(), [0.9, 0.1], 0.5, 2e-2))
    fine = de_bruijn_check(gradient_flow(K2, Logarithmic(), shannon(), [0.9, 0.1], 0.5, 1e-2))
    assert fine.first_order < coarse.first_order / 3
    assert fine.second_order < coarse.second_order / 3


def test_dissipation_rejects_too_large_rate():
    tr = gradient_flow(K2, Logarithmic(), shannon(), [0.9, 0.1], 1.0, 1e-2)
    assert dissipation_certificate(tr, 2.0).passed
    assert not dissipation_certificate(tr, 3.0).passed


def test_lsi_precondition():
    with pytest.raises(PreconditionError):
        log_sobolev_check(K2, Arithmetic(), Linear([0.0, 1.0]), 0.0)


def test_lsi_detects_wrong_constant():
    assert log_sobolev_check(K2, Logarithmic(), shannon(), 2.0, samples=500).passed
    assert not log_sobolev_check(K2, Logarithmic(), shannon(), 4.0, samples=500).passed


def test_costa_oracle_and_search_agree():
    m_inv, x = costa_oracle_k2()
    res, _ = costa_constant(K2, shannon())
    assert res.value == pytest.approx(m_inv, abs=1e-6)
    assert min(res.argmin) == pytest.approx(x, abs=1e-3)


def test_costa_identity(rng):
    fd, minus_g2 = costa_identity_residual(K3, shannon(), interior_point(3, rng))
    assert fd == pytest.approx(minus_g2, rel=1e-6)


def test_heat_flow_factor():
    a = heat_flow(K2, shannon(), [0.9, 0.1], 0.1, 1e-3, factor=1.0)
    b = heat_flow(K2, shannon(), [0.9, 0.1], 0.2, 1e-3, factor=0.5)
    assert np.allclose(a.states[-1], b.states[-1], atol=1e-12)


def test_costa_report_csv_rows():
    rep = costa_check(K2, shannon(), [0.9, 0.1], t_end=0.05, step=1e-3)
    rows = list(rep.trace.rows())
    assert len(rows) == 51 and len(rows[0]) == 7
