import math

import numpy as np
import pytest

from mfig.energies import Interaction, Linear, shannon
from mfig.errors import BoundaryError, InvalidArgumentError
from mfig.gamma import (build_context, gamma1, gamma2, gamma2_closed_form, gamma2_compatible,
                        gamma2_laplacian, gamma2_matrix, gamma_batch, quadratic_form,
                        tensor_identity_check, theta_laplacian)
from mfig.means import Arithmetic, Logarithmic

from conftest import BUILTIN_MEANS, C4, K2, K3, Q3, interior_point, random_energy


def test_gamma1_is_edge_sum():
    ctx = build_context(K2, Arithmetic(), shannon(), [0.5, 0.5])
    assert gamma1(ctx, [1.0, 0.0]) == pytest.approx(0.5)


def test_fisher_information_two_point():
    ctx = build_context(K2, Logarithmic(), shannon(), [0.9, 0.1])
    assert gamma1(ctx, ctx.grad) == pytest.approx(0.8 * math.log(9.0), rel=1e-12)


def test_gamma1_matches_theta_laplacian(rng):
    p = interior_point(8, rng)
    ctx = build_context(Q3, Logarithmic(), shannon(), p)
    f = rng.standard_normal(8)
    assert gamma1(ctx, f) == pytest.approx(f @ theta_laplacian(ctx) @ f, rel=1e-12)


@pytest.mark.parametrize("graph", [K3, C4], ids=["K3", "C4"])
@pytest.mark.parametrize("kind", ["linear", "interaction", "shannon"])
def test_formulas_agree(graph, kind, rng):
    for m in BUILTIN_MEANS:
        e = random_energy(kind, graph.n, rng)
        p = interior_point(graph.n, rng)
        f = rng.standard_normal(graph.n)
        ctx = build_context(graph, m, e, p)
        ref = gamma2(ctx, f, "F1")
        scale = max(1.0, abs(ref))
        assert abs(gamma2(ctx, f, "F2") - ref) <= 1e-9 * scale
        assert abs(gamma2(ctx, f, "F3") - ref) <= 1e-9 * scale
        assert abs(quadratic_form(gamma2_matrix(ctx), f) - ref) <= 1e-9 * scale
        assert abs(f @ gamma2_laplacian(ctx) @ f - ref) <= 1e-9 * scale
        assert abs(gamma2_closed_form(ctx, f) - ref) <= 1e-10 * scale


def test_proof_variant_differs(rng):
    # This regrouping of F2 loses terms; it exists only so that fact stays visible.
    ctx = build_context(C4, Logarithmic(), shannon(), interior_point(4, rng))
    f = rng.standard_normal(4)
    assert abs(gamma2(ctx, f, "F2-alt") - gamma2(ctx, f, "F1")) > 1e-6


def test_compatible_closed_form(rng):
    ctx = build_context(C4, Logarithmic(), shannon(), interior_point(4, rng))
    f = rng.standard_normal(4)
    assert gamma2_compatible(ctx, f) == pytest.approx(gamma2(ctx, f, "F1"), rel=1e-10)


def test_invariant_under_constant_shift(rng):
    ctx = build_context(K3, Arithmetic(), Linear([0.2, -1.0, 0.5]), interior_point(3, rng))
    f = rng.standard_normal(3)
    assert gamma2(ctx, f + 3.0) == pytest.approx(gamma2(ctx, f), rel=1e-12)
    assert gamma1(ctx, f + 3.0) == pytest.approx(gamma1(ctx, f), rel=1e-12)


def test_matrix_is_symmetric_with_zero_diagonal(rng):
    w = rng.standard_normal((4, 4))
    a = gamma2_matrix(build_context(C4, Logarithmic(), Interaction(w + w.T), interior_point(4, rng)))
    assert np.array_equal(a, a.T) and np.all(np.diag(a) == 0.0)


def test_batch_matches_scalar(rng):
    ctx = build_context(Q3, Logarithmic(), shannon(), interior_point(8, rng))
    F = rng.standard_normal((20, 8))
    g1, g2 = gamma_batch(ctx, F)
    for k in range(20):
        assert g1[k] == pytest.approx(gamma1(ctx, F[k]), rel=1e-12)
        assert g2[k] == pytest.approx(gamma2(ctx, F[k], "F1"), rel=1e-10, abs=1e-12)


def test_tensor_identities(rng):
    for n in (2, 3, 5):
        rep = tensor_identity_check(rng.standard_normal((n, n, n)), rng.standard_normal((n, n, n)),
                                    rng.standard_normal(n))
        assert rep.passed, rep


def test_input_validation():
    with pytest.raises(BoundaryError):
        build_context(K2, Arithmetic(), shannon(), [1.0, 0.0])
    with pytest.raises(InvalidArgumentError):
        build_context(K2, Arithmetic(), shannon(), [0.3, 0.3])
    with pytest.raises(InvalidArgumentError):
        build_context(K3, Arithmetic(), Linear([1.0, 2.0]), [0.2, 0.3, 0.5])
    ctx = build_context(K2, Arithmetic(), shannon(), [0.5, 0.5])
    with pytest.raises(InvalidArgumentError):
        gamma2(ctx, [1.0, 2.0], "F9")
