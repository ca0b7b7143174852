import numpy as np
import pytest

from mfig.energies import Interaction, Linear, energy_from_config, shannon
from mfig.errors import InvalidArgumentError

CONFIGS = [
    "shannon",
    {"kind": "entropy", "U": "quadratic"},
    {"kind": "linear", "V": [0.3, -1.0, 2.0]},
    {"kind": "interaction", "W": [[1.0, 0.5, 0.0], [0.5, -2.0, 1.0], [0.0, 1.0, 0.3]]},
    {"kind": "sum", "parts": ["shannon", {"kind": "linear", "V": [1.0, 0.0, -1.0]}]},
]


@pytest.mark.parametrize("cfg", CONFIGS, ids=str)
def test_derivatives_match_finite_differences(cfg):
    e = energy_from_config(cfg)
    p = np.array([0.2, 0.5, 0.3])
    h = 1e-6
    eye = np.eye(3)
    fd_grad = np.array([(e.value(p + h * eye[k]) - e.value(p - h * eye[k])) / (2 * h) for k in range(3)])
    fd_hess = np.array([(e.gradient(p + h * eye[k]) - e.gradient(p - h * eye[k])) / (2 * h) for k in range(3)])
    assert np.allclose(e.gradient(p), fd_grad, atol=1e-7)
    assert np.allclose(e.hessian(p), fd_hess, atol=1e-6)


@pytest.mark.parametrize("cfg", CONFIGS[1:], ids=str)
def test_config_round_trip(cfg):
    e = energy_from_config(cfg)
    again = energy_from_config(e.to_config())
    p = np.array([0.1, 0.6, 0.3])
    assert again.value(p) == e.value(p)


def test_shannon_boundary_value_is_finite():
    assert shannon().value(np.array([0.0, 1.0])) == 0.0


def test_separability():
    assert shannon().is_separable() and Linear([1.0, 2.0]).is_separable()
    assert Interaction(np.diag([1.0, 2.0])).is_separable()
    assert not Interaction([[0.0, 1.0], [1.0, 0.0]]).is_separable()


@pytest.mark.parametrize("cfg", [
    "entropy-ish", {"V": [1]}, {"kind": "linear"}, {"kind": "interaction", "W": [[0, 1], [2, 0]]},
    {"kind": "entropy", "U": "renyi"}, {"kind": "cubic"},
])
def test_bad_configs(cfg):
    with pytest.raises(InvalidArgumentError):
        energy_from_config(cfg)
