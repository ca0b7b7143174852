"""Mean functions theta(s, t) used as edge weights of the transport metric.

The built-in means are positively 1-homogeneous and are written as

    theta(s, t) = m * g(z),   m = (s + t) / 2,   z = (s - t) / (s + t),

with ``g`` even in ``z``.  This keeps the removable singularity at ``s = t``
and the near-diagonal cancellation out of the arithmetic: the partial
derivative is ``d theta / ds = g(z) / 2 + (1 - z) g'(z) / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energies import Energy, restrict_two_point
from .errors import DomainError, InvalidArgumentError, SingularMeanError

ANALYTIC = "analytic"
FINITE_DIFFERENCE = "finite-difference"

# Taylor coefficients of z / atanh(z) and its derivative, in powers of z**2.
_G_LOG = (1.0, -1 / 3, -4 / 45, -44 / 945, -428 / 14175, -10196 / 467775, -10719068 / 638512875)
_DG_LOG = (-2 / 3, -16 / 45, -88 / 315, -3424 / 14175, -20392 / 93555, -42876272 / 212837625)
_SERIES_Z = 0.05


def _check_positive(s, t):
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(~(s > 0.0)) or np.any(~(t > 0.0)):
        raise DomainError("mean functions need strictly positive arguments")
    return s, t


def _normalized(s, t):
    tot = s + t
    x = s / tot
    xc = t / tot
    return tot, x, xc


class Mean:
    """Symmetric positive weight function ``theta(s, t)``.

    Subclasses implement ``_value`` and, for analytic derivatives, ``_d1``
    (the partial in the first argument).  All methods accept scalars or
    broadcastable arrays.
    """

    name = "mean"
    homogeneous = False

    def __init__(self, derivative_mode: str = ANALYTIC):
        if derivative_mode not in (ANALYTIC, FINITE_DIFFERENCE):
            raise InvalidArgumentError(f"unknown derivative mode {derivative_mode!r}")
        self.derivative_mode = derivative_mode

    def __call__(self, s, t):
        s, t = _check_positive(s, t)
        return self._value(s, t)

    def d1(self, s, t):
        """Partial derivative in the first argument."""
        s, t = _check_positive(s, t)
        if self.derivative_mode == FINITE_DIFFERENCE or not self._has_analytic():
            return self._fd_d1(s, t)
        return self._d1(s, t)

    def d2(self, s, t):
        return self.d1(t, s)

    def _has_analytic(self):
        return True

    def _fd_d1(self, s, t):
        h = 1e-6 * np.maximum(1.0, s)
        # stay inside the positive quadrant for tiny s
        h = np.minimum(h, 0.5 * s)
        return (self._value(s + h, t) - self._value(s - h, t)) / (2.0 * h)

    def _value(self, s, t):
        raise NotImplementedError

    def _d1(self, s, t):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"


class HomogeneousMean(Mean):
    homogeneous = True

    def _g(self, x, xc):
        raise NotImplementedError

    def _dg(self, x, xc):
        raise NotImplementedError

    def _value(self, s, t):
        tot, x, xc = _normalized(s, t)
        return 0.5 * tot * self._g(x, xc)

    def _d1(self, s, t):
        _, x, xc = _normalized(s, t)
        # 1 - z == 2 * xc
        return 0.5 * self._g(x, xc) + xc * self._dg(x, xc)


class Arithmetic(HomogeneousMean):
    name = "arithmetic"

    def _g(self, x, xc):
        return np.ones(np.broadcast(x, xc).shape)

    def _dg(self, x, xc):
        return np.zeros(np.broadcast(x, xc).shape)


class Geometric(HomogeneousMean):
    name = "geometric"

    def _g(self, x, xc):
        return 2.0 * np.sqrt(x * xc)

    def _dg(self, x, xc):
        return -(x - xc) / (2.0 * np.sqrt(x * xc))


def _poly(coeffs, z2):
    out = np.zeros_like(z2)
    for c in reversed(coeffs):
        out = out * z2 + c
    return out


def _g_log(x, xc):
    x, xc = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(xc, dtype=float))
    z = x - xc
    small = np.abs(z) < _SERIES_Z
    with np.errstate(divide="ignore", invalid="ignore"):
        # 2 atanh(z) == log(x / xc)
        direct = 2.0 * z / (np.log(x) - np.log(xc))
    return np.where(small, _poly(_G_LOG, z * z), direct)


def _dg_log(x, xc):
    x, xc = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(xc, dtype=float))
    z = x - xc
    small = np.abs(z) < _SERIES_Z
    with np.errstate(divide="ignore", invalid="ignore"):
        a = 0.5 * (np.log(x) - np.log(xc))
        # 1 - z^2 == 4 x xc
        direct = (a - z / (4.0 * x * xc)) / a**2
    return np.where(small, z * _poly(_DG_LOG, z * z), direct)


class Logarithmic(HomogeneousMean):
    """``(s - t) / (log s - log t)``, equal to ``s`` on the diagonal."""

    name = "logarithmic"

    def _g(self, x, xc):
        return _g_log(x, xc)

    def _dg(self, x, xc):
        return _dg_log(x, xc)


class SpectralGraph(HomogeneousMean):
    """``(sqrt s - sqrt t)^2 / (log s - log t)^2``, equal to ``s / 4`` on the diagonal."""

    name = "spectral"

    def _g(self, x, xc):
        gl = _g_log(x, xc)
        r = 2.0 * np.sqrt(x * xc)
        return gl**2 / (2.0 * (1.0 + r))

    def _dg(self, x, xc):
        gl = _g_log(x, xc)
        dgl = _dg_log(x, xc)
        r = 2.0 * np.sqrt(x * xc)
        dr = -(x - xc) / r
        den = 2.0 * (1.0 + r)
        return 2.0 * gl * dgl / den - gl**2 * 2.0 * dr / den**2


# Gauss-Legendre rule on [0, 1] for the near-diagonal profile integrals.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W
_TIM_CENTER = 0.1


class TransportInformation(HomogeneousMean):
    """Mean that makes the two-point curvature constant for a given energy.

    On the simplex ``theta = 2C (phi(x) - phi(1/2)) / phi'(x)^2`` with
    ``phi(x) = E(x, 1 - x)``; off the simplex it is extended by positive
    1-homogeneity.  Close to ``x = 1/2`` numerator and denominator are
    rewritten through ``phi''`` integrals, which removes both the 0/0 and the
    cancellation:

        phi(x) - phi(1/2) = u^2 int_0^1 (1 - r) phi''(1/2 + u r) dr
        phi'(x)           = u   int_0^1 phi''(1/2 + u r) dr,     u = x - 1/2.

    The rewrite uses ``phi'(1/2) = 0``, i.e. a symmetric energy.
    """

    name = "tim"

    def __init__(self, energy: Energy, constant: float | None = None, check: bool = True):
        super().__init__(ANALYTIC)
        self.energy = energy
        phi_half, dphi_half, d2phi_half = restrict_two_point(energy, 0.5)
        if not abs(d2phi_half) > 1e-14:
            raise SingularMeanError("energy has vanishing second derivative at (1/2, 1/2)")
        if check:
            xs = np.linspace(0.01, 0.49, 25)
            for x in xs:
                a = energy.value(np.array([x, 1 - x]))
                b = energy.value(np.array([1 - x, x]))
                if abs(a - b) > 1e-12 * max(1.0, abs(a)):
                    raise InvalidArgumentError("transport information mean needs a symmetric energy")
        self.phi_half = phi_half
        self.d2phi_half = d2phi_half
        if constant is None:
            constant = 8.0 * (energy.value(np.array([0.0, 1.0])) - phi_half)
        constant = float(constant)
        if not constant > 0.0:
            raise InvalidArgumentError(f"transport information constant must be positive, got {constant}")
        self.constant = constant

    def __repr__(self):
        return f"TransportInformation(constant={self.constant!r})"

    def _phi2(self, y, yc):
        h = self.energy.hessian(np.array([y, yc]))
        return h[0, 0] - 2.0 * h[0, 1] + h[1, 1]

    def _profile_center(self, x):
        u = x - 0.5
        d2 = np.array([self._phi2(0.5 + u * r, 0.5 - u * r) for r in _GL_X])
        num = np.sum(_GL_W * (1.0 - _GL_X) * d2)
        den = np.sum(_GL_W * d2)
        return 2.0 * self.constant * num / den**2

    def _profile_direct(self, x, xc):
        phi, dphi, _ = restrict_two_point(self.energy, x, xc)
        return 2.0 * self.constant * (phi - self.phi_half) / dphi**2

    def profile(self, x: float, xc: float | None = None) -> float:
        """``theta(x, 1 - x)`` on the simplex."""
        xc = 1.0 - x if xc is None else xc
        if abs(x - 0.5) <= _TIM_CENTER:
            return self._profile_center(x)
        return self._profile_direct(x, xc)

    def profile_derivative(self, x: float, xc: float | None = None) -> float:
        """``d/dx theta(x, 1 - x)``."""
        xc = 1.0 - x if xc is None else xc
        if abs(x - 0.5) <= _TIM_CENTER:
            h = 1e-5
            return (self._profile_center(x + h) - self._profile_center(x - h)) / (2.0 * h)
        phi, dphi, d2phi = restrict_two_point(self.energy, x, xc)
        prof = 2.0 * self.constant * (phi - self.phi_half) / dphi**2
        return (2.0 * self.constant - 2.0 * prof * d2phi) / dphi

    def _g(self, x, xc):
        x, xc = np.broadcast_arrays(np.asarray(x, float), np.asarray(xc, float))
        out = np.array([2.0 * self.profile(a, b) for a, b in zip(x.ravel(), xc.ravel())])
        return out.reshape(x.shape)

    def _dg(self, x, xc):
        x, xc = np.broadcast_arrays(np.asarray(x, float), np.asarray(xc, float))
        out = np.array([self.profile_derivative(a, b) for a, b in zip(x.ravel(), xc.ravel())])
        return out.reshape(x.shape)


class Custom(Mean):
    """User-supplied ``theta``; derivatives by central differences unless given."""

    name = "custom"

    def __init__(self, fn, d1=None, homogeneous: bool = False, name: str = "custom",
                 derivative_mode: str | None = None):
        if derivative_mode is None:
            derivative_mode = ANALYTIC if d1 is not None else FINITE_DIFFERENCE
        super().__init__(derivative_mode)
        self._fn = fn
        self._d1_fn = d1
        self.homogeneous = homogeneous
        self.name = name

    def _has_analytic(self):
        return self._d1_fn is not None

    def _value(self, s, t):
        return np.asarray(self._fn(s, t), dtype=float)

    def _d1(self, s, t):
        return np.asarray(self._d1_fn(s, t), dtype=float)


def compatible_mean(energy: Energy) -> Mean:
    """Mean with ``theta(s, t) (U'(s) - U'(t)) = s - t`` for an entropy energy.

    For Shannon entropy this is the logarithmic mean.
    """
    from .energies import Entropy

    if not isinstance(energy, Entropy):
        raise InvalidArgumentError("the compatible mean is defined for entropy energies only")
    U = energy.U
    if U.name == "shannon":
        return Logarithmic()

    def fn(s, t):
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        diag = np.abs(s - t) < 1e-9 * np.maximum(s, t)
        out = np.empty(s.shape)
        out[diag] = 1.0 / U.d2U(0.5 * (s[diag] + t[diag]))
        nd = ~diag
        out[nd] = (s[nd] - t[nd]) / (U.dU(s[nd]) - U.dU(t[nd]))
        return out

    return Custom(fn, name=f"compatible[{U.name}]")


# -- module-level API ---------------------------------------------------------

def theta(m: Mean, s, t):
    out = m(s, t)
    return float(out) if np.ndim(out) == 0 else out


def theta_partial(m: Mean, s, t, which: str = "first"):
    if which == "first":
        out = m.d1(s, t)
    elif which == "second":
        out = m.d2(s, t)
    else:
        raise InvalidArgumentError(f"which must be 'first' or 'second', got {which!r}")
    return float(out) if np.ndim(out) == 0 else out


def transport_information_mean(e: Energy, c: float | None = None) -> TransportInformation:
    return TransportInformation(e, c)


BUILTIN = {
    "arithmetic": Arithmetic,
    "geometric": Geometric,
    "logarithmic": Logarithmic,
    "spectral": SpectralGraph,
}


def mean_from_name(name: str, energy: Energy | None = None) -> Mean:
    """Resolve ``arithmetic | geometric | logarithmic | spectral | tim[:C=<float>]``."""
    key = name.strip().lower()
    if key in BUILTIN:
        return BUILTIN[key]()
    if key == "tim" or key.startswith("tim:"):
        if energy is None:
            raise InvalidArgumentError("the transport information mean needs an energy")
        c = None
        if key.startswith("tim:"):
            arg = key[4:]
            if not arg.startswith("c="):
                raise InvalidArgumentError(f"bad mean spec {name!r}; expected 'tim:C=<float>'")
            try:
                c = float(arg[2:])
            except ValueError:
                raise InvalidArgumentError(f"bad constant in mean spec {name!r}") from None
        return TransportInformation(energy, c)
    raise InvalidArgumentError(f"unknown mean {name!r}")


@dataclass
class ErbarMaasReport:
    samples: int
    worst_euler: float
    worst_violation: float
    passed: bool


def check_erbar_maas(m: Mean, samples: int = 10000, seed: int = 0,
                     euler_tol: float = 1e-9, tol: float = 1e-10) -> ErbarMaasReport:
    """Sample the Euler identity and ``s d_u theta(u,v) + t d_v theta(u,v) >= theta(s,t)``.

    ``worst_euler`` is the largest relative Euler defect; ``worst_violation``
    the largest amount by which the inequality fails (<= 0 when it holds).
    """
    rng = np.random.default_rng(seed)
    s, t, u, v = (1.0 - rng.random(samples) for _ in range(4))
    th_st = m(s, t)
    euler = np.abs(s * m.d1(s, t) + t * m.d2(s, t) - th_st) / th_st
    lhs = s * m.d1(u, v) + t * m.d2(u, v)
    violation = (th_st - lhs) / np.maximum(1.0, th_st)
    worst_euler = float(np.max(euler))
    worst_violation = float(np.max(violation))
    return ErbarMaasReport(samples, worst_euler, worst_violation,
                           worst_euler <= euler_tol and worst_violation <= tol)


def is_concave_sample(m: Mean, samples: int = 2000, seed: int = 0) -> bool:
    """Midpoint concavity on random pairs of points in (0, 1]^2."""
    rng = np.random.default_rng(seed)
    a = 1.0 - rng.random((samples, 2))
    b = 1.0 - rng.random((samples, 2))
    mid = 0.5 * (a + b)
    lhs = m(mid[:, 0], mid[:, 1])
    rhs = 0.5 * (m(a[:, 0], a[:, 1]) + m(b[:, 0], b[:, 1]))
    return bool(np.all(lhs >= rhs - 1e-12 * np.maximum(1.0, rhs)))


__all__ = [
    "Mean", "Arithmetic", "Geometric", "Logarithmic", "SpectralGraph",
    "TransportInformation", "Custom", "compatible_mean", "theta", "theta_partial",
    "transport_information_mean", "mean_from_name", "check_erbar_maas",
    "ErbarMaasReport", "ANALYTIC", "FINITE_DIFFERENCE",
]
