"""Classical fixed-step fourth-order Runge-Kutta stepping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BoundaryError, InvalidArgumentError


def rk4_step(rhs: Callable[[np.ndarray], np.ndarray], y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    stopped: bool
    reason: str = ""


def step_count(t_end: float, step: float) -> int:
    if not step > 0.0:
        raise InvalidArgumentError(f"step must be positive, got {step}")
    if t_end < 0.0:
        raise InvalidArgumentError(f"t_end must be nonnegative, got {t_end}")
    k = int(round(t_end / step))
    if abs(k * step - t_end) > 1e-9 * max(1.0, t_end):
        raise InvalidArgumentError(f"t_end = {t_end} is not a whole number of steps of {step}")
    return k


def integrate_fixed(rhs, y0, t_end: float, step: float,
                    stop: Callable[[np.ndarray], str | None] | None = None) -> Trajectory:
    """March ``y' = rhs(y)`` from 0 to ``t_end``.

    ``t_end`` must be a whole number of steps.  ``stop(y)`` may return a
    reason string, which truncates the trajectory after that state.  A
    ``BoundaryError`` raised by ``rhs`` inside a step (an intermediate stage
    left the domain) truncates before that step.
    """
    k = step_count(t_end, step)
    y = np.array(y0, dtype=float)
    times = [0.0]
    states = [y]
    for m in range(1, k + 1):
        try:
            y = rk4_step(rhs, y, step)
        except BoundaryError:
            return Trajectory(np.array(times), np.array(states), True, "boundary")
        if not np.all(np.isfinite(y)):
            return Trajectory(np.array(times), np.array(states), True, "non-finite state")
        times.append(m * step)
        states.append(y)
        if stop is not None:
            why = stop(y)
            if why:
                return Trajectory(np.array(times), np.array(states), True, why)
    return Trajectory(np.array(times), np.array(states), False)
