"""Discrete-time kinematics for the UAV, the target, and their tracking error.

States are flat 4-vectors ``[px, py, vx, vy]`` (m, m/s).  The UAV is a
deterministic double integrator driven by a 2-D acceleration command; the
target follows a constant-velocity model disturbed by zero-mean Gaussian
process noise.  Subtracting the two gives a linear system in the tracking
error, which is what the controllers regulate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TransitionModel:
    """Shared state-transition data for one slot of duration ``dt``.

    Attributes:
        A: 4x4 state matrix (position rows pick up velocity * dt).
        B: 4x2 input matrix (dt^2/2 on position, dt on velocity).
        dt: slot duration in seconds.
        Qs: 4x4 diagonal process-noise covariance for the target.
    """

    A: np.ndarray
    B: np.ndarray
    dt: float
    Qs: np.ndarray


def build_transition(dt: float, sigmas) -> TransitionModel:
    """Build the slot transition matrices for a given slot duration.

    Args:
        dt: slot duration in seconds, must be positive.
        sigmas: four process-noise variances (px, py, vx, vy).

    Raises:
        ValueError: if ``dt`` is not positive or any variance is negative.
    """
    if dt <= 0.0:
        raise ValueError(f"slot duration must be positive, got {dt}")
    sigmas = np.asarray(sigmas, dtype=float)
    if sigmas.shape != (4,):
        raise ValueError("expected exactly four process-noise variances")
    if np.any(sigmas < 0.0):
        raise ValueError("process-noise variances must be nonnegative")

    A = np.eye(4)
    A[0, 2] = dt
    A[1, 3] = dt
    B = np.array([
        [0.5 * dt * dt, 0.0],
        [0.0, 0.5 * dt * dt],
        [dt, 0.0],
        [0.0, dt],
    ])
    return TransitionModel(A=A, B=B, dt=float(dt), Qs=np.diag(sigmas))


def step_uav(s: np.ndarray, u, model: TransitionModel) -> np.ndarray:
    """Deterministic UAV update: ``A s + B u``."""
    return model.A @ np.asarray(s, dtype=float) + model.B @ np.asarray(u, dtype=float)


def step_target(s: np.ndarray, model: TransitionModel, noise=None,
                rng: np.random.Generator | None = None) -> np.ndarray:
    """Constant-velocity target update: ``A s + n`` with ``n ~ N(0, Qs)``.

    Pass ``noise`` explicitly for deterministic replay, or ``rng`` to sample
    it.  With neither, the step is noiseless.
    """
    s = np.asarray(s, dtype=float)
    if noise is None:
        if rng is not None:
            noise = rng.normal(size=4) * np.sqrt(np.diag(model.Qs))
        else:
            noise = np.zeros(4)
    return model.A @ s + np.asarray(noise, dtype=float)


def step_error(e: np.ndarray, u, noise, model: TransitionModel) -> np.ndarray:
    """Tracking-error update: ``A e + B u - n``.

    Consistent by construction with ``step_uav(s_u, u) - step_target(s_t, n)``
    when ``e = s_u - s_t``.
    """
    e = np.asarray(e, dtype=float)
    return (model.A @ e + model.B @ np.asarray(u, dtype=float)
            - np.asarray(noise, dtype=float))
