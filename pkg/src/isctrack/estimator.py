"""Extended Kalman filter over the target state.

The measurement map (range, Doppler, stacked echo) is nonlinear in the target
state, so each update linearizes it at the predicted state with the beam that
was actually transmitted that slot.  The Jacobian is fully analytic, including
the echo rows, which combine the per-axis array-phase derivatives with the
inverse-square path-loss derivative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dynamics import TransitionModel
from .rf import (ArrayGeometry, Measurement, RfConstants, direction_cosines,
                 measurement_mean, steering_vector)


class NumericalFailureError(RuntimeError):
    """Innovation covariance could not be factorized even after jitter."""


@dataclass
class EstimatorState:
    """Posterior for the current slot plus the one-step-ahead prior.

    Covariances are kept symmetric by explicit symmetrization after every
    update; they are mean-square-error matrices of the respective estimates.
    """

    s_hat: np.ndarray
    M_hat: np.ndarray
    s_check: np.ndarray
    M_check: np.ndarray


def _sym(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def init_state(s_hat, M_hat, model: TransitionModel) -> EstimatorState:
    """Seed the filter from an externally supplied estimate and covariance."""
    s_hat = np.asarray(s_hat, dtype=float)
    M_hat = _sym(np.asarray(M_hat, dtype=float))
    return EstimatorState(
        s_hat=s_hat,
        M_hat=M_hat,
        s_check=model.A @ s_hat,
        M_check=_sym(model.A @ M_hat @ model.A.T + model.Qs),
    )


def predict_states(s_hat, A: np.ndarray, horizon: int) -> np.ndarray:
    """Open-loop predictions ``A^i s_hat`` for i = 1..horizon, stacked by row."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    out = np.empty((horizon, 4))
    s = np.asarray(s_hat, dtype=float)
    for i in range(horizon):
        s = A @ s
        out[i] = s
    return out


def _axis_index_vectors(mx: int, my: int) -> tuple[np.ndarray, np.ndarray]:
    # x-major flattening: element (m_x, m_y) sits at m_x * my + m_y
    gx = np.kron(np.arange(mx, dtype=float), np.ones(my))
    gy = np.kron(np.ones(mx), np.arange(my, dtype=float))
    return gx, gy


def measurement_jacobian(s_check, uav, w: np.ndarray, k: RfConstants,
                         geom: ArrayGeometry) -> np.ndarray:
    """Analytic (2 + 2*m_r) x 4 Jacobian of the measurement map.

    Evaluated at the (predicted) target state ``s_check`` for a fixed UAV
    state and transmitted beam.  Echo rows are zero in the velocity columns;
    range and Doppler rows follow from differentiating the slant range and
    the radial-velocity ratio.
    """
    s_check = np.asarray(s_check, dtype=float)
    uav = np.asarray(uav, dtype=float)
    dp = uav[:2] - s_check[:2]
    dv = uav[2:] - s_check[2:]
    cx, cy, d = direction_cosines(uav[:2], s_check[:2], k.altitude)

    m_r = geom.m_r
    F = np.zeros((2 + 2 * m_r, 4))

    # Range row: moving the target toward the UAV shrinks the slant range.
    F[0, 0] = -dp[0] / d
    F[0, 1] = -dp[1] / d

    # Doppler row.
    radial = dp @ dv
    scale = 2.0 * k.fc / (k.c * d ** 3)
    F[1, 0] = scale * (dv[0] * d * d - radial * dp[0])
    F[1, 1] = scale * (dv[1] * d * d - radial * dp[1])
    F[1, 2] = 2.0 * k.fc * dp[0] / (k.c * d)
    F[1, 3] = 2.0 * k.fc * dp[1] / (k.c * d)

    # Echo rows: d/dp of  mf_gain * sqrt(reflect) * psi / d^2,
    # psi = b * (a^H w).
    a_t = steering_vector(uav[:2], s_check[:2], geom.mx_t, geom.my_t, k.altitude)
    b_t = steering_vector(uav[:2], s_check[:2], geom.mx_r, geom.my_r, k.altitude)
    aw = np.vdot(a_t, w)
    psi = b_t * aw

    # Direction-cosine derivatives wrt the target position.
    d3 = d ** 3
    dcx_dx = -(dp[1] ** 2 + k.altitude ** 2) / d3
    dcy_dx = dp[0] * dp[1] / d3
    dcx_dy = dp[0] * dp[1] / d3
    dcy_dy = -(dp[0] ** 2 + k.altitude ** 2) / d3

    gx_t, gy_t = _axis_index_vectors(geom.mx_t, geom.my_t)
    gx_r, gy_r = _axis_index_vectors(geom.mx_r, geom.my_r)

    front = k.mf_gain * np.sqrt(k.reflect_gain)
    for col, (dcx, dcy) in enumerate(((dcx_dx, dcy_dx), (dcx_dy, dcy_dy))):
        db = 1j * np.pi * b_t * (gx_r * dcx + gy_r * dcy)
        da = 1j * np.pi * a_t * (gx_t * dcx + gy_t * dcy)
        dpsi = db * aw + b_t * np.vdot(da, w)
        dpos = dp[col]
        dv_echo = front * (dpsi / d ** 2 + 2.0 * dpos * psi / d ** 4)
        F[2:2 + m_r, col] = dv_echo.real
        F[2 + m_r:, col] = dv_echo.imag

    return F


def ekf_step(prior: EstimatorState, m: Measurement, model: TransitionModel,
             uav, w: np.ndarray, k: RfConstants,
             geom: ArrayGeometry) -> EstimatorState:
    """One predict/update cycle given the slot's measurement.

    Uses the prior half of ``prior`` (prediction for this slot), produces the
    posterior for this slot plus the prior for the next one.  The innovation
    is the full nonlinear residual; a single trace-scaled jitter retry guards
    the innovation-covariance factorization.
    """
    s_check = prior.s_check
    M_check = prior.M_check

    F = measurement_jacobian(s_check, uav, w, k, geom)
    S = F @ M_check @ F.T + np.diag(m.qm_diag)
    S = _sym(S)
    try:
        cf = scipy.linalg.cho_factor(S, lower=True)
    except scipy.linalg.LinAlgError:
        S = S + 1e-9 * np.trace(S) * np.eye(S.shape[0])
        try:
            cf = scipy.linalg.cho_factor(S, lower=True)
        except scipy.linalg.LinAlgError as exc:
            raise NumericalFailureError("innovation covariance is singular") from exc

    K = scipy.linalg.cho_solve(cf, F @ M_check).T
    innovation = m.as_vector() - measurement_mean(s_check, uav, w, k, geom)
    s_hat = s_check + K @ innovation
    M_hat = _sym((np.eye(4) - K @ F) @ M_check)

    return EstimatorState(
        s_hat=s_hat,
        M_hat=M_hat,
        s_check=model.A @ s_hat,
        M_check=_sym(model.A @ M_hat @ model.A.T + model.Qs),
    )
