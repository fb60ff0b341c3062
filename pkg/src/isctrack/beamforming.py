"""Closed-form transmit beamformers and per-slot feasibility quantities.

For a fixed UAV position the best beam is known in closed form in two dual
senses:

* sensing-centric: maximize power onto the predicted target subject to the
  downlink rate floor and the power budget;
* communication-centric: maximize the downlink rate subject to an echo-power
  floor and the power budget.

Both optima live in the span of the two steering vectors: either a pure
matched beam when the other constraint is slack, or a two-term combination
that meets the binding constraint with equality at full power.  The two
feasibility verdicts coincide, and the sensing optimum admits a simple lower
bound that turns the receding-horizon problem convex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rf import ArrayGeometry, RfConstants, distance, steering_vector


class InfeasibleRateError(RuntimeError):
    """Rate floor unreachable even with full power matched to the user."""


class InfeasibleSensingError(RuntimeError):
    """Echo-power floor unreachable even with full power matched to the target."""


@dataclass
class FeasibilityInputs:
    """Per-slot data for the closed forms.

    Attributes:
        a_target: transmit steering vector toward the predicted target.
        a_gu: transmit steering vector toward the ground user.
        d_gu: UAV-to-user slant distance (m).
        gamma: full-power array gain, antennas times power budget.
        eta: rate floor translated to required user-directed gain per d_gu^2.
        gamma_d: required target-directed gain (expected d^4 times threshold).
        delta: 0 when the predicted target sits at the user position, else 1.
        rate_threshold: downlink rate floor (bps/Hz).
    """

    a_target: np.ndarray
    a_gu: np.ndarray
    d_gu: float
    gamma: float
    eta: float
    gamma_d: float
    delta: int
    rate_threshold: float

    @property
    def m_t(self) -> int:
        return self.a_target.shape[0]

    def cos_theta(self) -> float:
        """Alignment of the two steering directions, clamped to [0, 1]."""
        c = abs(np.vdot(self.a_target, self.a_gu)) / self.m_t
        return float(min(max(c, 0.0), 1.0))


def delta_indicator(p_pred, p_gu, tol: float = 1e-6) -> int:
    """1 unless the predicted target coincides with the user within ``tol`` m."""
    gap = np.linalg.norm(np.asarray(p_pred, dtype=float) - np.asarray(p_gu, dtype=float))
    return 0 if gap <= tol else 1


def inputs_for_geometry(p_uav, p_target_pred, p_gu, *, geom: ArrayGeometry,
                        k: RfConstants, power: float, rate_threshold: float,
                        gamma_d: float, position_tol: float = 1e-6) -> FeasibilityInputs:
    """Assemble the closed-form inputs from raw positions and constants."""
    a_t = steering_vector(p_uav, p_target_pred, geom.mx_t, geom.my_t, k.altitude)
    a_c = steering_vector(p_uav, p_gu, geom.mx_t, geom.my_t, k.altitude)
    eta = k.sigma_c2 * (2.0 ** rate_threshold - 1.0) / k.beta0
    return FeasibilityInputs(
        a_target=a_t,
        a_gu=a_c,
        d_gu=distance(p_uav, p_gu, k.altitude),
        gamma=geom.m_t * power,
        eta=eta,
        gamma_d=gamma_d,
        delta=delta_indicator(p_target_pred, p_gu, position_tol),
        rate_threshold=rate_threshold,
    )


def _unit_phase(z: complex) -> complex:
    mag = abs(z)
    return z / mag if mag > 1e-300 else 1.0 + 0.0j


def _two_term_beam(primary: np.ndarray, secondary: np.ndarray,
                   primary_power: float, total_power: float) -> np.ndarray:
    """Full-power beam placing ``primary_power`` onto the primary direction.

    The primary component pins the binding constraint with equality; the rest
    of the budget goes to the unit residual of the secondary direction, both
    phase-aligned so the secondary gain adds constructively.
    """
    m = primary.shape[0]
    v1 = primary / np.linalg.norm(primary)
    proj = np.vdot(v1, secondary)
    resid = secondary - proj * v1
    rnorm = np.linalg.norm(resid)
    k1 = np.sqrt(primary_power / m) * _unit_phase(proj)
    w = k1 * v1
    leftover = total_power - primary_power / m
    if rnorm > 1e-12 * np.sqrt(m) and leftover > 0.0:
        v2 = resid / rnorm
        w = w + np.sqrt(leftover) * _unit_phase(np.vdot(v2, secondary)) * v2
    return w


def sensing_centric_w(fi: FeasibilityInputs, power: float) -> np.ndarray:
    """Beam maximizing target-directed gain under the rate floor.

    Returns a matched beam toward the target when the rate floor is already
    slack at full power, otherwise the two-term combination that meets the
    rate floor with equality.  Either way ``||w||^2 == power``.

    Raises:
        InfeasibleRateError: the rate floor exceeds what full power matched
            to the user can deliver (eta * d_gu^2 > gamma).
    """
    need = fi.eta * fi.d_gu ** 2
    if need > fi.gamma:
        raise InfeasibleRateError(
            f"rate floor needs user gain {need:.3e} > budget {fi.gamma:.3e}")
    if power * abs(np.vdot(fi.a_gu, fi.a_target)) ** 2 >= fi.m_t * need:
        return np.sqrt(power) * fi.a_target / np.linalg.norm(fi.a_target)
    return _two_term_beam(fi.a_gu, fi.a_target, need, power)


def gamma_star(fi: FeasibilityInputs) -> float:
    """Best achievable target-directed gain under the rate floor."""
    need = fi.eta * fi.d_gu ** 2
    if need > fi.gamma:
        raise InfeasibleRateError(
            f"rate floor needs user gain {need:.3e} > budget {fi.gamma:.3e}")
    cos_t = fi.cos_theta()
    if fi.gamma * cos_t ** 2 >= need:
        return fi.gamma
    sin_t = np.sqrt(1.0 - cos_t ** 2)
    return float((np.sqrt(need) * cos_t + np.sqrt(fi.gamma - need) * sin_t) ** 2)


def comm_centric_w(fi: FeasibilityInputs, power: float) -> tuple[np.ndarray, float]:
    """Beam maximizing the downlink rate under the echo-power floor.

    Mirror construction of :func:`sensing_centric_w` with the two directions
    swapped.  Returns the beam and the resulting best rate (bps/Hz).

    Raises:
        InfeasibleSensingError: the echo floor exceeds the full-power matched
            gain toward the target (gamma_d > gamma).
    """
    if fi.gamma_d > fi.gamma:
        raise InfeasibleSensingError(
            f"echo floor needs target gain {fi.gamma_d:.3e} > budget {fi.gamma:.3e}")
    cos_t = fi.cos_theta()
    if power * abs(np.vdot(fi.a_target, fi.a_gu)) ** 2 >= fi.m_t * fi.gamma_d:
        w = np.sqrt(power) * fi.a_gu / np.linalg.norm(fi.a_gu)
        g_best = fi.gamma
    else:
        w = _two_term_beam(fi.a_target, fi.a_gu, fi.gamma_d, power)
        sin_t = np.sqrt(1.0 - cos_t ** 2)
        g_best = float((np.sqrt(fi.gamma_d) * cos_t
                        + np.sqrt(fi.gamma - fi.gamma_d) * sin_t) ** 2)
    return w, rate_from_user_gain(g_best, fi)


def rate_from_user_gain(gain: float, fi: FeasibilityInputs) -> float:
    """Rate delivered by a user-directed gain at the slot's user distance."""
    snr_floor = 2.0 ** fi.rate_threshold - 1.0
    return float(np.log2(1.0 + snr_floor * gain / (fi.eta * fi.d_gu ** 2)))


def gamma_lower(fi: FeasibilityInputs) -> float:
    """Convex-friendly lower bound on the sensing-centric optimum.

    Exact when the predicted target sits at the user position (delta = 0);
    the gap to the true optimum closes as the array grows.
    """
    return float(fi.gamma - fi.delta * fi.eta * fi.d_gu ** 2)


def lemma1_check(fi: FeasibilityInputs, boundary_tol: float = 1e-9) -> tuple[bool, bool]:
    """Both feasibility verdicts for the slot; they agree by construction.

    A margin inside the boundary band is treated as exactly zero, in which
    case the two flags are forced equal (adopting the decisive side's verdict,
    or feasible when both sit on the boundary).
    """
    need = fi.eta * fi.d_gu ** 2
    if need > fi.gamma:
        margin_s = -np.inf
    else:
        margin_s = gamma_star(fi) - fi.gamma_d
    if fi.gamma_d > fi.gamma:
        margin_c = -np.inf
    else:
        _, r_best = comm_centric_w(fi, fi.gamma / fi.m_t)
        margin_c = r_best - fi.rate_threshold

    s_flag = margin_s >= 0.0
    c_flag = margin_c >= 0.0
    if s_flag != c_flag:
        s_boundary = abs(margin_s) < boundary_tol
        c_boundary = abs(margin_c) < boundary_tol
        if s_boundary and not c_boundary:
            s_flag = c_flag
        elif c_boundary and not s_boundary:
            c_flag = s_flag
        elif s_boundary and c_boundary:
            s_flag = c_flag = True
    return s_flag, c_flag
