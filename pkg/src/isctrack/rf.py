"""Channel, array response, rate, and echo-measurement statistics.

Everything electromagnetic lives here, reduced to statistical models:

* a line-of-sight downlink channel with free-space power decay, giving the
  achievable rate toward the ground user;
* uniform-planar-array response vectors with half-wavelength spacing on both
  axes, ordered x-major (outer Kronecker factor runs over the x axis);
* the monostatic echo after matched filtering, summarized by a range
  measurement, a Doppler measurement, and the stacked real/imaginary parts of
  the filtered array snapshot, each with a known noise covariance.

Positions are horizontal 2-vectors; the platform altitude enters every
distance through ``sqrt(|dp|^2 + H^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateGeometryError(ValueError):
    """Transmitter and reflection point coincide; no direction is defined."""


class ZeroBeamGainError(ValueError):
    """Beamformer is orthogonal to the target response; echo variance diverges."""


@dataclass(frozen=True)
class ArrayGeometry:
    """Antenna counts per axis for the transmit and receive planar arrays."""

    mx_t: int
    my_t: int
    mx_r: int
    my_r: int

    def __post_init__(self):
        for n in (self.mx_t, self.my_t, self.mx_r, self.my_r):
            if n < 1:
                raise ValueError("antenna counts must be >= 1")

    @property
    def m_t(self) -> int:
        return self.mx_t * self.my_t

    @property
    def m_r(self) -> int:
        return self.mx_r * self.my_r


@dataclass(frozen=True)
class RfConstants:
    """Physical constants of the link and of the echo processing chain.

    Attributes:
        beta0: channel power at 1 m reference distance (linear).
        fc: carrier frequency (Hz).
        c: propagation speed (m/s).
        rcs: radar cross section of the target (m^2).
        sigma_c2: receiver noise power at the ground user (W).
        sigma_r2: per-antenna radar noise power (W).
        mf_gain: matched-filtering gain, roughly the symbols per slot.
        a1, a2: range/Doppler estimator constants.
        altitude: flight altitude H (m).
    """

    beta0: float
    fc: float
    c: float
    rcs: float
    sigma_c2: float
    sigma_r2: float
    mf_gain: float
    a1: float
    a2: float
    altitude: float

    def __post_init__(self):
        for name in ("beta0", "fc", "c", "rcs", "sigma_c2", "sigma_r2",
                     "mf_gain", "a1", "a2"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.altitude < 0.0:
            raise ValueError("altitude must be nonnegative")

    @property
    def wavelength(self) -> float:
        return self.c / self.fc

    @property
    def reflect_gain(self) -> float:
        """Round-trip reflection power factor: wavelength^2 * rcs / (64 pi^3)."""
        return self.wavelength ** 2 * self.rcs / (64.0 * np.pi ** 3)


@dataclass
class Measurement:
    """One slot of sensing output and its (diagonal) noise covariance.

    ``rho`` stacks the real parts then the imaginary parts of the filtered
    echo snapshot, so it has length ``2 * m_r``.  ``qm_diag`` is the diagonal
    of the measurement covariance: range variance, Doppler variance, then a
    constant echo variance per real component.
    """

    d_hat: float
    mu_hat: float
    rho: np.ndarray
    qm_diag: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.concatenate(([self.d_hat, self.mu_hat], self.rho))


def distance(p1, p2, altitude: float) -> float:
    """Slant distance between two horizontal positions at vertical offset H."""
    if altitude < 0.0:
        raise ValueError("altitude must be nonnegative")
    dp = np.asarray(p1, dtype=float) - np.asarray(p2, dtype=float)
    return float(np.sqrt(dp @ dp + altitude * altitude))


def direction_cosines(p_from, p_to, altitude: float) -> tuple[float, float, float]:
    """Per-axis direction cosines (and distance) from ``p_from`` down to ``p_to``."""
    p_from = np.asarray(p_from, dtype=float)
    p_to = np.asarray(p_to, dtype=float)
    d = distance(p_from, p_to, altitude)
    if d <= 0.0:
        raise DegenerateGeometryError("coincident points at zero altitude")
    return float((p_from[0] - p_to[0]) / d), float((p_from[1] - p_to[1]) / d), d


def steering_vector(p_from, p_to, mx: int, my: int, altitude: float) -> np.ndarray:
    """Planar-array response toward ``p_to``, x-major Kronecker ordering.

    Entry ``(m_x, m_y)`` (flattened as ``m_x * my + m_y``) carries the phase
    ``pi * (m_x * cx + m_y * cy)`` where ``cx, cy`` are the direction cosines;
    the half-wavelength spacing is folded into the ``pi`` factor.
    """
    cx, cy, _ = direction_cosines(p_from, p_to, altitude)
    ax = np.exp(1j * np.pi * cx * np.arange(mx))
    ay = np.exp(1j * np.pi * cy * np.arange(my))
    return np.kron(ax, ay)


def achievable_rate(p_uav, p_gu, w: np.ndarray, k: RfConstants,
                    geom: ArrayGeometry) -> float:
    """Downlink spectral efficiency (bps/Hz) toward the ground user."""
    a_c = steering_vector(p_uav, p_gu, geom.mx_t, geom.my_t, k.altitude)
    d_c = distance(p_uav, p_gu, k.altitude)
    gain = abs(np.vdot(a_c, w)) ** 2
    return float(np.log2(1.0 + k.beta0 * gain / (d_c * d_c * k.sigma_c2)))


def measurement_noise_vars(w: np.ndarray, p_uav, p_target, k: RfConstants,
                           geom: ArrayGeometry) -> tuple[float, float]:
    """Range and Doppler estimation variances for a given beam and geometry.

    Both scale with d^4 over the beam power delivered onto the target; a beam
    orthogonal to the target response makes them infinite.
    """
    a_t = steering_vector(p_uav, p_target, geom.mx_t, geom.my_t, k.altitude)
    d = distance(p_uav, p_target, k.altitude)
    gain = abs(np.vdot(a_t, w)) ** 2
    if gain <= 0.0:
        raise ZeroBeamGainError("no transmit power reaches the target")
    denom = k.mf_gain * geom.m_r * k.reflect_gain * gain
    base = k.sigma_r2 * d ** 4 / denom
    return k.a1 ** 2 * base, k.a2 ** 2 * base


def doppler_mean(uav_state, target_state, k: RfConstants) -> float:
    """Noise-free Doppler: negative for an opening range rate."""
    uav_state = np.asarray(uav_state, dtype=float)
    target_state = np.asarray(target_state, dtype=float)
    dp = uav_state[:2] - target_state[:2]
    dv = uav_state[2:] - target_state[2:]
    d = distance(uav_state[:2], target_state[:2], k.altitude)
    return float(-2.0 * k.fc * (dp @ dv) / (k.c * d))


def echo_mean(uav_state, target_state, w: np.ndarray, k: RfConstants,
              geom: ArrayGeometry) -> np.ndarray:
    """Complex mean of the matched-filtered echo snapshot (length m_r)."""
    p_u = np.asarray(uav_state, dtype=float)[:2]
    p_t = np.asarray(target_state, dtype=float)[:2]
    a_t = steering_vector(p_u, p_t, geom.mx_t, geom.my_t, k.altitude)
    b_t = steering_vector(p_u, p_t, geom.mx_r, geom.my_r, k.altitude)
    d = distance(p_u, p_t, k.altitude)
    beta = np.sqrt(k.reflect_gain) / (d * d)
    return k.mf_gain * beta * b_t * np.vdot(a_t, w)


def measurement_mean(target_state, uav_state, w: np.ndarray, k: RfConstants,
                     geom: ArrayGeometry) -> np.ndarray:
    """Noise-free measurement vector [range, Doppler, Re(echo), Im(echo)].

    This is the nonlinear map the tracking filter linearizes; it is written as
    a function of the target state for a fixed UAV state and beam.
    """
    target_state = np.asarray(target_state, dtype=float)
    uav_state = np.asarray(uav_state, dtype=float)
    d = distance(uav_state[:2], target_state[:2], k.altitude)
    mu = doppler_mean(uav_state, target_state, k)
    v = echo_mean(uav_state, target_state, w, k, geom)
    return np.concatenate(([d, mu], v.real, v.imag))


def echo_snr(uav_state, target_state, w: np.ndarray, k: RfConstants,
             geom: ArrayGeometry) -> float:
    """Post-filtering echo SNR (linear), including the receive-array gain."""
    p_u = np.asarray(uav_state, dtype=float)[:2]
    p_t = np.asarray(target_state, dtype=float)[:2]
    a_t = steering_vector(p_u, p_t, geom.mx_t, geom.my_t, k.altitude)
    d = distance(p_u, p_t, k.altitude)
    gain = abs(np.vdot(a_t, w)) ** 2
    return float(k.mf_gain * geom.m_r * k.reflect_gain * gain / (k.sigma_r2 * d ** 4))


def measurement_qm_diag(sigma1_2: float, sigma2_2: float, k: RfConstants,
                        geom: ArrayGeometry) -> np.ndarray:
    """Diagonal of the measurement covariance for one slot."""
    echo_var = 0.5 * k.mf_gain * k.sigma_r2
    return np.concatenate(([sigma1_2, sigma2_2],
                           np.full(2 * geom.m_r, echo_var)))


def sample_measurement(true_uav, true_target, w: np.ndarray, k: RfConstants,
                       geom: ArrayGeometry, noise=None,
                       rng: np.random.Generator | None = None) -> Measurement:
    """Draw one slot's measurement around the true geometry.

    ``noise`` may be a vector of ``2 + 2*m_r`` standard-normal draws (scaled
    internally by the per-component standard deviations) for deterministic
    replay; otherwise ``rng`` supplies the draws.  With neither, the
    measurement is noiseless.
    """
    true_uav = np.asarray(true_uav, dtype=float)
    true_target = np.asarray(true_target, dtype=float)
    s1, s2 = measurement_noise_vars(w, true_uav[:2], true_target[:2], k, geom)
    qm = measurement_qm_diag(s1, s2, k, geom)
    mean = measurement_mean(true_target, true_uav, w, k, geom)

    n = 2 + 2 * geom.m_r
    if noise is None:
        noise = rng.standard_normal(n) if rng is not None else np.zeros(n)
    noise = np.asarray(noise, dtype=float)
    z = mean + np.sqrt(qm) * noise
    return Measurement(d_hat=float(z[0]), mu_hat=float(z[1]), rho=z[2:],
                       qm_diag=qm)
