"""Closed-loop episode execution, Monte Carlo replication, and metrics.

One episode advances slot by slot: update the target estimate from the slot's
echo measurement, let the chosen controller pick an acceleration, design the
next slot's transmit beam from the predicted geometry, then step the physics.
True states evolve only through the kinematic models; controllers see only
estimates (the clairvoyant benchmark additionally receives the realized
future target states, which is its defining cheat).

All randomness of an episode is pre-drawn from a single seeded generator in a
fixed order (initial estimate, process noise, measurement noise), so a seed
fully determines a trace and the same seed exposes every controller to the
same disturbance realization.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from . import baselines, beamforming, estimator, mpc, rf
from .config import ScenarioConfig

CONTROLLERS = ("iscc", "lqg", "noncausal")


@dataclass
class EpisodeTrace:
    """Per-slot record of one closed-loop run (arrays of length n_slots)."""

    controller: str
    seed: int
    uav: np.ndarray        # (N, 4) true UAV states
    target: np.ndarray     # (N, 4) true target states
    est: np.ndarray        # (N, 4) posterior target estimates
    pred: np.ndarray       # (N, 4) prior predictions used at each slot
    u: np.ndarray          # (N, 2) applied accelerations (zero at the last slot)
    rate: np.ndarray       # (N,) realized downlink rate (bps/Hz)
    echo_snr: np.ndarray   # (N,) realized echo SNR (linear)
    beam_gain: np.ndarray  # (N,) |a^H w|^2 toward the true target
    status: list[str]      # per-slot solver status ("none" when no solve ran)

    @property
    def error(self) -> np.ndarray:
        """True tracking error per slot, UAV minus target."""
        return self.uav - self.target

    @property
    def n_slots(self) -> int:
        return self.uav.shape[0]


@dataclass
class TrialMetrics:
    """Monte Carlo aggregates across trials (per-slot arrays plus fractions)."""

    rms_error: np.ndarray       # (N,) RMS of the full tracking-error norm
    rmse_position: np.ndarray   # (N,) RMS of the position-estimate error
    rmse_velocity: np.ndarray   # (N,) RMS of the velocity-estimate error
    rate_ok_fraction: np.ndarray  # (M,) per-trial fraction of rate-satisfying slots
    mean_fraction: float
    min_fraction: float


def _design_beam(p_uav_next, p_target_pred, cfg: ScenarioConfig, k, geom,
                 gamma_d: float = 0.0) -> np.ndarray:
    """Next-slot beam from predicted geometry; rate floor built in when reachable.

    When the UAV has drifted so far from the user that no beam meets the rate
    floor, fall back to a full-power matched beam toward the predicted target
    (the violation is recorded through the realized rate).
    """
    fi = beamforming.inputs_for_geometry(
        p_uav_next, p_target_pred, cfg.gu_pos, geom=geom, k=k,
        power=cfg.power_w, rate_threshold=cfg.rate_threshold, gamma_d=gamma_d)
    try:
        return beamforming.sensing_centric_w(fi, cfg.power_w)
    except beamforming.InfeasibleRateError:
        return (np.sqrt(cfg.power_w) * fi.a_target
                / np.linalg.norm(fi.a_target))


def run_episode(cfg: ScenarioConfig, controller: str, seed: int) -> EpisodeTrace:
    """Run one seeded closed-loop episode with the chosen controller."""
    if controller not in CONTROLLERS:
        raise ValueError(f"unknown controller {controller!r}")
    cfg.validate()

    model = cfg.transition()
    geom = cfg.geometry()
    k = cfg.rf_constants()
    Q = cfg.q_matrix()
    R = cfg.r_matrix()
    opts = cfg.solver_options()
    n = cfg.n_slots
    n0 = cfg.horizon
    gamma = cfg.gamma()
    eta = cfg.eta()
    gamma_th = cfg.echo_gain_threshold()

    rng = np.random.default_rng(seed)
    z_init = rng.standard_normal(4)
    z_proc = rng.standard_normal((max(n - 1, 0), 4))
    z_meas = rng.standard_normal((max(n - 1, 0), 2 + 2 * geom.m_r))

    # Realized target trajectory (noise fixed up front so the clairvoyant
    # controller can read ahead without influencing the draw order).
    proc_std = np.sqrt(np.diag(model.Qs))
    target = np.empty((n, 4))
    target[0] = np.concatenate([cfg.target_start, cfg.target_velocity_start])
    for i in range(n - 1):
        target[i + 1] = model.A @ target[i] + proc_std * z_proc[i]

    init_cov = cfg.init_cov()
    s_init = target[0] + np.sqrt(np.diag(init_cov)) * z_init
    est_state = estimator.init_state(s_init, init_cov, model)

    if controller == "lqg":
        schedule = baselines.riccati_backward(model.A, model.B, Q, R, n)
    else:
        schedule = None

    uav = np.empty((n, 4))
    uav[0] = np.concatenate([cfg.uav_start, cfg.uav_velocity_start])
    est = np.empty((n, 4))
    pred = np.empty((n, 4))
    u_log = np.zeros((n, 2))
    rate = np.empty(n)
    echo = np.empty(n)
    gain = np.empty(n)
    status: list[str] = []

    w = _design_beam(uav[0, :2], s_init[:2], cfg, k, geom)
    pred[0] = s_init
    last_u_hat = None

    for slot in range(n):
        if slot >= 1:
            pred[slot] = est_state.s_check
            m = rf.sample_measurement(uav[slot], target[slot], w, k, geom,
                                      noise=z_meas[slot - 1])
            est_state = estimator.ekf_step(est_state, m, model, uav[slot],
                                           w, k, geom)
        est[slot] = est_state.s_hat

        rate[slot] = rf.achievable_rate(uav[slot, :2], cfg.gu_pos, w, k, geom)
        echo[slot] = rf.echo_snr(uav[slot], target[slot], w, k, geom)
        a_true = rf.steering_vector(uav[slot, :2], target[slot, :2],
                                    geom.mx_t, geom.my_t, k.altitude)
        gain[slot] = abs(np.vdot(a_true, w)) ** 2

        if slot == n - 1:
            status.append("none")
            break

        n0_eff = min(n0, n - 1 - slot)
        e_hat = uav[slot] - est_state.s_hat
        gamma_d_next = 0.0

        if controller == "iscc":
            preds = estimator.predict_states(est_state.s_hat, model.A, n0_eff)
            sm = mpc.build_stacked(e_hat, uav[slot], est_state.M_hat, model,
                                   n0_eff, Q, R)
            deltas = [beamforming.delta_indicator(preds[i, :2], cfg.gu_pos)
                      for i in range(n0_eff)]
            problem = mpc.build_problem(
                sm, p_gu=cfg.gu_pos, deltas=deltas, eta=eta, gamma=gamma,
                gamma_th=gamma_th, altitude=cfg.altitude, a_max=cfg.a_max,
                v_max=cfg.v_max, v_uav=uav[slot, 2:], dt=model.dt)
            warm = None
            if last_u_hat is not None and last_u_hat.shape[0] >= 2 * n0_eff:
                warm = np.concatenate([last_u_hat[2:2 * n0_eff],
                                       last_u_hat[2 * n0_eff - 2:2 * n0_eff]])
            sol = mpc.solve(problem, opts, warm_start=warm)
            last_u_hat = sol.u_hat
            u = sol.u_hat[:2].copy()
            status.append(sol.status)
            gamma_d_next = gamma_th * mpc.expected_d4(sm, sol.u_hat, 1,
                                                      cfg.altitude)
            p_target_next = est_state.s_check[:2]
        elif controller == "lqg":
            u = baselines.lqg_control(e_hat, schedule.gain(slot + 1),
                                      uav[slot, 2:], cfg.a_max, cfg.v_max,
                                      model.dt)
            status.append("none")
            p_target_next = est_state.s_check[:2]
        else:  # noncausal
            futures = target[slot + 1:slot + 1 + n0_eff]
            u, sol = baselines.noncausal_mpc(futures, uav[slot], model, Q, R,
                                             cfg.a_max, cfg.v_max, n0_eff, opts)
            status.append(sol.status)
            p_target_next = target[slot + 1, :2]

        u_log[slot] = u
        uav[slot + 1] = model.A @ uav[slot] + model.B @ u
        w = _design_beam(uav[slot + 1, :2], p_target_next, cfg, k, geom,
                         gamma_d=gamma_d_next)

    return EpisodeTrace(controller=controller, seed=int(seed), uav=uav,
                        target=target, est=est, pred=pred, u=u_log, rate=rate,
                        echo_snr=echo, beam_gain=gain, status=status)


def compute_metrics(traces: list[EpisodeTrace],
                    rate_threshold: float) -> TrialMetrics:
    """Aggregate RMS tracking error, estimation RMSEs, and rate fractions."""
    if not traces:
        raise ValueError("need at least one trace")
    n = traces[0].n_slots
    if any(t.n_slots != n for t in traces):
        raise ValueError("traces must have equal length")

    err2 = np.zeros(n)
    pos2 = np.zeros(n)
    vel2 = np.zeros(n)
    fractions = np.empty(len(traces))
    for idx, t in enumerate(traces):
        e = t.error
        err2 += np.sum(e * e, axis=1)
        dp = t.est[:, :2] - t.target[:, :2]
        dv = t.est[:, 2:] - t.target[:, 2:]
        pos2 += np.sum(dp * dp, axis=1)
        vel2 += np.sum(dv * dv, axis=1)
        fractions[idx] = np.mean(t.rate >= rate_threshold - 1e-9)

    m = float(len(traces))
    return TrialMetrics(
        rms_error=np.sqrt(err2 / m),
        rmse_position=np.sqrt(pos2 / m),
        rmse_velocity=np.sqrt(vel2 / m),
        rate_ok_fraction=fractions,
        mean_fraction=float(np.mean(fractions)),
        min_fraction=float(np.min(fractions)),
    )


def run_monte_carlo(cfg: ScenarioConfig, controller: str, n_trials: int,
                    seed_base: int, threads: int = 1,
                    return_traces: bool = False):
    """Independent trials with seeds ``seed_base + trial_index``.

    Trials are embarrassingly parallel; ``threads`` caps concurrent workers.
    Aggregation order is fixed by trial index, so results do not depend on
    scheduling.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    seeds = [seed_base + i for i in range(n_trials)]
    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as ex:
            traces = list(ex.map(lambda s: run_episode(cfg, controller, s), seeds))
    else:
        traces = [run_episode(cfg, controller, s) for s in seeds]
    metrics = compute_metrics(traces, cfg.rate_threshold)
    if return_traces:
        return metrics, traces
    return metrics
