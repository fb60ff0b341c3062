"""Benchmark controllers: finite-horizon LQG and clairvoyant deterministic MPC.

The LQG benchmark applies the classical backward Riccati gains to the
estimated tracking error and then forces feasibility with a two-step
saturation/projection: clip the acceleration to its bound, then, if the
predicted speed exceeds the limit, project the predicted velocity onto the
speed ball and recompute the acceleration from it.  The projected
acceleration is deliberately not re-clipped; the benchmark is defined by this
exact order of operations.

The non-causal benchmark reads the realized future target states (simulation
oracle), drops the echo constraint, and solves the resulting deterministic
quadratic program with motion bounds only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mpc
from .dynamics import TransitionModel


@dataclass
class RiccatiSchedule:
    """Backward cost-to-go matrices P_1..P_N and feedback gains K_1..K_{N-1}."""

    P: list[np.ndarray]
    K: list[np.ndarray]

    def cost(self, k: int) -> np.ndarray:
        """P_k, 1-based."""
        return self.P[k - 1]

    def gain(self, k: int) -> np.ndarray:
        """K_k, 1-based; defined for k = 1..N-1."""
        return self.K[k - 1]


def riccati_backward(A, B, Q, R, N: int) -> RiccatiSchedule:
    """Backward Riccati recursion with terminal weight Q.

    Stage k's gain uses the successor cost matrix:
    ``K_k = (R + B' P_{k+1} B)^{-1} B' P_{k+1} A``.
    """
    if N < 1:
        raise ValueError("horizon must be >= 1")
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    Q = np.asarray(Q, dtype=float)
    R = np.asarray(R, dtype=float)

    P = [None] * N
    K = [None] * (N - 1)
    P[N - 1] = Q.copy()
    for k in range(N - 1, 0, -1):
        Pn = P[k]
        BtP = B.T @ Pn
        gain = np.linalg.solve(R + BtP @ B, BtP @ A)
        Pk = Q + A.T @ Pn @ A - A.T @ Pn @ B @ gain
        P[k - 1] = 0.5 * (Pk + Pk.T)
        K[k - 1] = gain
    return RiccatiSchedule(P=P, K=K)


def lqg_control(e_hat, K_n, v_uav, a_max: float, v_max: float,
                dt: float) -> np.ndarray:
    """Saturated/projected LQG move ``-K_n e_hat``.

    Step 1 clips the acceleration norm; step 2 projects the predicted
    velocity onto the speed ball and back-solves the acceleration (which may
    exceed the clip again; it is not re-clipped).
    """
    e_hat = np.asarray(e_hat, dtype=float)
    v_uav = np.asarray(v_uav, dtype=float)
    u = -np.asarray(K_n, dtype=float) @ e_hat
    norm = np.linalg.norm(u)
    if norm > a_max:
        u = u * (a_max / norm)
    v_pred = v_uav + dt * u
    speed = np.linalg.norm(v_pred)
    if speed > v_max:
        u = (v_max * v_pred / speed - v_uav) / dt
    return u


def noncausal_mpc(true_future_targets, s_uav, model: TransitionModel, Q, R,
                  a_max: float, v_max: float, n0: int,
                  opts: mpc.SolverOptions | None = None
                  ) -> tuple[np.ndarray, mpc.MpcSolution]:
    """First move of the deterministic MPC with known future target states.

    ``true_future_targets`` holds the realized states 1..n0 slots ahead.
    The echo constraint is dropped; only the acceleration and speed bounds
    remain, so the zero move is always feasible from an in-bounds velocity.
    """
    targets = np.asarray(true_future_targets, dtype=float).reshape(n0, 4)
    s_uav = np.asarray(s_uav, dtype=float)
    Q = np.asarray(Q, dtype=float)
    R = np.asarray(R, dtype=float)

    sm = mpc.build_stacked(np.zeros(4), s_uav, np.zeros((4, 4)), model, n0, Q, R)
    n = 2 * n0
    obj_quad = np.kron(np.eye(n0), R)
    obj_lin = np.zeros(n)
    obj_const = 0.0
    for idx in range(n0):
        T = sm.lam[idx] @ sm.sel[idx]
        resid = sm.lam[idx] @ sm.c_state[idx] - targets[idx]
        obj_quad += T.T @ Q @ T
        obj_lin += T.T @ Q @ resid
        obj_const += float(resid @ Q @ resid)

    problem = mpc.MpcProblem(n0=n0, obj_quad=0.5 * (obj_quad + obj_quad.T),
                             obj_lin=obj_lin, obj_const=obj_const, sensing=[],
                             a_max=a_max, v_max=v_max, v_uav=s_uav[2:], dt=model.dt)
    sol = mpc.solve(problem, opts)
    return sol.u_hat[:2].copy(), sol
