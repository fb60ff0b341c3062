"""Receding-horizon problem assembly and a dense log-barrier solver.

The horizon's tracking errors are affine in the stacked control vector and in
the stacked noise (initial estimation error plus per-slot process noise), so
the expected quadratic tracking cost and the expected fourth power of the
UAV-target distance both collapse to closed forms in the control vector.
Together with hard acceleration/speed bounds and the relaxed echo-power
constraint this yields a small convex program per slot: a strictly convex
quadratic objective, quadratic motion constraints, and one convex
quartic-plus-quadratic constraint per lookahead step.

The solver is a feasible-start log-barrier method with damped Newton steps:
the problem never exceeds a few dozen variables, and every derivative is
available analytically, so a dense factorization per step is the fastest
robust choice.  When no strictly feasible point exists (the echo floor is
unreachable from the current geometry) an optional soft mode charges a linear
penalty on the echo-constraint slack instead of failing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .dynamics import TransitionModel

# Horizontal-position selector out of a [px, py, vx, vy] state.
_POS = np.array([[1.0, 0.0, 0.0, 0.0],
                 [0.0, 1.0, 0.0, 0.0]])


@dataclass
class StackedModel:
    """Per-step affine maps from stacked controls/noise to the tracking error.

    For lookahead step i (1-based, stored at index i-1):
      * ``lam[i-1]`` maps the stacked vector [initial term, step terms...] to
        the error i slots ahead;
      * ``sel[i-1]`` and ``c_err[i-1]`` express that stacked vector as an
        affine function of the flat control vector, seeded with the estimated
        error; ``c_state[i-1]`` is the same seeded with the UAV state (used
        for the deterministic UAV position);
      * ``nbar[i-1]`` is the covariance of the stacked noise (estimation MSE
        followed by i copies of the process noise);
      * ``lam_q``/``lam_c`` are the error-cost and squared-position forms of
        ``lam``.
    """

    n0: int
    e_hat: np.ndarray
    s_uav: np.ndarray
    M_hat: np.ndarray
    Qs: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    lam: list[np.ndarray] = field(default_factory=list)
    sel: list[np.ndarray] = field(default_factory=list)
    c_err: list[np.ndarray] = field(default_factory=list)
    c_state: list[np.ndarray] = field(default_factory=list)
    nbar: list[np.ndarray] = field(default_factory=list)
    lam_q: list[np.ndarray] = field(default_factory=list)
    lam_c: list[np.ndarray] = field(default_factory=list)


def build_stacked(e_hat, s_uav, M_hat, model: TransitionModel, n0: int,
                  Q, R) -> StackedModel:
    """Precompute the stacked affine/covariance blocks for an n0-step horizon."""
    if n0 < 1:
        raise ValueError("horizon must be >= 1")
    e_hat = np.asarray(e_hat, dtype=float)
    s_uav = np.asarray(s_uav, dtype=float)
    M_hat = np.asarray(M_hat, dtype=float)
    Q = np.asarray(Q, dtype=float)
    R = np.asarray(R, dtype=float)
    A, B = model.A, model.B

    sm = StackedModel(n0=n0, e_hat=e_hat, s_uav=s_uav, M_hat=M_hat,
                      Qs=model.Qs, Q=Q, R=R)
    # Powers A^0 .. A^n0.
    powers = [np.eye(4)]
    for _ in range(n0):
        powers.append(A @ powers[-1])

    pos_form = _POS.T @ _POS
    for i in range(1, n0 + 1):
        lam = np.hstack([powers[k] for k in range(i, -1, -1)])  # 4 x (4+4i)
        sel = np.zeros((4 + 4 * i, 2 * n0))
        for j in range(i):
            sel[4 + 4 * j:8 + 4 * j, 2 * j:2 * j + 2] = B
        c_err = np.concatenate([e_hat, np.zeros(4 * i)])
        c_state = np.concatenate([s_uav, np.zeros(4 * i)])
        nbar = scipy.linalg.block_diag(M_hat, *([model.Qs] * i))
        sm.lam.append(lam)
        sm.sel.append(sel)
        sm.c_err.append(c_err)
        sm.c_state.append(c_state)
        sm.nbar.append(nbar)
        sm.lam_q.append(lam.T @ Q @ lam)
        sm.lam_c.append(lam.T @ pos_form @ lam)
    return sm


def expected_quadratic(sm: StackedModel, u_hat, i: int) -> float:
    """Expected error cost i steps ahead: mean term plus a noise trace."""
    u_hat = np.asarray(u_hat, dtype=float)
    ubar = sm.sel[i - 1] @ u_hat + sm.c_err[i - 1]
    lq = sm.lam_q[i - 1]
    return float(ubar @ lq @ ubar + np.trace(sm.nbar[i - 1] @ lq))


def expected_d4(sm: StackedModel, u_hat, i: int, altitude: float) -> float:
    """Expected fourth power of the slant distance i steps ahead.

    Gaussian fourth-moment expansion of ``(|mean + noise|_pos^2 + H^2)^2``:
    the squared mean term, a mean-noise cross term, mean-times-trace and
    trace-squared terms, the quartic noise term, and the altitude coupling.
    """
    u_hat = np.asarray(u_hat, dtype=float)
    lc = sm.lam_c[i - 1]
    ubar = sm.sel[i - 1] @ u_hat + sm.c_err[i - 1]
    ln = lc @ sm.nbar[i - 1]
    q_mean = float(ubar @ lc @ ubar)
    tr1 = float(np.trace(ln))
    cross = float(4.0 * ubar @ ln @ lc @ ubar)
    h2 = altitude * altitude
    return (q_mean ** 2 + cross + 2.0 * q_mean * tr1 + tr1 ** 2
            + 2.0 * float(np.trace(ln @ ln)) + 2.0 * h2 * (q_mean + tr1)
            + h2 * h2)


@dataclass
class SensingTerm:
    """Echo-power constraint for one lookahead step, kept in split form.

    The constraint value is
    ``quartic_weight * q(u)^2 + u' quad u + 2 lin' u + const <= 0`` with
    ``q(u) = (sel u + offset)' lam_c (sel u + offset)``, which equals the
    required-gain shortfall of the relaxed echo constraint.
    """

    quartic_weight: float
    sel: np.ndarray
    offset: np.ndarray
    lam_c: np.ndarray
    quad: np.ndarray
    lin: np.ndarray
    const: float

    def __post_init__(self):
        self._sel_lc = self.sel.T @ self.lam_c
        self._quad_q = 2.0 * self._sel_lc @ self.sel  # Hessian of q

    def q_value(self, u: np.ndarray) -> float:
        m = self.sel @ u + self.offset
        return float(m @ self.lam_c @ m)

    def value(self, u: np.ndarray) -> float:
        q = self.q_value(u)
        return (self.quartic_weight * q * q + float(u @ self.quad @ u)
                + 2.0 * float(self.lin @ u) + self.const)

    def grad(self, u: np.ndarray) -> np.ndarray:
        m = self.sel @ u + self.offset
        lm = self.lam_c @ m
        q = float(m @ lm)
        grad_q = 2.0 * self.sel.T @ lm
        return 2.0 * self.quartic_weight * q * grad_q + 2.0 * (self.quad @ u + self.lin)

    def hess(self, u: np.ndarray) -> np.ndarray:
        m = self.sel @ u + self.offset
        lm = self.lam_c @ m
        q = float(m @ lm)
        grad_q = 2.0 * self.sel.T @ lm
        return (self.quartic_weight * (2.0 * np.outer(grad_q, grad_q)
                                       + 2.0 * q * self._quad_q)
                + 2.0 * self.quad)


@dataclass
class QuadraticConstraint:
    """Generic convex quadratic constraint u'P u + 2 q'u + r <= 0."""

    P: np.ndarray
    q: np.ndarray
    r: float

    def value(self, u: np.ndarray) -> float:
        return float(u @ self.P @ u + 2.0 * self.q @ u + self.r)

    def grad(self, u: np.ndarray) -> np.ndarray:
        return 2.0 * (self.P @ u + self.q)

    def hess(self, u: np.ndarray) -> np.ndarray:
        return 2.0 * self.P


@dataclass
class MpcProblem:
    """One slot's convex program over the flat control vector (2*n0,)."""

    n0: int
    obj_quad: np.ndarray
    obj_lin: np.ndarray
    obj_const: float
    sensing: list[SensingTerm]
    a_max: float
    v_max: float
    v_uav: np.ndarray
    dt: float

    def objective(self, u: np.ndarray) -> float:
        return float(u @ self.obj_quad @ u + 2.0 * self.obj_lin @ u + self.obj_const)

    def motion_constraints(self) -> list[QuadraticConstraint]:
        n = 2 * self.n0
        out = []
        for i in range(self.n0):
            P = np.zeros((n, n))
            P[2 * i:2 * i + 2, 2 * i:2 * i + 2] = np.eye(2)
            out.append(QuadraticConstraint(P=P, q=np.zeros(n),
                                           r=-self.a_max ** 2))
        for i in range(1, self.n0 + 1):
            P = np.zeros((n, n))
            q = np.zeros(n)
            for j in range(i):
                q[2 * j:2 * j + 2] = self.dt * self.v_uav
                for l in range(i):
                    P[2 * j:2 * j + 2, 2 * l:2 * l + 2] = self.dt ** 2 * np.eye(2)
            out.append(QuadraticConstraint(
                P=P, q=q, r=float(self.v_uav @ self.v_uav) - self.v_max ** 2))
        return out

    def all_constraints(self) -> list:
        return self.motion_constraints() + list(self.sensing)


def build_problem(sm: StackedModel, *, p_gu, deltas, eta: float, gamma: float,
                  gamma_th: float, altitude: float, a_max: float, v_max: float,
                  v_uav, dt: float) -> MpcProblem:
    """Assemble the slot program from the stacked model and scenario data.

    ``deltas`` holds the per-step user-coincidence indicators; steps whose
    predicted target sits on the user drop their user-distance terms.
    """
    n0 = sm.n0
    n = 2 * n0
    p_gu = np.asarray(p_gu, dtype=float)
    deltas = np.asarray(deltas, dtype=int)
    if deltas.shape != (n0,):
        raise ValueError("need one coincidence indicator per lookahead step")
    h2 = altitude * altitude

    obj_quad = np.kron(np.eye(n0), sm.R)
    obj_lin = np.zeros(n)
    obj_const = 0.0
    sensing: list[SensingTerm] = []

    for idx in range(n0):
        lam = sm.lam[idx]
        sel = sm.sel[idx]
        lq = sm.lam_q[idx]
        lc = sm.lam_c[idx]
        nbar = sm.nbar[idx]
        c_err = sm.c_err[idx]
        c_state = sm.c_state[idx]
        delta = float(deltas[idx])

        obj_quad += sel.T @ lq @ sel
        obj_lin += sel.T @ lq @ c_err
        obj_const += float(c_err @ lq @ c_err + np.trace(nbar @ lq))

        ln = lc @ nbar
        tr1 = float(np.trace(ln))
        sel_lc = sel.T @ lc
        # Cross-covariance kernel of the fourth-moment expansion.
        lc_n_lc = lc @ nbar @ lc
        quad = (delta * eta * sel_lc @ sel
                + 4.0 * gamma_th * sel.T @ lc_n_lc @ sel
                + 2.0 * gamma_th * (h2 + tr1) * sel_lc @ sel)
        gu_pull = lam.T @ _POS.T @ p_gu
        lin = (delta * eta * (sel.T @ (lc @ c_state) - sel.T @ gu_pull)
               + 4.0 * gamma_th * sel.T @ lc_n_lc @ c_err
               + 2.0 * gamma_th * (h2 + tr1) * sel_lc @ c_err)
        q_err = float(c_err @ lc @ c_err)
        const = gamma_th * (4.0 * float(c_err @ lc_n_lc @ c_err)
                            + 2.0 * q_err * tr1 + tr1 ** 2
                            + 2.0 * float(np.trace(ln @ ln))
                            + 2.0 * h2 * (q_err + tr1) + h2 * h2)
        const += delta * eta * (float(c_state @ lc @ c_state)
                                - 2.0 * float(c_state @ gu_pull)
                                + float(p_gu @ p_gu) + h2)
        const -= gamma
        sensing.append(SensingTerm(quartic_weight=gamma_th, sel=sel,
                                   offset=c_err, lam_c=lc,
                                   quad=0.5 * (quad + quad.T), lin=lin,
                                   const=const))

    return MpcProblem(n0=n0, obj_quad=0.5 * (obj_quad + obj_quad.T),
                      obj_lin=obj_lin, obj_const=obj_const, sensing=sensing,
                      a_max=a_max, v_max=v_max,
                      v_uav=np.asarray(v_uav, dtype=float), dt=dt)


@dataclass
class SolverOptions:
    barrier_t0: float = 1.0
    barrier_mu: float = 10.0
    gap_tol: float = 1e-8
    newton_tol: float = 1e-9
    max_newton: int = 80
    max_outer: int = 60
    soft_mode: bool = True
    soft_penalty: float = 1e4
    feas_tol: float = 1e-6


@dataclass
class MpcSolution:
    u_hat: np.ndarray
    objective: float
    status: str
    iterations: int
    kkt_residual: float


def _lift_quadratic(c: QuadraticConstraint, dim: int,
                    slack_idx: int | None = None) -> QuadraticConstraint:
    """Embed a quadratic constraint into a larger variable, optionally as
    f(u) - s <= 0 with s at ``slack_idx``."""
    n = c.P.shape[0]
    P = np.zeros((dim, dim))
    P[:n, :n] = c.P
    q = np.zeros(dim)
    q[:n] = c.q
    if slack_idx is not None:
        q[slack_idx] -= 0.5
    return QuadraticConstraint(P=P, q=q, r=c.r)


def _lift_sensing(s: SensingTerm, dim: int,
                  slack_idx: int | None = None) -> SensingTerm:
    n = s.sel.shape[1]
    sel = np.zeros((s.sel.shape[0], dim))
    sel[:, :n] = s.sel
    quad = np.zeros((dim, dim))
    quad[:n, :n] = s.quad
    lin = np.zeros(dim)
    lin[:n] = s.lin
    if slack_idx is not None:
        lin[slack_idx] -= 0.5
    return SensingTerm(quartic_weight=s.quartic_weight, sel=sel,
                       offset=s.offset, lam_c=s.lam_c, quad=quad, lin=lin,
                       const=s.const)


def _slack_nonneg(dim: int, slack_idx: int) -> QuadraticConstraint:
    q = np.zeros(dim)
    q[slack_idx] = -0.5
    return QuadraticConstraint(P=np.zeros((dim, dim)), q=q, r=0.0)


class _Compiled:
    """Stacked evaluation of all constraints of one barrier problem.

    Quadratic constraints evaluate in one batched contraction; the few
    quartic terms loop.  ``line_coeffs`` returns each constraint's exact
    polynomial increment along a ray, which makes backtracking both cheap and
    cancellation-free (constraint values near zero never get recomputed from
    large opposing terms).
    """

    def __init__(self, quads: list[QuadraticConstraint],
                 sens: list[SensingTerm], n: int):
        self.n = n
        self.kq = len(quads)
        self.sens = sens
        self.k = self.kq + len(sens)
        if quads:
            self.P = np.stack([c.P for c in quads])
            self.q = np.stack([c.q for c in quads])
            self.r = np.array([c.r for c in quads])

    def evaluate(self, x):
        """Values (k,), gradients (k, n), and per-quartic cache at x."""
        vals = np.empty(self.k)
        grads = np.empty((self.k, self.n))
        if self.kq:
            Px = self.P @ x
            vals[:self.kq] = Px @ x + 2.0 * self.q @ x + self.r
            grads[:self.kq] = 2.0 * (Px + self.q)
        cache = []
        for j, s in enumerate(self.sens):
            m = s.sel @ x + s.offset
            lm = s.lam_c @ m
            qv = float(m @ lm)
            gq = 2.0 * (s.sel.T @ lm)
            quad_x = s.quad @ x
            vals[self.kq + j] = (s.quartic_weight * qv * qv + x @ quad_x
                                 + 2.0 * s.lin @ x + s.const)
            grads[self.kq + j] = (2.0 * s.quartic_weight * qv * gq
                                  + 2.0 * (quad_x + s.lin))
            cache.append((qv, gq))
        return vals, grads, cache

    def barrier_hessian(self, x, w_lin, w_sq, grads, cache):
        """Sum of w_lin[k] * hess_k + w_sq[k] * grad_k grad_k'."""
        H = np.einsum("k,ki,kj->ij", w_sq, grads, grads)
        if self.kq:
            H += 2.0 * np.einsum("k,kij->ij", w_lin[:self.kq], self.P)
        for j, s in enumerate(self.sens):
            qv, gq = cache[j]
            Hs = (s.quartic_weight * (2.0 * np.outer(gq, gq)
                                      + 2.0 * qv * s._quad_q) + 2.0 * s.quad)
            H += w_lin[self.kq + j] * Hs
        return H

    def line_coeffs(self, x, dx, grads, cache):
        """Polynomial increment coefficients (k, 4): dv = c1 a + ... + c4 a^4."""
        C = np.zeros((self.k, 4))
        C[:, 0] = grads @ dx
        if self.kq:
            C[:self.kq, 1] = np.einsum("kij,i,j->k", self.P, dx, dx)
        for j, s in enumerate(self.sens):
            qv, gq = cache[j]
            sd = s.sel @ dx
            q1 = float(gq @ dx)
            q2 = float(sd @ s.lam_c @ sd)
            g = s.quartic_weight
            C[self.kq + j, 1] = g * (q1 * q1 + 2.0 * qv * q2) + float(dx @ s.quad @ dx)
            C[self.kq + j, 2] = 2.0 * g * q1 * q2
            C[self.kq + j, 3] = g * q2 * q2
        return C


def _centering(x, t, quad, lin, comp: _Compiled, opts: SolverOptions,
               vals=None):
    """Damped Newton minimization of t*f0 + barrier from strictly feasible x.

    The Armijo test compares objective increments (quadratic increment plus
    log1p of the exact per-constraint polynomial increments), which stays
    accurate when t*f0 dwarfs the per-step progress.  A plateau detector
    stops the loop when the decrement reaches its float-precision floor,
    which for large t can sit above the nominal tolerance.
    """
    steps = 0
    best_dec2 = np.inf
    stall = 0
    for _ in range(opts.max_newton):
        fresh_vals, grads, cache = comp.evaluate(x)
        # Carry line-search-updated values: the polynomial increments keep
        # boundary-hugging entries strictly negative, where a fresh
        # evaluation could flip sign by roundoff.
        if vals is None:
            vals = fresh_vals
        g0 = 2.0 * (quad @ x + lin)
        w = -1.0 / vals
        grad = t * g0 + grads.T @ w
        hess = t * 2.0 * quad + comp.barrier_hessian(x, w, w * w, grads, cache)
        try:
            cf = scipy.linalg.cho_factor(hess, lower=True)
        except scipy.linalg.LinAlgError:
            hess = hess + 1e-10 * np.trace(hess) * np.eye(hess.shape[0])
            cf = scipy.linalg.cho_factor(hess, lower=True)
        dx = -scipy.linalg.cho_solve(cf, grad)
        decrement2 = float(-grad @ dx)
        if decrement2 <= opts.newton_tol ** 2:
            break
        if decrement2 < 0.5 * best_dec2:
            best_dec2 = decrement2
            stall = 0
        else:
            stall += 1
            if stall >= 4:
                break

        C = comp.line_coeffs(x, dx, grads, cache)
        slope = float(grad @ dx)
        f0_slope = float(g0 @ dx)
        quad_dx = float(dx @ quad @ dx)
        alpha = 1.0
        for _ in range(100):
            dv = alpha * (C[:, 0] + alpha * (C[:, 1] + alpha * (C[:, 2] + alpha * C[:, 3])))
            new_vals = vals + dv
            if np.all(new_vals < 0.0):
                delta_phi = t * alpha * (f0_slope + alpha * quad_dx)
                delta_phi += float(np.sum(-np.log1p(dv / vals)))
                if delta_phi <= 0.01 * alpha * slope:
                    break
            alpha *= 0.5
        else:
            break
        if alpha < 1e-13:
            break
        x = x + alpha * dx
        vals = new_vals
        steps += 1
    return x, steps, vals


def _barrier_minimize(x, quad, lin, comp: _Compiled, opts: SolverOptions):
    """Outer barrier loop; returns (x, total Newton steps, final t)."""
    t = opts.barrier_t0
    total = 0
    vals = None
    for _ in range(opts.max_outer):
        x, steps, vals = _centering(x, t, quad, lin, comp, opts, vals)
        total += steps
        if comp.k == 0 or comp.k / t < opts.gap_tol:
            break
        t *= opts.barrier_mu
    return x, total, t


def _phase_one(quads, sens, n, opts: SolverOptions):
    """Minimize the worst violation over (u, s); success when s goes negative."""
    dim = n + 1
    lifted = _Compiled([_lift_quadratic(c, dim, slack_idx=n) for c in quads],
                       [_lift_sensing(s, dim, slack_idx=n) for s in sens], dim)
    z = np.zeros(dim)
    worst = max(c.value(z[:n]) for c in quads + sens)
    z[n] = worst + abs(worst) * 0.1 + 1.0
    quad = np.zeros((dim, dim))
    lin = np.zeros(dim)
    lin[n] = 0.5  # objective s, written as 2*lin'z
    t = opts.barrier_t0
    vals = None
    for _ in range(opts.max_outer):
        z, _, vals = _centering(z, t, quad, lin, lifted, opts, vals)
        if z[n] < -1e-9:
            return z[:n].copy(), True
        if lifted.k / t < opts.gap_tol:
            break
        t *= opts.barrier_mu
    return z[:n].copy(), bool(z[n] < 0.0)


def _kkt_residual(u, quad, lin, constraints, t):
    """Stationarity residual with best nonnegative duals on the active set.

    Constraints whose barrier dual is non-negligible are active candidates;
    the dual vector minimizing the stationarity norm over them comes from
    nonnegative least squares.  This reads out solution quality without the
    float noise of raw barrier duals at near-vertex optima.
    """
    g0 = 2.0 * (quad @ u + lin)
    cand = [c for c in constraints if t * max(-c.value(u), 0.0) <= 1e6]
    if not cand:
        return float(np.linalg.norm(g0))
    G = np.stack([c.grad(u) for c in cand], axis=1)
    lam, _ = scipy.optimize.nnls(G, -g0)
    return float(np.linalg.norm(G @ lam + g0))


def solve(p: MpcProblem, opts: SolverOptions | None = None,
          warm_start=None) -> MpcSolution:
    """Solve the slot program.

    Tries the unconstrained minimizer first (exact when it is feasible), then
    a feasible-start barrier method, falling back to the soft echo-slack mode
    when no strictly feasible point exists and soft mode is enabled.  A
    strictly feasible ``warm_start`` (e.g. the previous slot's shifted
    solution) skips the damped initial Newton phase.
    """
    opts = opts or SolverOptions()
    n = 2 * p.n0
    motion = p.motion_constraints()
    constraints = motion + list(p.sensing)

    comp = _Compiled(motion, list(p.sensing), n)

    u_free = scipy.linalg.solve(p.obj_quad, -p.obj_lin, assume_a="pos")
    if np.all(comp.evaluate(u_free)[0] <= 0.0):
        return MpcSolution(u_hat=u_free, objective=p.objective(u_free),
                           status="optimal", iterations=0,
                           kkt_residual=float(np.linalg.norm(
                               2.0 * (p.obj_quad @ u_free + p.obj_lin))))

    start = None
    if warm_start is not None:
        warm_start = np.asarray(warm_start, dtype=float)
        if (warm_start.shape == (n,)
                and np.all(comp.evaluate(warm_start)[0] < 0.0)):
            start, ok = warm_start, True
    if start is None:
        u0 = np.zeros(n)
        if np.all(comp.evaluate(u0)[0] < 0.0):
            start, ok = u0, True
        else:
            start, ok = _phase_one(motion, list(p.sensing), n, opts)

    if ok:
        u, steps, t = _barrier_minimize(start, p.obj_quad, p.obj_lin, comp, opts)
        return MpcSolution(u_hat=u, objective=p.objective(u),
                           status="optimal", iterations=steps,
                           kkt_residual=_kkt_residual(u, p.obj_quad, p.obj_lin,
                                                      constraints, t))

    if not opts.soft_mode:
        return MpcSolution(u_hat=u0, objective=p.objective(u0),
                           status="infeasible", iterations=0,
                           kkt_residual=np.inf)

    return _solve_soft(p, opts)


def _solve_soft(p: MpcProblem, opts: SolverOptions) -> MpcSolution:
    """Penalty mode: hard motion bounds, linear charge on echo-floor slack."""
    n = 2 * p.n0
    motion = p.motion_constraints()
    soft = list(p.sensing)
    k = len(soft)
    dim = n + k

    z0 = np.zeros(dim)
    if not all(c.value(z0[:n]) < 0.0 for c in motion):
        start, ok = _phase_one(motion, [], n, opts)
        if not ok:
            return MpcSolution(u_hat=np.zeros(n),
                               objective=p.objective(np.zeros(n)),
                               status="infeasible", iterations=0,
                               kkt_residual=np.inf)
        z0[:n] = start
    for j, c in enumerate(soft):
        v = c.value(z0[:n])
        z0[n + j] = max(v, 0.0) + abs(v) * 0.1 + 1.0

    quads = ([_lift_quadratic(c, dim) for c in motion]
             + [_slack_nonneg(dim, n + j) for j in range(k)])
    sens = [_lift_sensing(s, dim, slack_idx=n + j) for j, s in enumerate(soft)]
    comp = _Compiled(quads, sens, dim)

    quad = np.zeros((dim, dim))
    quad[:n, :n] = p.obj_quad
    lin = np.zeros(dim)
    lin[:n] = p.obj_lin
    lin[n:] = 0.5 * opts.soft_penalty  # rho * sum(s), written as 2*lin'z

    z, steps, t = _barrier_minimize(z0, quad, lin, comp, opts)
    u = z[:n].copy()
    return MpcSolution(u_hat=u, objective=p.objective(u),
                       status="soft-feasible", iterations=steps,
                       kkt_residual=_kkt_residual(z, quad, lin,
                                                  quads + sens, t))
