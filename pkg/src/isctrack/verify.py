"""Independent numerical oracles and the pass/fail property suite.

Every check here recomputes a quantity through a route that shares no code
with the implementation it audits: central finite differences against the
analytic Jacobian, Monte Carlo sampling against the closed-form moments,
batched projected-gradient ascent against the closed-form beamformers, dense
grid search against the barrier solver, and a scalar fixed-point iteration
against the Riccati recursion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import baselines, beamforming, estimator, mpc, rf
from .dynamics import build_transition


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


# ---------------------------------------------------------------------------
# Jacobian vs central finite differences
# ---------------------------------------------------------------------------

def fd_jacobian(fun, x, rel_step: float = 1e-4, order: int = 4) -> np.ndarray:
    """Central-difference Jacobian with per-coordinate relative steps.

    ``order=4`` uses the five-point central stencil so the oracle's own
    truncation error stays far below the comparison tolerance.
    """
    x = np.asarray(x, dtype=float)
    f0 = fun(x)
    J = np.zeros((f0.shape[0], x.shape[0]))
    for j in range(x.shape[0]):
        h = rel_step * max(abs(x[j]), 1.0)

        def shifted(mult):
            xs = x.copy()
            xs[j] += mult * h
            return fun(xs)

        if order == 4:
            J[:, j] = (8.0 * (shifted(1) - shifted(-1))
                       - (shifted(2) - shifted(-2))) / (12.0 * h)
        else:
            J[:, j] = (shifted(1) - shifted(-1)) / (2.0 * h)
    return J


def _random_rf(rng) -> tuple[rf.RfConstants, rf.ArrayGeometry]:
    k = rf.RfConstants(beta0=1e-6, fc=30e9, c=3e8, rcs=25.0, sigma_c2=1e-11,
                       sigma_r2=1e-11, mf_gain=1e3, a1=20.0, a2=100.0,
                       altitude=float(rng.uniform(30.0, 80.0)))
    geom = rf.ArrayGeometry(4, 4, 4, 4)
    return k, geom


def _random_geometry(rng):
    uav = np.concatenate([rng.uniform(-300, 300, size=2),
                          rng.uniform(-20, 20, size=2)])
    target = np.concatenate([uav[:2] + rng.uniform(-250, 250, size=2),
                             rng.uniform(-5, 5, size=2)])
    return uav, target


def check_jacobian(n_cases: int = 120, tol: float = 1e-5,
                   seed: int = 20260801) -> CheckResult:
    """Analytic measurement Jacobian vs central differences, row-normalized."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        k, geom = _random_rf(rng)
        uav, target = _random_geometry(rng)
        w = rng.standard_normal(geom.m_t) + 1j * rng.standard_normal(geom.m_t)
        w *= np.sqrt(1.0) / np.linalg.norm(w)

        J_an = estimator.measurement_jacobian(target, uav, w, k, geom)
        J_fd = fd_jacobian(
            lambda s: rf.measurement_mean(s, uav, w, k, geom), target)
        row_scale = np.maximum(np.max(np.abs(J_fd), axis=1), 1e-12)
        rel = np.max(np.abs(J_an - J_fd) / row_scale[:, None])
        worst = max(worst, float(rel))
    return CheckResult("jacobian-finite-difference", worst < tol,
                       f"worst relative error {worst:.3e} over {n_cases} "
                       f"geometries (tol {tol:g})")


# ---------------------------------------------------------------------------
# Moment formulas vs Monte Carlo sampling
# ---------------------------------------------------------------------------

def _psd_factor(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
    return vecs * np.sqrt(np.clip(vals, 0.0, None))


def sample_error_positions(sm: mpc.StackedModel, u_hat, i: int, n_samples: int,
                           rng) -> np.ndarray:
    """Sampled horizontal tracking-error offsets i steps ahead, (n_samples, 2)."""
    idx = i - 1
    mean = sm.lam[idx] @ (sm.sel[idx] @ np.asarray(u_hat, float) + sm.c_err[idx])
    pos_map = sm.lam[idx][:2, :]
    L = _psd_factor(sm.nbar[idx])
    G = pos_map @ L
    z = rng.standard_normal((n_samples, L.shape[1]))
    return mean[:2] + z @ G.T


def mc_expected_d4(sm, u_hat, i, altitude, n_samples, rng) -> tuple[float, float]:
    """Sampling estimate of the expected fourth distance power and its SE."""
    x = sample_error_positions(sm, u_hat, i, n_samples, rng)
    d4 = (np.sum(x * x, axis=1) + altitude ** 2) ** 2
    return float(np.mean(d4)), float(np.std(d4, ddof=1) / np.sqrt(n_samples))


def mc_expected_quadratic(sm, u_hat, i, n_samples, rng) -> tuple[float, float]:
    """Sampling estimate of the expected error cost and its SE."""
    idx = i - 1
    mean = sm.lam[idx] @ (sm.sel[idx] @ np.asarray(u_hat, float) + sm.c_err[idx])
    L = _psd_factor(sm.nbar[idx])
    G = sm.lam[idx] @ L
    z = rng.standard_normal((n_samples, L.shape[1]))
    e = mean + z @ G.T
    vals = np.einsum("ni,ij,nj->n", e, sm.Q, e)
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / np.sqrt(n_samples))


def random_stacked(rng, n0: int | None = None) -> mpc.StackedModel:
    """Random but well-scaled stacked model for moment checks."""
    n0 = n0 or int(rng.integers(1, 6))
    model = build_transition(0.2, rng.uniform(1e-4, 0.05, size=4))
    e_hat = np.concatenate([rng.uniform(-80, 80, size=2),
                            rng.uniform(-8, 8, size=2)])
    s_uav = np.concatenate([rng.uniform(-200, 200, size=2),
                            rng.uniform(-10, 10, size=2)])
    a = rng.standard_normal((4, 4))
    M_hat = a @ a.T * rng.uniform(0.1, 20.0)
    Q = np.eye(4)
    R = np.eye(2)
    return mpc.build_stacked(e_hat, s_uav, M_hat, model, n0, Q, R)


def check_fourth_moment(n_instances: int = 20, n_samples: int = 1_000_000,
                        seed: int = 20260802) -> CheckResult:
    """Closed-form expected d^4 vs Monte Carlo within 5 standard errors."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        sm = random_stacked(rng)
        i = int(rng.integers(1, sm.n0 + 1))
        u_hat = rng.uniform(-3, 3, size=2 * sm.n0)
        altitude = float(rng.uniform(20, 80))
        closed = mpc.expected_d4(sm, u_hat, i, altitude)
        est, se = mc_expected_d4(sm, u_hat, i, altitude, n_samples, rng)
        z = abs(closed - est) / max(se, 1e-300)
        worst = max(worst, z)
    return CheckResult("fourth-moment-monte-carlo", worst < 5.0,
                       f"worst |closed - MC| = {worst:.2f} standard errors "
                       f"over {n_instances} instances of {n_samples} samples")


# ---------------------------------------------------------------------------
# Closed-form beamformers vs projected-gradient ascent
# ---------------------------------------------------------------------------

def steering_from_cosines(cx: float, cy: float, mx: int, my: int) -> np.ndarray:
    ax = np.exp(1j * np.pi * cx * np.arange(mx))
    ay = np.exp(1j * np.pi * cy * np.arange(my))
    return np.kron(ax, ay)


def pga_max_gain(a_obj: np.ndarray, a_floor: np.ndarray, floor_gain: float,
                 power: float, n_starts: int = 48, n_iter: int = 1500,
                 seed: int = 0) -> float:
    """Projected-gradient ascent oracle for the slot beam design.

    Maximizes |a_obj^H w|^2 subject to ||w||^2 <= power and
    |a_floor^H w|^2 >= floor_gain, by gradient ascent with alternating
    projections onto the two constraint sets, batched over random starts
    plus the two matched-beam starts.
    """
    m = a_obj.shape[0]
    rng = np.random.default_rng(seed)
    W = rng.standard_normal((m, n_starts)) + 1j * rng.standard_normal((m, n_starts))
    W[:, 0] = a_obj
    W[:, 1] = a_floor
    W = W / np.linalg.norm(W, axis=0, keepdims=True) * np.sqrt(power)

    sqrt_power = np.sqrt(power)
    norm_floor = float(np.linalg.norm(a_floor))
    x0 = np.sqrt(floor_gain) / norm_floor
    if x0 > sqrt_power * (1.0 + 1e-12):
        return -np.inf  # empty feasible set
    x0 = min(x0, sqrt_power)
    unit_floor = a_floor / norm_floor
    step = 0.9 / m

    def project(W):
        # Split each column into its floor-direction component and the rest,
        # then project the two magnitudes onto {x >= x0, x^2 + y^2 <= P}.
        beta = unit_floor.conj() @ W
        perp = W - unit_floor[:, None] * beta[None, :]
        x = np.abs(beta)
        y = np.linalg.norm(perp, axis=0)
        phase = np.where(x > 1e-300, beta / np.maximum(x, 1e-300), 1.0)

        r = np.hypot(x, y)
        scale = np.where(r > sqrt_power, sqrt_power / np.maximum(r, 1e-300), 1.0)
        xn = x * scale
        yn = y * scale
        low = xn < x0
        yn = np.where(low, np.minimum(yn, np.sqrt(max(power - x0 * x0, 0.0))), yn)
        xn = np.where(low, x0, xn)

        yscale = np.where(y > 1e-300, yn / np.maximum(y, 1e-300), 0.0)
        return unit_floor[:, None] * (phase * xn)[None, :] + perp * yscale[None, :]

    W = project(W)
    for _ in range(n_iter):
        grad = a_obj[:, None] * (a_obj.conj() @ W)[None, :]
        W = project(W + step * grad)

    vals = np.abs(a_obj.conj() @ W) ** 2
    return float(np.max(vals))


def _random_feasibility_inputs(rng, mx: int, my: int,
                               normalize_budget: bool = True):
    m_t = mx * my
    power = 1.0 / m_t if normalize_budget else float(rng.uniform(0.5, 2.0))
    cos_t = steering_from_cosines(float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)), mx, my)
    cos_c = steering_from_cosines(float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)), mx, my)
    gamma = m_t * power
    d_gu = float(rng.uniform(50, 600))
    need_rate = float(rng.uniform(0.02, 0.98)) * gamma
    eta = need_rate / d_gu ** 2
    gamma_d = float(rng.uniform(0.02, 0.98)) * gamma
    fi = beamforming.FeasibilityInputs(
        a_target=cos_t, a_gu=cos_c, d_gu=d_gu, gamma=gamma, eta=eta,
        gamma_d=gamma_d, delta=1, rate_threshold=2.5)
    return fi, power


def check_beamforming(n_instances: int = 200, tol: float = 1e-6,
                      seed: int = 20260803) -> CheckResult:
    """Closed-form slot optima vs the ascent oracle at 4 and 16 antennas.

    Budgets are normalized so the full-power gain is 1, making the absolute
    tolerance meaningful across array sizes.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    per_size = n_instances // 2
    for mx, my in ((2, 2), (4, 4)):
        for j in range(per_size):
            fi, power = _random_feasibility_inputs(rng, mx, my)
            if j % 2 == 0:
                closed = beamforming.gamma_star(fi)
                oracle = pga_max_gain(fi.a_target, fi.a_gu,
                                      fi.eta * fi.d_gu ** 2, power,
                                      seed=int(rng.integers(1 << 31)))
            else:
                _, r_closed = beamforming.comm_centric_w(fi, power)
                closed = 2.0 ** r_closed - 1.0  # compare in gain units
                g_or = pga_max_gain(fi.a_gu, fi.a_target, fi.gamma_d, power,
                                    seed=int(rng.integers(1 << 31)))
                oracle = (2.0 ** beamforming.rate_from_user_gain(g_or, fi) - 1.0)
            worst = max(worst, abs(closed - oracle))
    return CheckResult("beamforming-ascent-oracle", worst < tol,
                       f"worst |closed - oracle| = {worst:.3e} over "
                       f"{2 * per_size} instances (tol {tol:g})")


# ---------------------------------------------------------------------------
# Lemma checks
# ---------------------------------------------------------------------------

def check_lemma1(n_instances: int = 1000, seed: int = 20260804) -> CheckResult:
    """Sensing- and communication-centric verdicts agree on random instances."""
    rng = np.random.default_rng(seed)
    disagreements = 0
    for _ in range(n_instances):
        mx, my = (2, 2) if rng.uniform() < 0.5 else (4, 4)
        fi, _ = _random_feasibility_inputs(rng, mx, my, normalize_budget=False)
        s_flag, c_flag = beamforming.lemma1_check(fi)
        if s_flag != c_flag:
            disagreements += 1
    return CheckResult("lemma1-equivalence", disagreements == 0,
                       f"{disagreements} disagreements over {n_instances} instances")


def lemma2_sweep_geometry():
    """Fixed misaligned geometry where both axis offsets are 2/3.

    UAV above the predicted target; user placed so each direction-cosine gap
    is exactly 2/3, which keeps the array alignment decaying cleanly as the
    aperture doubles.
    """
    return {"p_uav": (0.0, 0.0), "p_target": (0.0, 0.0),
            "p_gu": (-100.0, -100.0), "altitude": 50.0, "power": 1.0,
            "need_rate": 3.0}


def lemma2_gaps(sizes=((2, 2), (4, 4), (8, 8), (16, 16))) -> list[float]:
    g = lemma2_sweep_geometry()
    d_gu = rf.distance(g["p_uav"], g["p_gu"], g["altitude"])
    gaps = []
    for mx, my in sizes:
        a_t = rf.steering_vector(g["p_uav"], g["p_target"], mx, my, g["altitude"])
        a_c = rf.steering_vector(g["p_uav"], g["p_gu"], mx, my, g["altitude"])
        fi = beamforming.FeasibilityInputs(
            a_target=a_t, a_gu=a_c, d_gu=d_gu, gamma=mx * my * g["power"],
            eta=g["need_rate"] / d_gu ** 2, gamma_d=0.0, delta=1,
            rate_threshold=2.5)
        gaps.append(beamforming.gamma_star(fi) - beamforming.gamma_lower(fi))
    return gaps


def check_lemma2(n_instances: int = 400, seed: int = 20260805) -> CheckResult:
    """Lower bound below the optimum everywhere; exact at coincidence;
    gap shrinking as the fixed-geometry array doubles."""
    rng = np.random.default_rng(seed)
    ok = True
    details = []
    worst = 0.0
    for _ in range(n_instances):
        mx, my = (2, 2) if rng.uniform() < 0.5 else (4, 4)
        fi, _ = _random_feasibility_inputs(rng, mx, my, normalize_budget=False)
        gap = beamforming.gamma_star(fi) - beamforming.gamma_lower(fi)
        worst = min(worst, gap)
    if worst < -1e-9:
        ok = False
        details.append(f"bound violated by {-worst:.3e}")

    # delta = 0: coincident predicted target and user.
    a = steering_from_cosines(0.3, -0.5, 4, 4)
    fi0 = beamforming.FeasibilityInputs(
        a_target=a, a_gu=a.copy(), d_gu=200.0, gamma=16.0, eta=16.0 / 200.0 ** 2 * 0.5,
        gamma_d=0.0, delta=0, rate_threshold=2.5)
    exact = abs(beamforming.gamma_star(fi0) - beamforming.gamma_lower(fi0))
    if exact > 1e-12 or abs(beamforming.gamma_lower(fi0) - fi0.gamma) > 1e-12:
        ok = False
        details.append(f"delta=0 tightness violated by {exact:.3e}")

    gaps = lemma2_gaps()
    if not all(gaps[i + 1] <= gaps[i] + 1e-12 for i in range(len(gaps) - 1)):
        ok = False
        details.append(f"gap sweep not nonincreasing: {gaps}")

    details.insert(0, f"min bound margin {worst:.2e}; sweep gaps "
                      + "/".join(f"{g:.3f}" for g in gaps))
    return CheckResult("lemma2-lower-bound", ok, "; ".join(details))


# ---------------------------------------------------------------------------
# Solver checks
# ---------------------------------------------------------------------------

def _random_problem(rng, n0: int, a_max: float, v_max: float,
                    gamma_th_scale: float = 0.0) -> mpc.MpcProblem:
    model = build_transition(0.2, (4e-4, 4e-4, 0.01, 0.01))
    e_hat = np.concatenate([rng.uniform(-30, 30, size=2), rng.uniform(-3, 3, size=2)])
    s_uav = np.concatenate([rng.uniform(-100, 100, size=2), rng.uniform(-3, 3, size=2)])
    a = rng.standard_normal((4, 4))
    M_hat = a @ a.T
    sm = mpc.build_stacked(e_hat, s_uav, M_hat, model, n0, np.eye(4), np.eye(2))
    deltas = [1] * n0
    return mpc.build_problem(sm, p_gu=(150.0, -50.0), deltas=deltas,
                             eta=4e-5, gamma=16.0, gamma_th=gamma_th_scale,
                             altitude=50.0, a_max=a_max, v_max=v_max,
                             v_uav=s_uav[2:], dt=model.dt)


def grid_search_n1(problem: mpc.MpcProblem, grid_step: float = 1e-3):
    """Dense feasible-grid minimizer for a one-step problem (oracle).

    The lattice over the acceleration disk is augmented with points sampled
    along both motion-constraint boundaries at the same arc resolution, so a
    boundary optimum is localized to one step rather than to the lattice's
    interior offset.
    """
    assert problem.n0 == 1
    r = problem.a_max
    axis = np.arange(-r, r + grid_step / 2, grid_step)
    ux, uy = np.meshgrid(axis, axis, indexing="ij")
    pts = np.stack([ux.ravel(), uy.ravel()], axis=1)

    phi = np.arange(0.0, 2.0 * np.pi, grid_step / r)
    rim_a = r * np.stack([np.cos(phi), np.sin(phi)], axis=1)
    r_v = problem.v_max / problem.dt
    phi_v = np.arange(0.0, 2.0 * np.pi, grid_step / r_v)
    center_v = -problem.v_uav / problem.dt
    rim_v = center_v + r_v * np.stack([np.cos(phi_v), np.sin(phi_v)], axis=1)
    extra = [rim_a, rim_v]
    # Intersection points of the two motion circles (vertex optima).
    d = np.linalg.norm(center_v)
    if 1e-12 < d < r + r_v and d > abs(r - r_v):
        a_len = (d * d + r * r - r_v * r_v) / (2.0 * d)
        h2 = r * r - a_len * a_len
        if h2 >= 0.0:
            e1 = center_v / d
            e2 = np.array([-e1[1], e1[0]])
            h = np.sqrt(h2)
            extra.append(np.stack([a_len * e1 + h * e2, a_len * e1 - h * e2]))
    pts = np.concatenate([pts] + extra, axis=0)

    tol = 1e-12
    feas = np.sum(pts * pts, axis=1) <= r * r + tol
    vpred = problem.v_uav[None, :] + problem.dt * pts
    feas &= np.sum(vpred * vpred, axis=1) <= problem.v_max ** 2 + tol
    for s in problem.sensing:
        m = pts @ s.sel.T + s.offset[None, :]
        q = np.einsum("ni,ij,nj->n", m, s.lam_c, m)
        val = (s.quartic_weight * q * q
               + np.einsum("ni,ij,nj->n", pts, s.quad, pts)
               + 2.0 * pts @ s.lin + s.const)
        feas &= val <= tol
    if not np.any(feas):
        return None, None
    obj = (np.einsum("ni,ij,nj->n", pts, problem.obj_quad, pts)
           + 2.0 * pts @ problem.obj_lin + problem.obj_const)
    obj = np.where(feas, obj, np.inf)
    best = int(np.argmin(obj))
    return pts[best], float(obj[best])


def check_solver_unconstrained(n_instances: int = 30, tol: float = 1e-8,
                               seed: int = 20260806) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        n0 = int(rng.integers(1, 6))
        p = _random_problem(rng, n0, a_max=1e6, v_max=1e6, gamma_th_scale=0.0)
        # gamma_th = 0 and delta-terms dominated: make sensing trivially slack
        for s in p.sensing:
            s.quad[:] = 0.0
            s.lin[:] = 0.0
            s.const = -1.0
            s.quartic_weight = 0.0
        sol = mpc.solve(p)
        direct = scipy.linalg.solve(p.obj_quad, -p.obj_lin, assume_a="pos")
        worst = max(worst, float(np.linalg.norm(sol.u_hat - direct)))
        if sol.status != "optimal":
            return CheckResult("solver-unconstrained", False,
                               f"unexpected status {sol.status}")
    return CheckResult("solver-unconstrained", worst < tol,
                       f"worst |u - direct| = {worst:.2e} (tol {tol:g})")


def check_solver_grid(n_instances: int = 12, seed: int = 20260807) -> CheckResult:
    """One-step solves vs dense grid search, plus KKT residual bounds.

    Instances keep the echo constraint present but inactive at the optimum;
    the grid oracle samples the motion boundaries exactly, so active motion
    bounds are fair game while a curved quartic boundary would only measure
    the lattice's own bias.
    """
    rng = np.random.default_rng(seed)
    worst_u = 0.0
    worst_obj = 0.0
    worst_kkt = 0.0
    used = 0
    while used < n_instances:
        p = _random_problem(rng, 1, a_max=0.4,
                            v_max=float(rng.uniform(1.0, 3.0)),
                            gamma_th_scale=float(rng.uniform(0, 2e-10)))
        sol = mpc.solve(p)
        if sol.status != "optimal":
            continue
        if any(s.value(sol.u_hat) > -1e-3 for s in p.sensing):
            continue
        u_grid, obj_grid = grid_search_n1(p)
        if u_grid is None:
            continue
        used += 1
        worst_u = max(worst_u, float(np.linalg.norm(sol.u_hat - u_grid)))
        worst_obj = max(worst_obj, abs(sol.objective - obj_grid))
        worst_kkt = max(worst_kkt, sol.kkt_residual)
    passed = worst_u < 2e-3 and worst_obj < 1e-5 and worst_kkt < 1e-6
    return CheckResult("solver-grid-search", passed,
                       f"worst |u-grid| {worst_u:.2e} (tol 2e-3), "
                       f"|obj-grid| {worst_obj:.2e} (tol 1e-5), "
                       f"KKT {worst_kkt:.2e} (tol 1e-6) over {used} instances")


def check_convexity(n_instances: int = 10, n_points: int = 100,
                    seed: int = 20260808) -> CheckResult:
    """Objective and constraint Hessians PSD at random points."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        n0 = int(rng.integers(1, 6))
        p = _random_problem(rng, n0, a_max=5.0, v_max=20.0,
                            gamma_th_scale=4e-9)
        cons = p.all_constraints()
        for _ in range(n_points):
            u = rng.uniform(-5, 5, size=2 * n0)
            worst = min(worst, float(np.min(np.linalg.eigvalsh(2.0 * p.obj_quad))))
            for c in cons:
                worst = min(worst, float(np.min(np.linalg.eigvalsh(c.hess(u)))))
    return CheckResult("constraint-convexity", worst >= -1e-8,
                       f"min Hessian eigenvalue {worst:.2e} (floor -1e-8)")


def golden_ratio_fixed_point(tol: float = 1e-14, max_iter: int = 200) -> float:
    """Fixed point of the scalar p -> 1 + p - p^2/(1+p) map by pure iteration."""
    p = 1.0
    for _ in range(max_iter):
        nxt = 1.0 + p - p * p / (1.0 + p)
        if abs(nxt - p) < tol:
            return nxt
        p = nxt
    return p


def check_riccati(tol: float = 1e-9) -> CheckResult:
    A = np.array([[1.0]]); B = np.array([[1.0]])
    Q = np.array([[1.0]]); R = np.array([[1.0]])
    sched = baselines.riccati_backward(A, B, Q, R, 200)
    fixed = golden_ratio_fixed_point()
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    err = max(abs(sched.cost(1)[0, 0] - golden), abs(fixed - golden))
    return CheckResult("riccati-golden-ratio", err < tol,
                       f"|P_1 - golden ratio| = {err:.2e} (tol {tol:g})")


def check_lqr_mpc_equivalence(n_slots: int = 12, tol: float = 1e-6,
                              seed: int = 20260809) -> CheckResult:
    """Unconstrained receding-horizon MPC reproduces the LQR trajectory cost."""
    rng = np.random.default_rng(seed)
    model = build_transition(0.2, (0.0, 0.0, 0.0, 0.0))
    Q = np.eye(4); R = np.eye(2)
    e0 = np.concatenate([rng.uniform(-20, 20, size=2), rng.uniform(-2, 2, size=2)])

    sched = baselines.riccati_backward(model.A, model.B, Q, R, n_slots)
    e = e0.copy()
    cost_lqr = 0.0
    for n in range(1, n_slots):
        u = -sched.gain(n) @ e
        cost_lqr += float(e @ Q @ e + u @ R @ u)
        e = model.A @ e + model.B @ u
    cost_lqr += float(e @ Q @ e)

    e = e0.copy()
    cost_mpc = 0.0
    for n in range(1, n_slots):
        n0_eff = n_slots - n
        sm = mpc.build_stacked(e, np.zeros(4), np.zeros((4, 4)), model, n0_eff,
                               Q, R)
        problem = mpc.build_problem(sm, p_gu=(0.0, 0.0), deltas=[0] * n0_eff,
                                    eta=0.0, gamma=1.0, gamma_th=0.0,
                                    altitude=50.0, a_max=1e9, v_max=1e9,
                                    v_uav=np.zeros(2), dt=model.dt)
        sol = mpc.solve(problem)
        u = sol.u_hat[:2]
        cost_mpc += float(e @ Q @ e + u @ R @ u)
        e = model.A @ e + model.B @ u
    cost_mpc += float(e @ Q @ e)

    err = abs(cost_lqr - cost_mpc)
    return CheckResult("lqr-mpc-cost-equivalence", err < tol,
                       f"|LQR cost - MPC cost| = {err:.2e} (tol {tol:g})")


# ---------------------------------------------------------------------------
# Suite runner
# ---------------------------------------------------------------------------

SUITES = {
    "jacobian": (check_jacobian,),
    "moments": (check_fourth_moment,),
    "beamforming": (check_beamforming,),
    "lemmas": (check_lemma1, check_lemma2),
    "solver": (check_solver_unconstrained, check_solver_grid),
    "convexity": (check_convexity,),
    "riccati": (check_riccati, check_lqr_mpc_equivalence),
}


def run_suite(names: list[str] | None = None) -> list[CheckResult]:
    if not names or "all" in names:
        names = list(SUITES)
    results = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from "
                             f"{sorted(SUITES)} or 'all'")
        for fn in SUITES[name]:
            results.append(fn())
    return results
