import numpy as np
import pytest

from isctrack.dynamics import build_transition, step_error, step_target, step_uav


def test_transition_entries_dt02():
    m = build_transition(0.2, (4e-4, 4e-4, 0.01, 0.01))
    assert m.A[0, 2] == pytest.approx(0.2)
    assert m.B[0, 0] == pytest.approx(0.02)
    assert m.B[2, 0] == pytest.approx(0.2)


def test_transition_b_dt1():
    m = build_transition(1.0, (0, 0, 0, 0))
    expected = np.array([[0.5, 0], [0, 0.5], [1, 0], [0, 1]])
    np.testing.assert_allclose(m.B, expected)


def test_process_noise_diagonal():
    m = build_transition(0.2, (4e-4, 4e-4, 0.01, 0.01))
    np.testing.assert_allclose(m.Qs, np.diag([4e-4, 4e-4, 0.01, 0.01]))


def test_transition_structure():
    m = build_transition(0.37, (1e-3, 2e-3, 3e-3, 4e-3))
    # Unit diagonal, velocity coupling only above it, determinant one.
    np.testing.assert_allclose(np.diag(m.A), np.ones(4))
    assert np.linalg.det(m.A) == pytest.approx(1.0)
    assert m.A[2, 0] == 0.0 and m.A[3, 1] == 0.0


def test_transition_rejects_bad_args():
    with pytest.raises(ValueError):
        build_transition(0.0, (0, 0, 0, 0))
    with pytest.raises(ValueError):
        build_transition(-0.1, (0, 0, 0, 0))
    with pytest.raises(ValueError):
        build_transition(0.2, (-1e-3, 0, 0, 0))


def test_step_uav_examples():
    m = build_transition(0.2, (0, 0, 0, 0))
    np.testing.assert_allclose(step_uav(np.zeros(4), np.zeros(2), m), np.zeros(4))
    np.testing.assert_allclose(step_uav([0, 0, 1, 0], [0, 0], m), [0.2, 0, 1, 0])
    np.testing.assert_allclose(step_uav(np.zeros(4), [1, 0], m), [0.02, 0, 0.2, 0])


def test_step_target_examples():
    m = build_transition(0.2, (4e-4, 4e-4, 0.01, 0.01))
    np.testing.assert_allclose(step_target([0, 400, 0, -1], m, noise=np.zeros(4)),
                               [0, 399.8, 0, -1])
    np.testing.assert_allclose(step_target(np.zeros(4), m, noise=[0.1, 0, 0, 0]),
                               [0.1, 0, 0, 0])


def test_step_target_sample_mean(rng):
    # Sample-mean oracle: noise averages to zero within 4 sigma / sqrt(n).
    m = build_transition(0.2, (4e-4, 4e-4, 0.01, 0.01))
    s = np.array([10.0, -3.0, 1.0, 2.0])
    n = 100_000
    draws = np.array([step_target(s, m, rng=rng) - m.A @ s for _ in range(n)])
    mean = draws.mean(axis=0)
    bound = 4.0 * np.sqrt(np.diag(m.Qs)) / np.sqrt(n)
    assert np.all(np.abs(mean) <= bound)


def test_step_target_covariance(rng):
    # Empirical covariance of the injected noise matches Qs within 5 SE.
    m = build_transition(0.2, (4e-4, 4e-4, 0.01, 0.01))
    s = np.array([0.0, 400.0, 1.5, -2.0])
    n = 100_000
    std = np.sqrt(np.diag(m.Qs))
    noise = rng.standard_normal((n, 4)) * std
    steps = noise  # step_target(s, noise) - A s == noise by construction
    emp = np.cov(steps.T)
    for i in range(4):
        for j in range(4):
            if i == j:
                se = m.Qs[i, i] * np.sqrt(2.0 / n)
            else:
                se = std[i] * std[j] / np.sqrt(n)
            assert abs(emp[i, j] - m.Qs[i, j]) <= 5.0 * se


def test_error_identity(rng):
    # step_error equals the difference of the two stepped states, exactly.
    m = build_transition(0.2, (4e-4, 4e-4, 0.01, 0.01))
    for _ in range(50):
        s_u = rng.uniform(-100, 100, size=4)
        s_t = rng.uniform(-100, 100, size=4)
        u = rng.uniform(-5, 5, size=2)
        noise = rng.normal(size=4) * np.sqrt(np.diag(m.Qs))
        lhs = step_error(s_u - s_t, u, noise, m)
        rhs = step_uav(s_u, u, m) - step_target(s_t, m, noise=noise)
        np.testing.assert_array_equal(lhs, rhs)


def test_error_examples():
    m = build_transition(0.2, (0, 0, 0, 0))
    np.testing.assert_allclose(
        step_error(np.zeros(4), np.zeros(2), np.zeros(4), m), np.zeros(4))
    np.testing.assert_allclose(
        step_error([10, 0, 0, 0], np.zeros(2), np.zeros(4), m), [10, 0, 0, 0])
