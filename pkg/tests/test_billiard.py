"""Billiard map: retardation roots, Doppler factors, iterated traces."""

import math

import numpy as np
import pytest

from cavoptics import BilliardMap, Sinusoidal, Static


def bisect_oracle(g, lo, hi, tol=1e-14, max_iter=200):
    """Independent plain-bisection root finder for oracle values."""
    glo = g(lo)
    assert glo * g(hi) <= 0.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if hi - lo < tol:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.fixture
def sine_map():
    return BilliardMap(Sinusoidal(1.0, 0.1, math.pi))


def test_retarded_time_static():
    m = BilliardMap(Static(1.0))
    assert m.retarded_time(3.0) == pytest.approx(2.0, abs=1e-12)


def test_retarded_time_fixed_point(sine_map):
    # t* + 1 + 0.1 sin(pi t*) = 1 has the root t* = 0
    assert sine_map.retarded_time(1.0) == pytest.approx(0.0, abs=1e-12)


def test_retarded_time_against_bisection_oracle(sine_map):
    traj = sine_map.trajectory
    root = bisect_oracle(lambda t: t + traj.position(t) - 1.5, -1.0, 1.5)
    assert sine_map.retarded_time(1.5) == pytest.approx(root, abs=1e-12)


def test_eval_f_static():
    m = BilliardMap(Static(1.0))
    assert m.eval_f(5.0) == pytest.approx(3.0, abs=1e-12)


def test_eval_f_sinusoidal(sine_map):
    assert sine_map.eval_f(1.0) == pytest.approx(-1.0, abs=1e-12)


def test_f_inverse_identity(sine_map):
    rng = np.random.default_rng(7)
    for tau in rng.uniform(-3.0, 20.0, 50):
        tau = float(tau)
        assert sine_map.eval_f(sine_map.eval_f_inv(tau)) == pytest.approx(
            tau, abs=2 * sine_map.root_tolerance + 1e-12
        )


def test_eval_f_inv_static():
    m = BilliardMap(Static(1.0))
    assert m.eval_f_inv(3.0) == pytest.approx(5.0, abs=1e-12)


def test_eval_f_inv_examples():
    m = BilliardMap(Sinusoidal(1.0, 0.1, math.pi))
    assert m.eval_f_inv(-1.0) == pytest.approx(1.0, abs=1e-12)
    m2 = BilliardMap(Sinusoidal(1.0, 0.01, math.pi))
    traj = m2.trajectory
    # oracle: monotone bisection for t with t - L(t) = 0.5, then f^-1 = t + L(t)
    t_root = bisect_oracle(lambda t: t - traj.position(t) - 0.5, 0.5, 3.0)
    expected = t_root + traj.position(t_root)
    assert m2.eval_f_inv(0.5) == pytest.approx(expected, abs=1e-11)


def test_doppler_static_is_one():
    m = BilliardMap(Static(1.0))
    for tau in (0.0, 1.7, 13.0):
        assert m.doppler(tau) == 1.0


def test_doppler_at_junction_uses_moving_branch(sine_map):
    expected = (1 - 0.1 * math.pi) / (1 + 0.1 * math.pi)
    assert sine_map.doppler(1.0) == pytest.approx(expected, rel=1e-14)


def test_doppler_matches_finite_difference(sine_map):
    h = 1e-6
    rng = np.random.default_rng(11)
    for tau in rng.uniform(1.5, 40.0, 30):
        tau = float(tau)
        fd = (sine_map.eval_f(tau + h) - sine_map.eval_f(tau - h)) / (2 * h)
        assert sine_map.doppler(tau) == pytest.approx(fd, rel=1e-8)


def test_f_jet_against_finite_differences(sine_map):
    h = 1e-4
    for tau in (1.7, 5.3, 9.1):
        f0, f1, f2, f3 = sine_map.f_jet(tau)
        vals = [sine_map.eval_f(tau + i * h) for i in (-2, -1, 0, 1, 2)]
        fd1 = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12 * h)
        fd2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * h * h)
        fd3 = (-vals[0] + 2 * vals[1] - 2 * vals[3] + vals[4]) / (2 * h**3)
        assert f0 == pytest.approx(vals[2], abs=1e-12)
        assert f1 == pytest.approx(fd1, rel=1e-8)
        assert f2 == pytest.approx(fd2, rel=1e-5, abs=1e-8)
        assert f3 == pytest.approx(fd3, rel=1e-3, abs=1e-5)


def test_trace_static():
    m = BilliardMap(Static(1.0))
    path = m.trace(0.5, 3)
    assert np.allclose(path.times, [2.5, 4.5, 6.5], atol=1e-12)
    assert np.allclose(path.doppler, 1.0, atol=1e-15)


def test_trace_resonant_closed_form():
    # cumulative factor at the resonant starting points is exactly r^{+-n}
    m = BilliardMap(Sinusoidal(1.0, 0.01, math.pi))
    r = (1 + 0.01 * math.pi) / (1 - 0.01 * math.pi)
    plus = m.trace(0.0, 40)
    minus = m.trace(-1.0, 40)
    assert plus.log_doppler[-1] == pytest.approx(40 * math.log(r), rel=1e-12)
    assert minus.log_doppler[-1] == pytest.approx(-40 * math.log(r), rel=1e-12)


def test_trace_zero_bounces_is_empty(sine_map):
    path = sine_map.trace(0.3, 0)
    assert len(path) == 0


def test_trace_backward_static():
    m = BilliardMap(Static(1.0))
    path = m.trace_backward(6.5, 3)
    assert np.allclose(path.times, [4.5, 2.5, 0.5], atol=1e-12)


def test_backward_inverts_forward(sine_map):
    start = 0.37
    n = 12
    fwd = sine_map.trace(start, n)
    back = sine_map.trace_backward(float(fwd.times[-1]), n)
    assert back.times[-1] == pytest.approx(start, abs=n * 2 * sine_map.root_tolerance + 1e-10)
    # backward cumulative factor is the reciprocal of the forward one
    assert back.log_doppler[-1] == pytest.approx(-fwd.log_doppler[-1], abs=1e-10)


def test_backward_factor_grows_at_negative_spot():
    # reciprocal-of-forward oracle: backward from T_n(tau-) grows like r^n
    m = BilliardMap(Sinusoidal(1.0, 0.01, math.pi))
    r = (1 + 0.01 * math.pi) / (1 - 0.01 * math.pi)
    n = 30
    fwd = m.trace(-1.0, n)
    back = m.trace_backward(float(fwd.times[-1]), n)
    assert back.log_doppler[-1] == pytest.approx(n * math.log(r), rel=1e-10)


def test_monotonicity_and_contraction(sine_map):
    rng = np.random.default_rng(3)
    L, dL = 1.0, 0.1
    for _ in range(50):
        a, b = sorted(rng.uniform(-2.0, 30.0, 2))
        a, b = float(a), float(b)
        if b - a < 1e-6:
            continue
        assert sine_map.eval_f(a) < sine_map.eval_f(b)
    for tau in rng.uniform(-2.0, 30.0, 50):
        tau = float(tau)
        assert sine_map.eval_f(tau) <= tau - 2 * (L - dL) + 1e-12


def test_trace_composition(sine_map):
    tau = 0.21
    whole = sine_map.trace(tau, 9)
    part = sine_map.trace(tau, 4)
    rest = sine_map.trace(float(part.times[-1]), 5)
    assert rest.times[-1] == pytest.approx(whole.times[-1], abs=1e-9)


def test_doppler_cocycle(sine_map):
    tau = 0.43
    n, m = 6, 5
    whole = sine_map.trace(tau, n + m)
    first = sine_map.trace(tau, m)
    second = sine_map.trace(float(first.times[-1]), n)
    assert whole.log_doppler[-1] == pytest.approx(
        first.log_doppler[-1] + second.log_doppler[-1], abs=1e-9
    )


def test_doppler_is_inverse_trace_derivative():
    # D_n(tau) = 1 / T_n'(tau) via central differences
    m = BilliardMap(Sinusoidal(1.0, 0.01, 2.0 * math.pi))
    h = 1e-5
    rng = np.random.default_rng(5)
    for _ in range(20):
        tau = float(rng.uniform(-1.0, 3.0))
        n = int(rng.integers(1, 20))
        tp = m.trace(tau + h, n).times[-1]
        tm = m.trace(tau - h, n).times[-1]
        deriv = (tp - tm) / (2 * h)
        d_n = math.exp(m.trace(tau, n).log_doppler[-1])
        assert d_n == pytest.approx(1.0 / deriv, rel=1e-6)


def test_bounce_spacing_invariant(sine_map):
    path = sine_map.trace(0.1, 40)
    gaps = np.diff(np.concatenate([[path.start], path.times]))
    assert np.all(gaps > 2 * (1.0 - 0.1) - 1e-9)
    assert np.all(gaps < 2 * (1.0 + 0.1) + 1e-9)
    # retardation relation holds at every recorded collision
    traj = sine_map.trajectory
    for t_star, t in zip(path.star_times, path.times):
        assert t_star + traj.position(float(t_star)) == pytest.approx(
            float(t), abs=2 * sine_map.root_tolerance
        )
