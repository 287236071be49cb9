"""Wall-motion models: analytic derivatives, static past, constraints."""

import math

import numpy as np
import pytest
import sympy as sp

from cavoptics import ConstraintViolation, OffsetSinusoidal, Sinusoidal, Static, Tabulated
from cavoptics.errors import DomainError


def test_static_position_is_constant():
    w = Static(1.0)
    assert w.position(7.3) == 1.0
    assert w.position(-4.0) == 1.0
    assert w.derivative(2.0, 1) == 0.0


def test_sinusoidal_position_values():
    w = Sinusoidal(1.0, 0.1, math.pi)
    assert w.position(0.5) == pytest.approx(1.1, abs=1e-15)
    assert w.position(-2.0) == 1.0  # static past
    assert w.position(0.0) == 1.0   # continuous junction


def test_sinusoidal_first_derivative_at_zero():
    w = Sinusoidal(1.0, 0.1, math.pi)
    assert w.derivative(0.0, 1) == pytest.approx(0.1 * math.pi, rel=1e-15)
    assert w.derivative(-1e-9, 1) == 0.0  # static past


def test_third_derivative_against_symbolic_oracle():
    # oracle: symbolic differentiation of dL*sin(w*t)
    t = sp.Symbol("t")
    dl, w = sp.Rational(1, 10), sp.pi
    expr = dl * sp.sin(w * t)
    d3 = sp.diff(expr, t, 3)
    expected = float(d3.subs(t, 0))
    traj = Sinusoidal(1.0, 0.1, math.pi)
    assert traj.derivative(0.0, 3) == pytest.approx(expected, rel=1e-13)
    assert expected == pytest.approx(-0.1 * math.pi**3, rel=1e-13)


@pytest.mark.parametrize("order,h,tol", [(1, 1e-6, 1e-6), (2, 1e-4, 1e-4), (3, 5e-4, 1e-4)])
def test_derivatives_match_finite_differences(order, h, tol):
    traj = Sinusoidal(1.0, 0.08, 2.0 * math.pi, motion_start=0.0)
    # relative to the derivative scale dL * omega^order (FD noise makes a
    # pointwise relative bound meaningless near the derivative's zeros)
    scale = 0.08 * (2.0 * math.pi) ** order
    rng = np.random.default_rng(42)
    for t in rng.uniform(1.0, 10.0, 100):
        t = float(t)
        if order == 1:
            fd = (traj.position(t + h) - traj.position(t - h)) / (2 * h)
        elif order == 2:
            fd = (traj.position(t + h) - 2 * traj.position(t) + traj.position(t - h)) / h**2
        else:
            fd = (
                traj.position(t + 2 * h) - 2 * traj.position(t + h)
                + 2 * traj.position(t - h) - traj.position(t - 2 * h)
            ) / (2 * h**3)
        exact = traj.derivative(t, order)
        assert abs(exact - fd) < tol * scale


def test_static_past_is_exactly_flat():
    traj = Sinusoidal(1.0, 0.1, math.pi, motion_start=2.0, phase=-2.0 * math.pi)
    for t in (-5.0, 0.0, 1.999999):
        assert traj.position(t) == 1.0
        for order in (1, 2, 3):
            assert traj.derivative(t, order) == 0.0


def test_invariant_scan_runs_at_construction():
    with pytest.raises(ConstraintViolation):
        Sinusoidal(1.0, 0.2, 6.0)  # omega*dL = 1.2 superluminal
    with pytest.raises(ConstraintViolation):
        Sinusoidal(1.0, 1.2, 0.5)  # dL > L
    with pytest.raises(ConstraintViolation):
        Sinusoidal(1.0, 0.1, math.pi, phase=0.3)  # discontinuous junction


def test_derivative_order_contract():
    w = Sinusoidal(1.0, 0.05, math.pi)
    with pytest.raises(ConstraintViolation):
        w.derivative(1.0, 0)
    with pytest.raises(ConstraintViolation):
        w.derivative(1.0, 4)


def test_offset_sinusoidal_junction_continuous_for_any_delta():
    for delta in (0.0, 0.7, math.pi / 2, 2.5):
        w = OffsetSinusoidal(0.5, 0.01, 2 * math.pi, delta)
        assert w.position(0.0) == pytest.approx(0.5, abs=1e-14)
        assert w.position(-1.0) == 0.5


def test_tabulated_matches_source_and_respects_bounds():
    src = Sinusoidal(1.0, 0.05, math.pi)
    ts = np.linspace(0.0, 12.0, 4001)
    xs = np.array([src.position(float(t)) for t in ts])
    vs = np.array([src.velocity(float(t)) for t in ts])
    tab = Tabulated(ts, xs, vs, rest_length=1.0)
    for t in (0.37, 3.1, 11.2):
        assert tab.position(t) == pytest.approx(src.position(t), abs=1e-10)
        assert tab.velocity(t) == pytest.approx(src.velocity(t), abs=1e-8)
    assert tab.position(-3.0) == 1.0
    with pytest.raises(DomainError):
        tab.position(12.5)


def test_tabulated_subluminal_scan_rejects_bad_tables():
    ts = np.linspace(0.0, 1.0, 64)
    xs = 1.0 + 0.4 * np.sin(2 * math.pi * 3 * ts)  # peak speed > 1
    with pytest.raises(ConstraintViolation):
        Tabulated(ts, 1.0 + (xs - 1.0), rest_length=1.0)
