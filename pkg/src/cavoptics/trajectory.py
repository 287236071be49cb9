"""Wall-motion models with analytic derivatives through third order.

Every trajectory describes the position L(t) > 0 of a mirror in c = 1 units
(time and length share units; the rest length L sets the natural scale).
Trajectories are static in the past: L(t) = rest_length for t < motion_start,
and all derivatives vanish there.  At t = motion_start the moving branch is
used, so derivatives at the junction are one-sided from the right.

Instances are immutable after construction and safe to share between
concurrent evaluators.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from .errors import ConstraintViolation, DomainError

_SCAN_SAMPLES = 1000
_JUNCTION_TOL = 1e-9


class WallTrajectory:
    """Base class; see Static/Sinusoidal/OffsetSinusoidal/Tabulated kinds."""

    kind: str = "abstract"
    rest_length: float
    motion_start: float
    #: largest |L(t) - rest_length| over the motion, used to seed root brackets
    deviation_bound: float
    #: one drive period for periodic kinds, None otherwise
    drive_period: float | None

    def position(self, t: float) -> float:
        raise NotImplementedError

    def derivative(self, t: float, order: int) -> float:
        raise NotImplementedError

    def velocity(self, t: float) -> float:
        return self.derivative(t, 1)

    def _check_order(self, order: int) -> None:
        if order not in (1, 2, 3):
            raise ConstraintViolation(f"derivative order must be 1..3, got {order}")

    def _scan_invariants(self, t_lo: float, t_hi: float) -> None:
        """Constructor-time sweep: L > 0 and |L'| < 1 on a sample grid."""
        for t in np.linspace(t_lo, t_hi, _SCAN_SAMPLES):
            pos = self.position(float(t))
            if not pos > 0.0:
                raise ConstraintViolation(
                    f"{self.kind} trajectory violates L(t) > 0 at t = {t:g}: L = {pos:g}"
                )
            vel = self.derivative(float(t), 1)
            if not abs(vel) < 1.0:
                raise ConstraintViolation(
                    f"{self.kind} trajectory violates |L'(t)| < 1 at t = {t:g}: L' = {vel:g}"
                )

    def __repr__(self) -> str:  # pragma: no cover - debug helper
        return f"<{type(self).__name__} L={self.rest_length:g}>"


class Static(WallTrajectory):
    """Fixed wall: L(t) = L for all t."""

    kind = "static"

    def __init__(self, rest_length: float = 1.0):
        if rest_length <= 0.0:
            raise ConstraintViolation("rest_length must be positive")
        self.rest_length = float(rest_length)
        self.motion_start = 0.0
        self.deviation_bound = 0.0
        self.drive_period = None

    def position(self, t: float) -> float:
        return self.rest_length

    def derivative(self, t: float, order: int) -> float:
        self._check_order(order)
        return 0.0


class Sinusoidal(WallTrajectory):
    """L(t) = L + dL * sin(omega*t + phase) for t >= motion_start, else L.

    Requires dL < L (the wall never reaches the origin), omega*dL < 1
    (subluminal), and a continuous junction: sin(omega*t0 + phase) = 0 so
    that L(t0) = L.  The junction still carries a velocity kink; derivatives
    at t0 are taken from the moving branch.
    """

    kind = "sinusoidal"

    def __init__(
        self,
        rest_length: float = 1.0,
        amplitude: float = 0.0,
        omega: float = math.pi,
        phase: float = 0.0,
        motion_start: float = 0.0,
    ):
        if rest_length <= 0.0:
            raise ConstraintViolation("rest_length must be positive")
        if amplitude < 0.0:
            raise ConstraintViolation("amplitude must be non-negative")
        if amplitude >= rest_length:
            raise ConstraintViolation(
                f"amplitude must satisfy dL < L, got dL = {amplitude:g}, L = {rest_length:g}"
            )
        if omega <= 0.0:
            raise ConstraintViolation("omega must be positive")
        if omega * amplitude >= 1.0:
            raise ConstraintViolation(
                f"subluminal bound omega*dL < 1 violated: {omega * amplitude:g}"
            )
        jump = amplitude * math.sin(omega * motion_start + phase)
        if abs(jump) > _JUNCTION_TOL * rest_length:
            raise ConstraintViolation(
                f"discontinuous junction at motion_start: |L(t0) - L| = {abs(jump):g}"
            )
        self.rest_length = float(rest_length)
        self.amplitude = float(amplitude)
        self.omega = float(omega)
        self.phase = float(phase)
        self.motion_start = float(motion_start)
        self.deviation_bound = self.amplitude
        self.drive_period = 2.0 * math.pi / self.omega
        self._scan_invariants(self.motion_start, self.motion_start + self.drive_period)

    def position(self, t: float) -> float:
        if t < self.motion_start:
            return self.rest_length
        return self.rest_length + self.amplitude * math.sin(self.omega * t + self.phase)

    def derivative(self, t: float, order: int) -> float:
        self._check_order(order)
        if t < self.motion_start:
            return 0.0
        arg = self.omega * t + self.phase
        a, w = self.amplitude, self.omega
        if order == 1:
            return a * w * math.cos(arg)
        if order == 2:
            return -a * w * w * math.sin(arg)
        return -a * w * w * w * math.cos(arg)


class OffsetSinusoidal(WallTrajectory):
    """Dephased harmonic component used by two-wall cavities.

    L(t) = base + dL * (sin(omega*t - delta) + sin(delta)) for t >= t0.
    The constant sin(delta) offset makes L(t0=0) = base, so the junction to
    the static past is continuous for any dephasing delta.
    """

    kind = "offset-sinusoidal"

    def __init__(
        self,
        rest_length: float,
        amplitude: float,
        omega: float,
        delta: float = 0.0,
        motion_start: float = 0.0,
    ):
        if rest_length <= 0.0:
            raise ConstraintViolation("rest_length must be positive")
        if amplitude < 0.0:
            raise ConstraintViolation("amplitude must be non-negative")
        if omega <= 0.0:
            raise ConstraintViolation("omega must be positive")
        if omega * amplitude >= 1.0:
            raise ConstraintViolation(
                f"subluminal bound omega*dL < 1 violated: {omega * amplitude:g}"
            )
        jump = amplitude * (
            math.sin(omega * motion_start - delta) + math.sin(delta)
        )
        if abs(jump) > _JUNCTION_TOL * rest_length:
            raise ConstraintViolation(
                f"discontinuous junction at motion_start: |L(t0) - base| = {abs(jump):g}"
            )
        self.rest_length = float(rest_length)
        self.amplitude = float(amplitude)
        self.omega = float(omega)
        self.delta = float(delta)
        self.motion_start = float(motion_start)
        self.deviation_bound = self.amplitude * (1.0 + abs(math.sin(self.delta)))
        self.drive_period = 2.0 * math.pi / self.omega
        self._scan_invariants(self.motion_start, self.motion_start + self.drive_period)

    def position(self, t: float) -> float:
        if t < self.motion_start:
            return self.rest_length
        return self.rest_length + self.amplitude * (
            math.sin(self.omega * t - self.delta) + math.sin(self.delta)
        )

    def derivative(self, t: float, order: int) -> float:
        self._check_order(order)
        if t < self.motion_start:
            return 0.0
        arg = self.omega * t - self.delta
        a, w = self.amplitude, self.omega
        if order == 1:
            return a * w * math.cos(arg)
        if order == 2:
            return -a * w * w * math.sin(arg)
        return -a * w * w * w * math.cos(arg)


class Tabulated(WallTrajectory):
    """Trajectory interpolated from (t, L) samples.

    Cubic interpolation; when velocity samples are supplied a cubic Hermite
    interpolant is used instead, which reproduces the given first derivative
    exactly at the knots.  Third derivatives are piecewise constant either
    way.  Before the first knot the trajectory is static at rest_length;
    past the last knot evaluation raises DomainError (extend the table).
    """

    kind = "tabulated"

    def __init__(
        self,
        times: Sequence[float],
        positions: Sequence[float],
        velocities: Sequence[float] | None = None,
        rest_length: float | None = None,
        drive_period: float | None = None,
    ):
        t = np.asarray(times, dtype=float)
        x = np.asarray(positions, dtype=float)
        if t.ndim != 1 or t.shape != x.shape or t.size < 4:
            raise ConstraintViolation("need matching 1-d arrays with >= 4 samples")
        if np.any(np.diff(t) <= 0.0):
            raise ConstraintViolation("sample times must be strictly increasing")
        self.rest_length = float(rest_length if rest_length is not None else x[0])
        if self.rest_length <= 0.0:
            raise ConstraintViolation("rest_length must be positive")
        if abs(x[0] - self.rest_length) > _JUNCTION_TOL * self.rest_length:
            raise ConstraintViolation("first sample must equal rest_length (static past)")
        self.motion_start = float(t[0])
        self._t_end = float(t[-1])
        if velocities is not None:
            v = np.asarray(velocities, dtype=float)
            if v.shape != t.shape:
                raise ConstraintViolation("velocity samples must match times")
            self._spline = CubicHermiteSpline(t, x, v)
        else:
            self._spline = CubicSpline(t, x)
        self._derivs = [self._spline.derivative(k) for k in (1, 2, 3)]
        self.deviation_bound = float(np.max(np.abs(x - self.rest_length)))
        self.drive_period = drive_period
        self._scan_invariants(self.motion_start, self._t_end)

    def position(self, t: float) -> float:
        if t < self.motion_start:
            return self.rest_length
        if t > self._t_end:
            raise DomainError(
                f"tabulated trajectory queried at t = {t:g} beyond table end {self._t_end:g}"
            )
        return float(self._spline(t))

    def derivative(self, t: float, order: int) -> float:
        self._check_order(order)
        if t < self.motion_start:
            return 0.0
        if t > self._t_end:
            raise DomainError(
                f"tabulated trajectory queried at t = {t:g} beyond table end {self._t_end:g}"
            )
        return float(self._derivs[order - 1](t))
