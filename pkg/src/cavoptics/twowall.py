"""Cavities with two moving walls.

The right wall moves along x = L1(t), the left wall along x = -L2(t); the
cavity was static in the past with L1 = L2 = L/2.  Each wall carries its own
billiard function f_i(t + L_i(t)) = t - L_i(t); double reflections are
described by the compositions

    f_L = f2 o f1   (ray leaves x = 0 moving left: left bounce, then right),
    f_R = f1 o f2   (ray leaves moving right: right bounce, then left).

Return times are T_{L|R, n}(tau) = (f_{L|R}^-1)^{o n}(tau).  Per round trip
the trace records the right-wall collision time t* (the starred time, which
satisfies t* + L1(t*) = T for the L family) and the left-wall collision
time t** with t** + L2(t**) = f1(T).  The cumulative Doppler factor is the
product of both walls' retarded factors.

Every mode of the two-wall cavity reduces to a single-wall model: there is
an effective trajectory x = L(t) with f_{L|R}(t + L(t)) = t - L(t), built
from the matching relations

    t + L(t) = t1 + L1(t1),  t1 - L1(t1) = t2 + L2(t2),  L(t) = L1(t1) + L2(t2)

(for the L side; signs flip for R).  Its velocity obeys the relativistic
composition law

    (1 - L')/(1 + L') = [(1 - L1')(1 - L2')] / [(1 + L1')(1 + L2')]

at matched times, exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .billiard import BilliardMap
from .classical_energy import ProfileFunction
from .errors import ConstraintViolation, DomainError
from .quadrature import adaptive_simpson
from .resonance import NEUTRAL_THRESHOLD, ReturnPointScan, Sign
from .rootfind import bisect_root
from .trajectory import OffsetSinusoidal, Sinusoidal, Static, Tabulated, WallTrajectory

__all__ = [
    "TwoWallCavity",
    "TwoWallRayPath",
    "TwoWallExponent",
    "TwoWallDensity",
    "trace_two_wall",
    "effective_trajectory",
    "two_wall_return_points",
    "two_wall_exponents",
    "two_wall_window_scan",
]


class TwoWallCavity:
    """Immutable description of a cavity with two moving walls."""

    def __init__(
        self,
        right_wall: WallTrajectory,
        left_wall: WallTrajectory,
        rest_length: float,
        root_tolerance: float | None = None,
    ):
        half = 0.5 * rest_length
        for name, wall in (("right", right_wall), ("left", left_wall)):
            if abs(wall.rest_length - half) > 1e-9 * rest_length:
                raise ConstraintViolation(
                    f"{name} wall must rest at L/2 = {half:g}, got {wall.rest_length:g}"
                )
        self.right = right_wall
        self.left = left_wall
        self.rest_length = float(rest_length)
        self.map1 = BilliardMap(right_wall, root_tolerance)
        self.map2 = BilliardMap(left_wall, root_tolerance)

    # -- canonical oscillation modes --------------------------------------

    @classmethod
    def breathing(cls, rest_length: float, amplitude: float, omega: float) -> "TwoWallCavity":
        """Symmetric oscillation about the cavity center: L1 = L2."""
        mk = lambda: Sinusoidal(0.5 * rest_length, amplitude, omega)
        return cls(mk(), mk(), rest_length)

    @classmethod
    def translational(cls, rest_length: float, amplitude: float, omega: float) -> "TwoWallCavity":
        """Rigid oscillation of the whole cavity: L1 + L2 = L."""
        right = Sinusoidal(0.5 * rest_length, amplitude, omega)
        left = Sinusoidal(0.5 * rest_length, amplitude, omega, phase=math.pi)
        return cls(right, left, rest_length)

    @classmethod
    def harmonic(
        cls,
        rest_length: float,
        dL1: float,
        dL2: float,
        omega_right: float,
        omega_left: float,
        delta: float,
    ) -> "TwoWallCavity":
        """Dephased harmonic walls:

        L1 = L/2 + dL1 sin(omega_R t)
        L2 = L/2 + dL2 [sin(omega_L t - delta) + sin(delta)]
        """
        right = Sinusoidal(0.5 * rest_length, dL1, omega_right)
        left = OffsetSinusoidal(0.5 * rest_length, dL2, omega_left, delta)
        return cls(right, left, rest_length)

    # -- billiard functions -------------------------------------------------

    def eval_f_i(self, i: int, tau: float) -> float:
        """Per-wall billiard function, i = 1 (right) or 2 (left)."""
        return self._map_for(i).eval_f(tau)

    def eval_f_side(self, side: str, tau: float) -> float:
        """Composed double-reflection map f_L = f2 o f1 or f_R = f1 o f2."""
        if side == "L":
            return self.map2.eval_f(self.map1.eval_f(tau))
        if side == "R":
            return self.map1.eval_f(self.map2.eval_f(tau))
        raise ConstraintViolation("side must be 'L' or 'R'")

    def eval_f_side_inv(self, side: str, tau: float) -> float:
        if side == "L":
            return self.map1.eval_f_inv(self.map2.eval_f_inv(tau))
        if side == "R":
            return self.map2.eval_f_inv(self.map1.eval_f_inv(tau))
        raise ConstraintViolation("side must be 'L' or 'R'")

    def _map_for(self, i: int) -> BilliardMap:
        if i == 1:
            return self.map1
        if i == 2:
            return self.map2
        raise ConstraintViolation("wall index must be 1 or 2")

    def _ordered_maps(self, side: str) -> tuple[BilliardMap, BilliardMap]:
        """(first-bounce map, second-bounce map) in chronological order."""
        if side == "L":
            return self.map2, self.map1
        if side == "R":
            return self.map1, self.map2
        raise ConstraintViolation("side must be 'L' or 'R'")


@dataclass(frozen=True)
class TwoWallRayPath:
    """An n-round-trip path: returns to x = 0, both wall-collision times per
    trip, and cumulative Doppler data in log space."""

    start: float
    side: str
    times: np.ndarray          # T_k, returns to x = 0
    star_times: np.ndarray     # second-bounce wall collisions (L1 for side L)
    double_star_times: np.ndarray  # first-bounce wall collisions (L2 for side L)
    log_doppler: np.ndarray

    @property
    def doppler(self) -> np.ndarray:
        return np.exp(self.log_doppler)

    def __len__(self) -> int:
        return len(self.times)


def trace_two_wall(cavity: TwoWallCavity, side: str, tau: float, n: int) -> TwoWallRayPath:
    """Iterate the composed inverse map n times, recording both collision
    times per round trip and the two-factor Doppler product."""
    if n < 0:
        raise ConstraintViolation("trace needs n >= 0")
    first, second = cavity._ordered_maps(side)
    times = np.empty(n)
    stars = np.empty(n)
    dstars = np.empty(n)
    logd = np.empty(n)
    cur = tau
    acc = 0.0
    for k in range(n):
        t_first = first.advanced_time(cur)
        mid = t_first + first.trajectory.position(t_first)
        v1 = first.trajectory.velocity(t_first)
        t_second = second.advanced_time(mid)
        cur = t_second + second.trajectory.position(t_second)
        v2 = second.trajectory.velocity(t_second)
        acc += (math.log1p(-v1) - math.log1p(v1)) + (math.log1p(-v2) - math.log1p(v2))
        times[k] = cur
        stars[k] = t_second
        dstars[k] = t_first
        logd[k] = acc
    return TwoWallRayPath(
        start=tau, side=side, times=times,
        star_times=stars, double_star_times=dstars, log_doppler=logd,
    )


def effective_point(cavity: TwoWallCavity, side: str, v: float) -> tuple[float, float, float]:
    """Matched-time solution of the composition relations.

    Returns (t, L(t), L'(t)) of the effective single wall, all analytic.
    The parameter v is the light-cone coordinate t + L(t) for the L side
    and t - L(t) for the R side.
    """
    if side == "L":
        # t + L(t) = t1 + L1(t1);  t1 - L1(t1) = t2 + L2(t2)
        t1 = cavity.map1.retarded_time(v)
        w = v - 2.0 * cavity.right.position(t1)
        t2 = cavity.map2.retarded_time(w)
        a1 = cavity.right.velocity(t1)
        a2 = cavity.left.velocity(t2)
        L = cavity.right.position(t1) + cavity.left.position(t2)
        # dt1/dv = 1/(1+a1), dw/dv = (1-a1)/(1+a1), dt2/dv = dw/dv/(1+a2);
        # t = v - L(t), so dt/dv = 1 - dL/dv and L'(t) = dL/dv / (1 - dL/dv).
        dl_dv = a1 / (1.0 + a1) + a2 * (1.0 - a1) / ((1.0 + a1) * (1.0 + a2))
        return v - L, L, dl_dv / (1.0 - dl_dv)
    if side == "R":
        # t - L(t) = t1 - L1(t1);  t1 + L1(t1) = t2 - L2(t2)
        t1 = cavity.map1.advanced_time(v)
        w = v + 2.0 * cavity.right.position(t1)
        t2 = cavity.map2.advanced_time(w)
        a1 = cavity.right.velocity(t1)
        a2 = cavity.left.velocity(t2)
        L = cavity.right.position(t1) + cavity.left.position(t2)
        # t = v + L(t), so dt/dv = 1 + dL/dv and L'(t) = dL/dv / (1 + dL/dv).
        dl_dv = a1 / (1.0 - a1) + a2 * (1.0 + a1) / ((1.0 - a1) * (1.0 - a2))
        return v + L, L, dl_dv / (1.0 + dl_dv)
    raise ConstraintViolation("side must be 'L' or 'R'")


def effective_trajectory(
    cavity: TwoWallCavity,
    side: str,
    t_max: float,
    *,
    t_min: float | None = None,
    samples_per_period: int = 4096,
) -> Tabulated:
    """Materialize the effective single-wall trajectory for one ray family.

    The matched-time construction gives exact positions and velocities on a
    parameter grid; they are stored in a tabulated trajectory (cubic Hermite,
    so the sampled velocities are reproduced exactly at the knots).  The
    result satisfies L(t) > 0, L(t) = L for t below the onset, and |L'| < 1,
    which the tabulated constructor re-validates.
    """
    L = cavity.rest_length
    period = cavity.right.drive_period or cavity.left.drive_period or 2.0 * L
    if t_min is None:
        t_min = -2.0 * L
    if not t_max > t_min:
        raise ConstraintViolation("need t_max > t_min")
    # parameter v maps to t = v -/+ L(t); pad both ends so the table covers
    # [t_min, t_max] regardless of side
    v_lo = t_min - 2.0 * L - 1.0
    v_hi = t_max + 2.0 * L + 1.0
    n = max(8, int(math.ceil((v_hi - v_lo) / period * samples_per_period)))
    vs = np.linspace(v_lo, v_hi, n)
    ts = np.empty(n)
    ls = np.empty(n)
    dls = np.empty(n)
    for i, v in enumerate(vs):
        t, l, dl = effective_point(cavity, side, float(v))
        ts[i] = t
        ls[i] = l
        dls[i] = dl
    if np.any(np.diff(ts) <= 0.0):
        raise DomainError("effective trajectory grid is not monotone in t")
    return Tabulated(ts, ls, dls, rest_length=L, drive_period=period)


def two_wall_return_points(
    cavity: TwoWallCavity,
    T: float,
    search_interval: tuple[float, float] | None = None,
    *,
    side: str = "L",
    samples_per_period: int = 4096,
    k_check: int = 3,
    value_tol: float | None = None,
    degenerate_fraction: float = 0.5,
) -> ReturnPointScan:
    """Solutions t1 of L1(t1) + L2(t1 - T/2) = T/2 for the chosen family
    (the R family uses t1 + T/2), filtered by the orbit periodicity of an
    actual two-wall trace."""
    if T <= 0.0:
        raise ConstraintViolation("period T must be positive")
    L = cavity.rest_length
    tol = value_tol if value_tol is not None else 1e-9 * L
    sgn = -1.0 if side == "L" else 1.0
    if search_interval is None:
        # scan one full orbit period; shifted by T/2 so the partner
        # collision t1 - T/2 (side L) stays past the motion onset
        start = max(cavity.right.motion_start, 0.0) + 0.5 * T
        search_interval = (start, start + T)
    lo, hi = map(float, search_interval)

    def g(t1: float) -> float:
        return (
            cavity.right.position(t1)
            + cavity.left.position(t1 + sgn * 0.5 * T)
            - 0.5 * T
        )

    period = cavity.right.drive_period or (hi - lo)
    n_samples = max(16, int(math.ceil((hi - lo) / period * samples_per_period)))
    xs = np.linspace(lo, hi, n_samples + 1)
    gs = np.array([g(float(x)) for x in xs])
    if np.mean(np.abs(gs) < tol) >= degenerate_fraction:
        return ReturnPointScan(times=(), degenerate=True)

    roots: list[float] = []
    for i in range(len(xs) - 1):
        a, b = float(xs[i]), float(xs[i + 1])
        if gs[i] == 0.0:
            roots.append(a)
        elif gs[i] * gs[i + 1] < 0.0:
            roots.append(bisect_root(g, a, b, xtol=1e-13 * max(1.0, L)))

    kept: list[float] = []
    for r in sorted(roots):
        if kept and abs(r - kept[-1]) < 1e-9 * L:
            continue
        tau0 = _orbit_start(cavity, side, r, T)
        path = trace_two_wall(cavity, side, tau0, k_check)
        residual = abs(path.times[-1] - tau0 - k_check * T)
        if residual <= 1e-8 * L * k_check:
            kept.append(r)
    return ReturnPointScan(times=tuple(kept), degenerate=False)


def _orbit_start(cavity: TwoWallCavity, side: str, t1: float, T: float) -> float:
    """Starting point tau0 of the periodic orbit whose second-bounce (right
    wall for side L) collision is at t1."""
    if side == "L":
        t2 = t1 - 0.5 * T
        return t2 - cavity.left.position(t2)
    t2 = t1 + 0.5 * T
    # R family: first bounce is the right wall at t1
    return t1 - cavity.right.position(t1)


@dataclass(frozen=True)
class TwoWallExponent:
    """Instability exponent of one detected two-wall periodic orbit.

    ``exact`` is the per-period log of the two-factor Doppler product at the
    orbit's collision phases; ``small_amplitude`` is its leading-order form
    -2 [w_R dL1 cos(w_R t1) + w_L dL2 cos(w_L t1 -/+ w_L T/2 - delta)].
    ``traced`` is measured from an actual ray trace.
    """

    t1: float
    tau0: float
    side: str
    exact: float
    small_amplitude: float
    traced: float
    sign: Sign


def two_wall_exponents(
    cavity: TwoWallCavity,
    N: int,
    *,
    side: str = "L",
    n_probe: int = 64,
    search_interval: tuple[float, float] | None = None,
) -> list[TwoWallExponent]:
    """Exponents of every detected periodic orbit at resonance order N.

    ``exact`` evaluates the two wall velocities at the orbit's collision
    phases (valid at any amplitude); ``small_amplitude`` is the
    leading-order form -2 (v1 + v2).  Both are reported next to the traced
    value so the asymptotics can be judged directly.
    """
    omega_r = getattr(cavity.right, "omega", None)
    omega_l = getattr(cavity.left, "omega", None)
    if omega_r is None or omega_l is None:
        raise ConstraintViolation("analytic exponents need harmonic walls")
    if abs(omega_r - omega_l) > 1e-12 * omega_r:
        raise ConstraintViolation("analytic exponents assume equal wall frequencies")
    T = 2.0 * math.pi * N / omega_r
    scan = two_wall_return_points(cavity, T, search_interval, side=side)
    sgn = -1.0 if side == "L" else 1.0
    out: list[TwoWallExponent] = []
    for t1 in scan.times:
        t2 = t1 + sgn * 0.5 * T
        v1 = cavity.right.velocity(t1)
        v2 = cavity.left.velocity(t2)
        exact = (math.log1p(-v1) - math.log1p(v1)) + (math.log1p(-v2) - math.log1p(v2))
        small = -2.0 * (v1 + v2)
        tau0 = _orbit_start(cavity, side, t1, T)
        path = trace_two_wall(cavity, side, tau0, n_probe)
        traced = path.log_doppler[-1] / n_probe
        if traced > NEUTRAL_THRESHOLD:
            sign = Sign.POSITIVE
        elif traced < -NEUTRAL_THRESHOLD:
            sign = Sign.NEGATIVE
        else:
            sign = Sign.NEUTRAL
        out.append(
            TwoWallExponent(
                t1=t1, tau0=tau0, side=side,
                exact=exact, small_amplitude=small, traced=traced, sign=sign,
            )
        )
    return out


def two_wall_window_scan(
    rest_length: float,
    dL1: float,
    dL2: float,
    delta: float,
    N: int,
    detuning_ratios: np.ndarray,
) -> np.ndarray:
    """Instability flags for the dephased harmonic cavity over a grid of
    x = d omega / omega (omega_L = omega_R = omega_N / (1 - x))."""
    omega_N = N * math.pi / rest_length
    flags = np.zeros(len(detuning_ratios), dtype=bool)
    for i, x in enumerate(np.asarray(detuning_ratios, dtype=float)):
        omega = omega_N / (1.0 - x)
        if omega <= 0.0:
            continue
        if omega * dL1 >= 1.0 or omega * dL2 >= 1.0:
            continue
        cavity = TwoWallCavity.harmonic(rest_length, dL1, dL2, omega, omega, delta)
        scan = two_wall_return_points(cavity, 2.0 * math.pi * N / omega)
        flags[i] = bool(scan.times) or scan.degenerate
    return flags


# -- classical densities for two-wall cavities -------------------------------


class TwoWallDensity:
    """Left/right-mover densities rho_L(t+x), rho_R(t-x) from one seed.

    The L-family seed h is a 2L-periodic profile on the static-past line;
    rho_L(tau) = h(tau) for tau <= 0 and evolves with the composed map f_L.
    The R family is slaved to it by the exact reflection relation
    rho_R(tau) = rho_L(f2(tau)) * f2'(tau)^2, so the pair is automatically a
    consistent field configuration.
    """

    def __init__(self, cavity: TwoWallCavity, seed: Callable[[float], float] | ProfileFunction):
        self.cavity = cavity
        self.seed = seed
        self._static_end = 0.0  # both collisions of any tau <= 0 lie in the past

    def rho_L(self, tau: float, *, max_pullbacks: int = 1_000_000) -> float:
        cavity = self.cavity
        cur = tau
        log_d = 0.0
        for _ in range(max_pullbacks):
            if cur <= self._static_end:
                return self.seed(cur) * math.exp(2.0 * log_d)
            # one f_L = f2 o f1 pull-back with its two Doppler factors
            t1 = cavity.map1.retarded_time(cur)
            v1 = cavity.right.velocity(t1)
            mid = t1 - cavity.right.position(t1)
            t2 = cavity.map2.retarded_time(mid)
            v2 = cavity.left.velocity(t2)
            log_d += (math.log1p(-v1) - math.log1p(v1)) + (
                math.log1p(-v2) - math.log1p(v2)
            )
            cur = t2 - cavity.left.position(t2)
        raise DomainError("two-wall pull-back did not reach the static region")

    def rho_R(self, tau: float) -> float:
        cavity = self.cavity
        t2 = cavity.map2.retarded_time(tau)
        v2 = cavity.left.velocity(t2)
        f2 = tau - 2.0 * cavity.left.position(t2)
        factor = (1.0 - v2) / (1.0 + v2)
        return self.rho_L(f2) * factor * factor

    def total_energy(self, t: float, *, tol: float = 1e-10) -> float:
        """E(t) = int_{-L2}^{L1} T00 dx split into the two mover families."""
        cavity = self.cavity
        l1 = cavity.right.position(t)
        l2 = cavity.left.position(t)
        e_left = adaptive_simpson(self.rho_L, t - l2, t + l1, tol=tol)
        e_right = adaptive_simpson(self.rho_R, t - l1, t + l2, tol=tol)
        return e_left + e_right
