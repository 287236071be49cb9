"""Billiard function of a moving mirror and iterated collision maps.

For a cavity with a static wall at x = 0 and a moving wall at x = L(t), the
billiard function f is defined through light-cone coordinates at the moving
wall:

    f(t + L(t)) = t - L(t).

Evaluating f at tau means solving the retardation relation t* + L(t*) = tau
(unique because d/dt [t + L(t)] = 1 + L' > 0) and returning tau - 2 L(t*).
The derivative of f is the retarded Doppler factor

    f'(tau) = (1 - L'(t*)) / (1 + L'(t*)),

the per-bounce energy rescaling of a massless particle.  Iterating the
inverse map gives the collision times T_n(tau) of a particle launched from
x = 0 at time tau, and the cumulative Doppler factor

    D_n(tau) = 1 / T_n'(tau) = prod_k f'(T_k(tau))

accumulated here in log space because D_n spans hundreds of orders of
magnitude in long resonant runs.

Higher derivatives of f follow from implicit differentiation of the
retardation relation.  With a = L'(t*), b = L''(t*), c = L'''(t*):

    f'   = (1 - a) / (1 + a)
    f''  = -2 b / (1 + a)^3
    f''' = -2 c / (1 + a)^4 + 6 b^2 / (1 + a)^5

These are exact; no finite differences appear in the production path.

BilliardMap is immutable; traces over disjoint starting points are
independent and may run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintViolation
from .rootfind import solve_increasing
from .trajectory import Static, WallTrajectory

__all__ = ["BilliardMap", "RayPath", "schwarzian_from_derivatives"]


def schwarzian_from_derivatives(d1: float, d2: float, d3: float) -> float:
    """Schwarzian derivative S[g] = g'''/g' - (3/2)(g''/g')^2 from a jet."""
    if d1 == 0.0:
        raise ConstraintViolation("Schwarzian undefined where first derivative vanishes")
    r = d2 / d1
    return d3 / d1 - 1.5 * r * r


@dataclass(frozen=True)
class RayPath:
    """Record of an n-bounce optical path.

    ``times[k]`` is the k-th return of the ray to the static wall at x = 0,
    ``star_times[k]`` the matching moving-wall collision time
    (star_times[k] + L(star_times[k]) = times[k] for forward paths), and
    ``log_doppler[k]`` the accumulated log of the cumulative Doppler factor.
    Backward paths iterate f instead of f^-1; their times decrease and their
    Doppler entries are the reciprocals of the forward factors along the
    same segments.
    """

    start: float
    times: np.ndarray
    star_times: np.ndarray
    log_doppler: np.ndarray
    backward: bool = False

    @property
    def doppler(self) -> np.ndarray:
        """Cumulative Doppler factors D_k (may overflow to inf for huge k)."""
        return np.exp(self.log_doppler)

    def __len__(self) -> int:
        return len(self.times)


class BilliardMap:
    """Evaluator for f, f^-1, their derivatives and iterated traces."""

    def __init__(
        self,
        trajectory: WallTrajectory,
        root_tolerance: float | None = None,
        max_bracket_expansions: int = 64,
    ):
        self.trajectory = trajectory
        L = trajectory.rest_length
        self.root_tolerance = (
            float(root_tolerance) if root_tolerance is not None else 1e-12 * L
        )
        self.max_bracket_expansions = int(max_bracket_expansions)
        self._step = 0.5 * L
        # a truly static wall makes every retardation relation linear
        self._static = isinstance(trajectory, Static)

    # -- retardation roots ------------------------------------------------

    def _snap(self, t: float) -> float:
        # Junction times are exact data; roots within tolerance of the
        # motion start are snapped there so the one-sided derivative
        # convention is applied deterministically.
        t0 = self.trajectory.motion_start
        if abs(t - t0) <= max(self.root_tolerance, 1e-14 * (1.0 + abs(t0))):
            return t0
        return t

    def retarded_time(self, tau: float) -> float:
        """The unique t* with t* + L(t*) = tau."""
        traj = self.trajectory
        if self._static:
            return tau - traj.rest_length
        root = solve_increasing(
            lambda t: t + traj.position(t) - tau,
            lambda t: 1.0 + traj.velocity(t),
            tau - traj.rest_length,
            xtol=self.root_tolerance,
            step=self._step,
            max_expansions=self.max_bracket_expansions,
        )
        return self._snap(root)

    def advanced_time(self, tau: float) -> float:
        """The unique t with t - L(t) = tau (forward counterpart)."""
        traj = self.trajectory
        if self._static:
            return tau + traj.rest_length
        root = solve_increasing(
            lambda t: t - traj.position(t) - tau,
            lambda t: 1.0 - traj.velocity(t),
            tau + traj.rest_length,
            xtol=self.root_tolerance,
            step=self._step,
            max_expansions=self.max_bracket_expansions,
        )
        return self._snap(root)

    # -- billiard function and derivatives --------------------------------

    def eval_f(self, tau: float) -> float:
        t_star = self.retarded_time(tau)
        return tau - 2.0 * self.trajectory.position(t_star)

    def eval_f_inv(self, tau: float) -> float:
        t_star = self.advanced_time(tau)
        return tau + 2.0 * self.trajectory.position(t_star)

    def doppler(self, tau: float) -> float:
        """f'(tau) via the retarded-velocity formula; strictly positive."""
        v = self.trajectory.velocity(self.retarded_time(tau))
        return (1.0 - v) / (1.0 + v)

    def f_jet(self, tau: float) -> tuple[float, float, float, float]:
        """(f, f', f'', f''') at tau, all analytic."""
        traj = self.trajectory
        t_star = self.retarded_time(tau)
        a = traj.derivative(t_star, 1)
        b = traj.derivative(t_star, 2)
        c = traj.derivative(t_star, 3)
        opa = 1.0 + a
        f0 = tau - 2.0 * traj.position(t_star)
        f1 = (1.0 - a) / opa
        f2 = -2.0 * b / opa**3
        f3 = -2.0 * c / opa**4 + 6.0 * b * b / opa**5
        return f0, f1, f2, f3

    def schwarzian_f(self, tau: float) -> float:
        """S[f](tau) from the analytic jet."""
        _, f1, f2, f3 = self.f_jet(tau)
        return schwarzian_from_derivatives(f1, f2, f3)

    # -- iterated maps -----------------------------------------------------

    def trace(self, tau: float, n: int) -> RayPath:
        """Forward path: T_k = (f^-1)^{o k}(tau) with per-bounce Doppler data.

        The moving-wall collision t* of each step is a byproduct of the
        forward root solve, and the step's Doppler factor is evaluated there,
        so D_k is the exact product of per-bounce factors (never a numerical
        derivative).
        """
        if n < 0:
            raise ConstraintViolation("trace needs n >= 0")
        traj = self.trajectory
        times = np.empty(n)
        stars = np.empty(n)
        logd = np.empty(n)
        cur = tau
        acc = 0.0
        for k in range(n):
            t_star = self.advanced_time(cur)
            cur = t_star + traj.position(t_star)
            v = traj.velocity(t_star)
            acc += math.log1p(-v) - math.log1p(v)
            times[k] = cur
            stars[k] = t_star
            logd[k] = acc
        return RayPath(start=tau, times=times, star_times=stars, log_doppler=logd)

    def trace_backward(self, tau: float, n: int) -> RayPath:
        """Backward path: iterates f; Doppler entries are reciprocals of the
        forward factors along the same segments."""
        if n < 0:
            raise ConstraintViolation("trace_backward needs n >= 0")
        traj = self.trajectory
        times = np.empty(n)
        stars = np.empty(n)
        logd = np.empty(n)
        cur = tau
        acc = 0.0
        for k in range(n):
            t_star = self.retarded_time(cur)
            cur = t_star - traj.position(t_star)
            v = traj.velocity(t_star)
            acc -= math.log1p(-v) - math.log1p(v)
            times[k] = cur
            stars[k] = t_star
            logd[k] = acc
        return RayPath(
            start=tau, times=times, star_times=stars, log_doppler=logd, backward=True
        )

    def trace_jet(self, tau: float, n: int) -> tuple[float, float, float, float]:
        """Jet (T_n, T_n', T_n'', T_n''') of the n-fold forward map.

        Composes inverse-function jets step by step; used as the direct
        route for the Schwarzian of T_n.
        """
        v0, v1, v2, v3 = tau, 1.0, 0.0, 0.0
        for _ in range(n):
            x = self.eval_f_inv(v0)
            _, f1, f2, f3 = self.f_jet(x)
            g1 = 1.0 / f1
            g2 = -f2 * g1**3
            g3 = (3.0 * f2 * f2 - f1 * f3) * g1**5
            # Faa di Bruno through third order for g o (previous jet)
            nv1 = g1 * v1
            nv2 = g2 * v1 * v1 + g1 * v2
            nv3 = g3 * v1**3 + 3.0 * g2 * v1 * v2 + g1 * v3
            v0, v1, v2, v3 = x, nv1, nv2, nv3
        return v0, v1, v2, v3
