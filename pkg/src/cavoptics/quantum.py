"""Vacuum energy of the moving-wall cavity: Moore's equation, Schwarzian
derivative chain, and the cumulative conformal anomaly.

The quantum energy density of the massless field is

    rho(tau) = -(pi/48) R'(tau)^2 - S[R](tau) / (24 pi),

where R solves Moore's equation R(tau) - R(f(tau)) = 2 with the billiard
function f, and S[.] is the Schwarzian derivative

    S[R] = R'''/R' - (3/2) (R''/R')^2.

With a static past the solution is fixed by the linear normalization
R(tau) = tau / L on the static branch (tau <= t0 + L); elsewhere R is
evaluated by pulling back with f, adding 2 per step, and propagating the
derivative jet through the composition.  The static cavity then gives the
Casimir values rho = -pi/(48 L^2) and E = -pi/(24 L).

Evolution of the density differs from the classical law by the cumulative
conformal anomaly

    rho(T_n(tau)) = [rho(tau) + A_n(tau)] D_n(tau)^2,
    A_n(tau) = S[T_n](tau) / (24 pi)
             = -(1/24 pi) sum_{k=1..n} D_k(tau)^{-2} S[f](T_k(tau)),

where the sum is accumulated with compensated summation because its terms
span many orders of magnitude through D_k^{-2}.

All evaluations are pure functions of immutable inputs.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .billiard import BilliardMap, schwarzian_from_derivatives
from .errors import ConstraintViolation, DomainError
from .quadrature import adaptive_panels, adaptive_simpson

__all__ = [
    "schwarzian",
    "MooreFunction",
    "quantum_density",
    "cumulative_anomaly",
    "anomaly_direct",
    "quantum_evolution",
    "quantum_total_energy",
    "quantum_total_energy_direct",
    "quantum_energy_at_bounces",
    "static_casimir_density",
    "static_casimir_energy",
]


def static_casimir_density(rest_length: float) -> float:
    """Vacuum energy density of the static 1D cavity, -pi / (48 L^2)."""
    return -math.pi / (48.0 * rest_length * rest_length)


def static_casimir_energy(rest_length: float) -> float:
    """Vacuum energy of the static 1D cavity, -pi / (24 L)."""
    return -math.pi / (24.0 * rest_length)


def schwarzian(jet_fn, tau: float) -> float:
    """Schwarzian of a thrice-differentiable map given by its jet function.

    ``jet_fn(tau)`` must return (g, g', g'', g''').  Linear and Moebius maps
    give 0; compositions satisfy S[g o f] = (S[g] o f) f'^2 + S[f].
    """
    _, d1, d2, d3 = jet_fn(tau)
    return schwarzian_from_derivatives(d1, d2, d3)


class MooreFunction:
    """Solver/evaluator for R(tau) with the derivative chain for S[R].

    ``static_region_end`` is the largest tau whose entire optical history
    lies in the static past; the closed-form branch R = tau / L applies
    there.  Only the linear normalization is supported: the density formula
    is not invariant under other reparametrizations of the static branch.
    """

    def __init__(
        self,
        bmap: BilliardMap,
        static_region_end: float | None = None,
        max_pullbacks: int = 1_000_000,
    ):
        self.map = bmap
        traj = bmap.trajectory
        self.rest_length = traj.rest_length
        self.static_region_end = (
            float(static_region_end)
            if static_region_end is not None
            else traj.motion_start + traj.rest_length
        )
        self.max_pullbacks = max_pullbacks

    def value(self, tau: float) -> float:
        """R(tau) by pull-back into the static branch."""
        if self.map._static:
            return tau / self.rest_length
        cur = tau
        k = 0
        for _ in range(self.max_pullbacks):
            if cur <= self.static_region_end:
                return cur / self.rest_length + 2.0 * k
            cur = self.map.eval_f(cur)
            k += 1
        raise DomainError("Moore pull-back did not reach the static region")

    def jet(self, tau: float) -> tuple[float, float, float, float]:
        """(R, R', R'', R''') with derivatives propagated through the
        pull-back composition using analytic billiard jets."""
        if self.map._static:
            inv_l = 1.0 / self.rest_length
            return tau * inv_l, inv_l, 0.0, 0.0
        v0, v1, v2, v3 = tau, 1.0, 0.0, 0.0
        k = 0
        for _ in range(self.max_pullbacks):
            if v0 <= self.static_region_end:
                inv_l = 1.0 / self.rest_length
                return (
                    v0 * inv_l + 2.0 * k,
                    v1 * inv_l,
                    v2 * inv_l,
                    v3 * inv_l,
                )
            f0, f1, f2, f3 = self.map.f_jet(v0)
            nv1 = f1 * v1
            nv2 = f2 * v1 * v1 + f1 * v2
            nv3 = f3 * v1**3 + 3.0 * f2 * v1 * v2 + f1 * v3
            v0, v1, v2, v3 = f0, nv1, nv2, nv3
            k += 1
        raise DomainError("Moore pull-back did not reach the static region")

    def derivatives(self, tau: float) -> tuple[float, float, float]:
        """(R', R'', R''')."""
        _, d1, d2, d3 = self.jet(tau)
        return d1, d2, d3

    def residual(self, tau: float) -> float:
        """Moore residual R(tau) - R(f(tau)) - 2 (zero in exact arithmetic)."""
        return self.value(tau) - self.value(self.map.eval_f(tau)) - 2.0


def quantum_density(mf: MooreFunction, tau: float) -> float:
    """Vacuum energy density profile rho(tau).

    Equal to the static Casimir value for every tau in the static region
    (causality of the pull-back)."""
    _, d1, d2, d3 = mf.jet(tau)
    s = schwarzian_from_derivatives(d1, d2, d3)
    return -math.pi / 48.0 * d1 * d1 - s / (24.0 * math.pi)


def _anomaly_terms(
    bmap: BilliardMap, tau: float, n: int
) -> tuple[list[float], list[float], float]:
    """Shared trace: anomaly summands, per-bounce log D_k, and final T_n."""
    traj = bmap.trajectory
    cur = tau
    log_d = 0.0
    terms: list[float] = []
    log_ds: list[float] = []
    for _ in range(n):
        t_star = bmap.advanced_time(cur)
        cur = t_star + traj.position(t_star)
        v = traj.velocity(t_star)
        log_d += math.log1p(-v) - math.log1p(v)
        terms.append(math.exp(-2.0 * log_d) * bmap.schwarzian_f(cur))
        log_ds.append(log_d)
    return terms, log_ds, cur


def cumulative_anomaly(bmap: BilliardMap, tau: float, n: int) -> float:
    """A_n(tau) by the per-bounce sum with compensated accumulation."""
    if n < 1:
        raise ConstraintViolation("cumulative_anomaly needs n >= 1")
    terms, _, _ = _anomaly_terms(bmap, tau, n)
    return -math.fsum(terms) / (24.0 * math.pi)


def anomaly_direct(bmap: BilliardMap, tau: float, n: int) -> float:
    """A_n(tau) = S[T_n](tau) / (24 pi) via the composed jet of the n-fold
    map; independent cross-check of the sum formula."""
    if n < 1:
        raise ConstraintViolation("anomaly_direct needs n >= 1")
    _, d1, d2, d3 = bmap.trace_jet(tau, n)
    return schwarzian_from_derivatives(d1, d2, d3) / (24.0 * math.pi)


def quantum_evolution(bmap: BilliardMap, tau: float, n: int) -> tuple[float, float]:
    """Evolve the vacuum seed density from the static region:

        rho(T_n(tau)) = [rho_static + A_n(tau)] D_n(tau)^2.

    Returns (T_n(tau), evolved density).  tau must lie in the static seed
    region so that the seed value is the closed-form Casimir density.
    """
    traj = bmap.trajectory
    end = traj.motion_start + traj.rest_length
    if tau > end:
        raise DomainError(f"tau = {tau:g} outside the static seed region (end {end:g})")
    rho0 = static_casimir_density(traj.rest_length)
    if n == 0:
        return tau, rho0
    terms, log_ds, t_n = _anomaly_terms(bmap, tau, n)
    a_n = -math.fsum(terms) / (24.0 * math.pi)
    return t_n, (rho0 + a_n) * math.exp(2.0 * log_ds[-1])


def quantum_total_energy(
    bmap: BilliardMap,
    t: float,
    *,
    tol: float = 1e-11,
    force_points: Sequence[float] = (),
) -> float:
    """Total vacuum energy at the moving-wall bounce time nearest t:

        E(T*_n(tau0)) = int_{f(tau0)}^{tau0} [rho_static + A_n(tau)] D_n dtau

    with tau0 the end of the static seed region (the integral then covers
    exactly one static-map period).  For t inside the static era (n = 0)
    the closed-form Casimir energy is returned.
    """
    traj = bmap.trajectory
    L = traj.rest_length
    tau0 = traj.motion_start + L
    a = tau0 - 2.0 * L
    rho0 = static_casimir_density(L)

    n = _nearest_bounce_index(bmap, tau0, t)
    if n == 0:
        return static_casimir_energy(L)

    def integrand(tau: float) -> float:
        terms, log_ds, _ = _anomaly_terms(bmap, tau, n)
        a_n = -math.fsum(terms) / (24.0 * math.pi)
        return (rho0 + a_n) * math.exp(log_ds[-1])

    return adaptive_simpson(
        integrand, a, tau0, tol=tol, force_points=force_points
    )


def quantum_total_energy_direct(
    mf: MooreFunction,
    t: float,
    *,
    tol: float = 1e-11,
    force_points: Sequence[float] = (),
) -> float:
    """E(t) = int_{t-L(t)}^{t+L(t)} rho(tau) dtau with rho from Moore jets;
    the route independent of the Doppler-weighted seed integral."""
    L_t = mf.map.trajectory.position(t)
    return adaptive_simpson(
        lambda tau: quantum_density(mf, tau),
        t - L_t, t + L_t, tol=tol, force_points=force_points,
    )


def quantum_energy_at_bounces(
    bmap: BilliardMap,
    n_max: int,
    *,
    tol: float = 1e-8,
    force_points: Sequence[float] = (),
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vacuum energy at successive bounce times, one shared trace per node.

    Returns (n, times, E).  E can be negative (it starts at the Casimir
    value), so it is returned linearly, not in log space.
    """
    if n_max < 1:
        raise ConstraintViolation("n_max must be >= 1")
    traj = bmap.trajectory
    L = traj.rest_length
    tau0 = traj.motion_start + L
    a = tau0 - 2.0 * L
    rho0 = static_casimir_density(L)

    cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def node_data(tau: float) -> tuple[np.ndarray, np.ndarray]:
        got = cache.get(tau)
        if got is None:
            terms, log_ds, _ = _anomaly_terms(bmap, tau, n_max)
            anomalies = -np.cumsum(terms) / (24.0 * math.pi)
            got = (np.asarray(log_ds), anomalies)
            cache[tau] = got
        return got

    v_max = min(0.999999, _max_speed(traj))
    shift = n_max * (math.log1p(v_max) - math.log1p(-v_max))

    def control(tau: float) -> float:
        log_d, anomalies = node_data(tau)
        return (abs(rho0) + abs(anomalies[-1])) * math.exp(log_d[-1] - shift)

    panels = adaptive_panels(control, a, tau0, tol=tol, force_points=force_points)
    nodes: list[float] = []
    weights: list[float] = []
    for lo, hi in panels:
        mid = 0.5 * (lo + hi)
        h = hi - lo
        nodes.extend((lo, mid, hi))
        weights.extend((h / 6.0, 4.0 * h / 6.0, h / 6.0))
    w = np.array(weights)
    log_d = np.array([node_data(x)[0] for x in nodes])       # (m, n_max)
    anom = np.array([node_data(x)[1] for x in nodes])        # (m, n_max)
    energies = np.array([
        float(np.sum(w * (rho0 + anom[:, k]) * np.exp(log_d[:, k])))
        for k in range(n_max)
    ])
    times = bmap.trace(tau0, n_max).star_times
    return np.arange(1, n_max + 1), np.asarray(times), energies


def _nearest_bounce_index(bmap: BilliardMap, tau0: float, t: float, n_cap: int = 100_000) -> int:
    """Index n whose bounce time T*_n(tau0) is closest to t (0 if t precedes
    the first bounce midpoint)."""
    traj = bmap.trajectory
    best_n, best_err = 0, abs(t - traj.motion_start)
    cur = tau0
    for n in range(1, n_cap + 1):
        t_star = bmap.advanced_time(cur)
        cur = t_star + traj.position(t_star)
        err = abs(t_star - t)
        if err <= best_err:
            best_n, best_err = n, err
        if t_star > t and t_star - t > 2.0 * traj.rest_length:
            break
    return best_n


def _max_speed(traj) -> float:
    omega = getattr(traj, "omega", None)
    amp = getattr(traj, "amplitude", None)
    if omega is not None and amp is not None:
        return omega * amp
    return 0.5
