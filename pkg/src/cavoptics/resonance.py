"""Detection and classification of periodic optical trajectories.

A ray launched from x = 0 at time tau0 is periodic with period T when
T_n(tau0) = tau0 + n T for all n.  Such orbits exist exactly when the wall
trajectory has return points, i.e. solutions of L(tau* + n T) = T/2, and
they control parametric resonance: positive orbits (cumulative Doppler
factor growing without bound) seed exponentially growing energy peaks,
negative ones are their time-reversed partners.

For sinusoidal motion at drive frequency omega near the resonance
omega_N = N pi / L the commensurate orbit period is T = 2 pi N / omega and
return points exist while |d omega| / omega < dL / L, which is the
resonance window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .billiard import BilliardMap
from .errors import ClassificationError, ConstraintViolation
from .rootfind import bisect_root
from .trajectory import Sinusoidal, WallTrajectory

__all__ = [
    "Sign",
    "PeriodicTrajectory",
    "ReturnPointScan",
    "PeakCensus",
    "ResonanceReport",
    "find_return_points",
    "classify",
    "principal_starting_points",
    "resonance_window",
    "two_wall_resonance_window",
    "extended_series_condition",
    "peak_census",
    "analyze_resonance",
    "window_scan",
]

#: |exponent| below this per period counts as neutral (no instability)
NEUTRAL_THRESHOLD = 1e-10


class Sign(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class PeriodicTrajectory:
    """A detected periodic orbit and its stability data.

    ``exponent`` is the per-period growth rate of the cumulative Doppler
    factor, lambda = log(D_n) / n; positive orbits have lambda > 0.
    ``series_index`` is 0 for the principal series.
    """

    tau0: float
    return_point: float
    period: float
    sign: Sign
    exponent: float
    series_index: int = 0


@dataclass(frozen=True)
class ReturnPointScan:
    """Result of a return-point search.

    ``degenerate`` marks a continuum of solutions (e.g. a static wall with
    T = 2L, where every time is a return point); the times list is then
    empty rather than infinite.
    """

    times: tuple[float, ...]
    degenerate: bool = False


@dataclass(frozen=True)
class PeakCensus:
    """Series structure of resonant energy-density peaks.

    Series M = 0 is the principal one; series M >= 1 exist when
    dL/L > M/N and carry strength s_M = sqrt((omega_N dL)^2 - (M pi)^2).
    Each series contributes N peaks; exponents decrease with M, so the
    principal peaks are the largest.  Note that s_M >= pi for M >= 1
    requires omega_N * dL > pi, i.e. wall speeds beyond the subluminal
    regime where ray tracing is defined; those entries are analytic
    classifications only and carry exponent = nan when the Doppler ratio
    (1+s)/(1-s) is negative.
    """

    resonance_order: int
    num_series: int
    strengths: tuple[float, ...]
    exponents: tuple[float, ...]
    subluminal: bool


@dataclass(frozen=True)
class ResonanceReport:
    resonance_order: int
    trajectories: tuple[PeriodicTrajectory, ...]
    window_halfwidth: float
    peak_count_per_series: int
    num_series: int
    degenerate: bool = False


def find_return_points(
    traj: WallTrajectory,
    T: float,
    search_interval: tuple[float, float] | None = None,
    *,
    samples_per_period: int = 4096,
    k_check: int = 3,
    value_tol: float | None = None,
    degenerate_fraction: float = 0.5,
) -> ReturnPointScan:
    """All tau* in the interval with L(tau* + k T) = T/2 for k = 0..k_check.

    Solutions are located by a sign-change scan refined with bisection.
    Candidates that fail the periodicity repeats (incommensurate drive) are
    discarded.  An empty result is a valid outcome: no periodic
    trajectories means no exponential resonance.

    The default search interval is one full orbit period [t0, t0 + T),
    half-open, which enumerates each periodic orbit exactly once (orbit
    starts repeat modulo T).
    """
    if T <= 0.0:
        raise ConstraintViolation("period T must be positive")
    if search_interval is None:
        search_interval = (traj.motion_start, traj.motion_start + T)
    lo, hi = map(float, search_interval)
    if not hi > lo:
        raise ConstraintViolation("empty search interval")
    L = traj.rest_length
    tol = value_tol if value_tol is not None else 1e-9 * L
    target = 0.5 * T

    def g(t: float) -> float:
        return traj.position(t) - target

    period = traj.drive_period if traj.drive_period is not None else (hi - lo)
    n_samples = max(16, int(math.ceil((hi - lo) / period * samples_per_period)))
    xs = np.linspace(lo, hi, n_samples + 1)
    gs = np.array([g(float(x)) for x in xs])

    if np.mean(np.abs(gs) < tol) >= degenerate_fraction:
        return ReturnPointScan(times=(), degenerate=True)

    roots: list[float] = []
    for i in range(len(xs) - 1):
        a, b = float(xs[i]), float(xs[i + 1])
        ga, gb = gs[i], gs[i + 1]
        if ga == 0.0:
            roots.append(a)
        elif ga * gb < 0.0:
            roots.append(bisect_root(g, a, b, xtol=1e-13 * max(1.0, L)))
    # an exact zero at the upper endpoint belongs to the next period copy

    # dedupe (scan endpoints can double-report) and filter by periodicity
    kept: list[float] = []
    for r in sorted(roots):
        if kept and abs(r - kept[-1]) < 1e-9 * L:
            continue
        if all(abs(g(r + k * T)) <= tol for k in range(1, k_check + 1)):
            kept.append(r)
    return ReturnPointScan(times=tuple(kept), degenerate=False)


def classify(
    bmap: BilliardMap,
    tau0: float,
    T: float,
    n_probe: int = 64,
    *,
    residual_tol: float | None = None,
    series_index: int = 0,
) -> PeriodicTrajectory:
    """Ray-trace an orbit candidate and classify its stability.

    The candidate must satisfy the periodicity residual
    |T_n(tau0) - tau0 - n T| below tolerance; otherwise a
    ClassificationError carrying the residual is raised.  The exponent is
    computed in log space as log(D_n)/n over n_probe periods.
    """
    if n_probe < 1:
        raise ConstraintViolation("n_probe must be >= 1")
    L = bmap.trajectory.rest_length
    tol = residual_tol if residual_tol is not None else 1e-8 * L
    path = bmap.trace(tau0, n_probe)
    m = min(3, n_probe)
    residual = abs(path.times[m - 1] - tau0 - m * T)
    if residual > tol * m:
        raise ClassificationError(
            f"orbit at tau0 = {tau0:g} is not periodic with T = {T:g}"
            f" (residual {residual:.3e})",
            residual=residual,
        )
    exponent = path.log_doppler[-1] / n_probe
    if exponent > NEUTRAL_THRESHOLD:
        sign = Sign.POSITIVE
    elif exponent < -NEUTRAL_THRESHOLD:
        sign = Sign.NEGATIVE
    else:
        sign = Sign.NEUTRAL
    return PeriodicTrajectory(
        tau0=tau0,
        return_point=float(path.star_times[0]),
        period=T,
        sign=sign,
        exponent=exponent,
        series_index=series_index,
    )


def principal_starting_points(N: int, L: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Starting points of the 2N principal periodic orbits at resonance N.

    Returns (tau_plus, tau_minus) with
    tau_plus[m]  = (-N + 2m + 1) L / N   and
    tau_minus[m] = (-N + 2m) L / N       for m = 0..N-1.
    """
    if N < 1:
        raise ConstraintViolation("resonance order N must be >= 1")
    m = np.arange(N, dtype=float)
    return (-N + 2.0 * m + 1.0) * L / N, (-N + 2.0 * m) * L / N


def resonance_window(
    amplitude: float,
    rest_length: float = 1.0,
    *,
    verify: bool = False,
    N: int = 1,
) -> float:
    """Single-wall detuning bound: instability persists while

        |d omega| / omega < dL / L.

    With verify=True the bound is cross-checked numerically: return points
    must exist at 0.9x the bound and be absent at 1.1x.
    """
    bound = amplitude / rest_length
    if verify and amplitude > 0.0:
        for factor, expect in ((0.9, True), (1.1, False)):
            x = factor * bound
            omega = N * math.pi / rest_length / (1.0 - x)
            traj = Sinusoidal(rest_length, amplitude, omega)
            scan = find_return_points(traj, 2.0 * math.pi * N / omega)
            if bool(scan.times) != expect:
                raise ConstraintViolation(
                    f"window verification failed at {factor}x bound"
                )
    return bound


def two_wall_resonance_window(
    dL1: float,
    dL2: float,
    delta: float,
    N: int,
    rest_length: float = 1.0,
) -> float:
    """Detuning bound for dephased harmonic two-wall cavities:

        |d omega| / omega < [dL2 sin(delta)
            + sqrt(dL1^2 + dL2^2 + 2 (-1)^N dL1 dL2 cos(delta))] / L.

    This is the wider (negative-detuning) edge of the window, which is
    asymmetric when delta != 0; the narrower edge is
    (sqrt(...) - dL2 sin(delta)) / L.
    """
    sgn = 1.0 if N % 2 == 0 else -1.0
    rad = dL1 * dL1 + dL2 * dL2 + 2.0 * sgn * dL1 * dL2 * math.cos(delta)
    amp = math.sqrt(max(rad, 0.0))
    return (dL2 * math.sin(delta) + amp) / rest_length


def extended_series_condition(N: int, dL_over_L: float, domega_over_omega: float) -> bool:
    """Condition dL/L + (1 + 1/N) |d omega|/omega > 1/N for the principal
    picture to stay exact (otherwise further smaller peak series would
    appear).

    In the subluminal regime omega_N dL < 1 the left side is bounded by
    (2 + 1/N)/(N pi) < 1/N, so the condition never triggers there; it is
    exposed for completeness and for parameter studies outside that regime.
    """
    return dL_over_L + (1.0 + 1.0 / N) * abs(domega_over_omega) > 1.0 / N


def peak_census(N: int, dL_over_L: float) -> PeakCensus:
    """Count resonant peak series and their exponents at exact resonance.

    Series M exists while dL/L > M/N (strict).  Its strength is
    s_M = sqrt((omega_N dL)^2 - (M pi)^2) with s_0 = omega_N dL, and the
    per-period exponent is log[(1 + s_M)/(1 - s_M)] where defined.
    Ordering is by decreasing exponent (principal series first).
    """
    if N < 1:
        raise ConstraintViolation("resonance order N must be >= 1")
    if not 0.0 <= dL_over_L < 1.0:
        raise ConstraintViolation("need 0 <= dL/L < 1")
    x = N * dL_over_L
    m_max = int(math.floor(x - 1e-12)) if x > 0 else 0
    m_max = max(m_max, 0)
    w_dl = math.pi * x  # omega_N * dL = N pi dL / L
    strengths = []
    exponents = []
    for M in range(m_max + 1):
        s2 = w_dl * w_dl - (M * math.pi) ** 2
        s = math.sqrt(max(s2, 0.0))
        strengths.append(s)
        if s < 1.0:
            exponents.append(math.log((1.0 + s) / (1.0 - s)))
        else:
            exponents.append(float("nan"))
    return PeakCensus(
        resonance_order=N,
        num_series=m_max + 1,
        strengths=tuple(strengths),
        exponents=tuple(exponents),
        subluminal=w_dl < 1.0,
    )


def analyze_resonance(
    traj: Sinusoidal,
    N: int,
    *,
    n_probe: int = 64,
    samples_per_period: int = 4096,
) -> ResonanceReport:
    """Full resonance census for a sinusoidal wall near order N.

    Scans return points for every admissible series period
    T_M = 2 pi (N + M) / omega, traces each candidate orbit, and reports
    the classified trajectories together with the analytic window.
    """
    if not isinstance(traj, Sinusoidal):
        raise ConstraintViolation("analyze_resonance expects a sinusoidal wall")
    L = traj.rest_length
    omega = traj.omega
    census = peak_census(N, traj.amplitude / L)
    trajectories: list[PeriodicTrajectory] = []
    degenerate = False
    bmap = BilliardMap(traj)
    for M in range(census.num_series):
        T = 2.0 * math.pi * (N + M) / omega
        scan = find_return_points(
            traj, T, samples_per_period=samples_per_period
        )
        degenerate = degenerate or scan.degenerate
        for tau_star in scan.times:
            tau0 = tau_star - 0.5 * T
            try:
                trajectories.append(
                    classify(bmap, tau0, T, n_probe, series_index=M)
                )
            except ClassificationError:
                continue
    positives = sum(
        1 for t in trajectories if t.series_index == 0 and t.sign is Sign.POSITIVE
    )
    return ResonanceReport(
        resonance_order=N,
        trajectories=tuple(trajectories),
        window_halfwidth=omega * traj.amplitude / L,
        peak_count_per_series=positives,
        num_series=census.num_series,
        degenerate=degenerate,
    )


def window_scan(
    rest_length: float,
    amplitude: float,
    N: int,
    detuning_ratios: np.ndarray,
) -> np.ndarray:
    """Instability flags over a grid of x = d omega / omega.

    Builds a sinusoidal wall with omega = omega_N / (1 - x) for each grid
    point (so the analytic edge sits exactly at |x| = dL/L) and tests for
    verified return points of the commensurate period T = 2 pi N / omega.
    """
    omega_N = N * math.pi / rest_length
    flags = np.zeros(len(detuning_ratios), dtype=bool)
    for i, x in enumerate(np.asarray(detuning_ratios, dtype=float)):
        omega = omega_N / (1.0 - x)
        if omega <= 0.0 or omega * amplitude >= 1.0:
            continue
        traj = Sinusoidal(rest_length, amplitude, omega)
        scan = find_return_points(traj, 2.0 * math.pi * N / omega)
        flags[i] = bool(scan.times) or scan.degenerate
    return flags
