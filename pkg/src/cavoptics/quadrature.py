"""Adaptive Simpson quadrature with forced refinement near known features.

Resonant energy integrands develop structure on the scale of the inverse
cumulative Doppler factor around periodic-trajectory spots, so the caller
can pass ``force_points`` that trigger subdivision down to ``force_width``
regardless of the local error estimate.  Interval bisection with Richardson
control otherwise; fully deterministic.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

from .errors import NumericError

__all__ = ["adaptive_simpson", "adaptive_panels", "panel_simpson"]

_DEFAULT_MAX_DEPTH = 48


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h * (fa + 4.0 * fm + fb) / 6.0


def adaptive_panels(
    fn: Callable[[float], float],
    a: float,
    b: float,
    *,
    tol: float = 1e-10,
    force_points: Sequence[float] = (),
    force_width: float | None = None,
    max_depth: int = _DEFAULT_MAX_DEPTH,
    min_depth: int = 4,
) -> list[tuple[float, float]]:
    """Certified panel decomposition of [a, b] for the scalar integrand fn.

    Returns panels on which a single Simpson rule meets the locally scaled
    tolerance.  Panels containing a force point are split until narrower
    than force_width.
    """
    if not b > a:
        raise NumericError("need b > a for quadrature", a=a, b=b)
    span = b - a
    fw = force_width if force_width is not None else span * 2.0 ** (-max_depth)
    points = sorted(p for p in force_points if a < p < b)
    panels: list[tuple[float, float]] = []
    # cache endpoint/midpoint values along the recursion
    cache: dict[float, float] = {}

    def ev(x: float) -> float:
        v = cache.get(x)
        if v is None:
            v = fn(x)
            cache[x] = v
        return v

    def contains_force(lo: float, hi: float) -> bool:
        # points is sorted; linear scan is fine at these sizes
        return any(lo < p < hi for p in points)

    scale = abs(_crude_estimate(ev, a, b)) + 1e-300

    def recurse(lo: float, hi: float, flo: float, fmid: float, fhi: float,
                whole: float, depth: int) -> None:
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = ev(lm)
        frm = ev(rm)
        left = _simpson(flo, flm, fmid, mid - lo)
        right = _simpson(fmid, frm, fhi, hi - mid)
        width = hi - lo
        err = abs(left + right - whole)
        forced = contains_force(lo, hi) and width > fw
        local_tol = tol * scale * (width / span)
        if depth >= max_depth:
            panels.append((lo, mid))
            panels.append((mid, hi))
            return
        if depth < min_depth or forced or err > local_tol:
            recurse(lo, mid, flo, flm, fmid, left, depth + 1)
            recurse(mid, hi, fmid, frm, fhi, right, depth + 1)
        else:
            panels.append((lo, mid))
            panels.append((mid, hi))

    fa_, fb_ = ev(a), ev(b)
    fm_ = ev(0.5 * (a + b))
    recurse(a, b, fa_, fm_, fb_, _simpson(fa_, fm_, fb_, span), 0)
    panels.sort()
    return panels


def _crude_estimate(ev: Callable[[float], float], a: float, b: float) -> float:
    n = 32
    h = (b - a) / n
    total = 0.5 * (ev(a) + ev(b))
    for i in range(1, n):
        total += ev(a + i * h)
    return total * h


def panel_simpson(fn: Callable[[float], float], panels: Sequence[tuple[float, float]]) -> float:
    """Composite Simpson over a fixed panel list."""
    total = 0.0
    for lo, hi in panels:
        mid = 0.5 * (lo + hi)
        total += _simpson(fn(lo), fn(mid), fn(hi), hi - lo)
    return total


def adaptive_simpson(
    fn: Callable[[float], float],
    a: float,
    b: float,
    *,
    tol: float = 1e-10,
    force_points: Sequence[float] = (),
    force_width: float | None = None,
    max_depth: int = _DEFAULT_MAX_DEPTH,
) -> float:
    """Adaptive Simpson integral of fn over [a, b]."""
    panels = adaptive_panels(
        fn, a, b, tol=tol, force_points=force_points,
        force_width=force_width, max_depth=max_depth,
    )
    return panel_simpson(fn, panels)
