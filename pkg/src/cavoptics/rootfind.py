"""Root finding for strictly increasing scalar functions.

All retardation relations in this package reduce to solving g(t) = 0 where
g is strictly increasing (g' = 1 ± L'(t) > 0 for subluminal walls), so a
sign-change bracket is guaranteed to exist and to contain exactly one root.
The solver brackets by geometric expansion from a seed guess and then runs
Newton steps safeguarded by bisection.
"""

from __future__ import annotations

from typing import Callable

from .errors import NumericError


def bracket_increasing(
    g: Callable[[float], float],
    x0: float,
    step: float,
    max_expansions: int = 64,
) -> tuple[float, float, float, float]:
    """Return (lo, hi, g(lo), g(hi)) with g(lo) <= 0 <= g(hi).

    Since g is increasing, the expansion only needs to march in one
    direction from the seed.
    """
    g0 = g(x0)
    if g0 == 0.0:
        return x0, x0, 0.0, 0.0
    width = step
    if g0 > 0.0:
        hi, ghi = x0, g0
        for _ in range(max_expansions):
            lo = hi - width
            glo = g(lo)
            if glo <= 0.0:
                return lo, hi, glo, ghi
            hi, ghi = lo, glo
            width *= 2.0
    else:
        lo, glo = x0, g0
        for _ in range(max_expansions):
            hi = lo + width
            ghi = g(hi)
            if ghi >= 0.0:
                return lo, hi, glo, ghi
            lo, glo = hi, ghi
            width *= 2.0
    raise NumericError(
        "bracket expansion failed for monotone root",
        seed=x0, step=step, expansions=max_expansions, last_value=g0,
    )


def solve_increasing(
    g: Callable[[float], float],
    dg: Callable[[float], float],
    x0: float,
    *,
    xtol: float,
    step: float,
    max_expansions: int = 64,
    max_iter: int = 200,
) -> float:
    """Solve g(x) = 0 for strictly increasing g.

    Newton iterations from the analytic derivative, clipped to the current
    bracket; any step that leaves the bracket falls back to bisection, so
    convergence is guaranteed once the bracket exists.
    """
    lo, hi, glo, ghi = bracket_increasing(g, x0, step, max_expansions)
    if lo == hi:
        return lo
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        gx = g(x)
        if gx == 0.0:
            return x
        if gx > 0.0:
            hi, ghi = x, gx
        else:
            lo, glo = x, gx
        d = dg(x)
        if hi - lo <= xtol:
            # quadratic Newton finish: the bracket certifies ~xtol accuracy,
            # one more step reaches machine precision
            if d > 0.0:
                x_new = x - gx / d
                if lo <= x_new <= hi:
                    return x_new
            return 0.5 * (lo + hi)
        if d > 0.0:
            x_new = x - gx / d
        else:
            x_new = 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        x = x_new
    raise NumericError(
        "monotone root solve exceeded iteration budget",
        seed=x0, bracket=(lo, hi), xtol=xtol,
    )


def bisect_root(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    xtol: float,
    max_iter: int = 200,
) -> float:
    """Plain bisection on a sign-change interval; used by scan refiners."""
    glo = g(lo)
    if glo == 0.0:
        return lo
    ghi = g(hi)
    if ghi == 0.0:
        return hi
    if glo * ghi > 0.0:
        raise NumericError("bisection interval has no sign change", lo=lo, hi=hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0 or hi - lo <= xtol:
            return mid
        if (gm > 0.0) == (ghi > 0.0):
            hi, ghi = mid, gm
        else:
            lo, glo = mid, gm
    return 0.5 * (lo + hi)
