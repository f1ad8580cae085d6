"""Bounded scalar minimization (Brent's golden-section / parabolic hybrid).

Unlike the usual formulation the search starts from a caller-supplied point
rather than the first golden-section point, which is how random starting
values enter the fitting protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))
_SQRT_EPS = math.sqrt(2.2e-16)


@dataclass(frozen=True)
class ScalarMin:
    x: float
    fun: float
    nfev: int
    converged: bool


def minimize_bounded(f: Callable[[float], float], lo: float, hi: float, x0: float,
                     xtol: float = 1e-4, maxiter: int = 500) -> ScalarMin:
    if not lo < hi:
        raise ValueError(f"empty bracket [{lo}, {hi}]")
    if not lo <= x0 <= hi:
        raise ValueError(f"start {x0} outside [{lo}, {hi}]")

    a, b = lo, hi
    x = w = v = x0
    fx = f(x)
    fw = fv = fx
    nfev = 1
    d = e = 0.0
    converged = False

    for _ in range(maxiter):
        xm = 0.5 * (a + b)
        tol1 = _SQRT_EPS * abs(x) + xtol / 3.0
        tol2 = 2.0 * tol1
        if abs(x - xm) <= tol2 - 0.5 * (b - a):
            converged = True
            break

        golden = True
        if abs(e) > tol1:
            # parabola through (v, fv), (w, fw), (x, fx)
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            e_prev, e = e, d
            if abs(p) < abs(0.5 * q * e_prev) and q * (a - x) < p < q * (b - x):
                d = p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if xm >= x else -tol1
                golden = False
        if golden:
            e = (a - x) if x >= xm else (b - x)
            d = GOLDEN * e

        step = d if abs(d) >= tol1 else math.copysign(tol1, d)
        u = min(max(x + step, lo), hi)
        fu = f(u)
        nfev += 1

        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, fv = w, fw
            w, fw = x, fx
            x, fx = u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv = w, fw
                w, fw = u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu

    return ScalarMin(x=x, fun=fx, nfev=nfev, converged=converged)
