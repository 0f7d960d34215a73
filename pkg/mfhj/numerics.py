"""
Shared one-dimensional search helpers: coarse scans with zoom, golden-section
refinement, bracketed root finding and log-log slope fits.
"""
from collections.abc import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from mfhj.config import GOLDEN_TOL, SCAN_POINTS

VectorFn = Callable[[np.ndarray], np.ndarray]
ScalarFn = Callable[[float], float]

Bracket = tuple[float, float, float]


def _dedupe(points: list[float], tol: float) -> list[float]:
    merged: list[float] = []
    for value in sorted(points):
        if not merged or value - merged[-1] > tol:
            merged.append(value)
    return merged


def scan_minima(fn: VectorFn, lo: float, hi: float, *,
                points: int = SCAN_POINTS, depth: int = 1) -> list[Bracket]:
    """
    Brackets every discrete local minimum of ``fn`` on a uniform grid.

    Each bracket is rescanned ``depth`` more times so that two wells closer
    than one grid cell are still told apart.
    """
    grid = np.linspace(lo, hi, points)
    values = np.asarray(fn(grid), dtype=float)
    last = points - 1
    brackets: list[Bracket] = []
    for i in range(points):
        left = values[i - 1] if i > 0 else np.inf
        right = values[i + 1] if i < last else np.inf
        if not (values[i] <= left and values[i] < right):
            continue
        a, b, c = grid[max(i - 1, 0)], grid[i], grid[min(i + 1, last)]
        if depth > 0 and c > a:
            brackets.extend(scan_minima(fn, a, c, points=points, depth=depth - 1))
        else:
            brackets.append((float(a), float(b), float(c)))
    return brackets


def golden_refine(fn: ScalarFn, bracket: Bracket, tol: float = GOLDEN_TOL) -> float:
    """
    Golden-section refinement inside a scan bracket (a, b, c).
    Falls back to bounded Brent when the triple is not strictly bracketing.
    """
    a, b, c = bracket
    if c - a <= tol:
        return b
    fa, fb, fc = fn(a), fn(b), fn(c)
    if a < b < c and fb < fa and fb < fc:
        result = minimize_scalar(fn, bracket=(a, b, c), method="golden", tol=tol)
    else:
        result = minimize_scalar(fn, bounds=(a, c), method="bounded",
                                 options={"xatol": tol})
    return float(result.x)


def find_roots(fn: VectorFn, lo: float, hi: float, *, points: int = 129,
               depth: int = 2, xtol: float = 1e-15) -> list[float]:
    """
    All roots of ``fn`` on [lo, hi] that a zoomed grid scan can resolve.

    Sign-change cells are zoomed before Brent's method runs on them; local
    minima of |fn| without an adjacent sign change are zoomed too, since a
    pair of nearby roots leaves no sign change at the coarse level. Grid
    points where ``fn`` vanishes exactly are zoomed as well, so roots hiding
    next to them are not lost.
    """
    grid = np.linspace(lo, hi, points)
    values = np.asarray(fn(grid), dtype=float)
    magnitude = np.abs(values)
    last = points - 1
    roots: list[float] = []

    def scalar(x: float) -> float:
        return float(fn(np.array([x]))[0])

    def zoom(a: float, b: float) -> None:
        roots.extend(find_roots(fn, a, b, points=points, depth=depth - 1, xtol=xtol))

    for i in range(points):
        fa = values[i]
        if fa == 0.0:
            if depth > 0:
                zoom(grid[max(i - 1, 0)], grid[min(i + 1, last)])
            else:
                roots.append(float(grid[i]))
            continue
        if i == last:
            break
        fb = values[i + 1]
        if fa * fb < 0.0:
            if depth > 0:
                zoom(grid[i], grid[i + 1])
            else:
                roots.append(brentq(scalar, grid[i], grid[i + 1], xtol=xtol,
                                    rtol=4 * np.finfo(float).eps))
            continue
        if depth > 0 and 0 < i and magnitude[i] <= magnitude[i - 1] and magnitude[i] <= magnitude[i + 1]:
            if values[i - 1] * fa > 0.0 and fa * fb > 0.0:
                zoom(grid[i - 1], grid[i + 1])
    return _dedupe(roots, tol=1e-12 * max(1.0, abs(hi - lo)))


def loglog_slope(n_values: list[int], errors: list[float]) -> float:
    """Least-squares slope of log(error) against log(n)."""
    x = np.log(np.asarray(n_values, dtype=float))
    y = np.log(np.maximum(np.asarray(errors, dtype=float), np.finfo(float).tiny))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def polish_root(fn: ScalarFn, guess: float, lo: float, hi: float,
                widths: tuple[float, ...] = (1e-9, 1e-7, 1e-5, 1e-3, 1e-1)) -> float:
    """
    Brent's method on the smallest bracket around ``guess`` over which ``fn``
    changes sign. Returns ``guess`` untouched when no bracket inside [lo, hi] does.
    """
    if fn(guess) == 0.0:
        return guess
    for width in widths:
        a, b = max(lo, guess - width), min(hi, guess + width)
        fa, fb = fn(a), fn(b)
        if fa == 0.0:
            return a
        if fb == 0.0:
            return b
        if fa * fb < 0.0:
            return brentq(fn, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return guess
