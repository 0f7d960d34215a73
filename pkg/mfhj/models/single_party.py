"""
Thermodynamic limit of the one-party model.

The action is the Hopf-Lax value
    phi(x, t) = min_y { (x - y)^2 / 2t - Lambda(y) },
searched in the magnetization variable M = (y - x) / t, for which the
objective reads (t/2) M^2 - Lambda(x + tM) and every minimizer lies in
[-L/2, L/2].
"""
import math

import numpy as np
from loguru import logger

from mfhj.config import (
    DAMPING,
    FIXED_POINT_MAX_ITER,
    FIXED_POINT_TOL,
    SHOCK_LINE_TOL,
    TIE_TOL,
)
from mfhj.exceptions import ConvergenceError, DomainError, InternalError
from mfhj.models.measure import SpinMeasure
from mfhj.numerics import find_roots, golden_refine, polish_root, scan_minima
from mfhj.schemas import CriticalReport, ModelPoint, SinglePartySolution, SweepGrid, SweepRow
from mfhj.workers import map_ordered

# Damped iteration hands over to root bracketing once it stops halving the residual.
_STALL_WINDOW = 10
_STALL_START = 20
_STALL_LIMIT = 200


def boundary_action(m: SpinMeasure, x: float) -> float:
    """phi(x, 0) = -Lambda(x)."""
    return -m.log_mgf(x)


def _polish(m: SpinMeasure, x: float, t: float, guess: float, lo: float, hi: float) -> float:
    """Brent on G(M) = M - Lambda'(x + tM) around a golden-section estimate."""
    return polish_root(lambda value: value - m.tilted_mean(x + t * value), guess, lo, hi)


def _local_minima(m: SpinMeasure, x: float, t: float) -> list[tuple[float, float]]:
    a = m.support_half_width
    margin = 0.01 * a + 1e-9
    lo, hi = -a - margin, a + margin

    def objective(M):
        return 0.5 * t * M * M - m.log_mgf(x + t * M)

    candidates: list[tuple[float, float]] = []
    for bracket in scan_minima(objective, lo, hi):
        M = golden_refine(objective, bracket)
        M = _polish(m, x, t, M, lo, hi)
        if abs(M) >= a + margin / 2:
            raise InternalError("Hopf-Lax minimizer left the confinement interval",
                                x=x, t=t, M=M, half_width=a)
        value = float(objective(M))
        if all(abs(M - other) > 1e-9 for _, other in candidates):
            candidates.append((value, M))
    if not candidates:
        raise InternalError("no local minimum bracketed", x=x, t=t)
    return candidates


def hopf_lax(m: SpinMeasure, p: ModelPoint) -> SinglePartySolution:
    """
    Global minimizer of the Hopf-Lax objective at ``p``.

    On the shock line (|x| <= 1e-14) two tied minima give branch_count 2 and
    the nonnegative branch is reported as primary.
    """
    x, t = p.x, p.t
    if t <= 0:
        raise DomainError("hopf_lax needs t > 0; use boundary_action at t = 0", t=t)

    if m.support_half_width == 0.0:
        minima = [(0.0, 0.0)]
    else:
        minima = _local_minima(m, x, t)
    best = min(value for value, _ in minima)
    tied = [M for value, M in minima if value - best <= TIE_TOL * max(1.0, abs(best))]

    if abs(x) <= SHOCK_LINE_TOL and len(tied) > 1:
        branches = sorted(tied, reverse=True)
        branch_count = 2
    else:
        winner = min(minima)[1]
        branches = [winner]
        branch_count = 1
        if len(tied) > 1:
            logger.debug("near-tie off the shock line at x={} t={}: {}", x, t, tied)
    M = branches[0]
    phi = 0.5 * t * M * M - m.log_mgf(x + t * M)
    return SinglePartySolution(
        x=x, t=t,
        minimizer_y=x + t * M,
        action_phi=phi,
        pressure_A=-phi,
        magnetization_M=M,
        free_energy_f=phi / t,
        branch_count=branch_count,
        residual=abs(M - m.tilted_mean(x + t * M)),
        branches=branches[:2],
    )


def _stable_root_near(m: SpinMeasure, x: float, t: float, seed: float) -> float | None:
    a = m.support_half_width

    def g(M: np.ndarray) -> np.ndarray:
        return M - m.tilted_mean(x + t * M)

    roots = find_roots(g, -a, a)
    if not roots:
        return None
    stable = [r for r in roots if 1.0 - t * m.tilted_variance(x + t * r) > 0.0]
    pool = stable or roots
    return min(pool, key=lambda r: (abs(r - seed), -r))


def self_consistent_M(m: SpinMeasure, p: ModelPoint, seed: float = 0.0, *,
                      tol: float = FIXED_POINT_TOL,
                      max_iter: int = FIXED_POINT_MAX_ITER) -> float:
    """
    Solves M = Lambda'(x + tM) by damped iteration from ``seed``.

    A stalling iteration falls back to bracketing all roots on [-L/2, L/2]
    and picks the stable one closest to the seed.
    """
    a = m.support_half_width
    if abs(seed) > a + 1e-12:
        raise DomainError("seed outside the saturation interval", seed=seed, half_width=a)
    x, t = p.x, p.t
    if a == 0.0:
        return 0.0
    if t == 0.0:
        return m.tilted_mean(x)

    M = float(seed)
    residuals: list[float] = []
    for k in range(max_iter):
        image = m.tilted_mean(x + t * M)
        r = abs(image - M)
        if r <= tol:
            return _polish(m, x, t, M, -a, a)
        residuals.append(r)
        stalled = (k >= _STALL_START and r > 0.5 * residuals[k - _STALL_WINDOW]) or k >= _STALL_LIMIT
        if stalled:
            logger.debug("fixed point stalled at x={} t={} after {} steps; bracketing", x, t, k)
            root = _stable_root_near(m, x, t, seed)
            if root is not None:
                fallback = abs(root - m.tilted_mean(x + t * root))
                if fallback <= max(tol, 1e-12):
                    return root
                M = root
                residuals.append(fallback)
            break
        M = (1.0 - DAMPING) * M + DAMPING * image
    raise ConvergenceError("self-consistency iteration did not converge",
                           last_iterate=M, residual=residuals[-1] if residuals else None,
                           x=x, t=t)


def free_energy(m: SpinMeasure, beta: float, h: float) -> float:
    """f = phi(h, beta) / beta = M^2/2 - Lambda(h + beta M) / beta."""
    if not beta > 0:
        raise DomainError("beta must be positive", beta=beta)
    return hopf_lax(m, ModelPoint(x=h, t=beta)).free_energy_f


def _crossing_ratio(m: SpinMeasure, x0: np.ndarray) -> np.ndarray:
    return x0 / m.tilted_mean(x0)


def critical_report(m: SpinMeasure) -> CriticalReport:
    """
    t_c as the earliest time a characteristic from x0 > 0 reaches x = 0,
    together with 1/Lambda''(0), its reciprocal and the bound L^2.
    """
    variance = m.variance
    support_bound = m.support_width ** 2
    if variance <= 0.0:
        return CriticalReport(t_c=math.inf, inverse_variance=math.inf, sup_ratio=0.0,
                              support_bound=support_bound, concave_velocity=True)
    inverse_variance = 1.0 / variance

    upper = math.log10(10.0 * m.support_width)
    grid = np.logspace(-8.0, upper, 400)
    ratios = _crossing_ratio(m, grid)
    i = int(np.argmin(ratios))
    best = float(ratios[i])
    if 0 < i < len(grid) - 1:
        bracket = (math.log(grid[i - 1]), math.log(grid[i]), math.log(grid[i + 1]))
        u = golden_refine(lambda s: float(_crossing_ratio(m, np.exp(s))), bracket)
        best = min(best, float(_crossing_ratio(m, math.exp(u))))

    t_c = min(best, inverse_variance)
    concave = abs(t_c - inverse_variance) <= 1e-9 * max(1.0, inverse_variance)
    if not concave:
        logger.warning("crossing-time t_c={} differs from 1/Lambda''(0)={}; "
                       "velocity is not concave, first-order transition candidate",
                       t_c, inverse_variance)
    return CriticalReport(t_c=t_c, inverse_variance=inverse_variance, sup_ratio=1.0 / t_c,
                          support_bound=support_bound, concave_velocity=concave)


def critical_time(m: SpinMeasure) -> float:
    """First characteristic-crossing time at x = 0; +inf without a transition."""
    return critical_report(m).t_c


def bifurcation_time(m: SpinMeasure, *, threshold: float = 1e-4, t_max: float = 1e6,
                     rtol: float = 1e-10) -> float:
    """
    Smallest t at which the zero-field fixed-point equation, started at
    saturation, settles on |M| > threshold. Found by bisection; +inf when no
    bifurcation occurs below ``t_max``.
    """
    a = m.support_half_width
    if a == 0.0:
        return math.inf

    def magnetized(t: float) -> bool:
        return self_consistent_M(m, ModelPoint(x=0.0, t=t), seed=a) > threshold

    lo, hi = 0.0, 1e-3
    while not magnetized(hi):
        lo, hi = hi, 2.0 * hi
        if hi > t_max:
            return math.inf
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if magnetized(mid):
            hi = mid
        else:
            lo = mid
    return hi


def sweep(m: SpinMeasure, betas: list[float], hs: list[float], *, workers: int = 1) -> SweepGrid:
    """hopf_lax over the (beta, h) grid, row-major in beta."""
    points = [ModelPoint(x=h, t=beta) for beta in betas for h in hs]
    solutions = map_ordered(lambda point: hopf_lax(m, point), points, workers=workers)
    rows = [SweepRow(beta=s.t, h=s.x, M=s.magnetization_M, A=s.pressure_A, f=s.free_energy_f,
                     branch_count=s.branch_count, residual=s.residual)
            for s in solutions]
    return SweepGrid(betas=list(betas), hs=list(hs), rows=rows)
