"""
Characteristics and the shock line of the inviscid Burgers problem for the
velocity -M. The shock sits on x = 0 for every symmetric measure, so one-sided
limits are taken there.
"""
import math

import numpy as np
from loguru import logger

from mfhj.config import ENTROPY_TOL, SHOCK_OFFSET
from mfhj.exceptions import DomainError
from mfhj.models.measure import SpinMeasure
from mfhj.models.single_party import critical_time, hopf_lax
from mfhj.schemas import Characteristic, ModelPoint, ShockReport
from mfhj.workers import map_ordered

RH_TOL = 1e-7
NO_JUMP_TOL = 1e-8


def characteristic(m: SpinMeasure, x0: float) -> Characteristic:
    """The line x = x0 - s * Lambda'(x0) and the time it reaches x = 0."""
    mean = m.tilted_mean(x0)
    if x0 == 0.0 or mean == 0.0:
        crossing = math.inf
    else:
        crossing = x0 / mean
    return Characteristic(x0=x0, slope=-mean, crossing_time=crossing)


def characteristics(m: SpinMeasure, x0_grid: list[float]) -> list[Characteristic]:
    return [characteristic(m, float(x0)) for x0 in x0_grid]


def _magnetization(m: SpinMeasure, x: float, t: float) -> float:
    return hopf_lax(m, ModelPoint(x=x, t=t)).magnetization_M


def one_sided_limits(m: SpinMeasure, t: float, delta: float = SHOCK_OFFSET) -> tuple[float, float]:
    """
    (M+, M-) at x = 0, each a linear extrapolation of the values at delta and
    2 delta from its side so that the smooth slope drops out.
    """
    if not t > 0:
        raise DomainError("one-sided limits need t > 0", t=t)
    plus = 2.0 * _magnetization(m, delta, t) - _magnetization(m, 2.0 * delta, t)
    minus = 2.0 * _magnetization(m, -delta, t) - _magnetization(m, -2.0 * delta, t)
    return plus, minus


def jump_size(m: SpinMeasure, t: float) -> float:
    plus, minus = one_sided_limits(m, t)
    return plus - minus


def count_entropy_violations(m_values: list[float] | np.ndarray, tol: float = ENTROPY_TOL) -> int:
    """Adjacent pairs where M decreases by more than ``tol``."""
    steps = np.diff(np.asarray(m_values, dtype=float))
    return int(np.count_nonzero(steps < -tol))


def entropy_scan(m: SpinMeasure, t: float, x_grid: list[float], *, workers: int = 1) -> int:
    """Entropy-condition violations of hopf_lax output along ``x_grid``."""
    xs = np.asarray(x_grid, dtype=float)
    if xs.ndim != 1 or np.any(np.diff(xs) <= 0):
        raise DomainError("x_grid must be strictly increasing")
    ms = map_ordered(lambda x: _magnetization(m, float(x), t), xs.tolist(), workers=workers)
    return count_entropy_violations(ms)


def detect_shock(m: SpinMeasure, t_grid: list[float], *, x_grid: list[float] | None = None,
                 workers: int = 1) -> ShockReport:
    """
    Splits ``t_grid`` at t_c. Above it the one-sided limits at x = 0 are
    recorded with their Rankine-Hugoniot residual |M+ + M-|; below it the
    jump. Entropy violations are counted along ``x_grid`` at every t.
    """
    times = [float(t) for t in t_grid]
    if any(not t > 0 for t in times):
        raise DomainError("t_grid values must be positive", t=times)
    t_c = critical_time(m)
    if x_grid is None:
        x_grid = np.linspace(-1.0, 1.0, 21).tolist()

    def limits(t: float) -> tuple[float, float, int]:
        plus, minus = one_sided_limits(m, t)
        return plus, minus, entropy_scan(m, t, x_grid)

    rows = map_ordered(limits, times, workers=workers)
    report = ShockReport(t_c=t_c)
    for t, (plus, minus, violations) in zip(times, rows):
        report.entropy_violations += violations
        if t > t_c:
            residual = abs(plus + minus)
            if residual > RH_TOL or plus < 0:
                logger.warning("Rankine-Hugoniot check failed at t={}: M+={} M-={}", t, plus, minus)
            report.times.append(t)
            report.m_plus.append(plus)
            report.m_minus.append(minus)
            report.rh_residuals.append(residual)
        else:
            jump = plus - minus
            if abs(jump) > NO_JUMP_TOL:
                logger.warning("jump {} below t_c at t={}", jump, t)
            report.subcritical_times.append(t)
            report.subcritical_m_plus.append(plus)
            report.subcritical_m_minus.append(minus)
            report.subcritical_jumps.append(jump)
    return report
