"""
Finite-size ground truth for the one-party model.

Exact pressures come from enumerating atom-occupation vectors: the Hamiltonian
only sees S1 = sum(sigma) and S2 = sum(sigma^2), so the multinomial weight of
each vector replaces K^N individual configurations. The Cole-Hopf solutions
phi_N and u_N are one-dimensional heat-kernel integrals of the boundary data.
"""
import math
from itertools import combinations

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import quad
from scipy.special import gammaln, logsumexp

from mfhj.config import ENUMERATION_BUDGET, LAPLACE_SIGMAS, QUADRATURE_RTOL
from mfhj.exceptions import BudgetExceededError, ConvergenceError, DomainError
from mfhj.models.measure import SpinMeasure
from mfhj.models.single_party import hopf_lax
from mfhj.numerics import loglog_slope
from mfhj.schemas import ConvergenceReport, ModelPoint
from mfhj.workers import map_ordered


class FiniteSystem(BaseModel):
    """N spins drawn from ``measure`` at the mechanical point ``point``."""
    n: int = Field(..., ge=1, description="Number of spins N")
    measure: SpinMeasure
    point: ModelPoint

    model_config = ConfigDict(frozen=True)


class Occupations(BaseModel):
    """Log multinomial weights and the two spin sums of every occupation vector."""
    log_weight: np.ndarray
    s1: np.ndarray
    s2: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


def occupation_count(n: int, k: int) -> int:
    return math.comb(n + k - 1, k - 1)


def _require_discrete(m: SpinMeasure) -> None:
    if not m.is_discrete:
        raise DomainError("exact enumeration needs a discrete measure", measure=m.label)


def _compositions(n: int, k: int) -> np.ndarray:
    """All k-part occupation vectors summing to n, by stars and bars."""
    if k == 1:
        return np.array([[n]])
    if k == 2:
        first = np.arange(n + 1)
        return np.column_stack([first, n - first])
    total = n + k - 1
    bars = np.array(list(combinations(range(total), k - 1)), dtype=np.int64)
    edges = np.column_stack([np.full(len(bars), -1), bars, np.full(len(bars), total)])
    return np.diff(edges, axis=1) - 1


def occupations(m: SpinMeasure, n: int, *, budget: int = ENUMERATION_BUDGET) -> Occupations:
    _require_discrete(m)
    k = m.atom_count
    count = occupation_count(n, k)
    if count > budget:
        raise BudgetExceededError("enumeration budget exceeded", n=n, atoms=k,
                                  occupation_vectors=count, budget=budget)
    counts = _compositions(n, k)
    values = np.asarray(m.values)
    log_w = np.log(np.asarray(m.weights))
    log_weight = gammaln(n + 1) - gammaln(counts + 1).sum(axis=1) + counts @ log_w
    return Occupations(log_weight=log_weight, s1=counts @ values, s2=counts @ values ** 2)


def exact_pressure(system: FiniteSystem, beta: float | None = None, h: float | None = None) -> float:
    """
    A_N = (1/N) log E exp(beta (N m^2/2 - a_N/2) + h N m), with a_N the mean
    square spin. beta and h default to the system's point (t and x).
    """
    beta = system.point.t if beta is None else beta
    h = system.point.x if h is None else h
    if beta < 0 or not (math.isfinite(beta) and math.isfinite(h)):
        raise DomainError("beta must be finite and nonnegative", beta=beta, h=h)
    n = system.n
    occ = occupations(system.measure, n)
    exponent = beta * (occ.s1 ** 2 - occ.s2) / (2.0 * n) + h * occ.s1
    return float(logsumexp(occ.log_weight + exponent)) / n


def action_by_enumeration(m: SpinMeasure, p: ModelPoint, n: int) -> float:
    """phi_N = -(1/N) log E exp(t N m^2/2 + x N m), exactly."""
    occ = occupations(m, n)
    exponent = p.t * occ.s1 ** 2 / (2.0 * n) + p.x * occ.s1
    return -float(logsumexp(occ.log_weight + exponent)) / n


def lemma1_check(m: SpinMeasure, p: ModelPoint, n: int) -> float:
    """L^2 t / 2N - |phi_N + A_N|, with L the full support width."""
    phi = action_by_enumeration(m, p, n)
    pressure = exact_pressure(FiniteSystem(n=n, measure=m, point=p))
    bound = m.support_width ** 2 * p.t / (2.0 * n)
    return bound - abs(phi + pressure)


def laplace_window(m: SpinMeasure, p: ModelPoint, n: int) -> tuple[float, float, list[float], float]:
    """
    Integration window for the Cole-Hopf integrals: every minimizer of the
    exponent lies in [x - tL/2, x + tL/2], extended by 12 kernel widths.
    Returns (lo, hi, minimizers, minimum value).
    """
    solution = hopf_lax(m, p)
    x, t = p.x, p.t
    reach = t * m.support_half_width + LAPLACE_SIGMAS * math.sqrt(t / n)
    minimizers = [x + t * M for M in solution.branches]
    return x - reach, x + reach, minimizers, solution.action_phi


def _integrate(fn, lo: float, hi: float, points: list[float], what: str, *,
               epsabs: float = 0.0) -> float:
    inside = [y for y in points if lo < y < hi]
    result = quad(fn, lo, hi, points=inside or None, epsabs=epsabs, epsrel=QUADRATURE_RTOL,
                  limit=400, full_output=1)
    value, error = result[0], result[1]
    if len(result) > 3:
        if error > max(1e-10 * abs(value), 10.0 * epsabs, 1e-300):
            raise ConvergenceError(f"{what} quadrature did not converge", message=result[3],
                                   value=value, abserr=error)
        logger.debug("{} quadrature flagged but within tolerance: {}", what, result[3])
    return value


def _kernel(m: SpinMeasure, p: ModelPoint, n: int, floor: float):
    x, t = p.x, p.t

    def weight(y: float) -> float:
        exponent = (x - y) ** 2 / (2.0 * t) - m.log_mgf(y)
        return math.exp(-n * (exponent - floor))

    return weight


def _check_quadrature_args(p: ModelPoint, n: int) -> None:
    if p.t <= 0:
        raise DomainError("Cole-Hopf integrals need t > 0", t=p.t)
    if n < 1:
        raise DomainError("n must be positive", n=n)


def phi_n_quadrature(m: SpinMeasure, p: ModelPoint, n: int) -> float:
    """
    phi_N = -(1/N) log [ sqrt(N / 2 pi t) int exp(-N((x-y)^2/2t - Lambda(y))) dy ].
    """
    _check_quadrature_args(p, n)
    lo, hi, minimizers, floor = laplace_window(m, p, n)
    mass = _integrate(_kernel(m, p, n, floor), lo, hi, minimizers, "phi_N")
    return floor - (0.5 * math.log(n / (2.0 * math.pi * p.t)) + math.log(mass)) / n


def u_n_quadrature(m: SpinMeasure, p: ModelPoint, n: int) -> float:
    """u_N = < (x - y) / t > under the Cole-Hopf weight; tends to -M."""
    _check_quadrature_args(p, n)
    lo, hi, minimizers, floor = laplace_window(m, p, n)
    weight = _kernel(m, p, n, floor)
    mass = _integrate(weight, lo, hi, minimizers, "u_N mass")
    # The moment vanishes at x = 0, so its tolerance is absolute, relative to the mass.
    moment = _integrate(lambda y: (p.x - y) / p.t * weight(y), lo, hi, minimizers, "u_N moment",
                        epsabs=QUADRATURE_RTOL * mass * (hi - lo) / p.t)
    return moment / mass


def _lemma1_margin(m: SpinMeasure, p: ModelPoint, n: int) -> float | None:
    if not m.is_discrete or occupation_count(n, m.atom_count) > ENUMERATION_BUDGET:
        return None
    return lemma1_check(m, p, n)


def convergence_study(m: SpinMeasure, p: ModelPoint, n_list: list[int], *,
                      workers: int = 1) -> ConvergenceReport:
    """
    Errors of phi_N and u_N against the Hopf-Lax limit, with least-squares
    log-log slopes and the scaled errors N|phi_N - phi| and sqrt(N)|u_N + M|.
    """
    n_values = list(n_list)
    if len(n_values) < 4:
        raise DomainError("a convergence study needs at least 4 system sizes", n=n_values)
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise DomainError("system sizes must be strictly ascending", n=n_values)

    limit = hopf_lax(m, p)

    def evaluate(n: int) -> tuple[float, float, float | None]:
        return phi_n_quadrature(m, p, n), u_n_quadrature(m, p, n), _lemma1_margin(m, p, n)

    rows = map_ordered(evaluate, n_values, workers=workers)
    phi_values = [row[0] for row in rows]
    u_values = [row[1] for row in rows]
    errors_phi = [abs(phi - limit.action_phi) for phi in phi_values]
    errors_u = [abs(u + limit.magnetization_M) for u in u_values]
    logger.info("convergence study at x={} t={} over n={}", p.x, p.t, n_values)
    return ConvergenceReport(
        x=p.x, t=p.t,
        n_values=n_values,
        phi_values=phi_values,
        u_values=u_values,
        phi_limit=limit.action_phi,
        magnetization_limit=limit.magnetization_M,
        errors_phi=errors_phi,
        errors_u=errors_u,
        scaled_errors_phi=[n * e for n, e in zip(n_values, errors_phi)],
        scaled_errors_u=[math.sqrt(n) * e for n, e in zip(n_values, errors_u)],
        fitted_slope_phi=loglog_slope(n_values, errors_phi),
        fitted_slope_u=loglog_slope(n_values, errors_u),
        lemma1_margins=[row[2] for row in rows],
    )
