"""
Two-party model: N1 spins sigma and N2 = alpha N1 spins tau interacting only
across parties through beta * S_sigma * S_tau / N1.

Fields are mechanical: h1 and h2 multiply the raw spin sums. In the limit the
magnetizations solve
    M = Lambda_sigma'(h1 + alpha beta N),   N = Lambda_tau'(h2 + beta M),
and the pressure is
    A = -alpha beta N M + Lambda_sigma(h1 + alpha beta N) + alpha Lambda_tau(h2 + beta M).
"""
import math
from functools import lru_cache

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.integrate import quad
from scipy.optimize import brentq, root
from scipy.special import logsumexp

from mfhj.config import (
    DAMPING,
    ENUMERATION_BUDGET,
    FIXED_POINT_MAX_ITER,
    FIXED_POINT_TOL,
    LAPLACE_SIGMAS,
    TIE_TOL,
)
from mfhj.exceptions import BudgetExceededError, ConvergenceError, DomainError
from mfhj.models.finite_n import occupation_count, occupations
from mfhj.models.measure import SpinMeasure, counting_offset
from mfhj.models.single_party import critical_time, hopf_lax
from mfhj.numerics import find_roots, golden_refine, polish_root, scan_minima
from mfhj.schemas import (
    BipartiteConvergenceRow,
    BipartiteSolution,
    BipartiteSweepRow,
    BoundaryEquivalenceReport,
    ModelPoint,
)
from mfhj.workers import map_ordered

CROSS_ORDER_TOL = 1e-8
_OUTER_POINTS = 49
_TRACE_LENGTH = 10


class BipartiteParams(BaseModel):
    beta: float = Field(..., gt=0, description="Inverse temperature")
    alpha: float = Field(..., ge=0, description="Relative size N2 / N1")
    h1: float = Field(0.0, description="Field on the sigma party")
    h2: float = Field(0.0, description="Field on the tau party")
    measure_sigma: SpinMeasure
    measure_tau: SpinMeasure

    model_config = ConfigDict(frozen=True)

    @field_validator("beta", "alpha", "h1", "h2")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("parameters must be finite")
        return value


# Maps and functionals

def coupled_maps(p: BipartiteParams, m, n):
    """(Lambda_sigma'(h1 + alpha beta n), Lambda_tau'(h2 + beta m))."""
    return (p.measure_sigma.tilted_mean(p.h1 + p.alpha * p.beta * n),
            p.measure_tau.tilted_mean(p.h2 + p.beta * m))


def _trial(p: BipartiteParams, m, n):
    return (p.alpha * m * n
            - p.measure_sigma.log_mgf(p.h1 + p.alpha * p.beta * n) / p.beta
            - p.alpha * p.measure_tau.log_mgf(p.h2 + p.beta * m) / p.beta)


def minmax_trial(p: BipartiteParams, m: float, n: float) -> float:
    """alpha m n - Lambda_sigma(h1 + alpha beta n)/beta - alpha Lambda_tau(h2 + beta m)/beta."""
    a_sigma = p.measure_sigma.support_half_width
    a_tau = p.measure_tau.support_half_width
    if abs(m) > a_sigma + 1e-12 or abs(n) > a_tau + 1e-12:
        raise DomainError("trial arguments outside the saturation box",
                          m=m, n=n, sigma_half_width=a_sigma, tau_half_width=a_tau)
    return float(_trial(p, m, n))


def pressure_at(p: BipartiteParams, m: float, n: float) -> float:
    return (-p.alpha * p.beta * n * m
            + p.measure_sigma.log_mgf(p.h1 + p.alpha * p.beta * n)
            + p.alpha * p.measure_tau.log_mgf(p.h2 + p.beta * m))


def counting_constant(p: BipartiteParams) -> float:
    """log K_sigma + alpha log K_tau, the pressure shift of the counting convention."""
    return counting_offset(p.measure_sigma) + p.alpha * counting_offset(p.measure_tau)


def _solution(p: BipartiteParams, m: float, n: float, branch_count: int = 1,
              cross_order_gap: float | None = None) -> BipartiteSolution:
    t_sigma, t_tau = coupled_maps(p, m, n)
    A = pressure_at(p, m, n)
    return BipartiteSolution(
        beta=p.beta, alpha=p.alpha, h1=p.h1, h2=p.h2,
        m_tilde=m, n_tilde=n, d=m - p.alpha * n,
        pressure_A=A, free_energy_f=-A / p.beta,
        residuals=(abs(m - t_sigma), abs(n - t_tau)),
        branch_count=branch_count,
        cross_order_gap=cross_order_gap,
    )


def _decoupled(p: BipartiteParams) -> tuple[float, float]:
    """alpha = 0: the tau party feels sigma but does not act back."""
    m = p.measure_sigma.tilted_mean(p.h1)
    return m, p.measure_tau.tilted_mean(p.h2 + p.beta * m)


# Fixed points

def fixed_points(p: BipartiteParams) -> list[tuple[float, float]]:
    """
    Every solution of the coupled pair, from the roots of the reduced
    equation N = T_tau(T_sigma(N)) on [-L_tau/2, L_tau/2].
    """
    if p.alpha == 0.0:
        return [_decoupled(p)]
    a_tau = p.measure_tau.support_half_width
    if a_tau == 0.0:
        ns = [0.0]
    else:
        def reduced(n: np.ndarray) -> np.ndarray:
            m, _ = coupled_maps(p, 0.0, n)
            return n - p.measure_tau.tilted_mean(p.h2 + p.beta * m)

        ns = find_roots(reduced, -a_tau, a_tau)
    points = []
    for n in ns:
        m, _ = coupled_maps(p, 0.0, n)
        points.append((float(m), float(n)))
    return sorted(points)


def _iterate(p: BipartiteParams, seed: tuple[float, float], tol: float,
             max_iter: int) -> tuple[float, float]:
    """Damped alternating updates, handing over to Powell's hybrid method on stalls."""
    m, n = seed
    trace: list[tuple[float, float, float, float]] = []
    for k in range(max_iter):
        t_sigma, _ = coupled_maps(p, m, n)
        m_next = (1.0 - DAMPING) * m + DAMPING * t_sigma
        _, t_tau = coupled_maps(p, m_next, n)
        n_next = (1.0 - DAMPING) * n + DAMPING * t_tau
        m, n = m_next, n_next
        t_sigma, t_tau = coupled_maps(p, m, n)
        r1, r2 = abs(m - t_sigma), abs(n - t_tau)
        trace.append((m, n, r1, r2))
        if max(r1, r2) <= tol:
            return m, n
        worst = max(r1, r2)
        if k >= 20 and (worst > 0.5 * max(trace[k - 10][2:]) or k >= 200):
            logger.debug("alternating iteration stalled after {} steps; switching to hybr", k)
            break

    def residual(z: np.ndarray) -> np.ndarray:
        t_sigma, t_tau = coupled_maps(p, z[0], z[1])
        return np.array([z[0] - t_sigma, z[1] - t_tau])

    result = root(residual, np.array([m, n]), method="hybr", tol=1e-15)
    m, n = float(result.x[0]), float(result.x[1])
    r1, r2 = np.abs(residual(result.x))
    if max(r1, r2) <= max(tol, 1e-12):
        return m, n
    trace.append((m, n, float(r1), float(r2)))
    raise ConvergenceError("coupled fixed point did not converge",
                           trace=[list(step) for step in trace[-_TRACE_LENGTH:]],
                           beta=p.beta, alpha=p.alpha, h1=p.h1, h2=p.h2)


def _select(p: BipartiteParams, candidates: list[tuple[float, float]]) -> tuple[float, float, int]:
    """Lowest trial value wins; tied branches give branch_count 2 and M >= 0 first."""
    values = [float(_trial(p, m, n)) for m, n in candidates]
    best = min(values)
    tied = [c for c, v in zip(candidates, values) if v - best <= TIE_TOL * max(1.0, abs(best))]
    distinct: list[tuple[float, float]] = []
    for c in sorted(tied, key=lambda c: -c[0]):
        if all(abs(c[0] - d[0]) > 1e-9 or abs(c[1] - d[1]) > 1e-9 for d in distinct):
            distinct.append(c)
    m, n = distinct[0]
    return m, n, min(len(distinct), 2)


def _check_seed(p: BipartiteParams, seed: tuple[float, float]) -> None:
    a_sigma = p.measure_sigma.support_half_width
    a_tau = p.measure_tau.support_half_width
    if abs(seed[0]) > a_sigma + 1e-12 or abs(seed[1]) > a_tau + 1e-12:
        raise DomainError("seed outside the saturation box", seed=list(seed))


def coupled_fixed_point(p: BipartiteParams, seed: tuple[float, float] = (0.0, 0.0), *,
                        tol: float = FIXED_POINT_TOL,
                        max_iter: int = FIXED_POINT_MAX_ITER) -> BipartiteSolution:
    """
    Solves the coupled self-consistency pair. The seeded iteration and the
    full root scan both contribute candidates; the minmax trial value picks
    the reported branch.
    """
    _check_seed(p, seed)
    if p.alpha == 0.0:
        m, n = _decoupled(p)
        return _solution(p, m, n)

    candidates = fixed_points(p)
    iterated: tuple[float, float] | None = None
    try:
        iterated = _iterate(p, seed, tol, max_iter)
    except ConvergenceError:
        if not candidates:
            raise
        logger.debug("seeded iteration failed at beta={} alpha={}; using root scan", p.beta, p.alpha)
    if iterated is not None:
        candidates.append(iterated)
    m, n, branch_count = _select(p, candidates)
    if iterated is not None and abs(iterated[0] - m) > 1e-9:
        logger.debug("selection switched branch from seeded M={} to M={}", iterated[0], m)
    return _solution(p, m, n, branch_count)


def pressure(p: BipartiteParams) -> float:
    """Limiting pressure at the selected fixed point."""
    return coupled_fixed_point(p).pressure_A


# Minmax

def _nested_min_max(value, inner_grad, outer_grad, inner_map, outer_half: float,
                    inner_lo: float, inner_hi: float) -> list[tuple[float, float, float]]:
    """
    Local minima over the outer variable u of max over the inner variable v.

    The inner problem is concave, so its maximizer is the root of the
    decreasing ``inner_grad``. A gradient that does not move with v means the
    value is flat along v (a point-mass party); v is then read off its
    self-consistency map ``inner_map``. Returns (profile value, u, v) triples.
    """
    def inner(u: float) -> float:
        if inner_hi - inner_lo <= 0.0:
            return inner_lo
        fa, fb = inner_grad(u, inner_lo), inner_grad(u, inner_hi)
        if fa == fb:
            return float(inner_map(u))
        if fa <= 0.0:
            return inner_lo
        if fb >= 0.0:
            return inner_hi
        return brentq(lambda v: inner_grad(u, v), inner_lo, inner_hi,
                      xtol=1e-15, rtol=4 * np.finfo(float).eps)

    def profile(u: float) -> float:
        return float(value(u, inner(u)))

    if outer_half <= 0.0:
        return [(profile(0.0), 0.0, inner(0.0))]

    def profile_grid(us: np.ndarray) -> np.ndarray:
        return np.array([profile(float(u)) for u in us])

    minima: list[tuple[float, float, float]] = []
    for bracket in scan_minima(profile_grid, -outer_half, outer_half, points=_OUTER_POINTS):
        u = golden_refine(profile, bracket)
        u = polish_root(lambda s: outer_grad(s, inner(s)), u, -outer_half, outer_half)
        if all(abs(u - other) > 1e-9 for _, other, _ in minima):
            v = inner(u)
            minima.append((float(value(u, v)), u, v))
    return minima


def _outer_n(p: BipartiteParams) -> list[tuple[float, float, float]]:
    """min over N of max over M; triples are (value, N, M)."""
    a_sigma = p.measure_sigma.support_half_width
    n_max = p.measure_tau.tilted_mean(abs(p.h2) + p.beta * a_sigma)
    reach = a_sigma + 2.0 * abs(p.h2) / p.beta
    return _nested_min_max(
        value=lambda n, m: _trial(p, m, n),
        inner_grad=lambda n, m: n - p.measure_tau.tilted_mean(p.h2 + p.beta * m),
        outer_grad=lambda n, m: m - p.measure_sigma.tilted_mean(p.h1 + p.alpha * p.beta * n),
        inner_map=lambda n: p.measure_sigma.tilted_mean(p.h1 + p.alpha * p.beta * n),
        outer_half=n_max, inner_lo=-reach, inner_hi=reach)


def _outer_m(p: BipartiteParams) -> list[tuple[float, float, float]]:
    """min over M of max over N; triples are (value, M, N)."""
    a_tau = p.measure_tau.support_half_width
    m_max = p.measure_sigma.tilted_mean(abs(p.h1) + p.alpha * p.beta * a_tau)
    reach = a_tau + 2.0 * abs(p.h1) / (p.alpha * p.beta)
    return _nested_min_max(
        value=lambda m, n: _trial(p, m, n),
        inner_grad=lambda m, n: m - p.measure_sigma.tilted_mean(p.h1 + p.alpha * p.beta * n),
        outer_grad=lambda m, n: n - p.measure_tau.tilted_mean(p.h2 + p.beta * m),
        inner_map=lambda m: p.measure_tau.tilted_mean(p.h2 + p.beta * m),
        outer_half=m_max, inner_lo=-reach, inner_hi=reach)


def minmax_solve(p: BipartiteParams) -> BipartiteSolution:
    """
    f = min over N of max over M of the trial functional, by nested
    scan and golden-section search with Brent polishing. The other nesting
    order is evaluated too and its distance reported as cross_order_gap.
    """
    if p.alpha == 0.0:
        m, n = _decoupled(p)
        return _solution(p, m, n, cross_order_gap=0.0)

    minima = _outer_n(p)
    candidates = [(m, n) for _, n, m in minima]
    m, n, branch_count = _select(p, candidates)
    value = float(_trial(p, m, n))

    cross = min(v for v, _, _ in _outer_m(p))
    gap = abs(value - cross)
    if gap > CROSS_ORDER_TOL:
        logger.debug("cross-order gap {} at beta={} alpha={} h=({}, {})",
                     gap, p.beta, p.alpha, p.h1, p.h2)
    return _solution(p, m, n, branch_count, cross_order_gap=gap)


def saddle_curvatures(p: BipartiteParams, m: float, n: float, step: float = 1e-3) -> tuple[float, float]:
    """
    Curvature of the trial functional along M (a second difference) and of
    the profile max over M along N. At a genuine saddle the first is negative
    and the second positive.

    The profile curvature uses dM/dN = 1 / (beta Lambda_tau''(h2 + beta M)) from
    the inner stationarity condition N = Lambda_tau'(h2 + beta M).
    """
    along_m = (_trial(p, m + step, n) - 2.0 * _trial(p, m, n) + _trial(p, m - step, n)) / step ** 2
    tau_curvature = p.measure_tau.tilted_variance(p.h2 + p.beta * m)
    sigma_curvature = p.measure_sigma.tilted_variance(p.h1 + p.alpha * p.beta * n)
    response = math.inf if tau_curvature == 0.0 else 1.0 / (p.beta * tau_curvature)
    along_n = p.alpha * response - p.alpha ** 2 * p.beta * sigma_curvature
    return float(along_m), float(along_n)


# Critical line

def bipartite_critical_beta(sigma: SpinMeasure, tau: SpinMeasure, alpha: float) -> float:
    """Zero-field linearization threshold 1 / sqrt(alpha Var_sigma Var_tau)."""
    product = alpha * sigma.variance * tau.variance
    return math.inf if product <= 0.0 else 1.0 / math.sqrt(product)


def bipartite_bifurcation_beta(sigma: SpinMeasure, tau: SpinMeasure, alpha: float, *,
                               threshold: float = 1e-4, beta_max: float = 1e6,
                               rtol: float = 1e-10) -> float:
    """Smallest beta at which a zero-field fixed point with |M| > threshold appears."""
    if alpha == 0.0:
        return math.inf

    def magnetized(beta: float) -> bool:
        params = BipartiteParams(beta=beta, alpha=alpha, measure_sigma=sigma, measure_tau=tau)
        return any(abs(m) > threshold for m, _ in fixed_points(params))

    lo, hi = 0.0, 1e-3
    while not magnetized(hi):
        lo, hi = hi, 2.0 * hi
        if hi > beta_max:
            return math.inf
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if magnetized(mid):
            hi = mid
        else:
            lo = mid
    return hi


# Finite size

def exact_bipartite_pressure(n1: int, n2: int, p: BipartiteParams) -> float:
    """
    A = (1/N1) log E exp(beta S_sigma S_tau / N1 + h1 S_sigma + h2 S_tau),
    aggregated over the pair of occupation vectors.
    """
    if n1 < 1 or n2 < 0:
        raise DomainError("need n1 >= 1 and n2 >= 0", n1=n1, n2=n2)
    _check_budget(p, n1, n2)
    sigma = occupations(p.measure_sigma, n1)
    tau = occupations(p.measure_tau, n2)
    exponent = (p.beta * np.outer(sigma.s1, tau.s1) / n1
                + p.h1 * sigma.s1[:, None] + p.h2 * tau.s1[None, :])
    total = sigma.log_weight[:, None] + tau.log_weight[None, :] + exponent
    return float(logsumexp(total)) / n1


def _check_budget(p: BipartiteParams, n1: int, n2: int) -> None:
    for measure in (p.measure_sigma, p.measure_tau):
        if not measure.is_discrete:
            raise DomainError("exact enumeration needs discrete measures", measure=measure.label)
    joint = (occupation_count(n1, p.measure_sigma.atom_count)
             * occupation_count(n2, p.measure_tau.atom_count))
    if joint > ENUMERATION_BUDGET:
        raise BudgetExceededError("joint enumeration budget exceeded", n1=n1, n2=n2,
                                  occupation_pairs=joint, budget=ENUMERATION_BUDGET)


def tau_size(p: BipartiteParams, n1: int) -> int:
    return int(round(p.alpha * n1))


def bipartite_convergence(p: BipartiteParams, n1_list: list[int], *,
                          workers: int = 1) -> list[BipartiteConvergenceRow]:
    """Exact pressures at N2 = round(alpha N1) against the limit."""
    limit = pressure(p)

    def row(n1: int) -> BipartiteConvergenceRow:
        n2 = tau_size(p, n1)
        exact = exact_bipartite_pressure(n1, n2, p)
        gap = abs(exact - limit)
        return BipartiteConvergenceRow(n1=n1, n2=n2, exact_pressure=exact, limit_pressure=limit,
                                       gap=gap, scaled_gap=n1 * gap)

    return map_ordered(row, list(n1_list), workers=workers)


def bipartite_sweep(sigma: SpinMeasure, tau: SpinMeasure, betas: list[float], alphas: list[float],
                    *, h1: float = 0.0, h2: float = 0.0, workers: int = 1) -> list[BipartiteSweepRow]:
    """coupled_fixed_point over the (beta, alpha) grid, row-major in beta."""
    grid = [BipartiteParams(beta=b, alpha=a, h1=h1, h2=h2, measure_sigma=sigma, measure_tau=tau)
            for b in betas for a in alphas]

    def solve(params: BipartiteParams) -> BipartiteSweepRow:
        s = coupled_fixed_point(params)
        return BipartiteSweepRow(beta=s.beta, alpha=s.alpha, m_tilde=s.m_tilde, n_tilde=s.n_tilde,
                                 d=s.d, A=s.pressure_A, f=s.free_energy_f,
                                 branch_count=s.branch_count)

    return map_ordered(solve, grid, workers=workers)


# Interpolating Cole-Hopf action

def _enumerated_tilde(m: SpinMeasure, n: int, t: float):
    """y -> (1/N) log E exp(t N m^2/2 + y N m) for a vector of y."""
    occ = occupations(m, n)

    def tilde(y: np.ndarray) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        exponent = t * occ.s1 ** 2 / (2.0 * n) + y[:, None] * occ.s1
        return logsumexp(occ.log_weight + exponent, axis=1) / n

    return tilde


def _finite_boundary(p: BipartiteParams, n1: int):
    """h_N(y) = A~sigma_N1(beta, h1 + y) + alpha_N A~tau_N2(alpha_N beta, h2 - y)."""
    n2 = tau_size(p, n1)
    alpha_n = n2 / n1
    sigma = _enumerated_tilde(p.measure_sigma, n1, p.beta)
    tau = _enumerated_tilde(p.measure_tau, n2, alpha_n * p.beta) if n2 > 0 else None

    def boundary(y: float) -> float:
        value = float(sigma(p.h1 + y)[0])
        if tau is not None:
            value += alpha_n * float(tau(p.h2 - y)[0])
        return value

    return boundary, alpha_n


def _limit_boundary(p: BipartiteParams):
    """The same boundary with each party replaced by its Hopf-Lax limit."""
    @lru_cache(maxsize=4096)
    def boundary(y: float) -> float:
        value = -hopf_lax(p.measure_sigma, ModelPoint(x=p.h1 + y, t=p.beta)).action_phi
        if p.alpha > 0.0:
            value -= p.alpha * hopf_lax(p.measure_tau,
                                        ModelPoint(x=p.h2 - y, t=p.alpha * p.beta)).action_phi
        return value

    return boundary


def _boundary_kinks(p: BipartiteParams) -> list[float]:
    kinks = []
    if p.beta > critical_time(p.measure_sigma):
        kinks.append(-p.h1)
    if p.alpha > 0.0 and p.alpha * p.beta > critical_time(p.measure_tau):
        kinks.append(p.h2)
    return kinks


def cole_hopf_bipartite(p: BipartiteParams, n1: int, x: float, t: float, *,
                        limit: bool = False) -> float:
    """
    (1/N1) log sqrt(N1 / 2 pi t) int exp(-N1 (x - y)^2 / 2t + N1 h(y)) dy with
    the finite-size boundary h_N, or its limit when ``limit`` is set.
    At t = 0 the value is h(x).
    """
    if t < 0:
        raise DomainError("t must be nonnegative", t=t)
    if limit:
        boundary, alpha_n = _limit_boundary(p), p.alpha
    else:
        _check_budget(p, n1, tau_size(p, n1))
        boundary, alpha_n = _finite_boundary(p, n1)
    if t == 0.0:
        return boundary(x)

    slope = p.measure_sigma.support_half_width + alpha_n * p.measure_tau.support_half_width
    reach = t * slope + LAPLACE_SIGMAS * math.sqrt(t / n1)
    lo, hi = x - reach, x + reach

    def exponent(y: float) -> float:
        return -(x - y) ** 2 / (2.0 * t) + boundary(y)

    ys = np.linspace(lo, hi, 65)
    values = [exponent(float(y)) for y in ys]
    peak = int(np.argmax(values))
    floor = values[peak]
    points = [float(ys[peak])] + [k for k in _boundary_kinks(p) if lo < k < hi]
    mass, error = quad(lambda y: math.exp(n1 * (exponent(y) - floor)), lo, hi,
                       points=sorted(set(points)), epsabs=0.0, epsrel=1e-11, limit=400)[:2]
    if not mass > 0.0 or error > 1e-8 * mass:
        raise ConvergenceError("Cole-Hopf quadrature did not converge", mass=mass, abserr=error)
    return floor + (0.5 * math.log(n1 / (2.0 * math.pi * t)) + math.log(mass)) / n1


def interpolating_pressure(p: BipartiteParams, n1: int, x: float, t: float) -> float:
    """
    Exact value of the finite-size Cole-Hopf action:
    (1/N1) log E exp(beta (S1^2 + S2^2)/2N1 + h1 S1 + h2 S2 + x D + t D^2/2N1),
    with D = S1 - S2 the unnormalized order parameter.
    """
    n2 = tau_size(p, n1)
    _check_budget(p, n1, n2)
    sigma = occupations(p.measure_sigma, n1)
    tau = occupations(p.measure_tau, n2)
    s1, s2 = sigma.s1[:, None], tau.s1[None, :]
    d = s1 - s2
    exponent = (p.beta * (s1 ** 2 + s2 ** 2) / (2.0 * n1) + p.h1 * s1 + p.h2 * s2
                + x * d + t * d ** 2 / (2.0 * n1))
    total = sigma.log_weight[:, None] + tau.log_weight[None, :] + exponent
    return float(logsumexp(total)) / n1


def boundary_equivalence_check(p: BipartiteParams, n_list: list[int], *, x: float = 0.0,
                               t: float = 1.0, workers: int = 1) -> BoundaryEquivalenceReport:
    """
    Gap between the Cole-Hopf actions built on the finite-size boundary and on
    its limit, with N1 times the gap.
    """
    n_values = list(n_list)

    def gap(n1: int) -> float:
        return abs(cole_hopf_bipartite(p, n1, x, t) - cole_hopf_bipartite(p, n1, x, t, limit=True))

    gaps = map_ordered(gap, n_values, workers=workers)
    return BoundaryEquivalenceReport(x=x, t=t, n_values=n_values, gaps=gaps,
                                     scaled_gaps=[n * g for n, g in zip(n_values, gaps)])
