"""
Invariant suite run by ``mfhj check``. Every check is an oracle or a bound
that holds exactly for a correct build; ``quick`` shrinks the grids.
"""
import math
from collections.abc import Callable

import numpy as np
from loguru import logger

from mfhj.exceptions import InvariantViolation, MfhjError
from mfhj.models.bipartite import (
    BipartiteParams,
    bipartite_bifurcation_beta,
    bipartite_critical_beta,
    counting_constant,
    coupled_fixed_point,
    coupled_maps,
    minmax_solve,
    saddle_curvatures,
)
from mfhj.models.finite_n import action_by_enumeration, lemma1_check, phi_n_quadrature
from mfhj.models.measure import SpinMeasure, dichotomic, equally_spaced_atoms, uniform
from mfhj.models.shock import NO_JUMP_TOL, RH_TOL, entropy_scan, one_sided_limits
from mfhj.models.single_party import bifurcation_time, critical_time, self_consistent_M
from mfhj.schemas import CheckResult, ModelPoint
from mfhj.workers import map_ordered

CheckFn = Callable[[bool, int], CheckResult]


def builtin_measures() -> dict[str, SpinMeasure]:
    return {
        "dichotomic": dichotomic(),
        "uniform": uniform(2.0),
        "three_atom": equally_spaced_atoms(3, 2.0),
    }


def _bounded(name: str, worst: float, limit: float, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=bool(worst <= limit), worst=worst, limit=limit, detail=detail)


def check_measure_symmetry(quick: bool, workers: int) -> CheckResult:
    xs = np.linspace(0.0, 5.0, 11 if quick else 101)
    worst = 0.0
    for m in builtin_measures().values():
        worst = max(worst,
                    float(np.max(np.abs(m.tilted_mean(xs) + m.tilted_mean(-xs)))),
                    float(np.max(np.abs(m.log_mgf(xs) - m.log_mgf(-xs)))))
    return _bounded("measure_symmetry", worst, 1e-14)


def check_tanh_reduction(quick: bool, workers: int) -> CheckResult:
    size = 10 if quick else 50
    m = dichotomic()
    points = [ModelPoint(x=x, t=t) for x in np.linspace(-2.0, 2.0, size)
              for t in np.linspace(0.05, 3.0, size)]

    def residual(p: ModelPoint) -> float:
        M = self_consistent_M(m, p)
        return abs(M - math.tanh(p.x + p.t * M))

    worst = max(map_ordered(residual, points, workers=workers))
    return _bounded("tanh_reduction", worst, 1e-12, f"{size}x{size} grid")


def check_critical_times(quick: bool, workers: int) -> CheckResult:
    expected = {"dichotomic": (1.0, 1e-6), "uniform": (3.0, 1e-4), "three_atom": (1.5, 1e-4)}
    failures = []
    worst = 0.0
    for name, m in builtin_measures().items():
        target, tol = expected[name]
        t_c = critical_time(m)
        scan = bifurcation_time(m)
        error = max(abs(t_c - target), abs(scan - target))
        worst = max(worst, error / tol)
        if error > tol:
            failures.append(f"{name}: t_c={t_c!r} bifurcation={scan!r}")
    return CheckResult(name="critical_times", passed=not failures, worst=worst, limit=1.0,
                       detail="; ".join(failures))


def check_shock_symmetry(quick: bool, workers: int) -> CheckResult:
    m = dichotomic()
    problems = []
    worst = 0.0
    for t in (1.1, 1.5, 2.0, 3.0):
        plus, minus = one_sided_limits(m, t)
        worst = max(worst, abs(plus + minus) / RH_TOL)
        if abs(plus + minus) > RH_TOL or not plus > 0:
            problems.append(f"t={t}: M+={plus!r} M-={minus!r}")
    for t in (0.3, 0.6, 0.9):
        plus, minus = one_sided_limits(m, t)
        worst = max(worst, abs(plus - minus) / NO_JUMP_TOL)
        if abs(plus - minus) > NO_JUMP_TOL:
            problems.append(f"t={t}: jump {plus - minus!r}")
    return CheckResult(name="shock_symmetry", passed=not problems, worst=worst, limit=1.0,
                       detail="; ".join(problems))


def check_entropy(quick: bool, workers: int) -> CheckResult:
    xs = np.linspace(-2.0, 2.0, 41 if quick else 401).tolist()
    times = np.linspace(0.2, 4.0, 4 if quick else 20).tolist()
    total = 0
    for m in builtin_measures().values():
        counts = map_ordered(lambda t: entropy_scan(m, t, xs), times, workers=workers)
        total += sum(counts)
    return CheckResult(name="entropy_condition", passed=total == 0, worst=float(total), limit=0.0)


def _unit_grid(size: int) -> list[ModelPoint]:
    return [ModelPoint(x=x, t=t) for x in np.linspace(-1.0, 1.0, size)
            for t in np.linspace(0.5, 2.5, size)]


def check_lemma1(quick: bool, workers: int) -> CheckResult:
    sizes = (2, 4, 8) if quick else (2, 4, 8, 12)
    points = _unit_grid(3 if quick else 5)
    measures = builtin_measures()
    worst_margin = math.inf
    for name in ("dichotomic", "three_atom"):
        m = measures[name]
        for n in sizes:
            margins = map_ordered(lambda p: lemma1_check(m, p, n), points, workers=workers)
            worst_margin = min(worst_margin, min(margins))
    # The bound holds when the smallest margin is nonnegative.
    return _bounded("lemma1_bound", -worst_margin, 0.0, f"smallest margin {worst_margin!r}")


def check_hubbard_stratonovich(quick: bool, workers: int) -> CheckResult:
    sizes = (2, 6, 10) if quick else (2, 4, 6, 8, 10, 12, 14)
    points = _unit_grid(3 if quick else 5)
    measures = builtin_measures()
    worst = 0.0
    for name in ("dichotomic", "three_atom"):
        m = measures[name]
        for n in sizes:
            gaps = map_ordered(
                lambda p: abs(phi_n_quadrature(m, p, n) - action_by_enumeration(m, p, n)),
                points, workers=workers)
            worst = max(worst, max(gaps))
    return _bounded("hubbard_stratonovich", worst, 1e-9)


def check_bipartite_decoupled(quick: bool, workers: int) -> CheckResult:
    spin = dichotomic()
    worst = 0.0
    for beta in np.linspace(0.2, 3.0, 4 if quick else 15):
        for h1 in np.linspace(-1.0, 1.0, 5 if quick else 21):
            # Thermodynamic field units: the mechanical field is beta * h1.
            p = BipartiteParams(beta=beta, alpha=0.0, h1=beta * h1, h2=0.3,
                                measure_sigma=spin, measure_tau=spin)
            reported = coupled_fixed_point(p).pressure_A + counting_constant(p)
            expected = math.log(2.0) + math.log(math.cosh(beta * h1))
            worst = max(worst, abs(reported - expected))
    return _bounded("bipartite_decoupled", worst, 1e-10)


def check_bipartite_critical_line(quick: bool, workers: int) -> CheckResult:
    spin = dichotomic()
    alphas = [0.25, 0.5, 1.0, 2.0]
    scans = map_ordered(lambda a: bipartite_bifurcation_beta(spin, spin, a), alphas, workers=workers)
    worst = 0.0
    for alpha, scan in zip(alphas, scans):
        closed = bipartite_critical_beta(spin, spin, alpha)
        worst = max(worst, abs(scan - 1.0 / math.sqrt(alpha)), abs(closed - 1.0 / math.sqrt(alpha)))
    return _bounded("bipartite_critical_line", worst, 1e-3)


def random_bipartite_draws(count: int, seed: int = 20240611) -> list[BipartiteParams]:
    rng = np.random.default_rng(seed)
    measures = list(builtin_measures().values())
    draws = []
    for _ in range(count):
        draws.append(BipartiteParams(
            beta=float(rng.uniform(0.2, 3.0)),
            alpha=float(rng.uniform(0.0, 2.5)),
            h1=float(rng.uniform(-1.0, 1.0)),
            h2=float(rng.uniform(-1.0, 1.0)),
            measure_sigma=measures[int(rng.integers(len(measures)))],
            measure_tau=measures[int(rng.integers(len(measures)))],
        ))
    return draws


def trial_gradient(p: BipartiteParams, m: float, n: float) -> tuple[float, float]:
    """(d/dM, d/dN) of the minmax trial functional."""
    t_sigma, t_tau = coupled_maps(p, m, n)
    return p.alpha * (n - t_tau), p.alpha * (m - t_sigma)


def minmax_discrepancy(p: BipartiteParams) -> tuple[float, float, bool]:
    """Largest (M, N, f) disagreement, trial gradient norm and saddle signature."""
    fixed = coupled_fixed_point(p)
    nested = minmax_solve(p)
    gap = max(abs(fixed.m_tilde - nested.m_tilde), abs(fixed.n_tilde - nested.n_tilde),
              abs(fixed.free_energy_f - nested.free_energy_f))
    gradient = max(abs(g) for g in trial_gradient(p, fixed.m_tilde, fixed.n_tilde))
    saddle = True
    if p.alpha > 0.0:
        along_m, along_n = saddle_curvatures(p, fixed.m_tilde, fixed.n_tilde)
        saddle = along_m < 0.0 < along_n
    return gap, gradient, saddle


def check_minmax(quick: bool, workers: int) -> CheckResult:
    draws = random_bipartite_draws(10 if quick else 100)
    rows = map_ordered(minmax_discrepancy, draws, workers=workers)
    worst_gap = max(row[0] for row in rows)
    worst_gradient = max(row[1] for row in rows)
    saddles = sum(1 for row in rows if not row[2])
    passed = worst_gap <= 1e-8 and worst_gradient <= 1e-6 and saddles == 0
    return CheckResult(name="minmax_consistency", passed=passed, worst=worst_gap, limit=1e-8,
                       detail=f"gradient {worst_gradient!r}, saddle failures {saddles}")


FULL_ONLY = {"bipartite_critical_line"}

SUITE: dict[str, CheckFn] = {
    "measure_symmetry": check_measure_symmetry,
    "tanh_reduction": check_tanh_reduction,
    "critical_times": check_critical_times,
    "shock_symmetry": check_shock_symmetry,
    "entropy_condition": check_entropy,
    "lemma1_bound": check_lemma1,
    "hubbard_stratonovich": check_hubbard_stratonovich,
    "bipartite_decoupled": check_bipartite_decoupled,
    "bipartite_critical_line": check_bipartite_critical_line,
    "minmax_consistency": check_minmax,
}


def run_suite(*, quick: bool = False, workers: int = 1) -> list[CheckResult]:
    results = []
    for name, check in SUITE.items():
        if quick and name in FULL_ONLY:
            continue
        try:
            result = check(quick, workers)
        except MfhjError as error:
            result = CheckResult(name=name, passed=False, detail=f"{type(error).__name__}: {error}")
        level = "INFO" if result.passed else "ERROR"
        logger.log(level, "check {}: {} (worst={}, limit={})",
                   name, "ok" if result.passed else "FAILED", result.worst, result.limit)
        results.append(result)
    return results


def require_passed(results: list[CheckResult]) -> None:
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise InvariantViolation("invariant checks failed", failed=failed)
