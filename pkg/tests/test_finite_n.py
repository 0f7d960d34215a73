import itertools
import math

import numpy as np
import pytest
from scipy.special import logsumexp

from mfhj.exceptions import BudgetExceededError, DomainError
from mfhj.models.finite_n import (
    FiniteSystem,
    action_by_enumeration,
    convergence_study,
    exact_pressure,
    lemma1_check,
    occupation_count,
    occupations,
    phi_n_quadrature,
    u_n_quadrature,
)
from mfhj.models.single_party import hopf_lax
from mfhj.schemas import ModelPoint


def _grid(size: int = 5) -> list[ModelPoint]:
    return [ModelPoint(x=x, t=t) for x in np.linspace(-1.0, 1.0, size)
            for t in np.linspace(0.5, 2.5, size)]


def _brute_force_pressure(m, n: int, beta: float, h: float) -> float:
    terms = []
    for config in itertools.product(range(m.atom_count), repeat=n):
        spins = np.asarray(m.values)[list(config)]
        log_p = float(np.sum(np.log(np.asarray(m.weights))[list(config)]))
        s1, s2 = spins.sum(), (spins ** 2).sum()
        terms.append(log_p + beta * (s1 ** 2 - s2) / (2.0 * n) + h * s1)
    return float(logsumexp(terms)) / n


def test_occupation_vectors_cover_all_compositions(three_atom):
    occ = occupations(three_atom, 6)
    assert len(occ.s1) == occupation_count(6, 3) == 28
    assert float(logsumexp(occ.log_weight)) == pytest.approx(0.0, abs=1e-13)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_exact_pressure_matches_brute_force(n, spin, three_atom):
    for m in (spin, three_atom):
        system = FiniteSystem(n=n, measure=m, point=ModelPoint(x=0.3, t=1.2))
        assert exact_pressure(system) == pytest.approx(_brute_force_pressure(m, n, 1.2, 0.3), abs=1e-13)


def test_exact_pressure_single_spin_has_no_self_interaction(spin):
    system = FiniteSystem(n=1, measure=spin, point=ModelPoint(x=0.0, t=5.0))
    assert exact_pressure(system, h=0.8) == pytest.approx(math.log(math.cosh(0.8)), abs=1e-15)


def test_exact_pressure_needs_discrete_measure(flat):
    with pytest.raises(DomainError):
        exact_pressure(FiniteSystem(n=4, measure=flat, point=ModelPoint(x=0.0, t=1.0)))


def test_enumeration_budget(three_atom):
    with pytest.raises(BudgetExceededError):
        occupations(three_atom, 50, budget=100)


def test_lemma1_margins_nonnegative(spin, three_atom):
    for m in (spin, three_atom):
        for n in (2, 4, 8, 12):
            for p in _grid():
                assert lemma1_check(m, p, n) >= 0.0


@pytest.mark.parametrize("n", [2, 5, 9, 14])
def test_quadrature_matches_enumeration(n, spin, three_atom):
    for m in (spin, three_atom):
        for p in _grid():
            assert phi_n_quadrature(m, p, n) == pytest.approx(action_by_enumeration(m, p, n), abs=1e-9)


def test_quadrature_rejects_zero_time(spin):
    with pytest.raises(DomainError):
        phi_n_quadrature(spin, ModelPoint(x=0.1, t=0.0), 10)
    with pytest.raises(DomainError):
        u_n_quadrature(spin, ModelPoint(x=0.1, t=1.0), 0)


def test_velocity_tends_to_minus_magnetization(spin):
    p = ModelPoint(x=0.3, t=2.0)
    M = hopf_lax(spin, p).magnetization_M
    assert u_n_quadrature(spin, p, 400) == pytest.approx(-M, abs=1e-2)


def test_velocity_vanishes_on_shock_line(spin):
    assert u_n_quadrature(spin, ModelPoint(x=0.0, t=2.0), 50) == pytest.approx(0.0, abs=1e-10)


def test_convergence_study_needs_ascending_sizes(spin):
    p = ModelPoint(x=0.3, t=0.5)
    with pytest.raises(DomainError):
        convergence_study(spin, p, [10, 20, 40])
    with pytest.raises(DomainError):
        convergence_study(spin, p, [10, 40, 20, 80])


@pytest.mark.slow
@pytest.mark.parametrize("t", [0.5, 2.0])
def test_convergence_rates(t, spin):
    report = convergence_study(spin, ModelPoint(x=0.3, t=t), [25, 50, 100, 200, 400])
    assert -1.3 <= report.fitted_slope_phi <= -0.7
    assert max(report.scaled_errors_phi) / min(report.scaled_errors_phi) <= 5.0
    assert max(report.scaled_errors_u) / min(report.scaled_errors_u) <= 5.0
    assert report.errors_u[-1] < report.errors_u[0]
    assert all(margin is not None and margin >= 0.0 for margin in report.lemma1_margins)
