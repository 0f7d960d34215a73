import math

import numpy as np
import pytest

from mfhj.exceptions import DomainError
from mfhj.models.measure import custom_atoms
from mfhj.models.single_party import (
    bifurcation_time,
    boundary_action,
    critical_report,
    critical_time,
    free_energy,
    hopf_lax,
    self_consistent_M,
    sweep,
)
from mfhj.schemas import ModelPoint

# Positive root of M = tanh(2M).
TANH_ROOT_T2 = 0.9575040240772687


def test_tanh_reduction_on_grid(spin):
    worst = 0.0
    for x in np.linspace(-2.0, 2.0, 50):
        for t in np.linspace(0.05, 3.0, 50):
            M = self_consistent_M(spin, ModelPoint(x=x, t=t))
            worst = max(worst, abs(M - math.tanh(x + t * M)))
    assert worst <= 1e-12


def test_self_consistent_seed_selects_branch(spin):
    up = self_consistent_M(spin, ModelPoint(x=0.0, t=2.0), seed=1.0)
    down = self_consistent_M(spin, ModelPoint(x=0.0, t=2.0), seed=-1.0)
    assert up == pytest.approx(TANH_ROOT_T2, abs=1e-12)
    assert down == pytest.approx(-TANH_ROOT_T2, abs=1e-12)


@pytest.mark.parametrize("t", [1.5, 2.0, 2.5, 3.0])
def test_self_consistent_root_is_polished(t, spin):
    M = self_consistent_M(spin, ModelPoint(x=0.0, t=t), seed=1.0)
    assert abs(M - math.tanh(t * M)) <= 1e-14
    assert M == pytest.approx(hopf_lax(spin, ModelPoint(x=0.0, t=t)).magnetization_M, abs=1e-13)


def test_self_consistent_rejects_seed_outside_support(spin):
    with pytest.raises(DomainError):
        self_consistent_M(spin, ModelPoint(x=0.0, t=1.0), seed=1.5)


def test_self_consistent_at_zero_time(spin):
    assert self_consistent_M(spin, ModelPoint(x=0.4, t=0.0)) == pytest.approx(math.tanh(0.4))


def test_hopf_lax_satisfies_fixed_point(builtin):
    for x in (-1.3, -0.2, 0.05, 0.9):
        for t in (0.3, 1.0, 2.5, 6.0):
            s = hopf_lax(builtin, ModelPoint(x=x, t=t))
            assert s.residual <= 1e-12
            assert abs(s.magnetization_M) <= builtin.support_half_width
            assert s.minimizer_y == pytest.approx(x + t * s.magnetization_M)
            assert s.pressure_A == -s.action_phi


def test_hopf_lax_is_a_minimum(builtin):
    rng = np.random.default_rng(7)
    x, t = 0.3, 1.7
    s = hopf_lax(builtin, ModelPoint(x=x, t=t))
    ys = rng.uniform(-5.0, 5.0, 200)
    objective = (x - ys) ** 2 / (2.0 * t) - builtin.log_mgf(ys)
    assert np.all(objective >= s.action_phi - 1e-12)


def test_hopf_lax_picks_field_aligned_branch(spin):
    s = hopf_lax(spin, ModelPoint(x=-0.1, t=2.0))
    assert s.magnetization_M < -0.9
    assert s.branch_count == 1


def test_shock_line_has_two_branches(spin):
    s = hopf_lax(spin, ModelPoint(x=0.0, t=2.0))
    assert s.branch_count == 2
    assert s.magnetization_M == pytest.approx(TANH_ROOT_T2, abs=1e-10)
    assert s.branches[1] == pytest.approx(-TANH_ROOT_T2, abs=1e-10)


def test_paramagnetic_below_critical_time(builtin):
    s = hopf_lax(builtin, ModelPoint(x=0.0, t=0.5))
    assert abs(s.magnetization_M) <= 1e-10
    assert s.branch_count == 1


def test_hopf_lax_needs_positive_time(spin):
    with pytest.raises(DomainError):
        hopf_lax(spin, ModelPoint(x=0.0, t=0.0))
    assert boundary_action(spin, 0.5) == pytest.approx(-math.log(math.cosh(0.5)))


def test_free_energy_is_action_over_beta(spin):
    beta, h = 1.4, 0.2
    s = hopf_lax(spin, ModelPoint(x=h, t=beta))
    M = s.magnetization_M
    expected = 0.5 * M * M - math.log(math.cosh(h + beta * M)) / beta
    assert free_energy(spin, beta, h) == pytest.approx(expected, abs=1e-14)
    with pytest.raises(DomainError):
        free_energy(spin, 0.0, h)


def test_degenerate_measure_is_inert():
    point = custom_atoms([(0.0, 1.0)])
    s = hopf_lax(point, ModelPoint(x=0.7, t=3.0))
    assert s.magnetization_M == 0.0
    assert s.action_phi == 0.0
    assert critical_time(point) == math.inf
    assert bifurcation_time(point) == math.inf


@pytest.mark.parametrize(("name", "expected", "tol"), [
    ("dichotomic", 1.0, 1e-6),
    ("uniform", 3.0, 1e-4),
    ("three_atom", 1.5, 1e-4),
])
def test_critical_time_confirmed_by_bifurcation(name, expected, tol, spin, flat, three_atom):
    m = {"dichotomic": spin, "uniform": flat, "three_atom": three_atom}[name]
    assert critical_time(m) == pytest.approx(expected, abs=tol)
    assert bifurcation_time(m) == pytest.approx(expected, abs=tol)


def test_critical_report_for_concave_velocity(three_atom):
    report = critical_report(three_atom)
    assert report.concave_velocity
    assert report.t_c == pytest.approx(report.inverse_variance, rel=1e-12)
    assert report.sup_ratio == pytest.approx(1.0 / report.t_c)
    assert report.support_bound == 4.0
    assert report.t_c <= report.support_bound


def test_critical_report_flags_first_order_candidate():
    # Heavy central atom: the velocity is convex near zero.
    m = custom_atoms([(-1.0, 0.05), (0.0, 0.9), (1.0, 0.05)])
    report = critical_report(m)
    assert not report.concave_velocity
    assert report.t_c < report.inverse_variance
    x0 = np.linspace(1e-3, 20.0, 4001)
    assert report.t_c <= float(np.min(x0 / m.tilted_mean(x0))) + 1e-9


def test_sweep_grid_order_and_workers(spin):
    betas, hs = [0.5, 1.5], [-0.2, 0.0, 0.2]
    serial = sweep(spin, betas, hs)
    parallel = sweep(spin, betas, hs, workers=3)
    assert serial == parallel
    assert [(r.beta, r.h) for r in serial.rows] == [(b, h) for b in betas for h in hs]
    assert serial.rows[4].branch_count == 2


@pytest.mark.parametrize("x", [-1.2, -0.4, 0.3, 0.9])
@pytest.mark.parametrize("t", [0.4, 1.3, 2.5])
def test_action_slope_is_minus_magnetization(x, t, builtin):
    step = 1e-5
    left = hopf_lax(builtin, ModelPoint(x=x - step, t=t)).action_phi
    right = hopf_lax(builtin, ModelPoint(x=x + step, t=t)).action_phi
    M = hopf_lax(builtin, ModelPoint(x=x, t=t)).magnetization_M
    assert (right - left) / (2.0 * step) == pytest.approx(-M, rel=1e-5, abs=1e-8)


def test_solution_is_odd_in_the_field(builtin):
    for x in (0.05, 0.3, 1.1):
        for t in (0.5, 2.0, 4.0):
            up = hopf_lax(builtin, ModelPoint(x=x, t=t))
            down = hopf_lax(builtin, ModelPoint(x=-x, t=t))
            assert down.magnetization_M == pytest.approx(-up.magnetization_M, abs=1e-11)
            assert down.action_phi == pytest.approx(up.action_phi, abs=1e-11)


def test_seeded_fixed_point_agrees_with_hopf_lax(spin, flat, three_atom):
    rng = np.random.default_rng(5)
    measures = [spin, flat, three_atom]
    for _ in range(200):
        m = measures[int(rng.integers(3))]
        p = ModelPoint(x=float(rng.uniform(-2.0, 2.0)), t=float(rng.uniform(0.05, 4.0)))
        expected = hopf_lax(m, p).magnetization_M
        seed = math.copysign(m.support_half_width, expected)
        assert self_consistent_M(m, p, seed=seed) == pytest.approx(expected, abs=1e-9)


def test_strong_field_saturates(builtin):
    a = builtin.support_half_width
    x = 5.0 * builtin.support_width
    s = hopf_lax(builtin, ModelPoint(x=x, t=1.0))
    M = s.magnetization_M
    assert abs(M - builtin.tilted_mean(x + M)) <= 1e-6
    assert 0.8 * a <= M <= a
