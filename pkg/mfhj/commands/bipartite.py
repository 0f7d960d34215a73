import time

import click

from mfhj.commands.options import (
    INT_RANGE,
    MEASURE,
    RANGE,
    build_config,
    common_options,
    finish,
    mechanical_field,
    model_options,
    residual_warning,
    tolerance_option,
)
from mfhj.models.bipartite import (
    BipartiteParams,
    bipartite_convergence,
    counting_constant,
    coupled_fixed_point,
    minmax_solve,
)
from mfhj.models.measure import measure_from_config
from mfhj.output import emit, render_csv, render_json
from mfhj.schemas import ResultRecord, RunConfig
from mfhj.workers import map_ordered

SWEEP_COLUMNS = ("beta", "alpha", "m_tilde", "n_tilde", "d", "A", "f", "branch_count")
FINITE_COLUMNS = ("beta", "alpha", "n1", "n2", "exact_pressure", "limit_pressure", "gap", "scaled_gap")


def bipartite_options(fn):
    decorators = [
        click.option("--measure-sigma", type=MEASURE, help="Measure of the first party."),
        click.option("--measure-tau", type=MEASURE, help="Measure of the second party."),
        click.option("--beta", type=RANGE, help="Inverse temperatures."),
        click.option("--alpha", type=RANGE, help="Relative sizes N2 / N1."),
        click.option("--h1", type=float, default=0.0, show_default=True, help="Field on the first party."),
        click.option("--h2", type=float, default=0.0, show_default=True, help="Field on the second party."),
    ]
    for decorator in reversed(decorators):
        fn = decorator(fn)
    return fn


def _grid(config: RunConfig) -> list[BipartiteParams]:
    sigma = measure_from_config(config.measure_sigma, symmetrize=config.symmetrize)
    tau = measure_from_config(config.measure_tau, symmetrize=config.symmetrize)
    return [BipartiteParams(beta=beta, alpha=alpha,
                            h1=mechanical_field(config, config.h1, beta),
                            h2=mechanical_field(config, config.h2, beta),
                            measure_sigma=sigma, measure_tau=tau)
            for beta in config.beta for alpha in config.alpha]


def _offset(config: RunConfig, p: BipartiteParams) -> float:
    return counting_constant(p) if config.counting else 0.0


@click.command()
@bipartite_options
@click.option("--minmax", is_flag=True, default=False,
              help="Solve by the nested minmax search and report the cross-order gap.")
@model_options
@tolerance_option
@common_options
def bipartite(minmax: bool, **flags):
    """
    Thermodynamic-limit solution of the two-party model as JSON.
    """
    started = time.perf_counter()
    config = build_config("bipartite", **flags)
    solver = minmax_solve if minmax else coupled_fixed_point
    grid = _grid(config)
    solutions = map_ordered(solver, grid, workers=config.workers)
    records = []
    for p, s in zip(grid, solutions):
        residual_warning(config, max(s.residuals), beta=p.beta, alpha=p.alpha)
        offset = _offset(config, p)
        values = s.model_dump()
        values["pressure_A"] = s.pressure_A + offset
        values["free_energy_f"] = s.free_energy_f - offset / p.beta
        values["residuals"] = list(s.residuals)
        values["counting"] = config.counting
        records.append(ResultRecord(command="bipartite", values=values))
    emit(render_json(records[0] if len(records) == 1 else records), config.output)
    finish(config, started)


@click.command("bipartite-sweep")
@bipartite_options
@model_options
@tolerance_option
@common_options
def bipartite_sweep(**flags):
    """
    (beta, alpha) grid of coupled fixed points as CSV.
    """
    started = time.perf_counter()
    config = build_config("bipartite-sweep", **flags)
    grid = _grid(config)
    solutions = map_ordered(coupled_fixed_point, grid, workers=config.workers)
    rows = []
    for p, s in zip(grid, solutions):
        residual_warning(config, max(s.residuals), beta=p.beta, alpha=p.alpha)
        offset = _offset(config, p)
        rows.append((s.beta, s.alpha, s.m_tilde, s.n_tilde, s.d,
                     s.pressure_A + offset, s.free_energy_f - offset / p.beta, s.branch_count))
    emit(render_csv(SWEEP_COLUMNS, rows), config.output)
    finish(config, started)


@click.command("bipartite-finiten")
@bipartite_options
@click.option("--n1", type=INT_RANGE, help="First-party sizes, e.g. 4:14.")
@model_options
@common_options
def bipartite_finiten(**flags):
    """
    Exact finite-size pressures against the limit, with N2 = round(alpha N1).
    """
    started = time.perf_counter()
    config = build_config("bipartite-finiten", **flags)
    rows = []
    for p in _grid(config):
        offset = _offset(config, p)
        for row in bipartite_convergence(p, config.n1, workers=config.workers):
            rows.append((p.beta, p.alpha, row.n1, row.n2, row.exact_pressure + offset,
                         row.limit_pressure + offset, row.gap, row.scaled_gap))
    emit(render_csv(FINITE_COLUMNS, rows), config.output)
    finish(config, started)
