import math
import time

import click

from mfhj.commands.options import (
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
from mfhj.models.measure import SpinMeasure, counting_offset, measure_from_config
from mfhj.models.single_party import bifurcation_time, critical_report, hopf_lax, sweep as sweep_grid
from mfhj.output import emit, render_csv, render_json
from mfhj.schemas import ModelPoint, ResultRecord, RunConfig, SinglePartySolution

SWEEP_COLUMNS = ("beta", "h", "M", "A", "f", "branch_count", "residual")


def _measure(config: RunConfig) -> SpinMeasure:
    return measure_from_config(config.measure, symmetrize=config.symmetrize)


def _record(config: RunConfig, m: SpinMeasure, h: float, s: SinglePartySolution) -> ResultRecord:
    offset = counting_offset(m) if config.counting else 0.0
    residual_warning(config, s.residual, beta=s.t, h=h)
    return ResultRecord(command="solve", values={
        "beta": s.t,
        "h": h,
        "x": s.x,
        "M": s.magnetization_M,
        "A": s.pressure_A + offset,
        "f": s.free_energy_f - offset / s.t,
        "phi": s.action_phi,
        "minimizer_y": s.minimizer_y,
        "branch_count": s.branch_count,
        "branches": s.branches,
        "residual": s.residual,
        "counting": config.counting,
    })


@click.command()
@click.option("--measure", type=MEASURE, help="dichotomic, uniform, inline JSON or a JSON file.")
@click.option("--beta", type=RANGE, help="Inverse temperatures.")
@click.option("--h", type=RANGE, help="External fields.")
@model_options
@tolerance_option
@common_options
def solve(**flags):
    """
    Thermodynamic-limit solution at each (beta, h) as JSON.
    """
    started = time.perf_counter()
    config = build_config("solve", **flags)
    m = _measure(config)
    records = []
    for beta in config.beta:
        for h in config.h:
            x = mechanical_field(config, h, beta)
            records.append(_record(config, m, h, hopf_lax(m, ModelPoint(x=x, t=beta))))
    emit(render_json(records[0] if len(records) == 1 else records), config.output)
    finish(config, started)


@click.command()
@click.option("--measure", type=MEASURE, help="dichotomic, uniform, inline JSON or a JSON file.")
@click.option("--beta", type=RANGE, help="Inverse temperatures, e.g. 0.1:3:0.01.")
@click.option("--h", type=RANGE, help="External fields, e.g. -1:1:0.01.")
@model_options
@tolerance_option
@common_options
def sweep(**flags):
    """
    (beta, h) grid as CSV, rows ordered by beta then h.
    """
    started = time.perf_counter()
    config = build_config("sweep", **flags)
    m = _measure(config)
    offset = counting_offset(m) if config.counting else 0.0
    rows = []
    for beta in config.beta:
        hs = [mechanical_field(config, h, beta) for h in config.h]
        grid = sweep_grid(m, [beta], hs, workers=config.workers)
        for h, row in zip(config.h, grid.rows):
            residual_warning(config, row.residual, beta=beta, h=h)
            rows.append((row.beta, h, row.M, row.A + offset, row.f - offset / row.beta,
                          row.branch_count, row.residual))
    emit(render_csv(SWEEP_COLUMNS, rows), config.output)
    finish(config, started)


@click.command()
@click.option("--measure", type=MEASURE, help="dichotomic, uniform, inline JSON or a JSON file.")
@click.option("--symmetrize", is_flag=True, default=False,
              help="Average asymmetric measures with their mirror image.")
@common_options
def critical(**flags):
    """
    Critical time of the measure, confirmed by a bifurcation scan.
    """
    started = time.perf_counter()
    config = build_config("critical", **flags)
    m = _measure(config)
    report = critical_report(m)
    values = report.model_dump()
    values["bifurcation_t"] = bifurcation_time(m)
    # No transition: t_c and friends are infinite and reported as null.
    values = {key: None if isinstance(value, float) and math.isinf(value) else value
              for key, value in values.items()}
    values["measure"] = m.label
    emit(render_json(ResultRecord(command="critical", values=values)), config.output)
    finish(config, started)
