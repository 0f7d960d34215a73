import time

import click
from loguru import logger

from mfhj.commands.options import MEASURE, RANGE, build_config, common_options, finish, parse_range
from mfhj.models.measure import measure_from_config
from mfhj.models.shock import characteristics, detect_shock
from mfhj.output import emit, render_csv, render_gnuplot, sibling

SHOCK_COLUMNS = ("t", "m_plus", "m_minus", "rh_residual", "jump", "shock")
CHARACTERISTIC_COLUMNS = ("x0", "slope", "crossing_time")


@click.command()
@click.option("--measure", type=MEASURE, help="dichotomic, uniform, inline JSON or a JSON file.")
@click.option("--t", type=RANGE, help="Times, e.g. 0.5:4:0.05.")
@click.option("--x0", "x0_grid", default="-2:2:0.05", show_default=True,
              help="Characteristic foot points.")
@click.option("--characteristics", "characteristics_path", default=None,
              help="Gnuplot table of characteristics; next to --output by default.")
@click.option("--symmetrize", is_flag=True, default=False,
              help="Average asymmetric measures with their mirror image.")
@common_options
def shock(x0_grid: str, characteristics_path: str | None, **flags):
    """
    One-sided limits at x = 0 for every time as CSV, plus a characteristics
    table. Rows at or below t_c carry shock=false and their (vanishing) jump.
    """
    started = time.perf_counter()
    config = build_config("shock", **flags)
    m = measure_from_config(config.measure, symmetrize=config.symmetrize)
    try:
        feet = parse_range(x0_grid)
    except ValueError as error:
        raise click.BadParameter(str(error), param_hint="--x0")

    report = detect_shock(m, config.t, workers=config.workers)
    if report.entropy_violations:
        logger.warning("{} entropy-condition violations along the x grid", report.entropy_violations)
    by_time = {}
    for t, plus, minus in zip(report.subcritical_times, report.subcritical_m_plus,
                              report.subcritical_m_minus):
        by_time[t] = (t, plus, minus, abs(plus + minus), plus - minus, False)
    for t, plus, minus, residual in zip(report.times, report.m_plus, report.m_minus,
                                        report.rh_residuals):
        by_time[t] = (t, plus, minus, residual, plus - minus, True)
    rows = [by_time[float(t)] for t in config.t]
    emit(render_csv(SHOCK_COLUMNS, rows), config.output)

    if characteristics_path is None and config.output is not None:
        characteristics_path = sibling(config.output, ".characteristics.dat")
    if characteristics_path is not None:
        lines = [(c.x0, c.slope, c.crossing_time) for c in characteristics(m, feet)]
        emit(render_gnuplot(CHARACTERISTIC_COLUMNS, lines), characteristics_path)
    finish(config, started)
