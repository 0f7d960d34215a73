import time

import click
from loguru import logger

from mfhj.commands.options import (
    INT_RANGE,
    MEASURE,
    RANGE,
    build_config,
    common_options,
    finish,
    mechanical_field,
    model_options,
)
from mfhj.exceptions import DomainError
from mfhj.models.finite_n import convergence_study
from mfhj.models.measure import measure_from_config
from mfhj.output import emit, render_csv, render_json, sibling
from mfhj.schemas import ModelPoint

CONVERGENCE_COLUMNS = ("n", "phi_n", "u_n", "err_phi", "err_u", "lemma1_margin")


@click.command()
@click.option("--measure", type=MEASURE, help="dichotomic, uniform, inline JSON or a JSON file.")
@click.option("--x", type=float, default=None, help="Field coordinate.")
@click.option("--t", type=RANGE, help="Time coordinate (a single value).")
@click.option("--n", type=INT_RANGE, help="At least four ascending sizes, e.g. 25,50,100,200.")
@click.option("--summary", "summary_path", default=None,
              help="JSON slope summary; next to --output by default.")
@model_options
@common_options
def finiten(summary_path: str | None, **flags):
    """
    Finite-size Cole-Hopf solutions against the Hopf-Lax limit as CSV.
    """
    started = time.perf_counter()
    config = build_config("finiten", **flags)
    if len(config.t) != 1:
        raise DomainError("finiten takes a single --t value", t=config.t)
    t = config.t[0]
    if not t > 0:
        raise DomainError("finiten needs t > 0", t=t)
    m = measure_from_config(config.measure, symmetrize=config.symmetrize)
    point = ModelPoint(x=mechanical_field(config, config.x, t), t=t)

    report = convergence_study(m, point, config.n, workers=config.workers)
    rows = zip(report.n_values, report.phi_values, report.u_values,
               report.errors_phi, report.errors_u, report.lemma1_margins)
    emit(render_csv(CONVERGENCE_COLUMNS, rows), config.output)

    summary = {
        "x": report.x,
        "t": report.t,
        "phi_limit": report.phi_limit,
        "magnetization_limit": report.magnetization_limit,
        "fitted_slope_phi": report.fitted_slope_phi,
        "fitted_slope_u": report.fitted_slope_u,
        "scaled_errors_phi": report.scaled_errors_phi,
        "scaled_errors_u": report.scaled_errors_u,
    }
    if summary_path is None and config.output is not None:
        summary_path = sibling(config.output, ".summary.json")
    if summary_path is None:
        logger.info("slopes: phi {} u {}", report.fitted_slope_phi, report.fitted_slope_u)
    else:
        emit(render_json(summary), summary_path)
    finish(config, started)
