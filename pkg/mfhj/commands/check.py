import time

import click

from mfhj.checks import require_passed, run_suite
from mfhj.commands.options import build_config, common_options, finish
from mfhj.output import emit, render_json


@click.command()
@click.option("--quick", is_flag=True, default=False, help="Smaller grids and fewer random draws.")
@common_options
def check(**flags):
    """
    Runs the invariant suite; exits 4 when any invariant fails.
    """
    started = time.perf_counter()
    config = build_config("check", **flags)
    results = run_suite(quick=config.quick, workers=config.workers)
    payload = {
        "success": all(r.passed for r in results),
        "checks": [r.model_dump() for r in results],
    }
    emit(render_json(payload), config.output)
    finish(config, started)
    require_passed(results)
