import sys
from uuid import uuid4

import click
from loguru import logger
from pydantic import ValidationError

from mfhj import __version__
from mfhj.commands import bipartite, check, finite_n, shock, single_party
from mfhj.config import LOG_LEVEL, LOG_PATH
from mfhj.exceptions import MfhjError
from mfhj.output import render_json

LOG_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} - {extra[run_id]} - {level} - {message}"


def setup_logging(level: str) -> None:
    logger.remove()
    logger.configure(extra={"run_id": "-"})
    logger.add(sys.stderr, format=LOG_FORMAT, level=level)
    if LOG_PATH:
        logger.add(f"{LOG_PATH}/mfhj.log", format=LOG_FORMAT, level="INFO", enqueue=True)
    logger.enable("mfhj")


class MfhjGroup(click.Group):
    """
    Runs every command inside a run-scoped logging context and turns errors
    into a JSON report plus the documented exit code.
    """

    def invoke(self, ctx: click.Context):
        with logger.contextualize(run_id=uuid4().hex[:12]):
            try:
                return super().invoke(ctx)
            except (click.exceptions.Exit, click.exceptions.Abort, click.ClickException):
                raise
            except MfhjError as error:
                logger.error("{} failed: {}", ctx.invoked_subcommand, error.message)
                click.echo(render_json(error.to_report()), nl=False)
                ctx.exit(error.exit_code)
            except ValidationError as error:
                logger.error("invalid configuration: {}", error)
                report = {
                    "success": False,
                    "error": "ValidationError",
                    "message": f"{error.error_count()} validation error(s)",
                    "detail": [{"loc": list(e["loc"]), "msg": e["msg"]} for e in error.errors()],
                }
                click.echo(render_json(report), nl=False)
                ctx.exit(2)
            except Exception as ex:
                logger.exception("{} failed: {}", ctx.invoked_subcommand, ex)
                click.echo(render_json({"success": False, "error": type(ex).__name__,
                                        "message": str(ex), "detail": {}}), nl=False)
                ctx.exit(3)


@click.group(cls=MfhjGroup)
@click.version_option(__version__, prog_name="mfhj")
@click.option("--log-level", default=LOG_LEVEL, show_default=True,
              type=click.Choice(["TRACE", "DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
def cli(log_level: str):
    """
    Mean-field spin models solved through Hamilton-Jacobi and Burgers equations.
    """
    setup_logging(log_level.upper())


cli.add_command(single_party.solve)
cli.add_command(single_party.sweep)
cli.add_command(single_party.critical)
cli.add_command(shock.shock)
cli.add_command(finite_n.finiten)
cli.add_command(bipartite.bipartite)
cli.add_command(bipartite.bipartite_sweep)
cli.add_command(bipartite.bipartite_finiten)
cli.add_command(check.check)
