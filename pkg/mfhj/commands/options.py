"""
Shared click parameters and assembly of the validated RunConfig.
"""
import json
import math
import time
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
from click.core import ParameterSource
from loguru import logger

from mfhj.config import WORKERS
from mfhj.output import write_meta
from mfhj.schemas import RunConfig

RANGE_TOL = 1e-12
NAMED_MEASURES = {"dichotomic", "uniform"}


def parse_range(text: str, *, integer: bool = False) -> list[float] | list[int]:
    """
    ``start:stop[:step]`` grids (start included, stop included when hit within
    1e-12), comma lists, or a single value. Commas and ranges combine.
    """
    values: list[float] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise ValueError(f"empty item in {text!r}")
        pieces = part.split(":")
        if len(pieces) == 1:
            values.append(float(pieces[0]))
            continue
        if len(pieces) > 3:
            raise ValueError(f"malformed range {part!r}")
        start, stop = float(pieces[0]), float(pieces[1])
        step = float(pieces[2]) if len(pieces) == 3 else 1.0
        if not all(math.isfinite(v) for v in (start, stop, step)):
            raise ValueError(f"range {part!r} is not finite")
        if step <= 0:
            raise ValueError(f"range step must be positive in {part!r}")
        if stop < start:
            raise ValueError(f"range {part!r} is empty")
        tol = RANGE_TOL * max(1.0, abs(stop))
        count = math.floor((stop - start + tol) / step) + 1
        values.extend(round(start + i * step, 12) for i in range(count))
    if any(not math.isfinite(v) for v in values):
        raise ValueError(f"{text!r} contains non-finite values")
    if not integer:
        return values
    if any(v != int(v) for v in values):
        raise ValueError(f"{text!r} must contain integers only")
    return [int(v) for v in values]


class RangeType(click.ParamType):
    name = "range"

    def __init__(self, integer: bool = False):
        self.integer = integer

    def convert(self, value: Any, param, ctx):
        if isinstance(value, list):
            return value
        try:
            return parse_range(str(value), integer=self.integer)
        except ValueError as error:
            self.fail(str(error), param, ctx)


def load_measure(value: Any) -> dict:
    """A built-in name, inline JSON or a path to a JSON measure block."""
    if isinstance(value, dict):
        return value
    text = str(value).strip()
    if text in NAMED_MEASURES:
        return {"type": text}
    if text.startswith("{"):
        return json.loads(text)
    return json.loads(Path(text).read_text(encoding="utf-8"))


class MeasureType(click.ParamType):
    name = "measure"

    def convert(self, value: Any, param, ctx):
        try:
            return load_measure(value)
        except (OSError, json.JSONDecodeError) as error:
            self.fail(f"cannot read measure {value!r}: {error}", param, ctx)


RANGE = RangeType()
INT_RANGE = RangeType(integer=True)
MEASURE = MeasureType()

_RANGE_FIELDS = {"beta": RANGE, "h": RANGE, "t": RANGE, "alpha": RANGE, "n": INT_RANGE, "n1": INT_RANGE}
_MEASURE_FIELDS = ("measure", "measure_sigma", "measure_tau")


def common_options(fn: Callable) -> Callable:
    """Flags every command accepts."""
    decorators = [
        click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
                     help="JSON run config; flags override its keys."),
        click.option("--output", "-o", default=None, help="Output file; stdout when omitted."),
        click.option("--workers", type=int, default=WORKERS, envvar="MFHJ_WORKERS",
                     show_default=True, help="Worker threads for grids."),
    ]
    for decorator in reversed(decorators):
        fn = decorator(fn)
    return fn


def tolerance_option(fn: Callable) -> Callable:
    """--tolerance, for commands whose solutions carry fixed-point residuals."""
    return click.option("--tolerance", type=float, default=1e-12, show_default=True,
                        help="Residual above which a solution is reported with a warning.")(fn)


def model_options(fn: Callable) -> Callable:
    """Convention flags for commands that report pressures."""
    decorators = [
        click.option("--counting", is_flag=True, default=False,
                     help="Report pressures with the log K atom-counting constant."),
        click.option("--field-units", type=click.Choice(["mechanical", "thermodynamic"]),
                     default="mechanical", show_default=True,
                     help="thermodynamic multiplies every field by beta."),
        click.option("--symmetrize", is_flag=True, default=False,
                     help="Average asymmetric measures with their mirror image."),
    ]
    for decorator in reversed(decorators):
        fn = decorator(fn)
    return fn


def _normalize_file_values(raw: dict) -> dict:
    values = dict(raw)
    for key, param_type in _RANGE_FIELDS.items():
        if isinstance(values.get(key), (str, int, float)):
            values[key] = parse_range(str(values[key]), integer=param_type.integer)
    for key in _MEASURE_FIELDS:
        if key in values and values[key] is not None:
            values[key] = load_measure(values[key])
    return values


def build_config(command: str, **flags: Any) -> RunConfig:
    """
    Merges the ``--config`` file under the command-line flags. A flag that was
    actually given wins over the file and the override is logged.
    """
    ctx = click.get_current_context()
    config_file = flags.pop("config_file", None)
    merged: dict[str, Any] = {}
    if config_file:
        try:
            raw = json.loads(Path(config_file).read_text(encoding="utf-8"))
        except json.JSONDecodeError as error:
            raise click.BadParameter(f"config file is not JSON: {error}", param_hint="--config")
        if not isinstance(raw, dict):
            raise click.BadParameter("config file must hold a JSON object", param_hint="--config")
        raw.pop("command", None)
        try:
            merged = _normalize_file_values(raw)
        except (ValueError, OSError) as error:
            raise click.BadParameter(str(error), param_hint="--config")

    for name, value in flags.items():
        source = ctx.get_parameter_source(name)
        given = source not in (None, ParameterSource.DEFAULT, ParameterSource.DEFAULT_MAP)
        if name in merged:
            if not given:
                continue
            if merged[name] != value:
                logger.warning("flag --{} overrides config file value {!r} with {!r}",
                               name.replace("_", "-"), merged[name], value)
        if value is None:
            continue
        merged[name] = value
    merged["command"] = command
    return RunConfig.model_validate(merged)


def mechanical_field(config: RunConfig, field: float, beta: float) -> float:
    return beta * field if config.field_units == "thermodynamic" else field


def residual_warning(config: RunConfig, residual: float, **where: float) -> bool:
    """Logs a warning when a fixed-point residual exceeds --tolerance."""
    if residual <= config.tolerance:
        return False
    logger.warning("residual {} above tolerance {} at {}", residual, config.tolerance,
                   " ".join(f"{key}={value}" for key, value in where.items()))
    return True


def finish(config: RunConfig, started: float) -> None:
    """Writes the metadata sidecar once the outputs are on disk."""
    write_meta(config, time.perf_counter() - started)
