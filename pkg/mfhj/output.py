"""
Writers for result files: CSV grids, JSON records, gnuplot tables and the
metadata sidecar that keeps timing out of the data files.
"""
import csv
import hashlib
import io
import json
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import click
from loguru import logger
from pydantic import BaseModel

from mfhj import __version__
from mfhj.schemas import RunConfig

Row = Sequence[Any]


def format_number(value: Any) -> str:
    """17 significant digits for floats, plain text for everything else."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def _json_safe(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return _json_safe(value.model_dump())
    if isinstance(value, float) and not math.isfinite(value):
        return format_number(value)
    if isinstance(value, dict):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    return value


def render_csv(header: Sequence[str], rows: Iterable[Row]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(value) for value in row])
    return buffer.getvalue()


def render_json(payload: Any) -> str:
    return json.dumps(_json_safe(payload), indent=2, sort_keys=False) + "\n"


def render_gnuplot(header: Sequence[str], rows: Iterable[Row]) -> str:
    lines = ["# " + " ".join(header)]
    lines.extend(" ".join(format_number(value) for value in row) for row in rows)
    return "\n".join(lines) + "\n"


def emit(text: str, path: str | None) -> None:
    """Writes ``text`` to ``path``, or to stdout when no path is given."""
    if path is None:
        click.echo(text, nl=False)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    logger.info("wrote {}", target)


def sibling(path: str, suffix: str) -> str:
    """``out.csv`` -> ``out<suffix>``."""
    target = Path(path)
    return str(target.with_name(target.stem + suffix))


def config_hash(config: RunConfig) -> str:
    canonical = config.model_dump_json(exclude={"output", "workers"})
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_meta(config: RunConfig, wall_time: float) -> None:
    """Sidecar ``<output>.meta.json`` with the config hash, version and timing."""
    if config.output is None:
        return
    meta = {
        "command": config.command,
        "config_hash": config_hash(config),
        "version": __version__,
        "wall_time_seconds": wall_time,
        "workers": config.workers,
    }
    emit(render_json(meta), config.output + ".meta.json")
