"""JSON and CSV writers for command results."""

from __future__ import annotations

import csv
import json
import logging
import math
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import IO, TYPE_CHECKING, Any

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Sequence

_LOGGER = logging.getLogger(__name__)


def _jsonable(value: Any) -> Any:
    match value:
        case float() if not math.isfinite(value):
            return "inf" if value > 0 else "-inf" if value < 0 else "nan"
        case complex():
            return {"re": _jsonable(value.real), "im": _jsonable(value.imag)}
        case dict():
            return {key: _jsonable(item) for key, item in value.items()}
        case list() | tuple():
            return [_jsonable(item) for item in value]
    return value


def write_json(document: dict[str, Any], stream: IO[str] | None = None) -> None:
    """Write a document as indented JSON; infinities become strings."""
    stream = sys.stdout if stream is None else stream
    json.dump(_jsonable(document), stream, indent=2, allow_nan=False)
    stream.write("\n")


def format_cell(value: Any) -> str:
    """Render a CSV cell: floats by repr, None as an empty field."""
    match value:
        case None:
            return ""
        case float():
            return repr(float(value))
    return str(value)


@contextmanager
def open_output(path: str | Path | None) -> Iterator[IO[str]]:
    """Open path for writing, or yield stdout for None or "-"."""
    if path is None or str(path) == "-":
        yield sys.stdout
        return
    with Path(path).open("w", encoding="utf-8", newline="") as stream:
        yield stream
    _LOGGER.info("Wrote %s", path)


def write_csv(
    header: Sequence[str], rows: Iterable[Sequence[Any]], stream: IO[str]
) -> int:
    """Write a header and rows with "\\n" line ends; return the row count."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow([format_cell(value) for value in row])
        count += 1
    return count
