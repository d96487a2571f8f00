"""Reading and writing the SLT streamline text format."""

from __future__ import annotations

import logging
import os
import tempfile
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from tractparcel.streamlines.models import NO_LABEL, Streamline, StreamlineSet

logger = logging.getLogger(__name__)

SLT_HEADER = "SLT 1"


class StreamlineFormatError(ValueError):
    """Malformed SLT content, reported with its 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def format_float(value: float) -> str:
    """Format with 17 significant digits so that parsing recovers the exact double."""
    return format(float(value), ".17g")


def write_text_atomic(path: str | Path, text: str) -> None:
    """Write ``text`` to a temporary sibling file and rename it into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def format_streamline_set(streamline_set: StreamlineSet) -> str:
    lines = [SLT_HEADER, f"count {len(streamline_set)}"]
    for s in streamline_set.streamlines:
        label = NO_LABEL if s.label is None else s.label
        lines.append(f"streamline {s.id} {label} {s.num_points}")
        lines.extend(" ".join(format_float(c) for c in p) for p in s.points)
    return "\n".join(lines) + "\n"


def write_streamline_file(streamline_set: StreamlineSet, path: str | Path) -> None:
    """Write ``streamline_set`` in SLT format; identical input gives identical bytes."""
    write_text_atomic(path, format_streamline_set(streamline_set))
    logger.debug(f"Wrote {len(streamline_set)} streamlines to {path}")


def _parse_int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise StreamlineFormatError(line, f"invalid {what} {token!r}") from None


def _parse_point(tokens: list[str], line: int) -> tuple[float, float, float]:
    if len(tokens) != 3:
        raise StreamlineFormatError(line, f"expected 3 coordinates, got {len(tokens)}")
    try:
        point = tuple(float(t) for t in tokens)
    except ValueError:
        raise StreamlineFormatError(line, f"invalid coordinate in {' '.join(tokens)!r}") from None
    if not all(np.isfinite(point)):
        raise StreamlineFormatError(line, "non-finite coordinate")
    return point


def parse_streamline_text(text: str, source: str = "") -> StreamlineSet:
    """Parse SLT content. Blank lines are ignored."""
    rows = [(i + 1, ln.split()) for i, ln in enumerate(text.split("\n")) if ln.strip()]
    if not rows or rows[0][1] != SLT_HEADER.split():
        raise StreamlineFormatError(rows[0][0] if rows else 1, f"malformed header, expected {SLT_HEADER!r}")
    if len(rows) < 2 or len(rows[1][1]) != 2 or rows[1][1][0] != "count":
        raise StreamlineFormatError(rows[1][0] if len(rows) > 1 else 2, "malformed header, expected 'count <N>'")
    declared = _parse_int(rows[1][1][1], rows[1][0], "count")

    streamlines: list[Streamline] = []
    seen_ids: set[int] = set()
    pos = 2
    while pos < len(rows):
        line_no, tokens = rows[pos]
        if len(tokens) != 4 or tokens[0] != "streamline":
            raise StreamlineFormatError(line_no, "expected 'streamline <id> <label> <num_points>'")
        sid = _parse_int(tokens[1], line_no, "streamline id")
        num_points = _parse_int(tokens[3], line_no, "point count")
        if sid in seen_ids:
            raise StreamlineFormatError(line_no, f"duplicate streamline id {sid}")
        seen_ids.add(sid)

        body = rows[pos + 1 : pos + 1 + num_points]
        if len(body) < num_points or any(t[0] == "streamline" for _, t in body):
            raise StreamlineFormatError(line_no, f"point count mismatch for streamline {sid}")
        points = [_parse_point(t, n) for n, t in body]
        label = None if tokens[2] == NO_LABEL else tokens[2]
        try:
            streamlines.append(Streamline(id=sid, points=points, label=label))
        except ValidationError as e:
            raise StreamlineFormatError(line_no, f"invalid streamline {sid}: {e.errors()[0]['msg']}") from e
        pos += 1 + num_points

    if len(streamlines) != declared:
        raise StreamlineFormatError(
            rows[1][0], f"streamline count mismatch: declared {declared}, found {len(streamlines)}"
        )
    return StreamlineSet(streamlines=tuple(streamlines), source=source)


def parse_streamline_file(path: str | Path) -> StreamlineSet:
    """Read an SLT file exactly as stored."""
    text = Path(path).read_text(encoding="utf-8")
    streamline_set = parse_streamline_text(text, source=str(path))
    logger.debug(f"Parsed {len(streamline_set)} streamlines from {path}")
    return streamline_set
