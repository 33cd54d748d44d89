"""GFN1 grid files.

A GFN1 payload is one JSON header line ``{"n":..,"N":..,"L":..,"kind":..}``
followed by raw little-endian float64 values in row-major order (real and
imaginary parts interleaved for ``kind == "complex"``).  A half-space field
is a ladder header line followed by one GFN1 payload per level.
"""

from __future__ import annotations

import io
import json
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .grid import Grid, GridFunction, TLadder

__all__ = [
    "GFN1Error",
    "dumps",
    "loads",
    "export_field",
    "import_field",
    "export_halfspace",
    "import_halfspace",
]

_LE_F64 = np.dtype("<f8")
_LE_C128 = np.dtype("<c16")


class GFN1Error(ValueError):
    """Malformed or truncated GFN1 data."""


def _header(f: GridFunction) -> bytes:
    g = f.grid
    head = {"n": g.n, "N": g.N, "L": g.L, "kind": "complex" if f.is_complex else "real"}
    return (json.dumps(head, separators=(",", ":")) + "\n").encode("ascii")


def write_payload(f: GridFunction, out: BinaryIO) -> None:
    out.write(_header(f))
    dtype = _LE_C128 if f.is_complex else _LE_F64
    out.write(np.ascontiguousarray(f.values, dtype=dtype).tobytes(order="C"))


def read_payload(stream: BinaryIO) -> GridFunction:
    line = stream.readline()
    if not line:
        raise GFN1Error("missing GFN1 header")
    if not line.endswith(b"\n"):
        raise GFN1Error("GFN1 header is not newline-terminated")
    try:
        head = json.loads(line.decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise GFN1Error(f"malformed GFN1 header: {exc}") from None
    missing = {"n", "N", "L", "kind"} - set(head)
    if missing:
        raise GFN1Error(f"GFN1 header missing keys {sorted(missing)}")
    kind = head["kind"]
    if kind not in ("real", "complex"):
        raise GFN1Error(f"unknown kind {kind!r}")
    try:
        grid = Grid(int(head["n"]), int(head["N"]), float(head["L"]))
    except ValueError as exc:
        raise GFN1Error(f"invalid grid in header: {exc}") from None
    dtype = _LE_C128 if kind == "complex" else _LE_F64
    expected = grid.size * dtype.itemsize
    raw = stream.read(expected)
    if len(raw) != expected:
        raise GFN1Error(
            f"payload length mismatch: header n={grid.n}, N={grid.N} ({kind}) needs "
            f"{grid.size} points = {expected} bytes, got {len(raw)} bytes"
        )
    values = np.frombuffer(raw, dtype=dtype).reshape(grid.shape)
    return GridFunction(grid, values.astype(complex if kind == "complex" else float))


def dumps(f: GridFunction) -> bytes:
    buf = io.BytesIO()
    write_payload(f, buf)
    return buf.getvalue()


def loads(data: bytes) -> GridFunction:
    stream = io.BytesIO(data)
    f = read_payload(stream)
    trailing = stream.read()
    if trailing:
        raise GFN1Error(f"{len(trailing)} trailing bytes after payload")
    return f


def export_field(f: GridFunction, path: str | Path) -> Path:
    path = Path(path)
    path.write_bytes(dumps(f))
    return path


def import_field(path: str | Path) -> GridFunction:
    return loads(Path(path).read_bytes())


def export_halfspace(u, path: str | Path) -> Path:
    """Write a :class:`~hardyx.operators.HalfSpaceField` as ladder line + J payloads."""
    path = Path(path)
    buf = io.BytesIO()
    head = {"ladder": [float(t) for t in u.ladder.levels]}
    buf.write((json.dumps(head, separators=(",", ":")) + "\n").encode("ascii"))
    for level in u.levels():
        write_payload(level, buf)
    path.write_bytes(buf.getvalue())
    return path


def import_halfspace(path: str | Path):
    from .operators import HalfSpaceField

    stream = io.BytesIO(Path(path).read_bytes())
    line = stream.readline()
    try:
        levels = json.loads(line.decode("ascii"))["ladder"]
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise GFN1Error(f"malformed ladder header: {exc}") from None
    slices = [read_payload(stream) for _ in levels]
    if stream.read():
        raise GFN1Error("trailing bytes after last level")
    grid = slices[0].grid
    if any(s.grid != grid for s in slices):
        raise GFN1Error("levels disagree on grid")
    return HalfSpaceField(grid, TLadder(tuple(levels)), np.stack([s.values for s in slices]))
