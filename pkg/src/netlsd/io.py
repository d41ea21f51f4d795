"""Text formats: graph manifests, signature files and evaluation reports."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, List, Optional, TextIO

import numpy as np

from .errors import ParseError
from .signature import Signature, TimeGrid, make_time_grid

MAGIC = "#netlsd v1"


@dataclass(frozen=True)
class ManifestEntry:
    graph_id: str
    path: str
    label: Optional[str] = None


def read_manifest(path) -> List[ManifestEntry]:
    """Read ``<graph-id> <path> [label]`` lines; relative paths resolve against the manifest."""
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    seen = set()
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) not in (2, 3):
                raise ParseError("expected '<graph-id> <path> [label]'", lineno)
            gid = tokens[0]
            if gid in seen:
                raise ParseError(f"duplicate graph id {gid!r}", lineno)
            seen.add(gid)
            p = tokens[1] if os.path.isabs(tokens[1]) else os.path.join(base, tokens[1])
            entries.append(ManifestEntry(gid, p, tokens[2] if len(tokens) == 3 else None))
    return entries


def format_number(x: float) -> str:
    """Shortest of ``%g`` and ``repr`` that reads back to the same double."""
    s = f"{x:g}"
    return s if float(s) == x else repr(float(x))


def grid_token(grid: TimeGrid) -> str:
    return f"{grid.count},{format_number(grid.t_min)},{format_number(grid.t_max)},{grid.spacing}"


def parse_grid(token: str) -> TimeGrid:
    parts = token.split(",")
    if len(parts) != 4:
        raise ValueError(f"grid must be 'count,min,max,log|lin', got {token!r}")
    try:
        count, lo, hi = int(parts[0]), float(parts[1]), float(parts[2])
    except ValueError:
        raise ValueError(f"bad numbers in grid {token!r}") from None
    return make_time_grid(count, lo, hi, parts[3])


def signature_header(kernel: str, normalization: str, grid: TimeGrid) -> str:
    return f"{MAGIC} kernel={kernel} norm={normalization} grid={grid_token(grid)}"


def write_signatures(out: TextIO, items: Iterable, kernel: str, normalization: str, grid: TimeGrid,
                     provenance: Optional[dict] = None) -> None:
    """Write ``(graph_id, Signature)`` pairs; values use 17 significant digits."""
    out.write(signature_header(kernel, normalization, grid) + "\n")
    if provenance:
        out.write("#config " + " ".join(f"{k}={v}" for k, v in provenance.items()) + "\n")
    for gid, sig in items:
        if sig.meta != (kernel, normalization, grid.key):
            raise ValueError(f"signature {gid!r} does not match the file header")
        out.write(gid + "," + ",".join(f"{v:.17g}" for v in sig.values) + "\n")


def read_signatures(stream: Iterable[str]):
    """Return ``(kernel, normalization, grid, [(graph_id, Signature), ...])``."""
    it = iter(stream)
    header = next(it, "").strip()
    if not header.startswith(MAGIC):
        raise ParseError("missing '#netlsd v1' header", 1)
    fields = dict(tok.split("=", 1) for tok in header[len(MAGIC):].split() if "=" in tok)
    try:
        kernel, norm, grid = fields["kernel"], fields["norm"], parse_grid(fields["grid"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad header: {exc}", 1) from None
    items = []
    for lineno, raw in enumerate(it, start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != grid.count + 1:
            raise ParseError(f"expected {grid.count} values, got {len(parts) - 1}", lineno)
        try:
            values = np.array([float(v) for v in parts[1:]])
        except ValueError:
            raise ParseError("non-numeric signature value", lineno) from None
        values.setflags(write=False)
        items.append((parts[0], Signature(kernel, norm, grid, values)))
    return kernel, norm, grid, items


def load_signature_file(path):
    with open(path) as fh:
        return read_signatures(fh)


def write_report(out: TextIO, report, per_trial: bool = False) -> None:
    out.write("metric,value,trials,seed\n")
    out.write(f"{report.metric},{report.value:.17g},{report.trials},{report.seed}\n")
    if per_trial:
        for i, v in enumerate(report.per_trial):
            out.write(f"trial,{i},{v:.17g}\n")
