"""Emit a trace as a straight-line component in a small process dialect.

Every fix becomes one state that broadcasts a ``move`` carrying
``<latitude, longitude, hour, minute, second>``, updates the store, and
continues with the next state. States are grouped into processes of at most
``chunk_size`` states; the last state of a process continues with the first
state of the next one, and the very last state continues with ``nil``.
Splitting keeps each generated unit bounded however long the trace is.

The grammar is documented in ``docs/component_format.md``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterator

from .trace import Observation, Trace

HEADER_LINES = 4
STORE = "  store { real latitude; real longitude; int hour; int minute; int second; }"


def chunk_sizes(n: int, chunk_size: int) -> list[int]:
    if chunk_size < 1:
        raise ValueError("chunk_size must be at least 1")
    full, rest = divmod(n, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _action(o: Observation) -> str:
    lat, lon = o.latitude_str, o.longitude_str
    h, m, s = f"{o.hour:02d}", f"{o.minute:02d}", f"{o.second:02d}"
    return (
        f"move*[true]<{lat}, {lon}, {h}, {m}, {s}>"
        f"{{latitude := {lat}, longitude := {lon}, "
        f"hour := {o.hour}, minute := {o.minute}, second := {o.second}}}"
    )


def iter_component(t: Trace, chunk_size: int = 1000) -> Iterator[str]:
    """Lines of the emitted component, without trailing newlines."""
    sizes = chunk_sizes(len(t), chunk_size)
    yield f"// straight-line component: {len(t)} move actions in {len(sizes)} process(es)"
    yield f"component Bus(vehicle {json.dumps(t.vehicle_id)}) {{"
    yield STORE
    yield "  behaviour {"
    i = 0
    for k, size in enumerate(sizes):
        yield f"    process P{k} {{"
        for j in range(size):
            if i + 1 == len(t):
                nxt = "nil"
            elif j + 1 == size:
                nxt = f"P{k + 1}.S{i + 1}"
            else:
                nxt = f"S{i + 1}"
            yield f"      S{i} = {_action(t.observations[i])}.{nxt};"
            i += 1
        yield "    }"
    yield "  }"
    yield "  init { P0.S0 }"
    yield "}"


def emit_component(t: Trace, chunk_size: int = 1000) -> str:
    return "\n".join(iter_component(t, chunk_size)) + "\n"


def estimate_emitted_size(t: Trace, chunk_size: int = 1000) -> int:
    """Line count of :func:`emit_component` output, computed without emitting."""
    if chunk_size < 1:
        raise ValueError("chunk_size must be at least 1")
    chunks = math.ceil(len(t) / chunk_size)
    # header, one open/close pair per process, one line per state, 3 closing lines
    return HEADER_LINES + 2 * chunks + len(t) + 3


def write_component(t: Trace, path: str | Path, chunk_size: int = 1000) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in iter_component(t, chunk_size):
            fh.write(line + "\n")
