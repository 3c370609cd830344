"""Running probes over traces: verdicts, measures and fleet reports."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from itertools import accumulate
from typing import Iterable, Literal, Sequence

import numpy as np

from . import kernels
from .geometry import RegionSet
from .guards import truth_set
from .probe import ProbeCursor, ProbeDef, TransitionTable, initial_state
from .trace import Trace, as_event_stream

ACCEPTED = "Accepted"
REJECTED = "Rejected"
ERROR_ROW = "Error"


@dataclass(frozen=True)
class Verdict:
    vehicle_id: str
    initial_state: str
    final_state: str
    airport_visited: bool
    centre_visited: bool
    error_seen: bool
    result: str
    error_event_index: int | None = None

    def to_record(self) -> str:
        return json.dumps(asdict(self))


@dataclass(frozen=True)
class RowError:
    """A report row for a trace that could not be checked."""

    vehicle_id: str
    message: str
    result: str = ERROR_ROW

    def to_record(self) -> str:
        return json.dumps(asdict(self))


@dataclass(frozen=True)
class StateHistory:
    """Probe state after each event, aligned with the trace's elapsed times."""

    states: tuple[str, ...]
    elapsed: tuple[int, ...]
    probe_states: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class MeasureSeries:
    name: str
    samples: tuple[tuple[int, float], ...]

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.samples]

    def to_csv(self, delimiter: str = ",") -> str:
        lines = [f"elapsed_s{delimiter}value"]
        lines += [f"{t}{delimiter}{v!r}" for t, v in self.samples]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FleetReport:
    rows: tuple[Verdict | RowError, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def counts(self) -> dict[str, int]:
        out = {ACCEPTED: 0, REJECTED: 0, ERROR_ROW: 0}
        for r in self.rows:
            out[r.result] += 1
        return out

    def to_records(self) -> str:
        return "".join(r.to_record() + "\n" for r in self.rows)

    def to_table(self) -> str:
        return render_table(self)


@lru_cache(maxsize=64)
def _compiled(p: ProbeDef, rs: RegionSet) -> TransitionTable:
    return p.compile(rs)


def states_for_region(p: ProbeDef, rs: RegionSet, region: str) -> frozenset[str]:
    """States entered only when the position is inside ``region``."""
    target = frozenset([region])
    incoming: dict[str, list] = {}
    for t in p.transitions:
        if t.target != p.error_state:
            incoming.setdefault(t.target, []).append(truth_set(t.guard, rs))
    return frozenset(
        s for s, sets in incoming.items() if sets and all(ts == target for ts in sets)
    )


def run_probe(
    t: Trace,
    p: ProbeDef,
    rs: RegionSet,
    engine: Literal["table", "cursor"] = "table",
) -> tuple[Verdict, StateHistory]:
    """Check one trace.

    ``engine="table"`` runs the compiled transition table through the
    kernels; ``engine="cursor"`` steps a :class:`ProbeCursor` and evaluates
    guard expressions directly. Both give identical results.
    """
    table = _compiled(p, rs)
    start = initial_state(p, t.observations[0], rs)
    if engine == "table":
        bounds = np.asarray(rs.bounds(), dtype=np.float64).reshape(-1, 4)
        classes = kernels.classify_points(
            np.asarray(t.longitudes), np.asarray(t.latitudes), bounds
        )
        idx = kernels.run_table(table.table, classes, table.index(start))
        states = tuple(table.states[i] for i in idx.tolist())
        visited = {start, *states}
    elif engine == "cursor":
        cursor = ProbeCursor(p, start)
        for ev in as_event_stream(t):
            cursor.step(ev, rs)
        states = tuple(s for _, s in cursor.history)
        visited = cursor.visited
    else:
        raise ValueError(f"unknown engine {engine!r}")

    err = p.error_state
    error_index = states.index(err) if err in states else None
    airport = states_for_region(p, rs, "airport") if "airport" in rs else frozenset()
    centre = states_for_region(p, rs, "centre") if "centre" in rs else frozenset()
    verdict = Verdict(
        vehicle_id=t.vehicle_id,
        initial_state=start,
        final_state=states[-1],
        airport_visited=bool(visited & airport),
        centre_visited=bool(visited & centre),
        error_seen=error_index is not None,
        result=REJECTED if error_index is not None else ACCEPTED,
        error_event_index=error_index,
    )
    return verdict, StateHistory(states, t.elapsed, p.states)


def measure_count_in_state(
    history: StateHistory | Sequence[StateHistory], state: str
) -> MeasureSeries:
    """Number of probes in ``state`` at each event (0 or 1 for a single probe)."""
    histories = [history] if isinstance(history, StateHistory) else list(history)
    if not histories or not len(histories[0]):
        raise ValueError("empty history")
    elapsed = histories[0].elapsed
    for h in histories:
        if state not in h.probe_states:
            raise ValueError(f"unknown state {state!r}")
        if h.elapsed != elapsed:
            raise ValueError("histories are not aligned on the same events")
    values = [0.0] * len(elapsed)
    for h in histories:
        for i, s in enumerate(h.states):
            if s == state:
                values[i] += 1.0
    return MeasureSeries(f"ProbeInState{state}", tuple(zip(elapsed, values)))


def measure_max_attribute(
    t: Trace, attribute: Literal["latitude", "longitude"] = "latitude"
) -> MeasureSeries:
    if attribute not in ("latitude", "longitude"):
        raise ValueError(f"unknown attribute {attribute!r}")
    values = [getattr(o, attribute) for o in t.observations]
    name = "MaxLatitude" if attribute == "latitude" else "MaxLongitude"
    return MeasureSeries(name, tuple(zip(t.elapsed, accumulate(values, max))))


def probe_measures(history: StateHistory) -> list[MeasureSeries]:
    return [measure_count_in_state(history, s) for s in history.probe_states]


def _row(run: tuple[Trace, ProbeDef], rs: RegionSet) -> Verdict | RowError:
    t, p = run
    try:
        return run_probe(t, p, rs)[0]
    except (ValueError, RuntimeError) as exc:
        return RowError(t.vehicle_id, str(exc))


def fleet_report(
    runs: Iterable[tuple[Trace, ProbeDef]],
    rs: RegionSet,
    workers: int | None = None,
) -> FleetReport:
    """One row per run, in input order; a failing run becomes a RowError."""
    runs = list(runs)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda r: _row(r, rs), runs))
    else:
        rows = [_row(r, rs) for r in runs]
    return FleetReport(tuple(rows))


_COLUMNS = (
    ("Fleet", "number"),
    ("Initial", "state"),
    ("Final", "state"),
    ("AIRPORT", "visited"),
    ("CENTRE", "visited"),
    ("ERROR", "seen"),
    ("Probe", "result"),
)


def _yes(flag: bool) -> str:
    return "Yes" if flag else "No"


def render_table(report: FleetReport) -> str:
    body = []
    for r in report.rows:
        if isinstance(r, RowError):
            body.append([r.vehicle_id, "-", "-", "-", "-", "-", r.result])
        else:
            body.append([
                r.vehicle_id, r.initial_state, r.final_state,
                _yes(r.airport_visited), _yes(r.centre_visited),
                _yes(r.error_seen), r.result,
            ])
    widths = [
        max([len(a), len(b), *(len(row[i]) for row in body)])
        for i, (a, b) in enumerate(_COLUMNS)
    ]

    def line(cells: Sequence[str]) -> str:
        return " | ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    out = [line([a for a, _ in _COLUMNS]), line([b for _, b in _COLUMNS])]
    out.append("=+=".join("=" * w for w in widths))
    out += [line(row) for row in body]
    return "\n".join(out) + "\n"
