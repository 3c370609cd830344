"""GPS traces: parsing, elapsed-time reconstruction and the move-event stream.

A trace file holds one fix per line as ``latitude, longitude, HH:MM:SS``.
Timestamps are time-of-day only, so elapsed time is rebuilt by adding a day
whenever the clock goes backwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

from .geometry import GeoPoint

DAY_S = 86400


class TraceError(ValueError):
    """Raised for unparsable or inconsistent trace data."""


@dataclass(frozen=True)
class Observation:
    latitude: float
    longitude: float
    hour: int
    minute: int
    second: int
    # Source spelling of the coordinates, kept so output reproduces input digits.
    lat_text: str | None = field(default=None, compare=False, repr=False)
    long_text: str | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not (0 <= self.hour <= 23 and 0 <= self.minute <= 59 and 0 <= self.second <= 59):
            raise TraceError(f"time {self.hour}:{self.minute}:{self.second} out of range")

    @property
    def point(self) -> GeoPoint:
        return GeoPoint(self.longitude, self.latitude)

    @property
    def time_of_day(self) -> int:
        return self.hour * 3600 + self.minute * 60 + self.second

    @property
    def latitude_str(self) -> str:
        return self.lat_text if self.lat_text is not None else repr(self.latitude)

    @property
    def longitude_str(self) -> str:
        return self.long_text if self.long_text is not None else repr(self.longitude)

    @property
    def clock(self) -> str:
        return f"{self.hour:02d}:{self.minute:02d}:{self.second:02d}"


@dataclass(frozen=True)
class MoveEvent:
    index: int
    payload: Observation
    elapsed_s: int


@dataclass(frozen=True)
class Trace:
    vehicle_id: str
    observations: tuple[Observation, ...]
    elapsed: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        obs = tuple(self.observations)
        if not obs:
            raise TraceError(f"trace {self.vehicle_id!r} has no observations")
        object.__setattr__(self, "observations", obs)
        object.__setattr__(
            self,
            "elapsed",
            tuple(compute_elapsed([(o.hour, o.minute, o.second) for o in obs])),
        )

    def __len__(self) -> int:
        return len(self.observations)

    def __iter__(self) -> Iterator[MoveEvent]:
        return as_event_stream(self)

    @property
    def longitudes(self) -> list[float]:
        return [o.longitude for o in self.observations]

    @property
    def latitudes(self) -> list[float]:
        return [o.latitude for o in self.observations]


def compute_elapsed(times: Sequence[tuple[int, int, int]]) -> list[int]:
    """Seconds since the first timestamp, adding a day at every backwards step."""
    if not times:
        raise TraceError("no timestamps")
    out = [0]
    offset = 0
    h, m, s = times[0]
    prev = h * 3600 + m * 60 + s
    base = prev
    for i, (h, m, s) in enumerate(times[1:], start=1):
        tod = h * 3600 + m * 60 + s
        if tod == prev:
            raise TraceError(f"record {i}: timestamp repeats the previous record")
        if tod < prev:
            offset += DAY_S
        out.append(tod + offset - base)
        prev = tod
    return out


def _parse_clock(text: str) -> tuple[int, int, int]:
    parts = text.strip().split(":")
    if len(parts) != 3 or not all(p.isdigit() for p in parts):
        raise ValueError(f"expected HH:MM:SS, got {text.strip()!r}")
    return int(parts[0]), int(parts[1]), int(parts[2])


def parse_trace(source: str, vehicle_id: str, delimiter: str = ",") -> Trace:
    observations = []
    for lineno, line in enumerate(source.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f.strip() for f in stripped.split(delimiter)]
        if len(fields) != 3:
            raise TraceError(f"line {lineno}: expected 3 fields, got {len(fields)}")
        lat_text, long_text, clock = fields
        try:
            lat = float(lat_text)
        except ValueError:
            raise TraceError(f"line {lineno}: bad latitude {lat_text!r}") from None
        try:
            lon = float(long_text)
        except ValueError:
            raise TraceError(f"line {lineno}: bad longitude {long_text!r}") from None
        if not -90 <= lat <= 90:
            raise TraceError(f"line {lineno}: latitude {lat_text} out of range")
        if not -180 <= lon <= 180:
            raise TraceError(f"line {lineno}: longitude {long_text} out of range")
        try:
            h, m, s = _parse_clock(clock)
            observations.append(Observation(lat, lon, h, m, s, lat_text, long_text))
        except ValueError as exc:
            raise TraceError(f"line {lineno}: {exc}") from None
    if not observations:
        raise TraceError(f"trace {vehicle_id!r}: no records")
    try:
        return Trace(vehicle_id, tuple(observations))
    except TraceError as exc:
        raise TraceError(f"trace {vehicle_id!r}: {exc}") from None


def format_trace(t: Trace, delimiter: str = ",") -> str:
    return "".join(
        f"{o.latitude_str}{delimiter}{o.longitude_str}{delimiter}{o.clock}\n"
        for o in t.observations
    )


def read_trace(path: str | Path, vehicle_id: str | None = None, delimiter: str = ",") -> Trace:
    path = Path(path)
    return parse_trace(
        path.read_text(encoding="utf-8"), vehicle_id or path.stem, delimiter
    )


def write_trace(t: Trace, path: str | Path, delimiter: str = ",") -> None:
    Path(path).write_text(format_trace(t, delimiter), encoding="utf-8", newline="\n")


def as_event_stream(t: Trace) -> Iterator[MoveEvent]:
    for i, (obs, el) in enumerate(zip(t.observations, t.elapsed)):
        yield MoveEvent(i, obs, el)
