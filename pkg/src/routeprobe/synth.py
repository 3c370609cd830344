"""Labelled synthetic GPS traces for exercising the checker.

A vehicle moves in straight lines between waypoints at constant speed,
dwelling at each, and is sampled at a fixed interval. Gaussian jitter,
clipped at ``NOISE_CLIP`` standard deviations, is added per axis. Faults
either push the vehicle out of every region (labelled Rejected) or make it
hover across a shared region edge (labelled Accepted).

Labels refer to the loose route probe. Before returning a trace labelled
Accepted, the generator proves that *any* noise draw within the clip keeps
every fix inside the regions and every pair of consecutive fixes in equal or
neighbouring regions; otherwise it refuses with :class:`SynthError`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import hypot
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .geometry import GeoPoint, Region, RegionSet
from .monitor import ACCEPTED, REJECTED
from .trace import DAY_S, Observation, Trace, write_trace

NOISE_CLIP = 3.0
ROUTE_CHAIN = ("airport", "suburbs1", "suburbs2", "centre", "garage")
COAST_GARAGE = GeoPoint(-3.17, 55.975)


class SynthError(ValueError):
    """Raised when a trace cannot be generated with a guaranteed label."""


@dataclass(frozen=True)
class RouteSpec:
    waypoints: tuple[tuple[GeoPoint, float], ...]
    travel_speed: float = 1e-4
    sample_interval_s: int = 60
    noise_sigma: float = 0.0
    seed: int = 0
    start_time_s: int = 6 * 3600

    def __post_init__(self) -> None:
        if len(self.waypoints) < 2:
            raise SynthError("a route needs at least 2 waypoints")
        if int(self.sample_interval_s) != self.sample_interval_s or self.sample_interval_s <= 0:
            raise SynthError("sample_interval_s must be a positive whole number of seconds")
        if self.noise_sigma < 0:
            raise SynthError("noise_sigma must be non-negative")
        if self.travel_speed <= 0:
            raise SynthError("travel_speed must be positive")
        if any(d < 0 for _, d in self.waypoints):
            raise SynthError("dwell times must be non-negative")


@dataclass(frozen=True)
class NoFault:
    pass


@dataclass(frozen=True)
class Detour:
    """Leave the route at ``start_s`` for ``target``, wait there, come back."""

    target: GeoPoint = COAST_GARAGE
    duration_s: float = 1800.0
    start_s: float = 0.0


@dataclass(frozen=True)
class OutOfRegionJump:
    """Replace fix ``index`` with a reading at ``point``."""

    index: int
    point: GeoPoint = GeoPoint(0.0, 0.0)


@dataclass(frozen=True)
class BoundaryOscillation:
    """Hover across the first crossing of the line ``axis == value``.

    Inserts ``cycles`` pairs of extra fixes alternating ``amplitude`` degrees
    either side of the crossing point.
    """

    value: float
    axis: str = "longitude"
    cycles: int = 2
    amplitude: float = 5e-4


FaultSpec = Union[NoFault, Detour, OutOfRegionJump, BoundaryOscillation]


def default_route(
    rs: RegionSet,
    start: str = "airport",
    laps: int = 1,
    dwell_s: float = 120.0,
    first_dwell_s: float | None = None,
    **kwargs,
) -> RouteSpec:
    """Out-and-back route through the region centres, starting at ``start``.

    One lap goes from ``start`` to the far end of the chain, back to the
    other end, and returns to ``start``.
    """
    chain = list(ROUTE_CHAIN)
    loop = chain + chain[-2:0:-1]
    k = loop.index(start)
    names = (loop[k:] + loop[:k]) * laps + [start]
    waypoints = [(rs[n].centre, float(dwell_s)) for n in names]
    if first_dwell_s is not None:
        waypoints[0] = (waypoints[0][0], float(first_dwell_s))
    return RouteSpec(tuple(waypoints), **kwargs)


# -- motion -----------------------------------------------------------------

def _keyframes(route: RouteSpec) -> list[tuple[float, GeoPoint]]:
    frames: list[tuple[float, GeoPoint]] = []
    t = 0.0
    prev = None
    for p, dwell in route.waypoints:
        if prev is not None:
            t += hypot(p.longitude - prev.longitude, p.latitude - prev.latitude) / route.travel_speed
        frames.append((t, p))
        if dwell > 0:
            t += dwell
            frames.append((t, p))
        prev = p
    return frames


def _position(frames: list[tuple[float, GeoPoint]], t: float) -> GeoPoint:
    ts = [f[0] for f in frames]
    return GeoPoint(
        float(np.interp(t, ts, [f[1].longitude for f in frames])),
        float(np.interp(t, ts, [f[1].latitude for f in frames])),
    )


def _insert_detour(frames, detour: Detour, speed: float):
    total = frames[-1][0]
    if not 0 <= detour.start_s <= total:
        raise SynthError(f"detour start {detour.start_s}s outside the route (0..{total:.0f}s)")
    here = _position(frames, detour.start_s)
    away = hypot(detour.target.longitude - here.longitude, detour.target.latitude - here.latitude) / speed
    shift = 2 * away + detour.duration_s
    before = [f for f in frames if f[0] < detour.start_s]
    after = [(t + shift, p) for t, p in frames if t > detour.start_s]
    s0 = detour.start_s
    excursion = [
        (s0, here),
        (s0 + away, detour.target),
        (s0 + away + detour.duration_s, detour.target),
        (s0 + shift, here),
    ]
    return before + excursion + after


# -- label soundness --------------------------------------------------------

def _subtract(piece, rect):
    """Parts of axis-aligned box ``piece`` not covered by ``rect``."""
    x0, x1, y0, y1 = piece
    rx0, rx1, ry0, ry1 = rect
    if rx1 <= x0 or rx0 >= x1 or ry1 <= y0 or ry0 >= y1:
        return [piece]
    out = []
    if x0 < rx0:
        out.append((x0, rx0, y0, y1))
    if rx1 < x1:
        out.append((rx1, x1, y0, y1))
    cx0, cx1 = max(x0, rx0), min(x1, rx1)
    if y0 < ry0:
        out.append((cx0, cx1, y0, ry0))
    if ry1 < y1:
        out.append((cx0, cx1, ry1, y1))
    return out


def _box(p: GeoPoint, r: float) -> tuple[float, float, float, float]:
    return (p.longitude - r, p.longitude + r, p.latitude - r, p.latitude + r)


def _touching(rs: RegionSet, p: GeoPoint, r: float) -> list[Region] | None:
    """Regions a fix within ``r`` of ``p`` could fall in; None if it could miss them all."""
    if r == 0:
        name = rs.classify(p)
        return None if name is None else [rs[name]]
    x0, x1, y0, y1 = _box(p, r)
    hits = [
        reg for reg in rs
        if reg.min_long < x1 and x0 < reg.max_long and reg.min_lat < y1 and y0 < reg.max_lat
    ]
    # Pad the box slightly so it must sit strictly inside the covered area.
    eps = 1e-12
    pieces = [(x0 - eps, x1 + eps, y0 - eps, y1 + eps)]
    for reg in hits:
        rect = (reg.min_long, reg.max_long, reg.min_lat, reg.max_lat)
        pieces = [q for piece in pieces for q in _subtract(piece, rect)]
    if any(q[1] > q[0] and q[3] > q[2] for q in pieces):
        return None
    return hits


def _clear_of_regions(rs: RegionSet, p: GeoPoint, r: float) -> bool:
    x0, x1, y0, y1 = _box(p, r)
    return not any(
        reg.min_long <= x1 and x0 <= reg.max_long and reg.min_lat <= y1 and y0 <= reg.max_lat
        for reg in rs
    )


def _neighbours(a: str, b: str, chain: Sequence[str]) -> bool:
    if a not in chain or b not in chain:
        return False
    return abs(chain.index(a) - chain.index(b)) <= 1


def _check_accepted(rs, points, r, chain) -> None:
    prev = None
    for i, p in enumerate(points):
        regs = _touching(rs, p, r)
        if regs is None:
            raise SynthError(
                f"fix {i} at {tuple(p)} may fall outside every region; "
                "reduce noise_sigma or change the route"
            )
        names = [reg.name for reg in regs]
        if prev is not None and not all(_neighbours(a, b, chain) for a in prev for b in names):
            raise SynthError(
                f"fixes {i - 1} and {i} may land in non-neighbouring regions "
                f"({prev} vs {names}); lower travel_speed or noise_sigma"
            )
        prev = names


# -- generation -------------------------------------------------------------

def _oscillate(rs, points, fault: BoundaryOscillation):
    if fault.axis not in ("longitude", "latitude"):
        raise SynthError(f"unknown axis {fault.axis!r}")
    ax = 0 if fault.axis == "longitude" else 1
    lo, hi = ("min_long", "max_long") if ax == 0 else ("min_lat", "max_lat")

    def shares_edge(a: Region, b: Region) -> bool:
        return (getattr(a, hi) == fault.value == getattr(b, lo)) or (
            getattr(b, hi) == fault.value == getattr(a, lo)
        )

    for i in range(len(points) - 1):
        ca, cb = rs.classify(points[i]), rs.classify(points[i + 1])
        if ca is None or cb is None or ca == cb or not shares_edge(rs[ca], rs[cb]):
            continue
        p, q = points[i], points[i + 1]
        u = (fault.value - p[ax]) / (q[ax] - p[ax])
        cross = GeoPoint(p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1]))
        toward_b = 1.0 if q[ax] > p[ax] else -1.0

        def side(sign: float) -> GeoPoint:
            c = list(cross)
            c[ax] = fault.value + sign * fault.amplitude
            return GeoPoint(*c)

        extra = [side(toward_b), side(-toward_b)] * fault.cycles
        return points[: i + 1] + extra + points[i + 1 :]
    raise SynthError(f"route never crosses a shared edge at {fault.axis} = {fault.value}")


def _observation(p: GeoPoint, clock_s: int) -> Observation:
    lat_text = f"{p.latitude:.15f}"
    long_text = f"{p.longitude:.15f}"
    tod = clock_s % DAY_S
    return Observation(
        float(lat_text), float(long_text),
        tod // 3600, (tod % 3600) // 60, tod % 60,
        lat_text, long_text,
    )


def generate_trace(
    route: RouteSpec,
    fault: FaultSpec = NoFault(),
    vehicle_id: str = "bus",
    rs: RegionSet | None = None,
    chain: Sequence[str] = ROUTE_CHAIN,
) -> tuple[Trace, str]:
    """Sample ``route`` with ``fault`` applied; returns the trace and its label."""
    if rs is None:
        from .config import default_regions
        rs = default_regions()
    r = NOISE_CLIP * route.noise_sigma
    frames = _keyframes(route)

    if isinstance(fault, Detour):
        if fault.duration_s < route.sample_interval_s:
            raise SynthError("detour must last at least one sample interval")
        if not _clear_of_regions(rs, fault.target, r):
            raise SynthError(f"detour target {tuple(fault.target)} is not clear of every region")
        frames = _insert_detour(frames, fault, route.travel_speed)

    interval = int(route.sample_interval_s)
    n = int(frames[-1][0] // interval) + 1
    points = [_position(frames, k * interval) for k in range(n)]

    if isinstance(fault, BoundaryOscillation):
        points = _oscillate(rs, points, fault)
    elif isinstance(fault, OutOfRegionJump):
        if not 0 <= fault.index < len(points):
            raise SynthError(f"jump index {fault.index} outside trace of {len(points)} fixes")
        if not _clear_of_regions(rs, fault.point, r):
            raise SynthError(f"jump point {tuple(fault.point)} is not clear of every region")
        points[fault.index] = fault.point

    if isinstance(fault, (NoFault, BoundaryOscillation)):
        label = ACCEPTED
        _check_accepted(rs, points, r, chain)
    else:
        label = REJECTED

    rng = np.random.default_rng(route.seed)
    if route.noise_sigma > 0:
        jitter = np.clip(rng.normal(0.0, route.noise_sigma, size=(len(points), 2)), -r, r)
        points = [GeoPoint(p.longitude + dx, p.latitude + dy) for p, (dx, dy) in zip(points, jitter.tolist())]

    obs = [_observation(p, route.start_time_s + k * interval) for k, p in enumerate(points)]
    return Trace(vehicle_id, tuple(obs)), label


@dataclass(frozen=True)
class FleetConfig:
    """Knobs for :func:`generate_fleet`; defaults give short, quiet traces."""

    noise_sigma: float = 1e-4
    travel_speed: float = 1e-4
    sample_interval_s: int = 60
    dwell_s: float = 120.0
    max_laps: int = 2
    id_prefix: str = "bus"
    first_number: int = 0
    starts: tuple[str, ...] = field(default=ROUTE_CHAIN)


def generate_fleet(
    n_correct: int,
    faults: Sequence[FaultSpec],
    seed: int,
    rs: RegionSet | None = None,
    config: FleetConfig = FleetConfig(),
) -> list[tuple[Trace, str]]:
    """``n_correct`` fault-free traces followed by one trace per fault.

    Each trace draws its start region, lap count, start time and noise from a
    child of ``seed``. Detour traces start in the garage so the excursion
    happens before any other region is visited.
    """
    if n_correct < 0:
        raise SynthError("n_correct must be non-negative")
    if rs is None:
        from .config import default_regions
        rs = default_regions()
    jobs: list[FaultSpec] = [NoFault()] * n_correct + list(faults)
    children = np.random.SeedSequence(seed).spawn(len(jobs))
    out = []
    for k, (fault, child) in enumerate(zip(jobs, children)):
        rng = np.random.default_rng(child)
        if isinstance(fault, Detour):
            start = "garage"
        else:
            start = config.starts[int(rng.integers(len(config.starts)))]
        route = default_route(
            rs,
            start=start,
            laps=int(rng.integers(1, config.max_laps + 1)),
            dwell_s=config.dwell_s,
            travel_speed=config.travel_speed,
            sample_interval_s=config.sample_interval_s,
            noise_sigma=config.noise_sigma,
            seed=int(rng.integers(2**31)),
            start_time_s=int(rng.integers(DAY_S)),
        )
        vid = f"{config.id_prefix}{config.first_number + k:03d}"
        out.append(generate_trace(route, fault, vid, rs))
    return out


def write_fleet(fleet: Sequence[tuple[Trace, str]], out_dir: str | Path) -> list[Path]:
    """Write ``<vehicle_id>.csv`` per trace plus ``labels.csv``; nothing if empty."""
    out_dir = Path(out_dir)
    if not fleet:
        return []
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for t, _ in fleet:
        path = out_dir / f"{t.vehicle_id}.csv"
        write_trace(t, path)
        paths.append(path)
    labels = "".join(f"{t.vehicle_id},{label}\n" for t, label in fleet)
    (out_dir / "labels.csv").write_text("vehicle_id,expected_result\n" + labels, encoding="utf-8")
    return paths


_FAULT_DEFAULTS = {
    "none": lambda: NoFault(),
    "detour": lambda: Detour(),
    "jump": lambda: OutOfRegionJump(10),
    "oscillation": lambda: BoundaryOscillation(-3.28),
}


def fault_from_dict(d: dict) -> FaultSpec:
    """Build a fault from a config mapping such as ``{kind: detour, duration_s: 900}``."""
    d = dict(d)
    kind = str(d.pop("kind", "")).lower()
    if kind not in _FAULT_DEFAULTS:
        raise SynthError(f"unknown fault kind {kind!r}; expected one of {sorted(_FAULT_DEFAULTS)}")
    for key in ("target", "point"):
        if key in d:
            lon, lat = d[key]
            d[key] = GeoPoint(float(lon), float(lat))
    if not d:
        return _FAULT_DEFAULTS[kind]()
    cls = {"none": NoFault, "detour": Detour, "jump": OutOfRegionJump,
           "oscillation": BoundaryOscillation}[kind]
    try:
        return cls(**d)
    except TypeError as exc:
        raise SynthError(f"bad parameters for {kind} fault: {exc}") from None


def fleet_config_from_dict(d: dict) -> FleetConfig:
    d = dict(d)
    if "starts" in d:
        d["starts"] = tuple(d["starts"])
    try:
        return FleetConfig(**d)
    except TypeError as exc:
        raise SynthError(f"bad route config: {exc}") from None
