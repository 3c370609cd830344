"""Named rectangular regions over longitude/latitude and membership tests.

Regions are open axis-aligned rectangles: a point lying exactly on an edge
belongs to no region. A :class:`RegionSet` rejects overlapping interiors at
construction, so :meth:`RegionSet.classify` is a partial function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import yaml


class RegionConfigError(ValueError):
    """Raised for malformed, degenerate or overlapping region definitions."""


class GeoPoint(NamedTuple):
    longitude: float
    latitude: float


@dataclass(frozen=True)
class Region:
    name: str
    min_long: float
    max_long: float
    min_lat: float
    max_lat: float

    def __post_init__(self) -> None:
        if not self.min_long < self.max_long or not self.min_lat < self.max_lat:
            raise RegionConfigError(f"region {self.name!r} is degenerate")

    def contains(self, p: GeoPoint) -> bool:
        return (
            self.min_long < p.longitude < self.max_long
            and self.min_lat < p.latitude < self.max_lat
        )

    def overlaps(self, other: Region) -> bool:
        """True when the open interiors intersect; shared edges do not count."""
        return (
            self.min_long < other.max_long
            and other.min_long < self.max_long
            and self.min_lat < other.max_lat
            and other.min_lat < self.max_lat
        )

    @property
    def centre(self) -> GeoPoint:
        return GeoPoint(
            (self.min_long + self.max_long) / 2, (self.min_lat + self.max_lat) / 2
        )


def contains(region: Region, p: GeoPoint) -> bool:
    return region.contains(p)


class RegionSet:
    """Immutable ordered collection of pairwise-disjoint regions."""

    __slots__ = ("_regions", "_index")

    def __init__(self, regions: Iterable[Region] = ()) -> None:
        regions = tuple(regions)
        index: dict[str, int] = {}
        for i, r in enumerate(regions):
            if r.name in index:
                raise RegionConfigError(f"duplicate region name {r.name!r}")
            index[r.name] = i
        for i, a in enumerate(regions):
            for b in regions[i + 1 :]:
                if a.overlaps(b):
                    raise RegionConfigError(
                        f"regions {a.name!r} and {b.name!r} overlap"
                    )
        self._regions = regions
        self._index = index

    def __len__(self) -> int:
        return len(self._regions)

    def __iter__(self) -> Iterator[Region]:
        return iter(self._regions)

    def __getitem__(self, name: str) -> Region:
        return self._regions[self._index[name]]

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RegionSet):
            return NotImplemented
        return self._regions == other._regions

    def __hash__(self) -> int:
        return hash(self._regions)

    def __repr__(self) -> str:
        return f"RegionSet({list(self.names)!r})"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self._regions)

    def index_of(self, name: str) -> int:
        return self._index[name]

    def classify(self, p: GeoPoint) -> str | None:
        """Name of the region containing ``p``, or None."""
        found = None
        for r in self._regions:
            if r.contains(p):
                if found is not None:
                    raise RegionConfigError(
                        f"point {tuple(p)} lies in both {found!r} and {r.name!r}"
                    )
                found = r.name
        return found

    def bounds(self) -> list[tuple[float, float, float, float]]:
        """Rows of ``(min_long, max_long, min_lat, max_lat)`` in region order."""
        return [(r.min_long, r.max_long, r.min_lat, r.max_lat) for r in self._regions]


def classify(rs: RegionSet, p: GeoPoint) -> str | None:
    return rs.classify(p)


_FIELDS = ("min_long", "max_long", "min_lat", "max_lat")


def load_regions(source: str) -> RegionSet:
    """Parse a YAML region document.

    The document is either a list of entries or a mapping with a ``regions``
    list. Each entry carries ``name, min_long, max_long, min_lat, max_lat``.
    """
    try:
        doc = yaml.safe_load(source)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        raise RegionConfigError(f"cannot parse region config{where}: {exc}") from exc

    if doc is None:
        entries = []
    elif isinstance(doc, dict):
        entries = doc.get("regions") or []
    else:
        entries = doc
    if not isinstance(entries, list):
        raise RegionConfigError("'regions' must be a list")

    regions = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise RegionConfigError(f"regions[{i}]: expected a mapping")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise RegionConfigError(f"regions[{i}].name: missing or not a string")
        values = []
        for field in _FIELDS:
            v = entry.get(field)
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise RegionConfigError(
                    f"regions[{i}].{field} ({name}): expected a number, got {v!r}"
                )
            values.append(float(v))
        try:
            regions.append(Region(name, *values))
        except RegionConfigError as exc:
            raise RegionConfigError(f"regions[{i}]: {exc}") from None
    return RegionSet(regions)


def dump_regions(rs: RegionSet) -> str:
    entries = [
        {"name": r.name, **{f: getattr(r, f) for f in _FIELDS}} for r in rs
    ]
    return yaml.safe_dump({"regions": entries}, sort_keys=False)
