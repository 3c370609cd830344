"""Locating and loading the shipped and user-supplied configuration files."""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

from .geometry import RegionSet, load_regions
from .probe import BUILTINS, ProbeDef, parse_probe, validate_probe

CONFIG_ENV = "ROUTEPROBE_CONFIG_DIR"
REGIONS_FILE = "regions.yaml"


def shipped_text(name: str) -> str:
    return resources.files("routeprobe").joinpath("data", name).read_text(encoding="utf-8")


def default_regions_path() -> Path | None:
    """``regions.yaml`` under ``$ROUTEPROBE_CONFIG_DIR`` if that file exists."""
    d = os.environ.get(CONFIG_ENV)
    if d:
        p = Path(d) / REGIONS_FILE
        if p.is_file():
            return p
    return None


def default_regions() -> RegionSet:
    """The shipped route-100 regions (or the override from the config dir)."""
    p = default_regions_path()
    if p is not None:
        return load_regions(p.read_text(encoding="utf-8"))
    return load_regions(shipped_text(REGIONS_FILE))


def load_regions_file(path: str | Path | None) -> RegionSet:
    if path is None:
        return default_regions()
    return load_regions(Path(path).read_text(encoding="utf-8"))


def resolve_probe(name_or_path: str, rs: RegionSet) -> ProbeDef:
    """A builtin probe by name (``loose``/``strict``) or a probe file."""
    if name_or_path in BUILTINS:
        p = BUILTINS[name_or_path]()
        validate_probe(p, rs)
        return p
    return parse_probe(Path(name_or_path).read_text(encoding="utf-8"), rs)
