"""Check GPS vehicle traces against region-guarded probe automata."""

from .geometry import GeoPoint, Region, RegionSet, classify, contains, load_regions
from .monitor import (
    FleetReport,
    MeasureSeries,
    Verdict,
    fleet_report,
    measure_count_in_state,
    measure_max_attribute,
    run_probe,
)
from .probe import (
    ProbeCursor,
    ProbeDef,
    builtin_loose,
    builtin_strict,
    initial_state,
    parse_probe,
    step,
)
from .trace import Observation, Trace, as_event_stream, compute_elapsed, parse_trace

__version__ = "0.1.0"

__all__ = [
    "FleetReport", "GeoPoint", "MeasureSeries", "Observation", "ProbeCursor",
    "ProbeDef", "Region", "RegionSet", "Trace", "Verdict", "as_event_stream",
    "builtin_loose", "builtin_strict", "classify", "compute_elapsed", "contains",
    "fleet_report", "initial_state", "load_regions", "measure_count_in_state",
    "measure_max_attribute", "parse_probe", "parse_trace", "run_probe", "step",
]
