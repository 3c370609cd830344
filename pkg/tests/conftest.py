import pytest

from routeprobe.config import default_regions
from routeprobe.probe import builtin_loose, builtin_strict
from routeprobe.trace import parse_trace

SAMPLE = (
    "55.948413846216582,-3.363214449536430,00:11:39\n"
    "55.944855742591862,-3.361568243977290,00:12:41\n"
    "55.937544319811479,-3.358045792384101,00:13:43\n"
)

# Interior points of each shipped region.
INSIDE = {
    "airport": (-3.36, 55.94),
    "suburbs1": (-3.30, 55.94),
    "suburbs2": (-3.25, 55.945),
    "centre": (-3.20, 55.95),
    "garage": (-3.19, 55.96),
    None: (0.0, 0.0),
}


@pytest.fixture(scope="session")
def rs():
    return default_regions()


@pytest.fixture(scope="session")
def loose():
    return builtin_loose()


@pytest.fixture(scope="session")
def strict():
    return builtin_strict()


@pytest.fixture
def sample():
    return parse_trace(SAMPLE, "sample")


def trace_through(regions, vehicle_id="t", start=(6, 0, 0)):
    """A trace with one fix at the interior point of each named region, a minute apart."""
    h, m, s = start
    lines = []
    for k, r in enumerate(regions):
        lon, lat = INSIDE[r]
        tod = (h * 3600 + m * 60 + s + 60 * k) % 86400
        lines.append(f"{lat},{lon},{tod // 3600:02d}:{tod % 3600 // 60:02d}:{tod % 60:02d}")
    return parse_trace("\n".join(lines), vehicle_id)


_acceptance_lines = []


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
