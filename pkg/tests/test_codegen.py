from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import INSIDE, trace_through
from emitted_reader import read_component
from routeprobe import synth
from routeprobe.codegen import chunk_sizes, emit_component, estimate_emitted_size, write_component

GOLDEN = Path(__file__).parent / "golden" / "sample_component.txt"


def events_of(t):
    return [(o.latitude_str, o.longitude_str, o.hour, o.minute, o.second) for o in t.observations]


def test_sample_golden(sample):
    assert emit_component(sample, chunk_size=2) == GOLDEN.read_text()


def test_sample_single_chunk_keeps_digits(sample):
    text = emit_component(sample)
    assert "<55.948413846216582, -3.363214449536430, 00, 11, 39>" in text
    assert "P1" not in text
    assert text.splitlines()[-5].endswith(".nil;")


def test_chunk_sizes():
    assert chunk_sizes(1440, 500) == [500, 500, 440]
    assert chunk_sizes(1000, 500) == [500, 500]
    assert chunk_sizes(3, 1) == [1, 1, 1]
    assert chunk_sizes(0, 7) == []
    with pytest.raises(ValueError):
        chunk_sizes(3, 0)


def test_chunk_size_one(sample):
    events, sizes = read_component(emit_component(sample, chunk_size=1))
    assert sizes == [1, 1, 1]
    assert events == events_of(sample)


def test_estimate_rejects_bad_chunk(sample):
    with pytest.raises(ValueError):
        estimate_emitted_size(sample, 0)


@settings(max_examples=40)
@given(st.lists(st.sampled_from(list(INSIDE)), min_size=1, max_size=30), st.integers(1, 12))
def test_round_trip_and_size(seq, chunk):
    t = trace_through(seq, start=(23, 55, 0))
    text = emit_component(t, chunk)
    events, sizes = read_component(text)
    assert events == events_of(t)
    assert sizes == chunk_sizes(len(t), chunk)
    assert len(text.splitlines()) == estimate_emitted_size(t, chunk)


def test_long_trace(rs):
    t, _ = synth.generate_trace(synth.default_route(rs, laps=3, noise_sigma=1e-4, seed=1), rs=rs)
    events, sizes = read_component(emit_component(t, 100))
    assert events == events_of(t)
    assert sum(sizes) == len(t)


def test_write_component_lf(sample, tmp_path):
    out = tmp_path / "c.txt"
    write_component(sample, out, chunk_size=2)
    data = out.read_bytes()
    assert b"\r" not in data
    assert data.decode() == GOLDEN.read_text()
