import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from routeprobe import kernels

BACKENDS = [kernels.python] + ([kernels.compiled] if kernels.compiled is not None else [])


def reference_classify(lons, lats, bounds):
    out = []
    for x, y in zip(lons, lats):
        hits = [j for j, (x0, x1, y0, y1) in enumerate(bounds) if x0 < x < x1 and y0 < y < y1]
        out.append(hits[0] if hits else len(bounds))
    return out


@pytest.fixture
def bounds(rs):
    return np.asarray(rs.bounds(), dtype=np.float64).reshape(-1, 4)


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")
    assert (kernels.BACKEND == "cython") == (kernels.compiled is not None)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_edges_are_outside(impl, bounds):
    xs, ys = [], []
    for x0, x1, y0, y1 in bounds:
        xs += [x0, x1, (x0 + x1) / 2, (x0 + x1) / 2]
        ys += [(y0 + y1) / 2, (y0 + y1) / 2, y0, y1]
    got = impl.classify_points(np.array(xs), np.array(ys), bounds)
    # Shared edges sit between two regions, so none of these points is inside one.
    assert set(got.tolist()) == {len(bounds)}


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_empty_inputs(impl, bounds):
    assert impl.classify_points(np.array([]), np.array([]), bounds).tolist() == []
    table = np.zeros((2, 6), dtype=np.int32)
    assert impl.run_table(table, np.array([], dtype=np.int32), 1).tolist() == []


coords = st.tuples(
    st.sampled_from([-3.38, -3.34, -3.28, -3.22, -3.2, -3.18]) | st.floats(-3.40, -3.16),
    st.sampled_from([55.935, 55.94, 55.945, 55.95, 55.955, 55.965]) | st.floats(55.93, 55.97),
)


@given(st.lists(coords, max_size=60))
def test_classify_backends_agree(rs, pts):
    b = np.asarray(rs.bounds(), dtype=np.float64).reshape(-1, 4)
    lons = np.array([p[0] for p in pts], dtype=np.float64)
    lats = np.array([p[1] for p in pts], dtype=np.float64)
    want = reference_classify(lons.tolist(), lats.tolist(), b.tolist())
    for impl in BACKENDS:
        assert impl.classify_points(lons, lats, b).tolist() == want


@given(st.data())
def test_run_table_backends_agree(data):
    n_states = data.draw(st.integers(1, 8))
    n_cols = data.draw(st.integers(1, 7))
    table = np.array(
        data.draw(st.lists(st.lists(st.integers(0, n_states - 1), min_size=n_cols, max_size=n_cols),
                           min_size=n_states, max_size=n_states)),
        dtype=np.int32,
    )
    classes = np.array(data.draw(st.lists(st.integers(0, n_cols - 1), max_size=50)), dtype=np.int32)
    start = data.draw(st.integers(0, n_states - 1))
    state, want = start, []
    for c in classes.tolist():
        state = int(table[state, c])
        want.append(state)
    for impl in BACKENDS:
        assert impl.run_table(table, classes, start).tolist() == want


def test_loose_table_through_kernels(rs, loose):
    t = loose.compile(rs)
    b = np.asarray(rs.bounds(), dtype=np.float64).reshape(-1, 4)
    # airport, suburbs1, nowhere, centre
    cls = kernels.classify_points(np.array([-3.36, -3.30, 0.0, -3.20]),
                                  np.array([55.94, 55.94, 0.0, 55.95]), b)
    assert cls.tolist() == [0, 1, 5, 3]
    got = kernels.run_table(t.table, cls, t.index("AIRPORT"))
    assert [t.states[i] for i in got.tolist()] == ["AIRPORT", "SUBURBS1", "ERROR", "ERROR"]
