import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import INSIDE, trace_through
from oracles import loose_oracle, loose_states, region_sequence
from routeprobe import synth
from routeprobe.monitor import (
    ACCEPTED, REJECTED, FleetReport, RowError, StateHistory, Verdict, fleet_report,
    measure_count_in_state, measure_max_attribute, probe_measures, render_table, run_probe,
    states_for_region,
)
from routeprobe.guards import In
from routeprobe.probe import Fixed, Transition, make_probe


def points(t):
    return [(o.longitude, o.latitude) for o in t.observations]


class TestRunProbe:
    def test_correct_route_from_airport(self, rs, loose):
        t, label = synth.generate_trace(synth.default_route(rs, "airport"), vehicle_id="937", rs=rs)
        assert loose_oracle(region_sequence(rs, points(t))) == (ACCEPTED, None)
        v, _ = run_probe(t, loose, rs)
        assert (v.initial_state, v.error_seen, v.result) == ("AIRPORT", False, ACCEPTED)
        assert v.airport_visited and v.centre_visited

    def test_detour_from_garage(self, rs, loose):
        route = synth.default_route(rs, "garage")
        t, label = synth.generate_trace(route, synth.Detour(), "bus042", rs)
        regions = region_sequence(rs, points(t))
        first_out = regions.index(None)
        assert regions[:first_out] == ["garage"] * first_out
        v, _ = run_probe(t, loose, rs)
        assert v.initial_state == "GARAGE" and v.final_state == "ERROR"
        assert v.result == REJECTED and v.error_event_index == first_out
        assert not v.airport_visited and not v.centre_visited

    def test_single_fix_in_centre(self, rs, loose):
        v, h = run_probe(trace_through(["centre"]), loose, rs)
        assert v == Verdict("t", "CENTRE", "CENTRE", False, True, False, ACCEPTED, None)
        assert h.states == ("CENTRE",)

    def test_first_fix_nowhere(self, rs, loose):
        v, _ = run_probe(trace_through([None, "airport"]), loose, rs)
        assert v.initial_state == "ERROR" and v.error_event_index == 0

    def test_bad_engine(self, rs, loose):
        with pytest.raises(ValueError):
            run_probe(trace_through(["centre"]), loose, rs, engine="magic")

    @given(st.lists(st.sampled_from(list(INSIDE)), min_size=1, max_size=40))
    def test_engines_and_oracle_agree(self, rs, loose, seq):
        t = trace_through(seq)
        v1, h1 = run_probe(t, loose, rs, engine="table")
        v2, h2 = run_probe(t, loose, rs, engine="cursor")
        assert v1 == v2 and h1 == h2
        assert list(h1.states) == loose_states(seq)
        assert (v1.result, v1.error_event_index) == loose_oracle(seq)
        assert (v1.result == REJECTED) == v1.error_seen == (v1.error_event_index is not None)

    def test_deterministic(self, rs, loose):
        t = trace_through(["airport", "suburbs1", "suburbs2", None])
        assert run_probe(t, loose, rs) == run_probe(t, loose, rs)

    def test_liveness_from_visited_not_final(self, rs, loose):
        v, _ = run_probe(trace_through(["garage", "centre", "suburbs2", "suburbs1", "airport", "suburbs1"]), loose, rs)
        assert v.final_state == "SUBURBS1" and v.airport_visited and v.centre_visited

    def test_strict_liveness_states(self, rs, strict, loose):
        assert states_for_region(strict, rs, "airport") == {"A"}
        assert states_for_region(strict, rs, "centre") == {"C"}
        assert states_for_region(loose, rs, "airport") == {"AIRPORT"}


def history(*states):
    return StateHistory(tuple(states), tuple(range(0, 60 * len(states), 60)),
                        ("AIRPORT", "SUBURBS1", "SUBURBS2", "CENTRE", "GARAGE", "ERROR"))


class TestMeasures:
    def test_count_error(self):
        assert measure_count_in_state(history("GARAGE", "GARAGE", "ERROR"), "ERROR").values == [0, 0, 1]

    def test_count_all(self):
        s = measure_count_in_state(history("AIRPORT", "AIRPORT"), "AIRPORT")
        assert s.values == [1.0, 1.0] and s.name == "ProbeInStateAIRPORT"

    def test_accepted_trace_error_series_zero(self, rs, loose):
        t, _ = synth.generate_trace(synth.default_route(rs, "centre"), rs=rs)
        v, h = run_probe(t, loose, rs)
        assert v.result == ACCEPTED
        assert set(measure_count_in_state(h, "ERROR").values) == {0.0}

    def test_unknown_state(self):
        with pytest.raises(ValueError, match="unknown state"):
            measure_count_in_state(history("AIRPORT"), "HARBOUR")

    def test_sum_over_cursors(self):
        h = [history("AIRPORT", "SUBURBS1"), history("AIRPORT", "AIRPORT")]
        assert measure_count_in_state(h, "AIRPORT").values == [2.0, 1.0]

    def test_partition_of_unity(self, rs, loose):
        t = trace_through(["airport", "suburbs1", None, "centre"])
        _, h = run_probe(t, loose, rs)
        series = probe_measures(h)
        assert [sum(col) for col in zip(*(s.values for s in series))] == [1.0] * 4

    def test_max_latitude_sample(self, sample):
        s = measure_max_attribute(sample, "latitude")
        assert s.values == [55.948413846216582] * 3
        assert [t for t, _ in s.samples] == [0, 62, 124]

    def test_max_single(self):
        t = trace_through(["garage"])
        assert measure_max_attribute(t).values == [t.observations[0].latitude]

    def test_max_increasing_is_identity(self):
        t = trace_through(["airport", "suburbs2", "centre", "garage"])
        lats = [o.latitude for o in t.observations]
        assert lats == sorted(lats)
        assert measure_max_attribute(t).values == lats

    def test_max_longitude_and_bad_attribute(self, sample):
        assert measure_max_attribute(sample, "longitude").values[-1] == -3.358045792384101
        with pytest.raises(ValueError):
            measure_max_attribute(sample, "altitude")

    def test_csv(self, sample):
        csv = measure_max_attribute(sample).to_csv()
        assert csv.splitlines()[0] == "elapsed_s,value"
        assert csv.splitlines()[2] == "62,55.94841384621658"


class TestFleetReport:
    def test_eleven(self, rs, loose):
        fleet = synth.generate_fleet(10, [synth.Detour()], 7, rs)
        report = fleet_report([(t, loose) for t, _ in fleet], rs)
        assert report.counts() == {ACCEPTED: 10, REJECTED: 1, "Error": 0}
        assert [r.vehicle_id for r in report.rows] == [t.vehicle_id for t, _ in fleet]

    def test_empty(self, rs):
        assert len(fleet_report([], rs)) == 0

    def test_duplicate(self, rs, loose):
        t = trace_through(["airport", "suburbs1"])
        r = fleet_report([(t, loose), (t, loose)], rs)
        assert r.rows[0] == r.rows[1] and r.rows[0].result == ACCEPTED

    def test_row_error_isolated(self, rs, loose):
        other = make_probe("odd", ["X", "E"], "E", [Transition("X", In("harbour"), "X")], Fixed("X"))
        t = trace_through(["airport"])
        report = fleet_report([(t, loose), (t, other), (t, loose)], rs)
        assert report.rows[0].result == report.rows[2].result == ACCEPTED
        assert isinstance(report.rows[1], RowError) and "harbour" in report.rows[1].message
        assert report.counts()["Error"] == 1

    def test_workers_preserve_order(self, rs, loose):
        fleet = synth.generate_fleet(6, [synth.Detour()], 3, rs)
        runs = [(t, loose) for t, _ in fleet]
        assert fleet_report(runs, rs, workers=4) == fleet_report(runs, rs)

    def test_table_layout(self):
        report = FleetReport((
            Verdict("bus042", "GARAGE", "ERROR", False, False, True, REJECTED, 2),
            RowError("950", "bad"),
        ))
        lines = render_table(report).splitlines()
        assert lines[0].split(" | ")[0].strip() == "Fleet"
        assert [c.strip() for c in lines[3].split("|")] == [
            "bus042", "GARAGE", "ERROR", "No", "No", "Yes", "Rejected"]
        assert lines[4].split("|")[-1].strip() == "Error"

    def test_records(self):
        v = Verdict("bus042", "GARAGE", "ERROR", False, False, True, REJECTED, 2)
        rec = json.loads(FleetReport((v,)).to_records())
        assert rec["error_event_index"] == 2 and rec["result"] == "Rejected"
