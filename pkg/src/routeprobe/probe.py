"""Probe automata with region-membership guards and an absorbing error state.

A probe moves on every event. From a non-error state it follows the unique
non-error transition whose guard holds at the event's position; when none
holds it falls into the error state, which it never leaves.

Validation is exact rather than sampled: guards only test region membership
and regions are disjoint, so each guard reduces to the set of region outcomes
on which it holds (see :func:`routeprobe.guards.truth_set`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence, Union

import numpy as np
import yaml

from . import guards as G
from .geometry import RegionSet
from .trace import MoveEvent, Observation


class ProbeDefinitionError(ValueError):
    """Raised when a probe definition is malformed or fails validation."""


class ProbeRuntimeError(RuntimeError):
    """Raised when a step finds more than one enabled transition."""


@dataclass(frozen=True)
class Transition:
    source: str
    guard: G.Guard
    target: str


@dataclass(frozen=True)
class Fixed:
    state: str


@dataclass(frozen=True)
class FromFirstObservation:
    mapping: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, mapping: Mapping[str, str]) -> FromFirstObservation:
        return cls(tuple(mapping.items()))

    def as_dict(self) -> dict[str, str]:
        return dict(self.mapping)


InitialPolicy = Union[Fixed, FromFirstObservation]


@dataclass(frozen=True)
class ProbeDef:
    name: str
    states: tuple[str, ...]
    error_state: str
    transitions: tuple[Transition, ...]
    initial: InitialPolicy

    @cached_property
    def outgoing(self) -> dict[str, tuple[Transition, ...]]:
        out: dict[str, list[Transition]] = {s: [] for s in self.states}
        for t in self.transitions:
            out[t.source].append(t)
        return {s: tuple(ts) for s, ts in out.items()}

    @cached_property
    def live_outgoing(self) -> dict[str, tuple[Transition, ...]]:
        """Outgoing transitions that do not lead to the error state."""
        return {
            s: tuple(t for t in ts if t.target != self.error_state)
            for s, ts in self.outgoing.items()
        }

    def out_degree(self, state: str) -> int:
        return len(self.outgoing[state])

    def regions(self) -> set[str]:
        names = set()
        for t in self.transitions:
            names |= G.regions_of(t.guard)
        if isinstance(self.initial, FromFirstObservation):
            names |= {r for r, _ in self.initial.mapping}
        return names

    def normal_form(self, rs: RegionSet) -> tuple:
        """Name-free canonical form; equal forms mean equal automata over ``rs``."""
        edges = frozenset(
            (t.source, t.target, G.truth_set(t.guard, rs)) for t in self.transitions
        )
        initial = (
            self.initial
            if isinstance(self.initial, Fixed)
            else frozenset(self.initial.mapping)
        )
        return (frozenset(self.states), self.error_state, initial, edges)

    def equivalent(self, other: ProbeDef, rs: RegionSet) -> bool:
        return self.normal_form(rs) == other.normal_form(rs)

    def compile(self, rs: RegionSet) -> TransitionTable:
        return TransitionTable.build(self, rs)


def _describe(outcome: str | None) -> str:
    return "outside every region" if outcome is None else f"in region {outcome!r}"


def _error_guard(live: Sequence[Transition]) -> G.Guard:
    if not live:
        return G.TRUE
    negs = tuple(G.Not(t.guard) for t in live)
    return negs[0] if len(negs) == 1 else G.And(negs)


def make_probe(
    name: str,
    states: Sequence[str],
    error_state: str,
    transitions: Sequence[Transition],
    initial: InitialPolicy,
    rs: RegionSet | None = None,
) -> ProbeDef:
    """Build a probe, adding any missing error transitions.

    Non-error states without an explicit transition to ``error_state`` get one
    guarded by the conjunction of the negated non-error guards; the error
    state gets a ``true`` self-loop if it has no transitions. When ``rs`` is
    given the result is validated against it.
    """
    states = tuple(states)
    transitions = list(transitions)
    declared = set(states)
    for t in transitions:
        for s in (t.source, t.target):
            if s not in declared:
                raise ProbeDefinitionError(f"transition uses undeclared state {s!r}")
    if error_state not in declared:
        raise ProbeDefinitionError(f"missing error state {error_state!r}")

    by_state: dict[str, list[Transition]] = {s: [] for s in states}
    for t in transitions:
        by_state[t.source].append(t)
    ordered: list[Transition] = []
    for s in states:
        ts = by_state[s]
        if s == error_state:
            ordered.extend(ts or [Transition(s, G.TRUE, s)])
            continue
        ordered.extend(ts)
        if not any(t.target == error_state for t in ts):
            live = [t for t in ts if t.target != error_state]
            ordered.append(Transition(s, _error_guard(live), error_state))

    probe = ProbeDef(name, states, error_state, tuple(ordered), initial)
    if rs is not None:
        validate_probe(probe, rs)
    return probe


def validate_probe(p: ProbeDef, rs: RegionSet) -> None:
    """Check a probe against ``rs``; raises ProbeDefinitionError on failure."""
    if len(set(p.states)) != len(p.states):
        raise ProbeDefinitionError(f"probe {p.name!r}: duplicate state names")
    if p.error_state not in p.states:
        raise ProbeDefinitionError(f"probe {p.name!r}: missing error state {p.error_state!r}")
    for t in p.transitions:
        for s in (t.source, t.target):
            if s not in p.states:
                raise ProbeDefinitionError(f"probe {p.name!r}: undeclared state {s!r}")
    unknown = sorted(p.regions() - set(rs.names))
    if unknown:
        raise ProbeDefinitionError(f"probe {p.name!r}: unknown region {unknown[0]!r}")

    if isinstance(p.initial, Fixed):
        if p.initial.state not in p.states:
            raise ProbeDefinitionError(
                f"probe {p.name!r}: initial state {p.initial.state!r} not declared"
            )
    else:
        for region, state in p.initial.mapping:
            if state not in p.states:
                raise ProbeDefinitionError(
                    f"probe {p.name!r}: initial mapping {region!r} -> undeclared {state!r}"
                )

    everything = frozenset((*rs.names, None))
    err_out = p.outgoing[p.error_state]
    if (
        len(err_out) != 1
        or err_out[0].target != p.error_state
        or G.truth_set(err_out[0].guard, rs) != everything
    ):
        raise ProbeDefinitionError(
            f"probe {p.name!r}: error state {p.error_state!r} must have exactly one "
            "transition, a self-loop guarded by true"
        )

    for s in p.states:
        if s == p.error_state:
            continue
        live = p.live_outgoing[s]
        covered: dict[str | None, Transition] = {}
        for t in live:
            holds = G.truth_set(t.guard, rs)
            for outcome in (o for o in (*rs.names, None) if o in holds):
                if outcome in covered:
                    other = covered[outcome]
                    raise ProbeDefinitionError(
                        f"probe {p.name!r}: state {s!r} guards to {other.target!r} and "
                        f"{t.target!r} both hold {_describe(outcome)}"
                    )
                covered[outcome] = t
        complement = everything - covered.keys()
        errs = [t for t in p.outgoing[s] if t.target == p.error_state]
        if len(errs) != 1:
            raise ProbeDefinitionError(
                f"probe {p.name!r}: state {s!r} needs exactly one error transition"
            )
        if G.truth_set(errs[0].guard, rs) != complement:
            raise ProbeDefinitionError(
                f"probe {p.name!r}: error guard of state {s!r} is not the complement "
                "of its other guards"
            )


def initial_state(p: ProbeDef, first: Observation, rs: RegionSet) -> str:
    if isinstance(p.initial, Fixed):
        return p.initial.state
    region = rs.classify(first.point)
    return p.initial.as_dict().get(region, p.error_state)


@dataclass
class ProbeCursor:
    """Runtime position of one probe over one event stream."""

    probe: ProbeDef
    current: str
    visited: set[str] = field(default_factory=set)
    history: list[tuple[int, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.visited.add(self.current)

    @classmethod
    def start(cls, probe: ProbeDef, first: Observation, rs: RegionSet) -> ProbeCursor:
        return cls(probe, initial_state(probe, first, rs))

    def step(self, ev: MoveEvent, rs: RegionSet) -> ProbeCursor:
        p = ev.payload.point
        enabled = [
            t for t in self.probe.live_outgoing[self.current]
            if G.evaluate_guard(t.guard, p, rs)
        ]
        if len(enabled) > 1:
            raise ProbeRuntimeError(
                f"state {self.current!r}: {len(enabled)} transitions enabled at event {ev.index}"
            )
        self.current = enabled[0].target if enabled else self.probe.error_state
        self.visited.add(self.current)
        self.history.append((ev.index, self.current))
        return self


def step(c: ProbeCursor, ev: MoveEvent, rs: RegionSet) -> ProbeCursor:
    return c.step(ev, rs)


@dataclass(frozen=True, eq=False)
class TransitionTable:
    """Dense next-state table: rows are states, columns are region outcomes.

    Column ``i`` is region ``rs.names[i]``; the last column is "outside every
    region".
    """

    states: tuple[str, ...]
    regions: tuple[str, ...]
    table: np.ndarray
    error_index: int

    @classmethod
    def build(cls, p: ProbeDef, rs: RegionSet) -> TransitionTable:
        validate_probe(p, rs)
        index = {s: i for i, s in enumerate(p.states)}
        err = index[p.error_state]
        outcomes = (*rs.names, None)
        table = np.full((len(p.states), len(outcomes)), err, dtype=np.int32)
        for s in p.states:
            for t in p.live_outgoing[s]:
                for j, outcome in enumerate(outcomes):
                    if G.holds_in(t.guard, outcome):
                        table[index[s], j] = index[t.target]
        table.setflags(write=False)
        return cls(p.states, rs.names, table, err)

    def index(self, state: str) -> int:
        return self.states.index(state)


# -- builtin probes ---------------------------------------------------------

AIRPORT, SUBURBS1, SUBURBS2, CENTRE, GARAGE = (
    "airport", "suburbs1", "suburbs2", "centre", "garage",
)


def _chain_probe(
    name: str,
    binding: Mapping[str, str],
    moves: Mapping[str, Sequence[str]],
    error_state: str,
    initial: InitialPolicy,
) -> ProbeDef:
    transitions = []
    for src, targets in moves.items():
        for dst in targets:
            transitions.append(Transition(src, G.In(binding[dst]), dst))
    states = (*moves, error_state)
    return make_probe(name, states, error_state, transitions, initial)


def builtin_loose() -> ProbeDef:
    """Direction-agnostic route probe: neighbours along the chain are allowed."""
    binding = {
        "AIRPORT": AIRPORT, "SUBURBS1": SUBURBS1, "SUBURBS2": SUBURBS2,
        "CENTRE": CENTRE, "GARAGE": GARAGE,
    }
    moves = {
        "AIRPORT": ["AIRPORT", "SUBURBS1"],
        "SUBURBS1": ["AIRPORT", "SUBURBS1", "SUBURBS2"],
        "SUBURBS2": ["SUBURBS1", "SUBURBS2", "CENTRE"],
        "CENTRE": ["SUBURBS2", "CENTRE", "GARAGE"],
        "GARAGE": ["CENTRE", "GARAGE"],
    }
    initial = FromFirstObservation.of({region: state for state, region in binding.items()})
    return _chain_probe("loose", binding, moves, "ERROR", initial)


def builtin_strict() -> ProbeDef:
    """Probe separating the outward (A) and return (R) legs; starts at the airport."""
    binding = {
        "A": AIRPORT, "S1A": SUBURBS1, "S2A": SUBURBS2, "C": CENTRE,
        "G": GARAGE, "S2R": SUBURBS2, "S1R": SUBURBS1,
    }
    moves = {
        "A": ["A", "S1A"],
        "S1A": ["S1A", "S2A"],
        "S2A": ["S2A", "C"],
        "C": ["C", "G", "S2R"],
        "G": ["G", "C"],
        "S2R": ["S2R", "S1R"],
        "S1R": ["S1R", "A"],
    }
    return _chain_probe("strict", binding, moves, "E", Fixed("A"))


BUILTINS = {"loose": builtin_loose, "strict": builtin_strict}


# -- probe files ------------------------------------------------------------

def parse_probe(source: str, rs: RegionSet) -> ProbeDef:
    """Parse and validate a YAML probe definition against ``rs``."""
    try:
        doc = yaml.safe_load(source)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        raise ProbeDefinitionError(f"cannot parse probe{where}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ProbeDefinitionError("probe document must be a mapping")

    name = str(doc.get("name", "probe"))
    states = doc.get("states")
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise ProbeDefinitionError("'states' must be a list of names")
    error_state = doc.get("error_state")
    if not isinstance(error_state, str):
        raise ProbeDefinitionError("missing error state: 'error_state' is required")
    if error_state not in states:
        raise ProbeDefinitionError(f"missing error state: {error_state!r} not in states")

    init = doc.get("initial")
    if isinstance(init, dict) and set(init) == {"fixed"}:
        initial: InitialPolicy = Fixed(str(init["fixed"]))
    elif isinstance(init, dict) and set(init) == {"from_first_observation"}:
        mapping = init["from_first_observation"]
        if not isinstance(mapping, dict):
            raise ProbeDefinitionError("'from_first_observation' must map region -> state")
        initial = FromFirstObservation.of({str(k): str(v) for k, v in mapping.items()})
    else:
        raise ProbeDefinitionError(
            "'initial' must be {fixed: STATE} or {from_first_observation: {...}}"
        )

    raw = doc.get("transitions") or []
    if not isinstance(raw, list):
        raise ProbeDefinitionError("'transitions' must be a list")
    transitions = []
    for i, item in enumerate(raw):
        if isinstance(item, dict):
            item = [item.get("from"), item.get("guard"), item.get("to")]
        if not isinstance(item, list) or len(item) != 3:
            raise ProbeDefinitionError(f"transitions[{i}]: expected [from, guard, to]")
        src, guard_text, dst = item
        if not isinstance(guard_text, str):
            guard_text = str(guard_text).lower() if isinstance(guard_text, bool) else None
        if guard_text is None:
            raise ProbeDefinitionError(f"transitions[{i}]: guard must be a string")
        try:
            guard = G.parse_guard(guard_text)
        except G.GuardSyntaxError as exc:
            raise ProbeDefinitionError(f"transitions[{i}]: {exc}") from None
        transitions.append(Transition(str(src), guard, str(dst)))

    return make_probe(name, states, error_state, transitions, initial, rs)


def dump_probe(p: ProbeDef) -> str:
    if isinstance(p.initial, Fixed):
        initial = {"fixed": p.initial.state}
    else:
        initial = {"from_first_observation": p.initial.as_dict()}
    doc = {
        "name": p.name,
        "states": list(p.states),
        "error_state": p.error_state,
        "initial": initial,
        "transitions": [[t.source, str(t.guard), t.target] for t in p.transitions],
    }
    return yaml.safe_dump(doc, sort_keys=False, width=120)
