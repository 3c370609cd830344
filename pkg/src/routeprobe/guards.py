"""Boolean guard expressions over region membership.

Grammar, loosest binding first::

    expr    := or
    or      := and ("||" and)*
    and     := unary ("&&" unary)*
    unary   := "!" unary | atom
    atom    := "true" | "false" | "in(" name ")" | "(" expr ")"

``name`` may be bare or double-quoted. ``in(r)`` holds when the point lies
strictly inside region ``r``.

Because the regions of a :class:`~routeprobe.geometry.RegionSet` are
disjoint, any point makes at most one ``in`` atom true. A guard's value at a
point is therefore fixed by which region (if any) contains it, and
:func:`truth_set` captures the whole guard as the set of such outcomes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .geometry import GeoPoint, RegionSet


class GuardSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int) -> None:
        super().__init__(f"{message} at column {pos + 1} in {text!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class In:
    region: str

    def __str__(self) -> str:
        return f'in("{self.region}")'


@dataclass(frozen=True)
class Not:
    operand: "Guard"

    def __str__(self) -> str:
        inner = str(self.operand)
        if isinstance(self.operand, (And, Or)):
            inner = f"({inner})"
        return f"!{inner}"


@dataclass(frozen=True)
class And:
    operands: tuple["Guard", ...]

    def __str__(self) -> str:
        return " && ".join(
            f"({o})" if isinstance(o, (And, Or)) else str(o) for o in self.operands
        )


@dataclass(frozen=True)
class Or:
    operands: tuple["Guard", ...]

    def __str__(self) -> str:
        return " || ".join(
            f"({o})" if isinstance(o, Or) else str(o) for o in self.operands
        )


Guard = Union[Const, In, Not, And, Or]

TRUE = Const(True)
FALSE = Const(False)

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<op>&&|\|\||!|\(|\))
      | (?P<in>in\s*\()
      | (?P<str>"[^"]*")
      | (?P<word>[A-Za-z_][A-Za-z0-9_\-]*)
    )""",
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            start = len(text) - len(text[pos:].lstrip())
            raise GuardSyntaxError("unexpected character", text, start)
        kind = m.lastgroup
        value = m.group(kind)
        tokens.append((kind, value, m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, value, pos = self.take()
        if kind != "op" or value != op:
            raise GuardSyntaxError(f"expected {op!r}", self.text, pos)

    def parse(self) -> Guard:
        g = self.parse_or()
        kind, _, pos = self.peek()
        if kind != "end":
            raise GuardSyntaxError("unexpected trailing input", self.text, pos)
        return g

    def parse_or(self) -> Guard:
        items = [self.parse_and()]
        while self.peek()[:2] == ("op", "||"):
            self.take()
            items.append(self.parse_and())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def parse_and(self) -> Guard:
        items = [self.parse_unary()]
        while self.peek()[:2] == ("op", "&&"):
            self.take()
            items.append(self.parse_unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def parse_unary(self) -> Guard:
        if self.peek()[:2] == ("op", "!"):
            self.take()
            return Not(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> Guard:
        kind, value, pos = self.take()
        if kind == "op" and value == "(":
            g = self.parse_or()
            self.expect_op(")")
            return g
        if kind == "in":
            nkind, name, npos = self.take()
            if nkind == "str":
                name = name[1:-1]
            elif nkind != "word":
                raise GuardSyntaxError("expected a region name", self.text, npos)
            if not name:
                raise GuardSyntaxError("empty region name", self.text, npos)
            self.expect_op(")")
            return In(name)
        if kind == "word" and value in ("true", "false"):
            return Const(value == "true")
        if kind == "end":
            raise GuardSyntaxError("unexpected end of guard", self.text, pos)
        raise GuardSyntaxError(f"unexpected token {value!r}", self.text, pos)


def parse_guard(text: str) -> Guard:
    return _Parser(text).parse()


def regions_of(g: Guard) -> set[str]:
    if isinstance(g, In):
        return {g.region}
    if isinstance(g, Not):
        return regions_of(g.operand)
    if isinstance(g, (And, Or)):
        out: set[str] = set()
        for o in g.operands:
            out |= regions_of(o)
        return out
    return set()


def holds_in(g: Guard, region: str | None) -> bool:
    """Value of ``g`` at a point whose containing region is ``region``."""
    if isinstance(g, Const):
        return g.value
    if isinstance(g, In):
        return g.region == region
    if isinstance(g, Not):
        return not holds_in(g.operand, region)
    if isinstance(g, And):
        return all(holds_in(o, region) for o in g.operands)
    return any(holds_in(o, region) for o in g.operands)


def evaluate_guard(g: Guard, p: GeoPoint, rs: RegionSet) -> bool:
    if isinstance(g, Const):
        return g.value
    if isinstance(g, In):
        return rs[g.region].contains(p)
    if isinstance(g, Not):
        return not evaluate_guard(g.operand, p, rs)
    if isinstance(g, And):
        return all(evaluate_guard(o, p, rs) for o in g.operands)
    return any(evaluate_guard(o, p, rs) for o in g.operands)


def truth_set(g: Guard, rs: RegionSet) -> frozenset[str | None]:
    """Region outcomes (None meaning outside every region) on which ``g`` holds.

    Two guards over the same RegionSet agree on every point iff their truth
    sets are equal, and are jointly satisfiable iff the sets intersect.
    """
    return frozenset(c for c in (*rs.names, None) if holds_in(g, c))
