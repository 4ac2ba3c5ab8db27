"""Splitting a query into machine-answerable and crowd-answerable stars.

A pattern is crowd-answerable when its predicate is a constant and its object
is a variable: that is the shape a human can be asked about ("does S have a
P?" / "what is the P of S?"). Everything else runs against the data set.
Within each side, patterns sharing the same subject position form one
star-shaped sub-query.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .rdf import Term
from .sparql import BGPQuery, PatternTerm, TriplePattern, Variable

DATA = "data"
CROWD = "crowd"


@dataclass
class SubQuery:
    patterns: list[TriplePattern]
    anchor: PatternTerm
    kind: str

    def variables(self) -> set[str]:
        out: set[str] = set()
        for p in self.patterns:
            out |= p.variables()
        return out

    def min_ordinal(self) -> int:
        return min(p.ordinal for p in self.patterns)


@dataclass
class Decomposition:
    data: list[SubQuery] = field(default_factory=list)
    crowd: list[SubQuery] = field(default_factory=list)

    def all_subqueries(self) -> list[SubQuery]:
        return self.data + self.crowd


def partition(q: BGPQuery) -> tuple[list[TriplePattern], list[TriplePattern]]:
    """Crowd side: constant predicate and variable object. Variable-predicate
    patterns stay on the data side (a crowd question needs a named predicate),
    as do constant-object patterns (nothing is missing to ask about)."""
    data_side: list[TriplePattern] = []
    crowd_side: list[TriplePattern] = []
    for p in q.patterns:
        if isinstance(p.predicate, Term) and isinstance(p.object, Variable):
            crowd_side.append(p)
        else:
            data_side.append(p)
    return data_side, crowd_side


def group_stars(patterns: list[TriplePattern], kind: str) -> list[SubQuery]:
    """Group by the subject position value (same variable or same constant);
    group order follows the smallest ordinal in each group."""
    groups: dict[PatternTerm, list[TriplePattern]] = {}
    for p in sorted(patterns, key=lambda p: p.ordinal):
        groups.setdefault(p.subject, []).append(p)
    stars = [SubQuery(ps, anchor, kind) for anchor, ps in groups.items()]
    stars.sort(key=lambda sq: sq.min_ordinal())
    return stars


def decompose(q: BGPQuery) -> Decomposition:
    data_side, crowd_side = partition(q)
    return Decomposition(
        data=group_stars(data_side, DATA),
        crowd=group_stars(crowd_side, CROWD),
    )
