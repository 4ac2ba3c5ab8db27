"""Crowd knowledge base: three fuzzy sets of annotated quads.

The positive set holds facts the crowd asserted to exist (constant objects),
the negative set holds subject/predicate pairs the crowd declared valueless
(existential objects), and the tilde set holds pairs the crowd could not
judge. Every quad carries a membership degree in [0, 1]. Disagreement and
uncertainty per (subject, predicate) are derived from the set averages.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .rdf import BLANK, Term, term_from_text, term_to_text

PLUS = "plus"
MINUS = "minus"
TILDE = "tilde"
SET_TAGS = (PLUS, MINUS, TILDE)

# Existential objects ("some value, unnamed") are the fixed blank node _:o.
EXISTENTIAL = Term(BLANK, "o")

_FORMAT_HEADER = "crowd-kb v1"


class KBShapeError(ValueError):
    pass


def is_existential(t: Term) -> bool:
    return t.kind == BLANK


@dataclass(frozen=True)
class CrowdQuad:
    subject: Term
    predicate: str
    object: Term
    membership: float

    def __post_init__(self):
        if not 0.0 <= self.membership <= 1.0:
            raise ValueError(f"membership degree out of range: {self.membership}")


class CrowdKB:
    """Quads keyed by (subject, predicate, object) per set; re-inserting a key
    replaces its membership degree (each insertion is already an aggregation
    over a full judgment quota)."""

    def __init__(self):
        self._sets: dict[str, dict[tuple, CrowdQuad]] = {
            PLUS: {}, MINUS: {}, TILDE: {},
        }

    def insert(self, set_tag: str, quad: CrowdQuad) -> None:
        if set_tag not in self._sets:
            raise KBShapeError(f"unknown KB set {set_tag!r}")
        if set_tag == PLUS and is_existential(quad.object):
            raise KBShapeError("positive quads need a constant object")
        if set_tag == MINUS and not is_existential(quad.object):
            raise KBShapeError("negative quads need an existential object")
        key = (quad.subject, quad.predicate, quad.object)
        self._sets[set_tag][key] = quad

    def quads(self, set_tag: str, s: Term | None = None,
              p: str | None = None) -> list[CrowdQuad]:
        out = []
        for quad in self._sets[set_tag].values():
            if s is not None and quad.subject != s:
                continue
            if p is not None and quad.predicate != p:
                continue
            out.append(quad)
        return out

    def objects(self, set_tag: str, s: Term, p: str) -> list[Term]:
        return [q.object for q in self.quads(set_tag, s, p)]

    def size(self, set_tag: str) -> int:
        return len(self._sets[set_tag])

    def __eq__(self, other) -> bool:
        if not isinstance(other, CrowdKB):
            return NotImplemented
        return all(set(self._sets[t].items()) == set(other._sets[t].items())
                   for t in SET_TAGS)

    def _avg(self, set_tag: str, s: Term, p: str) -> float:
        ms = [q.membership for q in self.quads(set_tag, s, p)]
        return sum(ms) / len(ms) if ms else 0.0

    def disagreement(self, s: Term, p: str) -> float:
        """1 minus the gap between the positive and negative set averages for
        (s, p); averages over empty sets are 0, so no knowledge means 1."""
        return 1.0 - abs(self._avg(PLUS, s, p) - self._avg(MINUS, s, p))

    def uncertainty(self, s: Term, p: str) -> float:
        """Average tilde membership for (s, p); 0 when the crowd never
        declared itself unknowledgeable about the pair."""
        return self._avg(TILDE, s, p)


def save_kb(kb: CrowdKB, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(_FORMAT_HEADER + "\n")
        writer = csv.writer(f)
        for tag in SET_TAGS:
            for quad in kb.quads(tag):
                writer.writerow([tag, term_to_text(quad.subject), quad.predicate,
                                 term_to_text(quad.object), repr(quad.membership)])


def load_kb(path: str | Path) -> CrowdKB:
    kb = CrowdKB()
    with open(path, encoding="utf-8", newline="") as f:
        header = f.readline().strip()
        if header != _FORMAT_HEADER:
            raise ValueError(f"unsupported KB file header: {header!r}")
        for row in csv.reader(f):
            if not row:
                continue
            tag, s, p, o, m = row
            kb.insert(tag, CrowdQuad(term_from_text(s), p, term_from_text(o), float(m)))
    return kb
