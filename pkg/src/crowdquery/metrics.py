"""Precision, recall and F-measure of crowd answers against a gold standard.

A gold standard maps (subject, predicate) to the set of expected objects, or
to an explicit no-value marker when the pair genuinely has none. A correct
"no" answer counts as a true positive on both sides.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

from .kb import MINUS, PLUS
from .rdf import Term, term_from_text, term_to_text

NONE_TOKEN = "NONE"


@dataclass(frozen=True)
class NoValue:
    pass


NO_VALUE = NoValue()

Answer = tuple[Term, str, object]  # (subject, predicate, object-or-NO_VALUE)


@dataclass
class GoldStandard:
    entries: dict[tuple[Term, str], set] = field(default_factory=dict)

    def add(self, subject: Term, predicate: str, obj) -> None:
        self.entries.setdefault((subject, predicate), set()).add(obj)

    def answers(self) -> set[Answer]:
        return {(s, p, o) for (s, p), objs in self.entries.items() for o in objs}

    def __len__(self) -> int:
        return len(self.entries)


def load_gold(path: str | Path) -> GoldStandard:
    gold = GoldStandard()
    with open(path, encoding="utf-8", newline="") as f:
        for row in csv.reader(f):
            if not row or row[0].startswith("#"):
                continue
            s, p, o = row
            obj = NO_VALUE if o.strip() == NONE_TOKEN else term_from_text(o)
            gold.add(term_from_text(s), p, obj)
    return gold


def save_gold(gold: GoldStandard, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        for (s, p), objs in gold.entries.items():
            for o in objs:
                text = NONE_TOKEN if isinstance(o, NoValue) else term_to_text(o)
                writer.writerow([term_to_text(s), p, text])


def collected_answer_set(collected) -> set[Answer]:
    """Positive answers contribute their object, negative answers the
    no-value marker; tilde answers assert nothing and are skipped."""
    out: set[Answer] = set()
    for item in collected:
        if item.set_tag == PLUS:
            out.add((item.question.subject, item.question.predicate,
                     item.quad.object))
        elif item.set_tag == MINUS:
            out.add((item.question.subject, item.question.predicate, NO_VALUE))
    return out


def precision(crowd: set[Answer], gold: GoldStandard) -> float | None:
    """Fraction of crowd answers present in the gold standard; None when the
    crowd produced nothing (undefined)."""
    if not crowd:
        return None
    return len(crowd & gold.answers()) / len(crowd)


def recall(crowd: set[Answer], gold: GoldStandard) -> float:
    gold_answers = gold.answers()
    if not gold_answers:
        raise ValueError("recall needs a non-empty gold standard")
    return len(crowd & gold_answers) / len(gold_answers)


def f_measure(p: float, r: float) -> float:
    if p + r <= 0:
        return 0.0
    return 2.0 * p * r / (p + r)
