"""Completeness model over a Dataset.

Per-subject predicate multiplicity, per-class aggregated multiplicity
(ceiling of a configurable aggregate over the positive multiplicities of the
class instances), and the completeness ratio of a subject against the best
aggregate among its classes. The same ratio is also computed against the
crowd knowledge base.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

from .kb import PLUS, CrowdKB
from .rdf import Dataset, Term

AGGREGATIONS = {
    "median": statistics.median,
    "mean": statistics.mean,
    "max": max,
}


def multiplicity(d: Dataset, s: Term, p: str) -> int:
    return len(d.objects(s, p))


def aggregated_multiplicity(d: Dataset, c: str, p: str, agg: str = "median") -> int:
    """Ceiling of the aggregate over instances of c that have at least one
    p-value; 0 when no instance has any."""
    if agg not in AGGREGATIONS:
        raise ValueError(f"unknown aggregation {agg!r}")
    key = (c, p, agg)
    cached = d.am_cache.get(key)
    if cached is not None:
        return cached
    counts = [n for s in d.subjects_of_class(c) if (n := multiplicity(d, s, p)) > 0]
    value = math.ceil(AGGREGATIONS[agg](counts)) if counts else 0
    d.am_cache[key] = value
    return value


def best_class_multiplicity(d: Dataset, s: Term, p: str, agg: str = "median") -> int:
    classes = d.classes_of(s)
    if not classes:
        return 0
    return max(aggregated_multiplicity(d, c, p, agg) for c in classes)


def dataset_completeness(d: Dataset, s: Term, p: str, agg: str = "median") -> float:
    """Multiplicity of s over the best class aggregate; 1 when no aggregate
    exists. May exceed 1 for subjects richer than their class aggregate."""
    am = best_class_multiplicity(d, s, p, agg)
    if am == 0:
        return 1.0
    return multiplicity(d, s, p) / am


def kb_completeness(kb: CrowdKB, d: Dataset, s: Term, p: str,
                    agg: str = "median", sets: tuple[str, ...] = (PLUS,)) -> float:
    """Like dataset_completeness but counting distinct quad objects for (s, p)
    across the chosen KB sets. The execution gate uses the positive set only."""
    if not sets:
        raise ValueError("at least one KB set required")
    am = best_class_multiplicity(d, s, p, agg)
    if am == 0:
        return 1.0
    objs: set[Term] = set()
    for tag in sets:
        objs.update(kb.objects(tag, s, p))
    return len(objs) / am


@dataclass(frozen=True)
class CompletenessReport:
    subject: Term
    predicate: str
    data_multiplicity: int
    best_class_multiplicity: int
    data_completeness: float
    kb_plus_completeness: float


def profile(d: Dataset, kb: CrowdKB | None = None, class_filter: str | None = None,
            predicate_filter: str | None = None, agg: str = "median") -> list[CompletenessReport]:
    """Completeness rows for every (subject, predicate) combination in scope."""
    kb = kb or CrowdKB()
    subjects = d.subjects_of_class(class_filter) if class_filter else d.subjects()
    predicates = [predicate_filter] if predicate_filter else d.predicates()
    rows = []
    for s in subjects:
        for p in predicates:
            rows.append(CompletenessReport(
                subject=s,
                predicate=p,
                data_multiplicity=multiplicity(d, s, p),
                best_class_multiplicity=best_class_multiplicity(d, s, p, agg),
                data_completeness=dataset_completeness(d, s, p, agg),
                kb_plus_completeness=kb_completeness(kb, d, s, p, agg),
            ))
    return rows
