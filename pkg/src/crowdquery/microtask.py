"""Human task construction and judgment aggregation.

Each queued triple becomes one question pair: an existence question ("Does X
have a Y?") and, when the answer is yes, a value question ("What is the Y of
X?"). Questions are packed into tasks of at most four. Judgments aggregate by
majority verdict; the stored membership degree averages the winning
judgments' confidence with their normalized familiarity.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass

from .kb import EXISTENTIAL, MINUS, PLUS, TILDE, CrowdKB, CrowdQuad
from .rdf import Dataset, Term, literal

YES = "yes"
NO = "no"
NOT_SURE = "not_sure"
VERDICTS = (YES, NO, NOT_SURE)

# Two-way ties prefer checkable positive facts; a three-way tie is unresolvable.
_VERDICT_RANK = {YES: 0, NO: 1, NOT_SURE: 2}
_VERDICT_TO_SET = {YES: PLUS, NO: MINUS, NOT_SURE: TILDE}


class AggregationError(ValueError):
    pass


@dataclass(frozen=True)
class Question:
    id: str
    subject: Term
    predicate: str
    subject_label: str
    predicate_label: str
    existence_text: str
    value_text: str


@dataclass(frozen=True)
class Microtask:
    id: str
    questions: tuple[Question, ...]
    status: str = "pending"

    def __post_init__(self):
        if not 1 <= len(self.questions) <= 4:
            raise ValueError("a microtask holds between 1 and 4 questions")


@dataclass(frozen=True)
class Judgment:
    question_id: str
    verdict: str
    value: str | None = None
    confidence: float = 1.0
    familiarity: int = 7

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == YES and not (self.value or "").strip():
            raise ValueError("a yes judgment needs a value")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be in [0, 1]")
        if not 1 <= self.familiarity <= 7:
            raise ValueError("familiarity is scored from 1 to 7")


@dataclass(frozen=True)
class AggregatedAnswer:
    question_id: str
    target_set: str
    object: Term
    membership: float
    judgment_count: int


def question_id(subject: Term, predicate: str) -> str:
    digest = hashlib.sha1(f"{subject.kind}|{subject.value}|{predicate}".encode())
    return "q" + digest.hexdigest()[:10]


def make_question(subject: Term, predicate: str, d: Dataset) -> Question:
    subject_label = d.label_of(subject)
    predicate_label = d.label_of(Term("iri", predicate))
    return Question(
        id=question_id(subject, predicate),
        subject=subject,
        predicate=predicate,
        subject_label=subject_label,
        predicate_label=predicate_label,
        existence_text=f"Does {subject_label} have a {predicate_label}?",
        value_text=f"What is the {predicate_label} of {subject_label}?",
    )


def build_tasks(triples: list[tuple[Term, str, str]], d: Dataset,
                max_per_task: int = 4) -> list[Microtask]:
    """One question per (subject, predicate, object-variable) triple, packed
    greedily in input order. Task granularity is capped at four questions, so
    larger max_per_task values are clamped."""
    if max_per_task < 1:
        raise ValueError("max_per_task must be at least 1")
    per_task = min(max_per_task, 4)
    questions = [make_question(s, p, d) for s, p, _ in triples]
    tasks = []
    for start in range(0, len(questions), per_task):
        chunk = tuple(questions[start:start + per_task])
        digest = hashlib.sha1("|".join(q.id for q in chunk).encode())
        tasks.append(Microtask(id="t" + digest.hexdigest()[:10], questions=chunk))
    return tasks


def normalized_familiarity(raw: int) -> float:
    """Affine map of the 1..7 scale onto [0, 1]."""
    return (raw - 1) / 6


def aggregate_judgments(judgments: list[Judgment], quota: int = 3) -> AggregatedAnswer:
    """Majority verdict wins; the membership degree averages confidence and
    normalized familiarity over the winning judgments only, so dissenters do
    not dilute the stored fact's annotation."""
    if len(judgments) < quota:
        raise AggregationError(
            f"need at least {quota} judgments, got {len(judgments)}")
    question_ids = {j.question_id for j in judgments}
    if len(question_ids) != 1:
        raise AggregationError("judgments span multiple questions")

    counts = Counter(j.verdict for j in judgments)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], _VERDICT_RANK[kv[0]]))
    if len(ranked) == 3 and ranked[0][1] == ranked[1][1] == ranked[2][1]:
        raise AggregationError("three-way verdict tie")
    verdict = ranked[0][0]

    winners = [j for j in judgments if j.verdict == verdict]
    # fsum keeps the averages independent of judgment order
    confidence = math.fsum(j.confidence for j in winners) / len(winners)
    familiarity = math.fsum(normalized_familiarity(j.familiarity)
                            for j in winners) / len(winners)
    membership = (confidence + familiarity) / 2.0

    if verdict == YES:
        value_counts = Counter((j.value or "").strip() for j in winners)
        top = max(value_counts.values())
        value = min(v for v, n in value_counts.items() if n == top)
        obj = literal(value)
    else:
        obj = EXISTENTIAL
    return AggregatedAnswer(
        question_id=judgments[0].question_id,
        target_set=_VERDICT_TO_SET[verdict],
        object=obj,
        membership=membership,
        judgment_count=len(judgments),
    )


def resolve_value(text: str, d: Dataset) -> Term:
    """Map free worker text onto an IRI when it names something in the data
    set (exact label first, then local name); otherwise keep it a literal so
    nothing the crowd said is lost."""
    found = d.find_by_label(text)
    if found is not None:
        return found
    found = d.find_by_local_name(text)
    if found is not None:
        return found
    return literal(text)


def fold_into_kb(answer: AggregatedAnswer, question: Question, kb: CrowdKB,
                 d: Dataset) -> CrowdQuad:
    """Insert the aggregated answer as a quad in its target set and return the
    stored quad (with the worker's free text resolved against the data set)."""
    obj = answer.object
    if answer.target_set == PLUS and obj.is_literal():
        obj = resolve_value(obj.value, d)
    quad = CrowdQuad(
        subject=question.subject,
        predicate=question.predicate,
        object=obj,
        membership=answer.membership,
    )
    kb.insert(answer.target_set, quad)
    return quad
