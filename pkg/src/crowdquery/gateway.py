"""Transports between the executor and a crowd.

Three in-process variants: a simulated crowd drawing seeded judgments against
an oracle data set, a replay gateway serving answers recorded in a file, and
a null gateway that never answers (useful to exercise the timeout/partial
path). The live HTTP gateway lives in httpd.py.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .kb import SET_TAGS
from .microtask import (NO, NOT_SURE, YES, AggregatedAnswer, Judgment,
                        Microtask, Question, aggregate_judgments)
from .rdf import Dataset, Term, term_from_text, term_to_text


class CrowdGateway(Protocol):
    def submit(self, tasks: list[Microtask]) -> list[str]: ...

    def collect(self, ids: list[str],
                timeout: float | None = None) -> list[tuple[Question, AggregatedAnswer]]: ...


class NullGateway:
    """Accepts tasks and never answers them."""

    def __init__(self):
        self._tasks: dict[str, Microtask] = {}

    def submit(self, tasks):
        for t in tasks:
            self._tasks[t.id] = t
        return [t.id for t in tasks]

    def collect(self, ids, timeout=None):
        return []


@dataclass
class SimCrowdConfig:
    oracle: Dataset
    error_rate: float = 0.0
    not_sure_rate: float = 0.0
    confidence_law: tuple[float, float] = (0.93, 0.07)  # (mean, spread), uniform
    familiarity_weights: tuple[float, ...] = (1, 1, 1, 1, 1, 1, 1)
    seed: int = 0
    judgments_per_question: int = 3

    def __post_init__(self):
        if self.error_rate + self.not_sure_rate > 1.0:
            raise ValueError("error_rate + not_sure_rate must not exceed 1")
        if len(self.familiarity_weights) != 7:
            raise ValueError("familiarity_weights needs one weight per score 1..7")


def sim_answer(cfg: SimCrowdConfig, question: Question) -> list[Judgment]:
    """Seeded judgments for one question: each draw is fully determined by
    (seed, question id, draw index). Truth comes from the oracle; errors flip
    the verdict, not-sure draws land in the tilde set."""
    gold = sorted(cfg.oracle.objects(question.subject, question.predicate),
                  key=lambda t: (t.kind, t.value))
    mean, spread = cfg.confidence_law
    judgments = []
    for i in range(cfg.judgments_per_question):
        rng = random.Random(f"{cfg.seed}|{question.id}|{i}")
        roll = rng.random()
        confidence = min(1.0, max(0.0, rng.uniform(mean - spread, mean + spread)))
        familiarity = rng.choices(range(1, 8), weights=cfg.familiarity_weights)[0]
        if roll < cfg.not_sure_rate:
            verdict, value = NOT_SURE, None
        elif roll < cfg.not_sure_rate + cfg.error_rate:
            if gold:
                verdict, value = NO, None
            else:
                verdict, value = YES, f"bogus {question.id} {i}"
        else:
            if gold:
                verdict = YES
                value = cfg.oracle.label_of(rng.choice(gold))
            else:
                verdict, value = NO, None
        judgments.append(Judgment(
            question_id=question.id, verdict=verdict, value=value,
            confidence=confidence, familiarity=familiarity))
    return judgments


class SimGateway:
    """Simulated workforce: aggregation happens here, at quota, mirroring a
    platform that reports aggregated results back."""

    def __init__(self, cfg: SimCrowdConfig):
        self.cfg = cfg
        self._tasks: dict[str, Microtask] = {}

    def submit(self, tasks):
        for t in tasks:
            self._tasks[t.id] = t
        return [t.id for t in tasks]

    def collect(self, ids, timeout=None):
        out = []
        for task_id in ids:
            task = self._tasks.get(task_id)
            if task is None:
                continue
            for question in task.questions:
                judgments = sim_answer(self.cfg, question)
                answer = aggregate_judgments(
                    judgments, quota=self.cfg.judgments_per_question)
                out.append((question, answer))
        return out


@dataclass(frozen=True)
class ReplayRecord:
    subject: Term
    predicate: str
    target_set: str
    object: Term
    membership: float


def save_replay(records: list[ReplayRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        for r in records:
            writer.writerow([term_to_text(r.subject), r.predicate, r.target_set,
                             term_to_text(r.object), repr(r.membership)])


def load_replay(path: str | Path) -> list[ReplayRecord]:
    records = []
    with open(path, encoding="utf-8", newline="") as f:
        for row in csv.reader(f):
            if not row:
                continue
            s, p, tag, o, m = row
            if tag not in SET_TAGS:
                raise ValueError(f"unknown set tag {tag!r} in replay file")
            records.append(ReplayRecord(term_from_text(s), p, tag,
                                        term_from_text(o), float(m)))
    return records


class ReplayGateway:
    """Serves aggregated answers recorded in an earlier session, keyed by
    (subject, predicate); questions without a recording stay unanswered."""

    def __init__(self, path: str | Path, quota: int = 3):
        self._by_key = {(r.subject, r.predicate): r for r in load_replay(path)}
        self._tasks: dict[str, Microtask] = {}
        self.quota = quota

    def submit(self, tasks):
        for t in tasks:
            self._tasks[t.id] = t
        return [t.id for t in tasks]

    def collect(self, ids, timeout=None):
        out = []
        for task_id in ids:
            task = self._tasks.get(task_id)
            if task is None:
                continue
            for question in task.questions:
                record = self._by_key.get((question.subject, question.predicate))
                if record is None:
                    continue
                out.append((question, AggregatedAnswer(
                    question_id=question.id,
                    target_set=record.target_set,
                    object=record.object,
                    membership=record.membership,
                    judgment_count=self.quota,
                )))
        return out
