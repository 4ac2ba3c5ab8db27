"""Query execution over the data set and the crowd knowledge base.

The plan is left-linear: the most selective data star first, then
alternating crowd/data stars that share a variable with what is already
planned, with disconnected stars (Cartesian products) appended at the end.
Each crowd pattern instantiation passes through a gate: it is sent to human
workers only when the data set plus the positive KB look incomplete for the
(subject, predicate) pair and the crowdsourcing probability clears the
configured threshold. Answers are folded into the KB before the pattern's
bindings are joined in, so the positive KB contributes objects alongside the
data set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .decompose import Decomposition, SubQuery, decompose
from .kb import PLUS, CrowdKB, CrowdQuad, is_existential
from .microtask import (AggregatedAnswer, Microtask, Question, build_tasks,
                        fold_into_kb)
from .quality import dataset_completeness, kb_completeness
from .rdf import Dataset, Term, iri
from .sparql import BGPQuery, STAR, TriplePattern, Variable


@dataclass(frozen=True)
class SolutionMapping:
    """Immutable variable bindings, stored sorted for hashing."""

    bindings: tuple[tuple[str, Term], ...] = ()

    @classmethod
    def from_dict(cls, d: dict[str, Term]) -> "SolutionMapping":
        return cls(tuple(sorted(d.items())))

    def as_dict(self) -> dict[str, Term]:
        return dict(self.bindings)

    def get(self, name: str) -> Term | None:
        for var, term in self.bindings:
            if var == name:
                return term
        return None

    def variables(self) -> set[str]:
        return {var for var, _ in self.bindings}

    def merged(self, other: "SolutionMapping") -> Optional["SolutionMapping"]:
        """Union of two mappings, or None when they disagree on a shared
        variable (the compatible-join rule)."""
        combined = self.as_dict()
        for var, term in other.bindings:
            bound = combined.get(var)
            if bound is None:
                combined[var] = term
            elif bound != term:
                return None
        return SolutionMapping.from_dict(combined)

    def projected(self, names: Iterable[str]) -> "SolutionMapping":
        wanted = set(names)
        return SolutionMapping(tuple((v, t) for v, t in self.bindings if v in wanted))


EMPTY_MAPPING = SolutionMapping()


class SolutionSet:
    """A schema plus a deduplicated, insertion-ordered collection of mappings
    binding exactly the schema variables."""

    def __init__(self, schema: Iterable[str] = (), mappings: Iterable[SolutionMapping] = ()):
        self.schema: frozenset[str] = frozenset(schema)
        self._mappings: dict[SolutionMapping, None] = {}
        for m in mappings:
            self.add(m)

    @classmethod
    def identity(cls) -> "SolutionSet":
        """The join identity: empty schema, a single empty mapping."""
        return cls((), (EMPTY_MAPPING,))

    def add(self, m: SolutionMapping) -> None:
        if m.variables() != self.schema:
            raise ValueError(f"mapping binds {m.variables()}, schema is {set(self.schema)}")
        self._mappings.setdefault(m, None)

    @property
    def mappings(self) -> list[SolutionMapping]:
        return list(self._mappings)

    def __len__(self) -> int:
        return len(self._mappings)

    def __iter__(self):
        return iter(self._mappings)

    def __contains__(self, m: SolutionMapping) -> bool:
        return m in self._mappings

    def as_set(self) -> frozenset[SolutionMapping]:
        return frozenset(self._mappings)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SolutionSet):
            return NotImplemented
        return self.schema == other.schema and self.as_set() == other.as_set()

    def __repr__(self) -> str:
        return f"SolutionSet(schema={sorted(self.schema)}, n={len(self)})"


def join(a: SolutionSet, b: SolutionSet) -> SolutionSet:
    """All unions of compatible mapping pairs; a Cartesian product when the
    schemas are disjoint."""
    out = SolutionSet(a.schema | b.schema)
    for ma in a:
        for mb in b:
            merged = ma.merged(mb)
            if merged is not None:
                out.add(merged)
    return out


def project(ss: SolutionSet, names: Iterable[str]) -> SolutionSet:
    names = [n for n in names if n in ss.schema]
    out = SolutionSet(names)
    for m in ss:
        out.add(m.projected(names))
    return out


def _resolve(position, mapping: SolutionMapping):
    """Variable positions become their binding (or stay variable); constants
    pass through."""
    if isinstance(position, Variable):
        bound = mapping.get(position.name)
        return bound if bound is not None else position
    return position


def apply_mapping(pattern: TriplePattern, mapping: SolutionMapping) -> TriplePattern:
    return TriplePattern(
        _resolve(pattern.subject, mapping),
        _resolve(pattern.predicate, mapping),
        _resolve(pattern.object, mapping),
        pattern.ordinal,
    )


def _unify(pattern: TriplePattern, s: Term, p: Term, o: Term,
           base: SolutionMapping) -> Optional[SolutionMapping]:
    """Extend base so that pattern matches the concrete triple (s, p, o);
    None when a constant disagrees or a repeated variable conflicts."""
    bound = base.as_dict()
    for position, value in ((pattern.subject, s), (pattern.predicate, p),
                            (pattern.object, o)):
        if isinstance(position, Variable):
            prior = bound.get(position.name)
            if prior is None:
                bound[position.name] = value
            elif prior != value:
                return None
        elif position != value:
            return None
    return SolutionMapping.from_dict(bound)


def _pattern_solutions(d: Dataset, pattern: TriplePattern,
                       base: SolutionMapping) -> list[SolutionMapping]:
    resolved = apply_mapping(pattern, base)
    s = resolved.subject if isinstance(resolved.subject, Term) else None
    p = resolved.predicate if isinstance(resolved.predicate, Term) else None
    o = resolved.object if isinstance(resolved.object, Term) else None
    out = []
    for t in d.match(s, p, o):
        extended = _unify(pattern, t.subject, t.predicate, t.object, base)
        if extended is not None:
            out.append(extended)
    return out


def evaluate_bgp(d: Dataset, patterns: SubQuery | Sequence[TriplePattern]) -> SolutionSet:
    """Standard BGP semantics: every mapping over the patterns' variables
    whose substitution yields only stored triples."""
    if isinstance(patterns, SubQuery):
        patterns = patterns.patterns
    schema: set[str] = set()
    for p in patterns:
        schema |= p.variables()
    partial = [EMPTY_MAPPING]
    for pattern in patterns:
        partial = [m for base in partial for m in _pattern_solutions(d, pattern, base)]
        if not partial:
            break
    out = SolutionSet(schema)
    for m in partial:
        out.add(m)
    return out


def selectivity(sq: SubQuery, d: Dataset) -> float:
    """1 / (1 + result cardinality); exact counts keep plans deterministic."""
    return 1.0 / (1.0 + len(evaluate_bgp(d, sq)))


def build_plan(dec: Decomposition, d: Dataset) -> list[SubQuery]:
    """Left-linear order: seed with the most selective data star, then
    alternate crowd/data stars sharing a variable with the plan so far;
    disconnected leftovers go at the end, data before crowd, by ordinal."""
    data = list(dec.data)
    crowd = list(dec.crowd)
    scores = {id(sq): selectivity(sq, d) for sq in data}

    def best_data(candidates):
        return max(candidates, key=lambda sq: (scores[id(sq)], -sq.min_ordinal()))

    plan: list[SubQuery] = []
    plan_vars: set[str] = set()
    if data:
        seed = best_data(data)
        data.remove(seed)
    elif crowd:
        seed = min(crowd, key=lambda sq: sq.min_ordinal())
        crowd.remove(seed)
    else:
        return []
    plan.append(seed)
    plan_vars |= seed.variables()

    while data or crowd:
        progressed = False
        sharing_crowd = [sq for sq in crowd if sq.variables() & plan_vars]
        if sharing_crowd:
            pick = min(sharing_crowd, key=lambda sq: sq.min_ordinal())
            crowd.remove(pick)
            plan.append(pick)
            plan_vars |= pick.variables()
            progressed = True
        sharing_data = [sq for sq in data if sq.variables() & plan_vars]
        if sharing_data:
            pick = best_data(sharing_data)
            data.remove(pick)
            plan.append(pick)
            plan_vars |= pick.variables()
            progressed = True
        if progressed:
            continue
        # Nothing shares a variable: start a Cartesian product, data before
        # crowd in ordinal order, then resume preferring connected stars.
        source = data if data else crowd
        pick = min(source, key=lambda sq: sq.min_ordinal())
        source.remove(pick)
        plan.append(pick)
        plan_vars |= pick.variables()
    return plan


def crowd_probability(completeness: float, disagreement: float,
                      uncertainty: float, alpha: float) -> float:
    """Gate score: alpha weighs missing completeness against the minimum-norm
    combination of disagreement and confidence-of-knowledge. Unclamped; gated
    calls always see completeness < 1 and stay within [0, 1]."""
    return (alpha * (1.0 - completeness)
            + (1.0 - alpha) * min(disagreement, 1.0 - uncertainty))


@dataclass
class InstantiatedSubQuery:
    binding: SolutionMapping
    patterns: list[TriplePattern]


def instantiate(sq: SubQuery, omega: SolutionSet) -> list[InstantiatedSubQuery]:
    """One bound copy of the sub-query per distinct relevant binding in omega;
    the sub-query itself when omega shares no variable with it."""
    shared = sq.variables() & omega.schema
    if not shared:
        return [InstantiatedSubQuery(EMPTY_MAPPING, sq.patterns)]
    out = []
    for mu in project(omega, shared):
        out.append(InstantiatedSubQuery(
            mu, [apply_mapping(p, mu) for p in sq.patterns]))
    return out


@dataclass
class ExecutionConfig:
    tau: float = 0.02
    alpha: float = 0.5
    aggregation: str = "median"
    kb_sets_for_gate: tuple[str, ...] = (PLUS,)
    crowd_enabled: bool = True
    questions_per_task: int = 4
    timeout: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must be in [0, 1]")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")


GATE_COMPLETE = "complete"
GATE_CROWDSOURCED = "crowdsourced"
GATE_BELOW_THRESHOLD = "below-threshold"


@dataclass
class GateDecision:
    subject: Term
    predicate: str
    completeness_data: float
    completeness_kb: float
    disagreement: float | None
    uncertainty: float | None
    probability: float | None
    decision: str


@dataclass
class CollectedAnswer:
    question: Question
    answer: AggregatedAnswer
    quad: "CrowdQuad"

    @property
    def set_tag(self) -> str:
        return self.answer.target_set


@dataclass
class ExecutionResult:
    answers: SolutionSet
    gate_trace: list[GateDecision] = field(default_factory=list)
    crowdsourced: list[tuple[Term, str, str]] = field(default_factory=list)
    tasks: list[Microtask] = field(default_factory=list)
    collected: list[CollectedAnswer] = field(default_factory=list)
    unanswered: list[Question] = field(default_factory=list)
    timed_out: bool = False


def _kb_plus_solutions(kb: CrowdKB, pattern: TriplePattern,
                       base: SolutionMapping) -> list[SolutionMapping]:
    """Bindings for the pattern drawn from constant-object positive quads."""
    resolved = apply_mapping(pattern, base)
    out = []
    for quad in kb.quads(PLUS):
        if is_existential(quad.object):
            continue
        extended = _unify(pattern, quad.subject, iri(quad.predicate), quad.object, base)
        if extended is not None:
            out.append(extended)
    return out


def _gate_subquery(sq: SubQuery, omega_prime: SolutionSet, d: Dataset,
                   kb: CrowdKB, cfg: ExecutionConfig,
                   trace: list[GateDecision]) -> list[tuple[Term, str, str]]:
    """Run the crowdsourcing gate for every (pattern, mapping) combination and
    return the deduplicated triples to send to the microtask manager."""
    queued: list[tuple[Term, str, str]] = []
    seen: set[tuple[Term, str]] = set()
    for t in sq.patterns:
        if not isinstance(t.predicate, Term):
            continue
        p_iri = t.predicate.value
        object_var = t.object.name if isinstance(t.object, Variable) else "o"
        for mu in omega_prime:
            s_val = _resolve(t.subject, mu)
            if not isinstance(s_val, Term):
                continue  # no concrete subject, nothing to ask about
            comp_d = dataset_completeness(d, s_val, p_iri, cfg.aggregation)
            comp_kb = kb_completeness(kb, d, s_val, p_iri, cfg.aggregation,
                                      cfg.kb_sets_for_gate)
            if comp_d + comp_kb < 1.0:
                dis = kb.disagreement(s_val, p_iri)
                unc = kb.uncertainty(s_val, p_iri)
                prob = crowd_probability(comp_d + comp_kb, dis, unc, cfg.alpha)
                if prob > cfg.tau:
                    decision = GATE_CROWDSOURCED
                    if (s_val, p_iri) not in seen:
                        seen.add((s_val, p_iri))
                        queued.append((s_val, p_iri, object_var))
                else:
                    decision = GATE_BELOW_THRESHOLD
                trace.append(GateDecision(s_val, p_iri, comp_d, comp_kb,
                                          dis, unc, prob, decision))
            else:
                trace.append(GateDecision(s_val, p_iri, comp_d, comp_kb,
                                          None, None, None, GATE_COMPLETE))
    return queued


def execute(q: BGPQuery, d: Dataset, kb: CrowdKB | None = None,
            cfg: ExecutionConfig | None = None, gateway=None) -> ExecutionResult:
    """Evaluate the query over the data set, crowdsourcing gated crowd
    patterns through the gateway and folding answers into the KB so the
    positive set contributes objects next to the data set."""
    kb = kb if kb is not None else CrowdKB()
    cfg = cfg or ExecutionConfig()
    dec = decompose(q)
    plan = build_plan(dec, d)
    data_ids = {id(sq) for sq in dec.data}

    omega = SolutionSet.identity()
    result = ExecutionResult(answers=SolutionSet())

    for sq in plan:
        if id(sq) in data_ids:
            evaluated = SolutionSet(sq.variables())
            for piece in instantiate(sq, omega):
                for m in evaluate_bgp(d, piece.patterns):
                    merged = m.merged(piece.binding)
                    if merged is not None:
                        evaluated.add(merged)
            omega = join(omega, evaluated)
            continue

        shared = sq.variables() & omega.schema
        omega_prime = project(omega, shared)

        if cfg.crowd_enabled and gateway is not None:
            queued = _gate_subquery(sq, omega_prime, d, kb, cfg, result.gate_trace)
            result.crowdsourced.extend(queued)
            if queued:
                tasks = build_tasks(queued, d, cfg.questions_per_task)
                result.tasks.extend(tasks)
                ids = gateway.submit(tasks)
                answers = gateway.collect(ids, cfg.timeout)
                answered = set()
                for question, answer in answers:
                    quad = fold_into_kb(answer, question, kb, d)
                    result.collected.append(CollectedAnswer(question, answer, quad))
                    answered.add(question.id)
                for task in tasks:
                    for question in task.questions:
                        if question.id not in answered:
                            result.unanswered.append(question)
                result.timed_out = result.timed_out or bool(
                    getattr(gateway, "timed_out", False))

        for t in sq.patterns:
            gained = SolutionSet(t.variables() | shared)
            for mu in omega_prime:
                for m in _pattern_solutions(d, t, mu):
                    gained.add(m)
                for m in _kb_plus_solutions(kb, t, mu):
                    gained.add(m)
            omega = join(omega, gained)

    if q.projected == STAR:
        names: list[str] = []
        for p in q.patterns:
            for position in p.positions():
                if isinstance(position, Variable) and position.name not in names:
                    names.append(position.name)
    else:
        names = [v.name for v in q.projected]
    result.answers = project(omega, names)
    return result
