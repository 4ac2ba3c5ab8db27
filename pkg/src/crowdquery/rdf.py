"""In-memory RDF storage.

Terms, triples and the Dataset container with the indexes the rest of the
engine leans on: class membership per subject, object counts per
(subject, predicate), and label lookup for rendering human-readable text.
Data comes in as N-Triples text, one triple per line.
"""

from __future__ import annotations

import re
import urllib.parse
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
XSD_INTEGER = "http://www.w3.org/2001/XMLSchema#integer"

IRI = "iri"
LITERAL = "literal"
BLANK = "blank"


class NTriplesError(ValueError):
    """Malformed N-Triples input; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class Term:
    kind: str
    value: str

    def __post_init__(self):
        if self.kind not in (IRI, LITERAL, BLANK):
            raise ValueError(f"unknown term kind: {self.kind!r}")
        if self.kind == IRI and (not self.value or any(c.isspace() for c in self.value)):
            raise ValueError(f"invalid IRI: {self.value!r}")

    def is_iri(self) -> bool:
        return self.kind == IRI

    def is_literal(self) -> bool:
        return self.kind == LITERAL


def iri(value: str) -> Term:
    return Term(IRI, value)


def literal(lexical: str, lang: str | None = None, datatype: str | None = None) -> Term:
    # Language tags and datatypes are folded into the stored value and compared
    # byte-wise; the engine never interprets typed literals.
    value = lexical
    if lang:
        value += "@" + lang
    elif datatype:
        value += "^^<" + datatype + ">"
    return Term(LITERAL, value)


def blank(label: str) -> Term:
    return Term(BLANK, label)


@dataclass(frozen=True)
class Triple:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self):
        if self.predicate.kind != IRI:
            raise ValueError("triple predicate must be an IRI")
        if self.subject.kind == LITERAL:
            raise ValueError("triple subject cannot be a literal")


def local_name(iri_value: str) -> str:
    """Tail of an IRI: after '#' if present, else after the last '/'."""
    if "#" in iri_value:
        tail = iri_value.rsplit("#", 1)[1]
    else:
        tail = iri_value.rsplit("/", 1)[-1]
    return tail or iri_value


def humanize(iri_value: str) -> str:
    """Local name with '_' as spaces and percent-escapes decoded."""
    return urllib.parse.unquote(local_name(iri_value)).replace("_", " ")


class Dataset:
    """Triple set with set semantics, immutable once loaded.

    Maintains a type index (subject -> classes and the inverse) because the
    completeness model queries class membership for every gated mapping, and
    an sp index so multiplicity lookups stay O(1). Insertion order is kept
    everywhere so downstream iteration is deterministic.
    """

    def __init__(self):
        self._triples: dict[Triple, None] = {}
        self._type_index: dict[Term, dict[str, None]] = {}
        self._class_index: dict[str, dict[Term, None]] = {}
        self._sp_index: dict[tuple[Term, str], dict[Term, None]] = {}
        self._labels: dict[Term, str] = {}
        self._iris: dict[str, None] = {}
        self._name_maps: Optional[tuple[dict, dict]] = None
        self.am_cache: dict = {}  # filled lazily by the quality model

    def add(self, t: Triple) -> None:
        if t in self._triples:
            return
        self._triples[t] = None
        self._name_maps = None
        for term in (t.subject, t.predicate, t.object):
            if term.kind == IRI:
                self._iris.setdefault(term.value, None)
        if t.predicate.value == RDF_TYPE and t.object.kind == IRI:
            self._type_index.setdefault(t.subject, {})[t.object.value] = None
            self._class_index.setdefault(t.object.value, {})[t.subject] = None
        if t.predicate.value == RDFS_LABEL and t.object.kind == LITERAL:
            self._labels.setdefault(t.subject, t.object.value)
        self._sp_index.setdefault((t.subject, t.predicate.value), {})[t.object] = None

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, t: Triple) -> bool:
        return t in self._triples

    @property
    def triples(self) -> list[Triple]:
        return list(self._triples)

    def match(self, s: Term | None = None, p: Term | None = None,
              o: Term | None = None) -> list[Triple]:
        """All triples agreeing with every non-None position."""
        if s is not None and p is not None:
            objs = self._sp_index.get((s, p.value), {})
            if o is not None:
                return [Triple(s, p, o)] if o in objs else []
            return [Triple(s, p, obj) for obj in objs]
        out = []
        for t in self._triples:
            if s is not None and t.subject != s:
                continue
            if p is not None and t.predicate != p:
                continue
            if o is not None and t.object != o:
                continue
            out.append(t)
        return out

    def objects(self, s: Term, p: str) -> list[Term]:
        return list(self._sp_index.get((s, p), {}))

    def classes_of(self, s: Term) -> set[str]:
        return set(self._type_index.get(s, {}))

    def subjects_of_class(self, c: str) -> list[Term]:
        return list(self._class_index.get(c, {}))

    def subjects(self) -> list[Term]:
        seen: dict[Term, None] = {}
        for t in self._triples:
            seen.setdefault(t.subject, None)
        return list(seen)

    def predicates(self) -> list[str]:
        seen: dict[str, None] = {}
        for t in self._triples:
            seen.setdefault(t.predicate.value, None)
        return list(seen)

    def label_of(self, t: Term) -> str:
        """Display text: rdfs:label when present, else the humanized local
        name for IRIs; literals render as their stored form."""
        if t.kind == LITERAL:
            return t.value
        if t in self._labels:
            return self._labels[t]
        if t.kind == IRI:
            return humanize(t.value)
        return t.value

    def _build_name_maps(self) -> tuple[dict, dict]:
        if self._name_maps is None:
            by_label: dict[str, str] = {}
            by_name: dict[str, str] = {}
            for term, label in self._labels.items():
                if term.kind == IRI and (label not in by_label or term.value < by_label[label]):
                    by_label[label] = term.value
            for value in self._iris:
                for key in (local_name(value), humanize(value)):
                    if key not in by_name or value < by_name[key]:
                        by_name[key] = value
            self._name_maps = (by_label, by_name)
        return self._name_maps

    def find_by_label(self, text: str) -> Term | None:
        by_label, _ = self._build_name_maps()
        value = by_label.get(text)
        return iri(value) if value else None

    def find_by_local_name(self, text: str) -> Term | None:
        _, by_name = self._build_name_maps()
        value = by_name.get(text)
        return iri(value) if value else None


_IRIREF = re.compile(r'<([^\x00-\x20<>"{}|^`\\]*)>')
_BLANK = re.compile(r'_:([A-Za-z0-9][A-Za-z0-9_.\-]*)')
_STRING = re.compile(r'"((?:[^"\\]|\\.)*)"')
_LANG = re.compile(r'@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)')

_ESCAPES = {'t': '\t', 'b': '\b', 'n': '\n', 'r': '\r', 'f': '\f',
            '"': '"', "'": "'", '\\': '\\'}


def _unescape(s: str, line_no: int) -> str:
    out = []
    i = 0
    while i < len(s):
        c = s[i]
        if c != '\\':
            out.append(c)
            i += 1
            continue
        if i + 1 >= len(s):
            raise NTriplesError(line_no, "dangling escape")
        e = s[i + 1]
        if e in _ESCAPES:
            out.append(_ESCAPES[e])
            i += 2
        elif e == 'u' or e == 'U':
            width = 4 if e == 'u' else 8
            hexpart = s[i + 2:i + 2 + width]
            if len(hexpart) != width:
                raise NTriplesError(line_no, f"bad \\{e} escape")
            out.append(chr(int(hexpart, 16)))
            i += 2 + width
        else:
            raise NTriplesError(line_no, f"unknown escape \\{e}")
    return ''.join(out)


class _LineScanner:
    def __init__(self, line: str, line_no: int):
        self.line = line
        self.pos = 0
        self.line_no = line_no

    def skip_ws(self) -> None:
        while self.pos < len(self.line) and self.line[self.pos] in ' \t':
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.line)

    def expect_dot(self) -> None:
        self.skip_ws()
        if self.pos >= len(self.line) or self.line[self.pos] != '.':
            raise NTriplesError(self.line_no, "expected '.' terminator")
        self.pos += 1

    def term(self) -> Term:
        self.skip_ws()
        rest = self.line[self.pos:]
        if not rest:
            raise NTriplesError(self.line_no, "unexpected end of line")
        if rest[0] == '<':
            m = _IRIREF.match(rest)
            if not m:
                raise NTriplesError(self.line_no, "malformed IRI")
            self.pos += m.end()
            return iri(m.group(1))
        if rest.startswith('_:'):
            m = _BLANK.match(rest)
            if not m:
                raise NTriplesError(self.line_no, "malformed blank node")
            self.pos += m.end()
            return blank(m.group(1))
        if rest[0] == '"':
            m = _STRING.match(rest)
            if not m:
                raise NTriplesError(self.line_no, "unterminated literal")
            self.pos += m.end()
            lex = _unescape(m.group(1), self.line_no)
            rest = self.line[self.pos:]
            if rest.startswith('@'):
                lm = _LANG.match(rest)
                if not lm:
                    raise NTriplesError(self.line_no, "malformed language tag")
                self.pos += lm.end()
                return literal(lex, lang=lm.group(1))
            if rest.startswith('^^'):
                dm = _IRIREF.match(rest[2:])
                if not dm:
                    raise NTriplesError(self.line_no, "malformed datatype IRI")
                self.pos += 2 + dm.end()
                return literal(lex, datatype=dm.group(1))
            return literal(lex)
        raise NTriplesError(self.line_no, f"unexpected character {rest[0]!r}")


def parse_ntriples(text: str) -> Dataset:
    """Parse N-Triples text into a Dataset, deduplicating triples."""
    d = Dataset()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        scanner = _LineScanner(line, line_no)
        s = scanner.term()
        p = scanner.term()
        o = scanner.term()
        scanner.expect_dot()
        if not scanner.at_end():
            raise NTriplesError(line_no, "trailing content after '.'")
        try:
            d.add(Triple(s, p, o))
        except ValueError as exc:
            raise NTriplesError(line_no, str(exc)) from exc
    return d


def load_ntriples(path: str | Path) -> Dataset:
    return parse_ntriples(Path(path).read_text(encoding="utf-8"))


def term_to_text(t: Term) -> str:
    """Compact single-field encoding used by the KB, replay and gold files."""
    if t.kind == IRI:
        return f"<{t.value}>"
    if t.kind == BLANK:
        return f"_:{t.value}"
    escaped = t.value.replace('\\', '\\\\').replace('"', '\\"')
    return f'"{escaped}"'


def term_from_text(s: str) -> Term:
    s = s.strip()
    if s.startswith('<') and s.endswith('>'):
        return iri(s[1:-1])
    if s.startswith('_:'):
        return blank(s[2:])
    if s.startswith('"') and s.endswith('"') and len(s) >= 2:
        body = s[1:-1]
        out = []
        i = 0
        while i < len(body):
            if body[i] == '\\' and i + 1 < len(body) and body[i + 1] in ('\\', '"'):
                out.append(body[i + 1])
                i += 2
            else:
                out.append(body[i])
                i += 1
        return Term(LITERAL, ''.join(out))
    return Term(LITERAL, s)
