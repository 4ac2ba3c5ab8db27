"""Parser for the supported query subset.

Grammar (keywords case-insensitive):

    query      := prefix* 'SELECT' 'DISTINCT'? projection 'WHERE' '{' patterns '}'
    prefix     := 'PREFIX' PNAME_NS IRIREF
    projection := '*' | VAR+
    patterns   := pattern ('.' pattern)* '.'?
    pattern    := term term term
    term       := IRIREF | prefixed name | VAR | 'a' | literal | INTEGER

Only basic graph patterns: no OPTIONAL, FILTER, UNION, paths or LIMIT.
Prefixed names are expanded during parsing, so downstream code only ever
sees full IRIs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .rdf import RDF_TYPE, XSD_INTEGER, Term, iri, literal, term_to_text

STAR = "*"


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Variable:
    name: str


PatternTerm = Union[Term, Variable]


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm
    ordinal: int = 0

    def positions(self) -> tuple[PatternTerm, PatternTerm, PatternTerm]:
        return (self.subject, self.predicate, self.object)

    def variables(self) -> set[str]:
        return {t.name for t in self.positions() if isinstance(t, Variable)}


@dataclass
class BGPQuery:
    prefixes: dict[str, str] = field(default_factory=dict)
    projected: list[Variable] | str = STAR
    distinct: bool = False
    patterns: list[TriplePattern] = field(default_factory=list)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for p in self.patterns:
            out |= p.variables()
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, BGPQuery):
            return NotImplemented
        return (self.projected == other.projected and self.distinct == other.distinct
                and self.patterns == other.patterns)


_IRIREF = re.compile(r'<([^\x00-\x20<>"{}|^`\\]*)>')
_VAR = re.compile(r'[?$]([A-Za-z_][A-Za-z0-9_]*)')
_STRING = re.compile(r'"((?:[^"\\\n]|\\.)*)"')
_PNAME = re.compile(r'([A-Za-z][A-Za-z0-9_-]*)?:([A-Za-z0-9_\-.%()]*)')
_WORD = re.compile(r'[A-Za-z][A-Za-z0-9_]*')
_INTEGER = re.compile(r'[+-]?[0-9]+')
_LANGTAG = re.compile(r'@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)')

_STRING_ESCAPES = {'t': '\t', 'b': '\b', 'n': '\n', 'r': '\r', 'f': '\f',
                   '"': '"', "'": "'", '\\': '\\'}


@dataclass
class _Token:
    kind: str
    text: str
    payload: tuple
    line: int
    col: int


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int) -> None:
        chunk = self.text[self.i:self.i + n]
        newlines = chunk.count('\n')
        if newlines:
            self.line += newlines
            self.col = n - chunk.rfind('\n')
        else:
            self.col += n
        self.i += n

    def _error(self, message: str):
        raise QuerySyntaxError(message, self.line, self.col)

    def _unescape(self, body: str) -> str:
        out = []
        i = 0
        while i < len(body):
            c = body[i]
            if c != '\\':
                out.append(c)
                i += 1
                continue
            e = body[i + 1] if i + 1 < len(body) else ''
            if e in _STRING_ESCAPES:
                out.append(_STRING_ESCAPES[e])
                i += 2
            elif e in ('u', 'U'):
                width = 4 if e == 'u' else 8
                hexpart = body[i + 2:i + 2 + width]
                if len(hexpart) != width:
                    self._error("bad unicode escape in literal")
                out.append(chr(int(hexpart, 16)))
                i += 2 + width
            else:
                self._error(f"unknown escape \\{e} in literal")
        return ''.join(out)

    def tokens(self) -> list[_Token]:
        out = []
        text = self.text
        while self.i < len(text):
            c = text[self.i]
            if c in ' \t\r\n':
                self._advance(1)
                continue
            if c == '#':
                end = text.find('\n', self.i)
                self._advance((end if end != -1 else len(text)) - self.i)
                continue
            line, col = self.line, self.col
            if c == '<':
                m = _IRIREF.match(text, self.i)
                if not m:
                    self._error("malformed IRI")
                out.append(_Token("IRIREF", m.group(0), (m.group(1),), line, col))
                self._advance(m.end() - self.i)
                continue
            if c in '?$':
                m = _VAR.match(text, self.i)
                if not m:
                    self._error("malformed variable")
                out.append(_Token("VAR", m.group(0), (m.group(1),), line, col))
                self._advance(m.end() - self.i)
                continue
            if c == '"':
                m = _STRING.match(text, self.i)
                if not m:
                    self._error("unterminated string literal")
                lex = self._unescape(m.group(1))
                self._advance(m.end() - self.i)
                lang = dtype = None
                lm = _LANGTAG.match(text, self.i)
                if lm:
                    lang = lm.group(1)
                    self._advance(lm.end() - self.i)
                elif text.startswith('^^', self.i):
                    self._advance(2)
                    dm = _IRIREF.match(text, self.i)
                    if dm:
                        dtype = ("iri", dm.group(1), "")
                        self._advance(dm.end() - self.i)
                    else:
                        pm = _PNAME.match(text, self.i)
                        if not pm:
                            self._error("expected datatype IRI after '^^'")
                        dtype = ("pname", pm.group(1) or "", pm.group(2))
                        self._advance(pm.end() - self.i)
                out.append(_Token("STRING", m.group(0), (lex, lang, dtype), line, col))
                continue
            if c in '{}.*':
                out.append(_Token("PUNCT", c, (), line, col))
                self._advance(1)
                continue
            m = _PNAME.match(text, self.i)
            if m:
                tok_text = m.group(0)
                # A local part must not end with '.'; give trailing dots back
                # to the stream as pattern separators.
                while tok_text.endswith('.'):
                    tok_text = tok_text[:-1]
                prefix, local = tok_text.split(':', 1)
                out.append(_Token("PNAME", tok_text, (prefix, local), line, col))
                self._advance(len(tok_text))
                continue
            m = _WORD.match(text, self.i)
            if m:
                out.append(_Token("WORD", m.group(0), (m.group(0),), line, col))
                self._advance(m.end() - self.i)
                continue
            m = _INTEGER.match(text, self.i)
            if m:
                out.append(_Token("INTEGER", m.group(0), (m.group(0),), line, col))
                self._advance(m.end() - self.i)
                continue
            self._error(f"unexpected character {c!r}")
        out.append(_Token("EOF", "", (), self.line, self.col))
        return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = _Tokenizer(text).tokens()
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise QuerySyntaxError(message, tok.line, tok.col)

    def keyword(self, word: str) -> bool:
        tok = self.peek()
        if tok.kind == "WORD" and tok.text.upper() == word:
            self.next()
            return True
        return False

    def expect_punct(self, ch: str) -> None:
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.text == ch:
            self.next()
            return
        self.error(f"expected {ch!r}")

    def parse(self) -> BGPQuery:
        q = BGPQuery()
        while self.keyword("PREFIX"):
            tok = self.peek()
            if tok.kind != "PNAME" or tok.payload[1]:
                self.error("expected a prefix declaration like 'ex:'")
            self.next()
            iritok = self.peek()
            if iritok.kind != "IRIREF":
                self.error("expected IRI after prefix name")
            self.next()
            q.prefixes[tok.payload[0]] = iritok.payload[0]
        if not self.keyword("SELECT"):
            self.error("expected SELECT")
        q.distinct = self.keyword("DISTINCT")
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.text == "*":
            self.next()
            q.projected = STAR
        else:
            projected: list[Variable] = []
            while self.peek().kind == "VAR":
                projected.append(Variable(self.next().payload[0]))
            if not projected:
                self.error("expected '*' or at least one variable after SELECT")
            q.projected = projected
        if not self.keyword("WHERE"):
            self.error("expected WHERE")
        self.expect_punct("{")
        ordinal = 0
        while True:
            tok = self.peek()
            if tok.kind == "PUNCT" and tok.text == "}":
                self.next()
                break
            if tok.kind == "EOF":
                self.error("unterminated group: expected '}'")
            s = self.term(q, role="subject")
            p = self.term(q, role="predicate")
            o = self.term(q, role="object")
            q.patterns.append(TriplePattern(s, p, o, ordinal))
            ordinal += 1
            tok = self.peek()
            if tok.kind == "PUNCT" and tok.text == ".":
                self.next()
        if self.peek().kind != "EOF":
            self.error("trailing content after '}'")
        if not q.patterns:
            self.error("query has no triple patterns")
        if q.projected != STAR:
            in_patterns = q.variables()
            for v in q.projected:
                if v.name not in in_patterns:
                    raise QuerySyntaxError(
                        f"projected variable ?{v.name} not used in any pattern", 1, 1)
        return q

    def expand(self, prefixes: dict[str, str], tok: _Token) -> str:
        prefix, local = tok.payload if tok.kind == "PNAME" else tok.payload[:2]
        if prefix not in prefixes:
            self.error(f"unknown prefix {prefix + ':'!r}", tok)
        return prefixes[prefix] + local

    def term(self, q: BGPQuery, role: str) -> PatternTerm:
        tok = self.peek()
        if tok.kind == "IRIREF":
            self.next()
            return iri(tok.payload[0])
        if tok.kind == "VAR":
            self.next()
            return Variable(tok.payload[0])
        if tok.kind == "PNAME":
            value = self.expand(q.prefixes, tok)
            self.next()
            return iri(value)
        if tok.kind == "WORD" and tok.text == "a":
            if role != "predicate":
                self.error("'a' is only valid in the predicate position", tok)
            self.next()
            return iri(RDF_TYPE)
        if tok.kind == "STRING":
            lex, lang, dtype = tok.payload
            self.next()
            if dtype is not None:
                kind, a, b = dtype
                dt_iri = a if kind == "iri" else self.expand(
                    q.prefixes, _Token("PNAME", f"{a}:{b}", (a, b), tok.line, tok.col))
                return literal(lex, datatype=dt_iri)
            return literal(lex, lang=lang)
        if tok.kind == "INTEGER":
            self.next()
            return literal(tok.text, datatype=XSD_INTEGER)
        self.error(f"unexpected token {tok.text!r}")


def parse_query(text: str) -> BGPQuery:
    return _Parser(text).parse()


def load_query(path) -> BGPQuery:
    from pathlib import Path
    return parse_query(Path(path).read_text(encoding="utf-8"))


def _term_text(t: PatternTerm) -> str:
    if isinstance(t, Variable):
        return f"?{t.name}"
    return term_to_text(t)


def format_query(q: BGPQuery) -> str:
    """Canonical printer: full IRIs, one pattern per line. parse(format(q))
    reproduces q up to prefix declarations (which are expanded on parse)."""
    head = "SELECT "
    if q.distinct:
        head += "DISTINCT "
    if q.projected == STAR:
        head += "*"
    else:
        head += " ".join(f"?{v.name}" for v in q.projected)
    lines = [head, "WHERE {"]
    for p in q.patterns:
        lines.append(f"  {_term_text(p.subject)} {_term_text(p.predicate)} "
                     f"{_term_text(p.object)} .")
    lines.append("}")
    return "\n".join(lines)
