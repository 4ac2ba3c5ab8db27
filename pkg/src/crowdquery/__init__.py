"""Hybrid machine/crowd evaluation of basic graph pattern queries over RDF.

The engine answers a SPARQL subset against an in-memory triple store and,
where a completeness model finds the data thin, asks human workers for the
missing values through pluggable gateways, merging both answer sources into
one result set.
"""

from .engine import ExecutionConfig, execute
from .kb import CrowdKB, CrowdQuad, load_kb, save_kb
from .rdf import Dataset, Term, Triple, load_ntriples, parse_ntriples
from .sparql import BGPQuery, parse_query

__all__ = [
    "BGPQuery", "CrowdKB", "CrowdQuad", "Dataset", "ExecutionConfig", "Term",
    "Triple", "execute", "load_kb", "load_ntriples", "parse_ntriples",
    "parse_query", "save_kb",
]
