"""Reasoning workbench for Weihrauch-style degree structures."""

from .terms import Kind, Term, parse_term, kind_implies
from .rewrite import normalize, equivalent
from .kb import Fact, KnowledgeBase, load_kb, seed_kb
from .deduction import close, query, query_prop, query_equiv, explain, check_consistency

__all__ = [
    "Kind", "Term", "parse_term", "kind_implies", "normalize", "equivalent",
    "Fact", "KnowledgeBase", "load_kb", "seed_kb",
    "close", "query", "query_prop", "query_equiv", "explain", "check_consistency",
]
