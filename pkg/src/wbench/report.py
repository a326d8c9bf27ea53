"""Batch report: closed fact table plus order diagrams."""

from __future__ import annotations

import csv
import os

from . import figures
from .deduction import close
from .terms import Kind, print_term

# problems drawn in the order diagrams (those missing from the KB are skipped)
FIGURE_ATOMS = ("id", "zero", "LPO", "LLPO", "SORT", "ACC_2", "ACC_N", "WBWT_2", "WKL",
                "WWKL", "PA", "MLR", "NON", "C_N", "lim", "J", "C_NN", "COH")
FIGURE_KINDS = (Kind.W, Kind.ptW)


def write_facts_tsv(cl, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(("relation", "tag", "lhs", "rhs", "rule", "citation"))
        for fact in cl.sorted_facts():
            d = cl.facts[fact]
            rhs = print_term(fact.rhs) if fact.rhs is not None else ""
            w.writerow((fact.rel, str(fact.tag or ""), print_term(fact.lhs), rhs,
                        d.rule, d.citation))
    return path


def write_report(kb, out_dir, algebra=None, depth: int = 1):
    """Close ``kb`` and write facts.tsv, kinds.png, order_<kind>.png, algebra.png."""
    os.makedirs(out_dir, exist_ok=True)
    cl = close(kb, depth)
    paths = [write_facts_tsv(cl, os.path.join(out_dir, "facts.tsv")),
             figures.draw_kinds(os.path.join(out_dir, "kinds.png"))]
    names = [a for a in FIGURE_ATOMS if a in kb.atoms]
    for kind in FIGURE_KINDS:
        paths.append(figures.draw_closure_order(
            cl, kind, names, os.path.join(out_dir, f"order_{kind.value}.png")))
    if algebra is not None:
        paths.append(figures.draw_algebra(algebra, os.path.join(out_dir, "algebra.png")))
    return paths
