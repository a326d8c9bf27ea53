"""``wb``: command-line front end.

Exit codes: queries answer 0 (YES), 1 (NO) or 2 (UNKNOWN); checks answer
0 (pass) or 1 (fail); 3 means the input could not be read or parsed.
"""

from __future__ import annotations

import os
import sys
from importlib import resources

import click

from . import brouwer as B
from . import streams as S
from .deduction import RULES as INFERENCE_RULES
from .deduction import close, explain, query, query_equiv, query_prop
from .kb import FLAGS, Fact, KBError, load_kb_source, parse_statement
from .rewrite import RULES as REWRITE_RULES
from .rewrite import normalize as rewrite_normalize
from .terms import Kind, TermSyntaxError, parse_term, print_term

EXIT_ERROR = 3
ANSWER_CODES = {"YES": 0, "NO": 1, "UNKNOWN": 2}

INPUT_ERRORS = (TermSyntaxError, KBError, B.AlgebraFormatError, B.FormulaSyntaxError,
                S.StreamError, OSError, ValueError)


def _kind(ctx, param, value):
    if value is None:
        return None
    try:
        return Kind.parse(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


def _term(text):
    return parse_term(text)


kb_option = click.option("--kb", "kb_source", default="seed", show_default=True,
                         help="Knowledge-base file, or 'seed' for the bundled zoo.")
kind_option = click.option("--kind", default="W", show_default=True, callback=_kind,
                           help="Reducibility kind: SW, W, STW, TW, pW or ptW.")
depth_option = click.option("--depth", default=1, show_default=True, type=click.IntRange(0, 3),
                            help="Unary-expansion depth of the closure universe.")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Reasoning workbench for reducibility facts, finite algebras and stream names."""


@cli.command("normalize")
@kind_option
@click.option("--kb", "kb_source", default=None,
              help="Optional knowledge base whose facts discharge rewrite guards.")
@click.argument("term")
def normalize_cmd(kind, kb_source, term):
    """Print the canonical form of TERM."""
    t = _term(term)
    if kb_source is not None:
        kb = load_kb_source(kb_source)
        nf = kb.normalize(t, kind)
    else:
        nf = rewrite_normalize(t, kind)
    click.echo(print_term(nf))
    return 0


def _print_answer(answer, traces, show):
    click.echo(answer)
    if show:
        for tr in traces:
            if tr is not None:
                click.echo(explain(tr))
    return ANSWER_CODES[answer]


@cli.command("query")
@kb_option
@kind_option
@depth_option
@click.option("--explain", "show", is_flag=True, help="Print the derivation tree.")
@click.option("--prop", "flag", type=click.Choice(FLAGS),
              help="Ask whether the single TERM has this property.")
@click.option("--equiv", is_flag=True, help="Ask for equivalence instead of reduction.")
@click.option("--negated", is_flag=True, help="Ask whether the reduction fails.")
@click.argument("terms", nargs=-1, required=True)
def query_cmd(kb_source, kind, depth, show, flag, equiv, negated, terms):
    """Is TERM1 reducible to TERM2 (or, with --prop, does TERM have FLAG)?"""
    kb = load_kb_source(kb_source)
    if flag is not None:
        if len(terms) != 1:
            raise click.UsageError("--prop takes exactly one term")
        res = query_prop(kb, flag, _term(terms[0]), depth)
        return _print_answer(res.answer, [res.trace], show)
    if len(terms) != 2:
        raise click.UsageError("expected two terms")
    t1, t2 = map(_term, terms)
    if equiv:
        if negated:
            raise click.UsageError("--equiv and --negated do not combine")
        answer, traces = query_equiv(kb, kind, t1, t2, depth)
        return _print_answer(answer, traces, show)
    res = query(kb, "nle" if negated else "le", kind, t1, t2, depth)
    return _print_answer(res.answer, [res.trace], show)


@cli.command("explain")
@kb_option
@depth_option
@click.argument("statement")
def explain_cmd(kb_source, depth, statement):
    """Derivation of a statement written as in a KB file, e.g. 'fact le TW 1 0'.

    Exits like ``query``; for NO the refutation of the statement is shown.
    """
    kind_, fact = parse_statement(statement.strip())
    if kind_ != "fact" or fact.rel in ("leM", "nleM"):
        raise click.UsageError("expected a fact, prop or notprop statement")
    kb = load_kb_source(kb_source)
    if fact.rel in ("prop", "notprop"):
        res = query_prop(kb, fact.tag, fact.lhs, depth)
        if fact.rel == "notprop":
            res = res._replace(answer={"YES": "NO", "NO": "YES"}.get(res.answer, res.answer))
    else:
        res = query(kb, fact.rel, fact.tag, fact.lhs, fact.rhs, depth)
    click.echo(res.answer)
    if res.trace is not None:
        click.echo(explain(res.trace))
    return ANSWER_CODES[res.answer]


@cli.command("close")
@kb_option
@depth_option
@click.option("--out", "out", required=True, type=click.Path(dir_okay=False),
              help="Where to write the saturated knowledge base.")
def close_cmd(kb_source, depth, out):
    """Saturate a knowledge base and write every derived fact."""
    kb = load_kb_source(kb_source)
    cl = close(kb, depth)
    text = closed_kb_text(cl)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)
    click.echo(f"{len(cl.facts)} facts over {len(cl.universe)} terms written to {out}")
    for report in cl.contradiction_reports():
        click.echo(f"contradiction: {report}")
    return 1 if cl.contradictions else 0


def closed_kb_text(cl) -> str:
    """A loadable KB file: declarations, then all facts sorted, each with its rule."""
    lines = [f"atom {a}" for a in sorted(cl.kb.atoms)]
    for fact in cl.sorted_facts():
        d = cl.facts[fact]
        lines.append(f"{fact.to_line()}  # {d.rule}")
    return "\n".join(lines) + "\n"


def resolve_algebra(name: str) -> B.FiniteAlgebra:
    """A path, or the name of a bundled algebra file (with or without .alg)."""
    if os.path.exists(name):
        return B.load_algebra(name)
    base = name if name.endswith(".alg") else name + ".alg"
    res = resources.files("wbench") / "data" / os.path.basename(base)
    if not res.is_file():
        raise OSError(f"no algebra file {name!r} (bundled: {', '.join(bundled_algebras())})")
    return B.parse_algebra(res.read_text(encoding="utf-8"))


def bundled_algebras():
    return sorted(p.name for p in (resources.files("wbench") / "data").iterdir()
                  if p.name.endswith(".alg"))


@cli.command("check-algebra")
@click.argument("algebra")
def check_algebra_cmd(algebra):
    """Classify a finite algebra (a file or a bundled name such as vposet)."""
    A = resolve_algebra(algebra)
    rep = B.check_weihrauch_algebra(A)
    click.echo(str(rep))
    return 0 if rep.weihrauch else 1


@cli.command("validate")
@click.option("--algebra", required=True, help="Algebra file or bundled name.")
@click.option("--formula", required=True, help="Formula over ~ & | -> with capital variables.")
def validate_cmd(algebra, formula):
    """Is FORMULA valid in the algebra?  Prints a countervaluation when not."""
    A = resolve_algebra(algebra)
    phi = B.parse_formula(formula)
    v = B.is_valid(A, phi)
    if v.valid:
        click.echo("valid")
        return 0
    click.echo("invalid")
    cv = ", ".join(f"{k}={val}" for k, val in v.countervaluation.items())
    click.echo(f"countervaluation: {cv}")
    click.echo(f"value: {v.value}")
    return 1


DEMO_SAMPLES = {
    "LPO": ("0", ";(1)", "1,1,2;(3,0)", "2;(1,3)"),
    "SORT": (";(1)", "0,1;(0)", "1,1,0;(1)", "1;(2)"),
    "ACC_2": ("0", ";(1)", "0,0;(2)", "1,2;(0)"),
    "ACC_N": ("0", "0;(5)", "1;(0)", "2,3;(0)"),
}
DEMO_STEPS = 12


def _show(x):
    return str(x) if not isinstance(x, tuple) else " ".join(map(str, x))


def _demo_completion(name, steps):
    f = S.PROBLEMS[name]
    fc = S.completion(f)
    H, K = S.completeness_witness(name)
    click.echo(f"{fc.name} reduces to {name} via H={H.name}, K={K.name}")
    for text in DEMO_SAMPLES[name]:
        p = S.parse_upname(text)
        x = fc.decode_input(p)
        click.echo(f"input p = {p}  (decodes to {x})")
        click.echo(f"  K prefix: {_show(K.prefix(p.prefix(steps)))}")
        u = K.apply(p)
        y = f.decode_input(u)
        click.echo(f"  K(p) = {u}  ({name} instance {y})")
        for sol in f.solutions(y):
            w = H.apply(f.encode(sol))
            z = fc.decode_output(w)
            verdict = "ok" if fc.accepts(x, z) else "WRONG"
            click.echo(f"  solution {sol}: H(G(K(p))) = {w} -> {z}  {verdict}")
    rep = S.check_reduction(fc, f, H, K, S.all_upnames(4, 3, 3))
    click.echo(f"exhaustive check: {rep}")
    return 0 if rep.ok else 1


def _demo_transformer(K, samples, steps):
    click.echo(f"transformer {K.name}")
    for text in samples:
        p = S.parse_upname(text)
        click.echo(f"input p = {p}")
        word = p.prefix(steps)
        for i in range(1, len(word) + 1):
            click.echo(f"  after {_show(word[:i])}: {_show(K.prefix(word[:i]))}")
        click.echo(f"  K(p) = {K.apply(p)}")
    return 0


def _demo_totalize(steps):
    F = S.emit_then_stall((3, 4))
    G = S.totalize(F)
    click.echo(f"partial transformer {F.name} and its totalization {G.name}")
    for text in ("1;(2)", ";(0)"):
        p = S.parse_upname(text)
        fp, gp = F.apply(p), G.apply(p)
        click.echo(f"input p = {p}")
        click.echo(f"  F(p) = {fp!r}  (finite: outside the name space)")
        click.echo(f"  G(p) = {gp}, shifted down: {S.shift_minus(gp)!r}")
        click.echo(f"  G prefix: {_show(G.prefix(p.prefix(steps)))}")
    return 0


STREAM_DEMOS = ("LPO", "SORT", "ACC_2", "ACC_N", "WBWT", "antitone", "totalize")


@cli.command("stream-demo")
@click.argument("name", type=click.Choice(STREAM_DEMOS))
@click.option("--steps", default=DEMO_STEPS, show_default=True, type=click.IntRange(1, 200))
def stream_demo_cmd(name, steps):
    """Run a completeness witness or transformer step by step."""
    if name in S.PROBLEMS:
        return _demo_completion(name, steps)
    if name == "WBWT":
        return _demo_transformer(S.wbwt_k(), ("0,1,2;(0)", "1;(0,2)"), min(steps, 6))
    if name == "antitone":
        return _demo_transformer(S.antitone_k(), ("0,2;(1)",), min(steps, 4))
    return _demo_totalize(steps)


@cli.command("rules")
@click.option("--catalog", type=click.Choice(["rewrite", "deduction", "all"]), default="all",
              show_default=True)
def rules_cmd(catalog):
    """Print the rule catalogues with the law each rule encodes."""
    if catalog in ("rewrite", "all"):
        click.echo(f"# rewrite rules ({len(REWRITE_RULES)})")
        for r in REWRITE_RULES:
            click.echo(f"{r}    -- {r.law}")
    if catalog in ("deduction", "all"):
        click.echo(f"# inference rules ({len(INFERENCE_RULES)})")
        for r in INFERENCE_RULES:
            click.echo(f"{r}    -- {r.law}")
    return 0


@cli.command("acceptance")
@click.argument("numbers", nargs=-1, type=click.IntRange(1, 12))
def acceptance_cmd(numbers):
    """Run acceptance checks (all twelve by default); one PASS/FAIL line each."""
    from .acceptance import CRITERIA

    ok = True
    for n in numbers or sorted(CRITERIA):
        check = CRITERIA[n]()
        click.echo(check.line())
        ok = ok and check.ok
    return 0 if ok else 1


@cli.command("report")
@kb_option
@click.option("--out", "out_dir", default="report", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--algebra", default="vposet", show_default=True)
def report_cmd(kb_source, out_dir, algebra):
    """Write the closed fact table (TSV) and order diagrams (PNG) to a directory."""
    from .report import write_report

    for path in write_report(load_kb_source(kb_source), out_dir, resolve_algebra(algebra)):
        click.echo(path)
    return 0


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="wb", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_ERROR
    except click.Abort:
        return EXIT_ERROR
    except INPUT_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_ERROR
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(main())
