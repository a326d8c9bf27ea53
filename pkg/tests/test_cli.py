import pytest

from wbench.cli import main

SMALL = """atom f
atom g
atom h
fact le W f g   # one
fact le W g h   # two
fact nle TW h f # three
"""


@pytest.fixture
def small(tmp_path):
    path = tmp_path / "small.kb"
    path.write_text(SMALL)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_normalize(capsys):
    code, out, _ = run(capsys, "normalize", "--kind", "SW", "comp(comp(lim))")
    assert (code, out) == (0, "comp(lim)\n")


def test_normalize_with_kb_guards(capsys, tmp_path):
    kb = tmp_path / "g.kb"
    kb.write_text("atom f\nprop complete f\n")
    code, out, _ = run(capsys, "normalize", "--kind", "W", "--kb", str(kb), "comp(f)")
    assert (code, out) == (0, "f\n")


def test_query_seed(capsys):
    code, out, _ = run(capsys, "query", "--kb", "seed", "--kind", "TW", "1", "0")
    assert (code, out) == (0, "YES\n")


def test_query_three_answers(capsys, small):
    assert run(capsys, "query", "--kb", small, "f", "h")[:2] == (0, "YES\n")
    assert run(capsys, "query", "--kb", small, "h", "f")[:2] == (1, "NO\n")
    assert run(capsys, "query", "--kb", small, "g", "f")[:2] == (2, "UNKNOWN\n")


def test_query_explain(capsys, small):
    code, out, _ = run(capsys, "query", "--kb", small, "--explain", "f", "h")
    assert code == 0
    assert out.splitlines()[1].startswith("le(W, f, h)")
    assert "[given: one]" in out


def test_query_prop_and_equiv(capsys, small):
    assert run(capsys, "query", "--kb", small, "--prop", "complete", "f")[0] == 2
    assert run(capsys, "query", "--kb", small, "--equiv", "f", "f")[0] == 0
    assert run(capsys, "query", "--kb", small, "--negated", "h", "f")[0] == 0


def test_explain_statement(capsys, small):
    code, out, _ = run(capsys, "explain", "--kb", small, "fact le W f h")
    assert code == 0 and out.startswith("YES\nle(W, f, h)")
    code, out, _ = run(capsys, "explain", "--kb", small, "notprop complete f")
    assert code == 2


def test_close_is_deterministic_and_loadable(capsys, small, tmp_path):
    a, b = tmp_path / "a.kb", tmp_path / "b.kb"
    assert run(capsys, "close", "--kb", small, "--out", str(a))[0] == 0
    assert run(capsys, "close", "--kb", small, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert run(capsys, "query", "--kb", str(a), "--depth", "0", "f", "h")[0] == 0


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "--algebra", "vposet.alg", "--formula", "~~A | ~A")
    assert code == 1
    lines = out.splitlines()
    assert lines[0] == "invalid" and lines[1].startswith("countervaluation: A=")
    assert run(capsys, "validate", "--algebra", "chain3", "--formula", "~~A | ~A")[:2] == \
        (0, "valid\n")


def test_check_algebra(capsys, tmp_path):
    code, out, _ = run(capsys, "check-algebra", "vposet")
    assert code == 0 and out.startswith("classification: Brouwer")
    code, out, _ = run(capsys, "check-algebra", "m3")
    assert code == 1 and "classification: none" in out
    path = tmp_path / "two.alg"
    path.write_text("carrier: a b\nleq:\n 1 1\n 0 1\n")
    assert run(capsys, "check-algebra", str(path))[0] == 0


@pytest.mark.parametrize("name", ["LPO", "SORT", "ACC_2", "WBWT", "antitone", "totalize"])
def test_stream_demo(capsys, name):
    code, out, _ = run(capsys, "stream-demo", name, "--steps", "5")
    assert code == 0
    assert "WRONG" not in out


def test_stream_demo_reports_exhaustive_check(capsys):
    code, out, _ = run(capsys, "stream-demo", "LPO")
    assert out.splitlines()[-1] == "exhaustive check: 19456 samples, all pass"


def test_rules(capsys):
    code, out, _ = run(capsys, "rules")
    assert code == 0
    assert "R1 [SW] comp(comp(?f)) => comp(?f)" in out
    assert "# inference rules" in out
    assert run(capsys, "rules", "--catalog", "deduction")[1].startswith("# inference")


def test_acceptance_subset(capsys):
    code, out, _ = run(capsys, "acceptance", "5", "7")
    assert code == 0
    assert [ln.split()[0] for ln in out.splitlines()] == ["PASS", "PASS"]


def test_report(capsys, small, tmp_path):
    out_dir = tmp_path / "rep"
    code, out, _ = run(capsys, "report", "--kb", small, "--out", str(out_dir))
    assert code == 0
    names = sorted(p.name for p in out_dir.iterdir())
    assert names == ["algebra.png", "facts.tsv", "kinds.png", "order_W.png", "order_ptW.png"]
    rows = (out_dir / "facts.tsv").read_text().splitlines()
    assert rows[0].split("\t") == ["relation", "tag", "lhs", "rhs", "rule", "citation"]
    assert "le\tW\tf\th\tD1.trans.W\ttransitivity" in rows
    assert (out_dir / "kinds.png").read_bytes()[:4] == b"\x89PNG"


@pytest.mark.parametrize("argv", [
    ["normalize", "comp("],
    ["query", "--kind", "QW", "f", "g"],
    ["query", "--kb", "/nonexistent.kb", "f", "g"],
    ["query", "--kb", "seed", "f"],
    ["validate", "--algebra", "nope", "--formula", "A"],
    ["validate", "--algebra", "chain3", "--formula", "A &"],
    ["stream-demo", "XYZ"],
    ["explain", "atom f"],
    ["bogus"],
])
def test_errors_exit_3(capsys, argv):
    assert run(capsys, *argv)[0] == 3


def test_help_exits_0(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0 and "query" in out
