import csv
import io
import subprocess
import sys

import pytest

import oracles

from hypercount.cli import build_parser, main


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def tables(out):
    """Split stdout into lists of row dicts, one per table."""
    blocks, cur = [], []
    for line in out.splitlines():
        if line.startswith("#") or not line.strip():
            if cur:
                blocks.append(cur)
                cur = []
            continue
        cur.append(line)
    if cur:
        blocks.append(cur)
    parsed = []
    for b in blocks:
        rows = list(csv.DictReader(io.StringIO("\n".join(b)), delimiter="\t"))
        parsed.append(rows)
    return parsed


def header(out):
    return dict(line[2:].split(": ", 1) for line in out.splitlines() if line.startswith("# "))


@pytest.fixture
def mcnf(tmp_path):
    p = tmp_path / "f.mcnf"
    p.write_text("p mcnf 5 3\n1 2 3 0\n3 4 5 0\n1 4 5 0\n")
    return str(p)


def test_count(capsys, mcnf):
    code, out, _ = run(capsys, "count", "--input", mcnf, "--eps", "0.05")
    assert code == 0
    rec = tables(out)[0][0]
    assert abs(float(rec["estimate"]) - 23) <= 0.05 * 23
    assert rec["regime"] == "Covered36"
    h = header(out)
    assert h["command"].startswith("hypercount count") and len(h["input_sha256"]) == 16
    assert "wall_time_ms" in h


def test_count_exact_and_stdin(capsys, mcnf, monkeypatch):
    code, out, _ = run(capsys, "count", "--input", mcnf, "--exact")
    assert code == 0 and tables(out)[0][0]["count"] == str(oracles.count(5, [(1, 2, 3), (3, 4, 5), (1, 4, 5)]))
    monkeypatch.setattr(sys, "stdin", io.TextIOWrapper(io.BytesIO(b"p mcnf 2 1\n1 2 0\n")))
    code, out, _ = run(capsys, "count", "--input", "-", "--exact")
    assert tables(out)[0][0]["count"] == "3"


def test_count_deterministic(capsys, mcnf):
    _, a, _ = run(capsys, "count", "--input", mcnf, "--proof-depth", "2")
    _, b, _ = run(capsys, "count", "--input", mcnf, "--proof-depth", "2")
    strip = lambda t: [{k: v for k, v in r.items() if k != "wall_time_ms"} for r in t[0]]
    assert strip(tables(a)) == strip(tables(b))


def test_count_trace(capsys, mcnf):
    code, _, err = run(capsys, "count", "--input", mcnf, "--proof-depth", "3", "--trace")
    assert code == 0
    fields = err.splitlines()[0].split("\t")
    assert len(fields) == 5


def test_count_errors(capsys, tmp_path):
    bad = tmp_path / "bad.mcnf"
    bad.write_text("p mcnf 2 1\n-1 2 0\n")
    code, _, err = run(capsys, "count", "--input", str(bad))
    assert code == 1 and "NonMonotone" in err
    code, _, err = run(capsys, "count", "--input", str(bad), "--eps", "0")
    assert code == 1
    code, _, _ = run(capsys, "count")
    assert code == 2
    code, _, _ = run(capsys, "count", "--input", str(tmp_path / "missing"))
    assert code == 1


def test_uniqueness(capsys):
    code, out, _ = run(capsys, "uniqueness", "--k", "6", "--delta", "28")
    rec = tables(out)[0][0]
    assert code == 0 and rec["classification"] == "Uniqueness"
    assert 0.99 < float(rec["fprime_abs"]) < 0.996
    code, out, _ = run(capsys, "uniqueness", "--critical", "6")
    assert tables(out)[0][0]["critical_delta"] == "28"
    code, out, _ = run(capsys, "uniqueness", "--k", "6", "--delta", "40", "--gap", "50")
    assert float(tables(out)[0][0]["final_gap"]) > 0.1
    code, _, _ = run(capsys, "uniqueness", "--k", "6")
    assert code == 2
    code, _, _ = run(capsys, "uniqueness", "--k", "1", "--delta", "3")
    assert code == 1


def test_kappa(capsys):
    code, out, _ = run(capsys, "kappa", "--dmax", "2", "--wcap", "3", "--grid", "5", "--samples", "50")
    rec = tables(out)[0][0]
    assert code == 0 and rec["pass"] == "pass" and rec["regime"] == "Covered36"
    assert [r["d"] for r in tables(out)[1]] == ["1", "2"]


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--name", "psi1plusr", "--name", "xi6t")
    rows = tables(out)[0]
    assert code == 0 and [r["name"] for r in rows] == ["psi1plusr", "xi6t"]
    assert all(r["pass"] == "pass" for r in rows)
    code, _, err = run(capsys, "verify", "--name", "nope")
    assert code == 1 and "UnknownName" in err
    code, _, _ = run(capsys, "verify")
    assert code == 2


@pytest.mark.parametrize("construction, extra", [
    ("domset-to-hyperis", []), ("hardcore", ["--k", "4"]), ("domset-gadget", []),
])
def test_reduce(capsys, tmp_path, construction, extra):
    g = tmp_path / "c3.graph"
    g.write_text("p graph 3 3\n1 2\n2 3\n1 3\n")
    out_path = tmp_path / "out.txt"
    code, out, _ = run(capsys, "reduce", construction, "--input", str(g),
                       "--output", str(out_path), "--check", *extra)
    assert code == 0
    rec = tables(out)[0][0]
    assert rec["check"] == "true"
    assert out_path.read_text().startswith("p ")
    side = (tmp_path / "out.txt.record.tsv").read_text()
    assert construction in side


def test_reduce_hardcore_needs_k(capsys, tmp_path):
    g = tmp_path / "g.graph"
    g.write_text("p graph 2 1\n1 2\n")
    code, _, _ = run(capsys, "reduce", "hardcore", "--input", str(g), "--output", str(tmp_path / "o"))
    assert code == 2


def test_figures(capsys, tmp_path, mcnf):
    fig = tmp_path / "figs"
    code, _, err = run(capsys, "uniqueness", "--critical", "4", "--figures", str(fig))
    assert code == 0 and "figure written" in err
    run(capsys, "count", "--input", mcnf, "--figures", str(fig))
    run(capsys, "verify", "--name", "xi2t", "--figures", str(fig))
    assert len(list(fig.glob("*.png"))) == 3


def test_every_subcommand_has_help():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name in sub.choices:
        res = subprocess.run([sys.executable, "-m", "hypercount", name, "--help"],
                             capture_output=True, text=True)
        assert res.returncode == 0 and "--threads" in res.stdout, name
