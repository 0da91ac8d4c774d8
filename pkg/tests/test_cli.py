from __future__ import annotations

import pytest

from jacpair import graphs
from jacpair.cli import main
from jacpair.graphs import emit_graph


@pytest.fixture
def graph_file(tmp_path):
    def write(G, name="g.txt"):
        path = tmp_path / name
        path.write_text(emit_graph(G))
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_jacobian(capsys, graph_file):
    assert run(capsys, "jacobian", graph_file(graphs.cycle(4))) == (0, "factors: 4\n", "")
    code, out, _ = run(capsys, "jacobian", graph_file(graphs.wedge(graphs.cycle(3), graphs.cycle(4))))
    assert out == "factors: 12\n"
    code, out, _ = run(capsys, "jacobian", graph_file(graphs.complete(4)))
    assert out == "factors: 4,4\n"
    code, out, _ = run(capsys, "jacobian", graph_file(graphs.subdivided_banana((2, 2, 2))))
    assert out == "factors: 2,6\n"
    code, out, _ = run(capsys, "jacobian", graph_file(graphs.cycle(1)))
    assert out == "factors: 1\n"
    code, out, _ = run(capsys, "jacobian", "--pretty", graph_file(graphs.cycle(4)))
    assert out.splitlines()[:3] == ["factors: 4", "order: 4", "exponent: 4"]


def test_jacobian_stdin(capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO("2 1\n0 1 3\n"))
    assert run(capsys, "jacobian", "-")[1] == "factors: 3\n"


def test_pairing(capsys, graph_file):
    path = graph_file(graphs.banana(5))
    assert run(capsys, "pairing", path, "--d1", "1:1,0:-1", "--d2", "1:1,0:-1") == (0, "1/5\n", "")
    path = graph_file(graphs.multicycle((1, 2, 2)))
    assert run(capsys, "pairing", path, "--d1", "2:1,0:-1", "--d2", "2:1,0:-1")[1] == "3/8\n"
    path = graph_file(graphs.cycle(5))
    assert run(capsys, "pairing", path, "--d1", "1:1,0:-1", "--d2", "1:1,0:-1")[1] == "4/5\n"
    assert run(capsys, "pairing", path, "--d1", "1:5,0:-5", "--d2", "1:1,0:-1")[1] == "0/1\n"


def test_reduce(capsys, graph_file):
    path = graph_file(graphs.cycle(6))
    code, out, _ = run(capsys, "reduce", path, "--divisor", "1:3,0:-3")
    assert code == 0 and out == "0:-1,3:1\n"
    path = graph_file(graphs.banana(3))
    assert run(capsys, "reduce", path, "--divisor", "0:3,1:-3", "--base", "1")[1] == "0\n"


def test_classify(capsys, graph_file):
    assert run(capsys, "classify", graph_file(graphs.complete(4)))[1] == "F:2^2\n"
    assert run(capsys, "classify", graph_file(graphs.cycle(5)))[1] == "5^1:res\n"
    assert run(capsys, "classify", graph_file(graphs.cycle(7)))[1] == "7^1:nonres\n"
    code, out, _ = run(capsys, "classify", "--pretty", graph_file(graphs.cycle(5)))
    assert out == "5^1:res\nfactors: 5\ngram: 4/5\n"


def test_realize_then_classify(capsys, tmp_path):
    out_path = str(tmp_path / "g.txt")
    code, out, _ = run(capsys, "realize", "2^3:D", "-o", out_path)
    assert code == 0 and out == ""
    text = open(out_path).read()
    assert "# spec: 2^3:D" in text and "# block: 2^3:D <- " in text
    assert run(capsys, "classify", out_path) == (0, "2^3:D\n", "")


@pytest.mark.parametrize(
    "spec, factors",
    [("3^1:res", "3"), ("2^3:A + 2^3:B", "8,8"), ("2^3:C", "8"), ("2^3:C + 5^1:nonres", "40"), ("F:2^2", "4,4")],
)
def test_realize_examples(capsys, tmp_path, spec, factors):
    path = str(tmp_path / "g.txt")
    assert run(capsys, "realize", spec, "-o", path)[0] == 0
    assert run(capsys, "jacobian", path)[1] == f"factors: {factors}\n"
    assert run(capsys, "classify", path)[1] == spec + "\n"


def test_realize_stdout_is_stable(capsys):
    first = run(capsys, "realize", "13^1:nonres + 2^2:B")
    second = run(capsys, "realize", "13^1:nonres + 2^2:B")
    assert first == second and first[0] == 0
    lines = first[1].splitlines()
    assert lines[0] == "10 11"
    assert lines[-3:] == [
        "# spec: 2^2:B + 13^1:nonres",
        "# block: 2^2:B <- cycle(4)",
        "# block: 13^1:nonres <- subdivided_banana(1,1,6)",
    ]


def test_realize_errors(capsys):
    code, out, err = run(capsys, "realize", "E:2")
    assert code == 1 and out == "" and "Unrealizable" in err
    code, _, err = run(capsys, "realize", "2^2:C")
    assert code == 2 and "r >= 3" in err
    assert run(capsys, "realize", "73^1:nonres", "--q-bound-multiplier", "1/10")[0] == 1
    assert run(capsys, "realize", "3^1:res", "--q-bound-multiplier", "x")[0] == 2


def test_verify_q(capsys):
    code, out, _ = run(capsys, "verify-q", "1000", "--filter-1mod24", "--emit-certificates")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "p q a ratio"
    assert [int(l.split()[0]) for l in lines[1:-1]] == [73, 97, 193, 241, 313, 337, 409, 433, 457, 577, 601, 673, 769, 937]
    assert lines[-1].startswith("checked=14 failures=0 max_q=")
    assert run(capsys, "verify-q", "2")[0] == 2
    code, out, _ = run(capsys, "verify-q", "100")
    assert code == 1 and "failures=" in out
    sequential = run(capsys, "verify-q", "50000", "--filter-1mod24")
    parallel = run(capsys, "verify-q", "50000", "--filter-1mod24", "--jobs", "3")
    assert sequential == parallel


def test_census(capsys, tmp_path):
    code, out, _ = run(capsys, "census", "--max-trees", "4")
    assert code == 0
    assert out.splitlines()[0] == "trees\tn\tfactors\tclass\tedges"
    assert len(out.splitlines()) == 3
    path = tmp_path / "c.tsv"
    assert run(capsys, "census", "--max-trees", "8", "-o", str(path), "--jobs", "2")[0] == 0
    assert path.read_text() == run(capsys, "census", "--max-trees", "8")[1]


def test_check_absence(capsys):
    assert run(capsys, "check-absence", "2,4", "--max-trees", "8") == (0, "ABSENT\n", "")
    for factors in ("2", "2,2", "2,2,2"):
        assert run(capsys, "check-absence", factors, "--max-trees", "8")[1] == "ABSENT\n"
    code, out, _ = run(capsys, "check-absence", "8", "--max-trees", "8")
    assert out.splitlines()[0] == "PRESENT"
    assert out.splitlines()[1].startswith("witness: 8\t8 8;")
    assert run(capsys, "check-absence", "3,3", "--max-trees", "8")[0] == 2
    assert run(capsys, "check-absence", "x", "--max-trees", "8")[0] == 2


def test_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 1\n0 0 1\n")
    code, _, err = run(capsys, "jacobian", str(bad))
    assert code == 2 and "line 2" in err
    code, _, err = run(capsys, "jacobian", str(tmp_path / "missing.txt"))
    assert code == 2
    disconnected = tmp_path / "d.txt"
    disconnected.write_text("3 1\n0 1 1\n")
    assert run(capsys, "jacobian", str(disconnected))[0] == 1
    ok = tmp_path / "ok.txt"
    ok.write_text(emit_graph(graphs.cycle(4)))
    assert run(capsys, "pairing", str(ok), "--d1", "1:1", "--d2", "1:1,0:-1")[0] == 2
    assert run(capsys, "jacobian", str(ok), "--base", "9")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
