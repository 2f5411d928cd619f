import json

import pytest

from artincube import cli, coxeter as cx

B5 = cx.braid_matrix(5).to_text()


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def fields(text):
    return dict(line.split(": ", 1) for line in text.splitlines() if ": " in line)


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {"b5": B5, "d3": "gens a b\na b 3\n", "d4": "gens a b\na b 4\n",
                       "star": cx.even_star_matrix([4, 6]).to_text(), "empty": "",
                       "t333": "gens a b c\na b 3\na c 3\nb c 3\n"}.items():
        p = tmp_path / f"{name}.txt"
        p.write_text(text)
        paths[name] = str(p)
    paths["dir"] = tmp_path
    return paths


def test_classify_braid(capsys, files):
    code, out, _ = run(capsys, "classify", files["b5"])
    assert code == 0
    f = fields(out)
    assert f["verdict"] == "NotVirtuallyCC"
    assert f["obstruction"] == "OddTriple(s1, s2, s3)"
    assert "caveat" in f


def test_classify_dihedral_shows_decomposition(capsys, files):
    code, out, _ = run(capsys, "classify", files["d3"])
    assert code == 0 and fields(out)["verdict"] == "Cubulated"
    assert "odd {a b} m=3" in fields(out)["decomposition"]


def test_classify_errors(capsys, files):
    code, _, err = run(capsys, "classify", files["empty"])
    assert code == 2 and "empty matrix file" in err
    code, _, err = run(capsys, "classify", str(files["dir"] / "missing.txt"))
    assert code == 2 and "cannot read" in err


def test_build_writes_complex_and_verifies(capsys, files):
    out_path = files["dir"] / "x.cc"
    dot_path = files["dir"] / "x.dot"
    code, out, _ = run(capsys, "build", files["d3"], "--construction", "bm", "-o", str(out_path),
                       "--dot", str(dot_path))
    assert code == 0
    assert out.count("outcome: PASS") == 2
    assert out_path.read_text().startswith("# cube complex X(A(3))")
    assert dot_path.read_text().startswith("digraph")
    code, out, _ = run(capsys, "verify", str(out_path), "--gromov")
    assert code == 0 and "locally CAT(0)" in out


def test_build_star_and_refusal(capsys, files):
    assert run(capsys, "build", files["star"], "--construction", "star")[0] == 0
    code, out, _ = run(capsys, "build", files["b5"], "--construction", "general")
    assert code == 1 and "OddTriple(s1, s2, s3)" in out
    code, out, _ = run(capsys, "build", files["d3"], "--construction", "xa")
    assert code == 1 and "even" in out


def test_report_is_byte_stable(capsys, files):
    first = run(capsys, "build", files["star"])[1]
    second = run(capsys, "build", files["star"])[1]
    assert first == second
    assert "seconds" in run(capsys, "build", files["star"], "--timing")[1]


def test_json_report(capsys, files):
    code, out, _ = run(capsys, "build", files["d4"], "--construction", "xa", "--json")
    data = json.loads(out)
    assert code == 0 and data["result"] == "PASS"
    assert all(c["anchor"] for c in data["checks"])


def test_words_commands(capsys, files):
    code, out, _ = run(capsys, "words", "equal", "--matrix", files["d3"], "a b a", "b a b")
    assert code == 0 and fields(out)["answer"] == "Equal"
    code, out, _ = run(capsys, "words", "commute", "--matrix", files["d3"], "a", "b")
    assert fields(out)["answer"] == "NotEqual"
    code, out, _ = run(capsys, "words", "center", "--matrix", files["t333"])
    assert code == 0 and fields(out)["cells NotEqual"] == "1"
    code, out, _ = run(capsys, "words", "center", "--matrix", files["d4"])
    assert code == 1
    code, out, _ = run(capsys, "words", "product", "--matrix", files["d4"], "-N", "1", "-P", "3", "-Q", "3")
    assert code == 0 and fields(out)["cells NotEqual"] == "16"
    code, out, _ = run(capsys, "words", "projection", "--matrix", files["t333"], "--keep", "a")
    assert code == 0 and fields(out)["valid"] == "False"


def test_words_budget(capsys, files, monkeypatch):
    code, out, _ = run(capsys, "words", "equal", "--matrix", files["t333"], "--budget", "2",
                       "a b a c b a", "c a b a b c")
    assert fields(out)["answer"] in ("BudgetExceeded", "NotEqual")
    monkeypatch.setenv("ARTINCUBE_BFS_BUDGET", "1")
    code, out, _ = run(capsys, "words", "equal", "--matrix", files["t333"], "a b a b", "b a b a")
    assert fields(out)["answer"] == "BudgetExceeded" and code == 1


def test_presentation_command(capsys):
    code, out, _ = run(capsys, "presentation", "6")
    assert code == 0 and fields(out)["answer"] == "Equivalent"


def test_minset_commands(capsys):
    g = "D=2; sigma=(2,1); signs=(+,+); t=(1,1)"
    code, out, _ = run(capsys, "minset", "delta", g)
    assert code == 0 and fields(out)["delta"] == "2"
    code, out, _ = run(capsys, "minset", "min1", g, "--radius", "2", "--points")
    assert code == 0 and fields(out)["size"] == "12"
    code, out, _ = run(capsys, "minset", "harness", "D=2; sigma=(2,1); signs=(+,+); t=(1,2)")
    assert code == 0 and out.count("outcome: PASS") == 3
    code, out, _ = run(capsys, "minset", "harness", "D=2; sigma=(2,1); signs=(+,-); t=(1,0)")
    assert code == 1
    code, out, _ = run(capsys, "minset", "axis", "D=2; sigma=(2,1); signs=(+,-); t=(1,0)")
    assert fields(out)["answer"] == "Elliptic"
    code, out, _ = run(capsys, "minset", "skewer", "t=(2)", "--coord", "1", "--at", "0")
    assert fields(out)["answer"] == "Skewers+"
    code, _, err = run(capsys, "minset", "delta", "D=2; sigma=(1)")
    assert code == 2


def test_selftest_quick_subset(capsys):
    code, out, _ = run(capsys, "selftest", "--scale", "quick", "--only", "braid", "words")
    assert code == 0 and fields(out)["result"] == "PASS"


def test_selftest_rejects_unknown_scale(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["selftest", "--scale", "huge"])
    assert info.value.code == 2
