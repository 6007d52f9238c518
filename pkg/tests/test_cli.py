import json

import pytest

from finmember import __version__
from finmember.cli import main


def run(capsys, *argv):
    code = main(["--json", *argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def files(tmp_path):
    (tmp_path / "s3.txt").write_text("degree 3\ngen (1 2)\ngen (1 2 3)\n")
    (tmp_path / "c3.txt").write_text("degree 3\ngen (1 2 3)\n")
    (tmp_path / "g.cfg").write_text("degree 3\nstart S\nprod S -> S S\nprod S -> (1 2 3)\n")
    (tmp_path / "x.x3hs").write_text("4\n1 2 3\n2 3 4\n")
    (tmp_path / "k.txt").write_text("degree 3\ntarget (1 3 2)\nfactor (1 2 3)\n")
    return tmp_path


def test_member(capsys, files):
    code, rep = run(capsys, "member", "--group", str(files / "s3.txt"), "--elem", "(1 3)")
    assert code == 0 and rep["decision"] is True
    for key in ("problem", "decision", "stats", "version", "instance_hash"):
        assert key in rep
    assert rep["version"] == __version__ and "elapsed_ms" in rep["stats"]


def test_fail_on_no(capsys, files):
    code, rep = run(capsys, "--fail-on-no", "member", "--group", str(files / "c3.txt"), "--elem", "(1 2)")
    assert code == 1 and rep["decision"] is False


def test_cfm_with_oracle(capsys, files):
    code, rep = run(capsys, "cfm", "--grammar", str(files / "g.cfg"), "--target", "()", "--oracle")
    assert code == 0 and rep["decision"] is True and rep["oracle_agreement"] is True
    assert rep["certificate"] is not None


def test_input_error(capsys, files):
    code, rep = run(capsys, "member", "--group", str(files / "s3.txt"), "--elem", "(1 9)")
    assert code == 2 and rep["kind"] == "input"
    code, _ = run(capsys, "member", "--group", str(files / "missing.txt"), "--elem", "()")
    assert code == 2


def test_cap_exceeded(capsys, files):
    code, rep = run(capsys, "cfm", "--grammar", str(files / "g.cfg"), "--target", "()", "--max-degree", "2")
    assert code == 3 and rep["kind"] == "cap"


def test_instance_hash_is_stable(capsys, files):
    args = ("knapsack", "--instance", str(files / "k.txt"), "--oracle")
    _, a = run(capsys, *args)
    _, b = run(capsys, *args)
    assert a["instance_hash"] == b["instance_hash"] and a["decision"] is True


def test_reduce_verify(capsys, files):
    code, rep = run(capsys, "reduce", "x3hs-subsetsum", "--instance", str(files / "x.x3hs"), "--verify")
    assert code == 0 and rep["oracle_agreement"] is True


def test_gen_is_deterministic(capsys):
    main(["gen", "--problem", "knapsack", "--degree", "5", "--n", "4", "--seed", "7"])
    a = capsys.readouterr().out
    main(["gen", "--problem", "knapsack", "--degree", "5", "--n", "4", "--seed", "7"])
    assert capsys.readouterr().out == a and a.startswith("degree 5")


def test_blackbox_demo(capsys, files):
    code, rep = run(capsys, "blackbox-demo", "--group", str(files / "s3.txt"), "--elem", "(2 3)",
                    "--redundant")
    assert code == 0 and rep["decision"] is True and rep["certificate"]["verified"]


def test_quiet(capsys, files):
    assert main(["--quiet", "member", "--group", str(files / "s3.txt"), "--elem", "()"]) == 0
    assert capsys.readouterr().out == ""
