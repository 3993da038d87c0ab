import json

import pytest

from bunchworks import cli, finalg, hilbert, models, sequent, slverify, symheap


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_enumerate_four(capsys):
    code, out, _ = run(capsys, "enumerate", "--n", "4", "--variety", "gbi")
    assert code == 0 and out.strip() == "20"


def test_enumerate_list_roundtrip(capsys):
    code, out, _ = run(capsys, "enumerate", "--n", "3", "--list", "--json")
    data = json.loads(out)
    algs = [finalg.FiniteGBIAlgebra.from_json(a) for a in data["algebras"]]
    assert code == 0 and data["count"] == 3 == len(algs)
    assert {finalg.catalog_name(a) for a in algs} == {"G3", "L3", "S3"}


def test_prove_outcomes(capsys):
    code, out, _ = run(capsys, "prove", "--mode", "bi", "top <= x -> (y -> x)")
    assert code == 0 and "imp_r" in out
    code, out, _ = run(capsys, "prove", "x . y <= y . x", "--json")
    data = json.loads(out)
    assert code == 1 and data["status"] == "not_provable" and data["countermodel"]["algebra"] == "N1"
    code, _, _ = run(capsys, "prove", "x & (x -> y) & (y -> z) <= z . z", "--budget", "2")
    assert code == 3


def test_proof_json_roundtrip(capsys):
    code, out, _ = run(capsys, "prove", "(x \\ y) . (y \\ z) <= x \\ z", "--json")
    tree = sequent.tree_from_json(json.loads(out)["proof"])
    assert code == 0 and sequent.check_tree(tree) == []
    assert tree == sequent.prove("(x \\ y) . (y \\ z) <= x \\ z").tree


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "parse", "x &")
    assert code == 2 and "^" in err
    code, out, _ = run(capsys, "parse", "x . 1 & top", "--nf", "gbi", "--json")
    assert code == 0 and json.loads(out)["nf"] == "x"


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "classify", "Z9")[0] == 2
    assert run(capsys, "reproduce-counts", "9")[0] == 2
    assert run(capsys, "verify", "/nonexistent.imp")[0] == 2


def test_reproduce_counts(capsys):
    code, out, _ = run(capsys, "reproduce-counts", "4", "--json")
    rows = json.loads(out)["rows"]
    assert code == 0 and [(r["n"], r["gbi"], r["bi"]) for r in rows] == [(2, 1, 1), (3, 3, 3), (4, 20, 16)]
    code, out, _ = run(capsys, "reproduce-counts", "0", "--json")
    assert code == 0 and json.loads(out)["rows"] == []


def test_check_hilbert(capsys, tmp_path):
    gamma, proof, _ = hilbert.antitone_lres_proof()
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"hypotheses": ["x -> y"], "goal": "y \\ z -> x \\ z",
                                "steps": json.loads(proof.to_json())}))
    code, out, _ = run(capsys, "check-hilbert", str(path), "--json")
    assert code == 0 and json.loads(out)["ok"]
    path.write_text(json.dumps({"hypotheses": [], "steps": json.loads(proof.to_json())}))
    code, out, _ = run(capsys, "check-hilbert", str(path), "--json")
    assert code == 1 and json.loads(out)["step"] == 1


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "G3", "--json")
    d = json.loads(out)["G3"]
    assert code == 0 and d["subdirectly_irreducible"] and not d["simple"]


def test_model(capsys):
    code, out, _ = run(capsys, "model", "heap", "--locs", "2", "--rvals", "2", "--inttocl", "--json")
    d = json.loads(out)
    assert code == 0 and d["violations"] == [] and all(v["passed"] for v in d["inttocl"].values())
    code, out, _ = run(capsys, "model", "weakening", "--size", "2", "--chain", "--json")
    d = json.loads(out)
    assert code == 1 and {k for k, _ in d["violations"]} == {"bifunctoriality"}
    assert d["complex_algebra"]["n"] == 6


def test_entail_and_biabduce(capsys):
    code, out, _ = run(capsys, "entail", "x |-> a", "x |-> a * x |-> a", "--json")
    assert code == 1 and "counter" in json.loads(out)
    assert run(capsys, "entail", "x |-> a * y |-> b", "y |-> b * x |-> a")[0] == 0
    assert run(capsys, "entail", "x |-> a", "x |-> a * x |-> a", "--method", "syntactic")[0] == 3
    code, out, _ = run(capsys, "biabduce", "x |-> a", "y |-> b", "--max-atoms", "3", "--json")
    sols = json.loads(out)["solutions"]
    assert code == 0 and sols
    for s in sols:
        H = symheap.parse_sh("x |-> a").star(symheap.parse_sh(s["antiframe"]))
        C = symheap.parse_sh("y |-> b").star(symheap.parse_sh(s["frame"]))
        assert symheap.sh_entails(H, C)
    assert run(capsys, "biabduce", "x |-> a", "x |-> a * x |-> a")[0] == 1


def test_verify_and_exec(capsys, tmp_path):
    good = tmp_path / "good.imp"
    good.write_text("{E v. X |-> v} [X] := 3 {X |-> 3}")
    assert run(capsys, "verify", str(good), "--bounds", "3,4")[0] == 0
    bad = tmp_path / "bad.imp"
    bad.write_text("{top * X = 2} X := CONS(2) {top * X = 2}")
    code, out, _ = run(capsys, "verify", str(bad), "--json")
    d = json.loads(out)
    assert code == 1 and d["status"] == "invalid" and d["outcome"]["store"]["X"] != 2
    loop = tmp_path / "loop.imp"
    loop.write_text("{emp} WHILE 0 = 0 DO SKIP OD {emp}")
    assert run(capsys, "verify", str(loop), "--bounds", "2,2", "--fuel", "3")[0] == 3
    prog = tmp_path / "p.imp"
    prog.write_text("X := CONS(5); [X] := 1")
    code, out, _ = run(capsys, "exec", str(prog), "--state", "X=0", "--bounds", "2,6", "--json")
    rows = json.loads(out)["outcomes"]
    assert code == 0 and len(rows) == 2
    states = [slverify.MachineState.make(r["state"]["store"], {int(k): v for k, v in r["state"]["heap"].items()})
              for r in rows]
    assert all(st.h == {st.s["X"]: 1} for st in states)
    prog.write_text("DISPOSE X")
    assert run(capsys, "exec", str(prog), "--state", "X=0")[0] == 1
    assert run(capsys, "exec", str(prog), "--state", "Y=0")[0] == 2
    assert run(capsys, "verify", str(good), "--bounds", "0,4")[0] == 2


def test_output_file(capsys, tmp_path):
    out = tmp_path / "o.json"
    assert run(capsys, "enumerate", "--n", "2", "--json", "-o", str(out))[0] == 0
    assert json.loads(out.read_text())["count"] == 1


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "bunchworks", "enumerate", "--n", "3"], capture_output=True,
                       text=True)
    assert r.returncode == 0 and r.stdout.strip() == "3"
