import json
import subprocess
import sys

import pytest

from apsieve.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, EXIT_UNRESOLVED, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines() if line.strip()]


def test_alphabet(capsys):
    code, out = run(capsys, "alphabet", "--pmax", "5")
    assert code == EXIT_OK and out[0]["size"] == 16


def test_tuples(capsys):
    code, out = run(capsys, "tuples", "--k", "5")
    assert code == EXIT_OK and len(out) == 880
    assert {"k": 5, "a": [-3, -5, 2, 1, 1]} in out
    assert run(capsys, "tuples", "--k", "5", "--forced", "7")[0] == EXIT_INPUT


def test_sieve_and_replay(capsys, tmp_path):
    code, out = run(capsys, "sieve", "--tuple=-2,-5,3,1,1", "--tuple=-3,-5,2,1,1", "--primes", "3,5,7")
    assert code == EXIT_OK
    assert out[0]["outcome"] == "eliminated" and out[0]["p"] == 3
    assert out[1]["outcome"] == "survives"
    f = tmp_path / "certs.jsonl"
    f.write_text("".join(json.dumps(r) + "\n" for r in out))
    code, rep = run(capsys, "sieve", "--replay", str(f))
    assert code == EXIT_OK and all(r["confirmed"] for r in rep)
    forged = dict(out[0], tuple=[-3, -5, 2, 1, 1])
    f.write_text(json.dumps(forged) + "\n")
    assert run(capsys, "sieve", "--replay", str(f))[0] == EXIT_FAIL
    f.write_text("garbage\n")
    assert run(capsys, "sieve", "--replay", str(f))[0] == EXIT_INPUT


def test_sieve_from_stdin(capsys, monkeypatch):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO('{"k": 5, "a": [-1, -15, -1, -2, 3]}\n'))
    code, out = run(capsys, "sieve")
    assert code == EXIT_OK and out[0]["outcome"] == "eliminated"


def test_curves(capsys):
    code, out = run(capsys, "curves", "jinv-check")
    assert code == EXIT_OK and len(out) == 12 and all(r["equal"] for r in out)
    code, out = run(capsys, "curves", "derive", "--tuple=1,5,6,7,2,1,10")
    assert code == EXIT_OK and out[0]["field_D"] == -1
    code, out = run(capsys, "curves", "delta", "--tuple=6,5,1,3,2")
    assert code == EXIT_OK and len(out[0]["deltas"]) == 4
    code, out = run(capsys, "curves", "local", "--tuple=1,5,6,7,2,1,10", "--delta", "1,-3")
    assert code == EXIT_OK and all(out[0]["soluble"].values())
    assert run(capsys, "curves", "local", "--tuple=1,5,6,7,2,1,10")[0] == EXIT_INPUT
    assert run(capsys, "curves", "derive")[0] == EXIT_INPUT


def test_oracle(capsys, tmp_path):
    code, out = run(capsys, "oracle", "check")
    assert code == EXIT_OK and out[0]["records"] >= 20
    code, out = run(capsys, "oracle", "key", "--tuple=1,5,6,7,2,1,10", "--delta", "3,-1")
    assert out[0]["chabauty"] == {"chabauty:13": ["-3"]} and out[0]["rank"] == 1
    code, out = run(capsys, "oracle", "key", "--tuple=1,5,6,7,2,1,10", "--delta", "1,-3")
    assert out[0]["rank"] == 0
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{}\n")
    assert run(capsys, "oracle", "check", "--fixtures", str(bad))[0] == EXIT_INPUT
    assert run(capsys, "oracle", "check", "--fixtures", str(tmp_path / "nope"))[0] == EXIT_INPUT


def test_search_and_verify(capsys):
    code, out = run(capsys, "search", "--k", "5", "--nmin", "-20", "--nmax", "20", "--dmin", "2", "--dmax", "10", "--pb", "eq:5")
    assert code == EXIT_OK and [(r["n"], r["d"]) for r in out] == [(-3, 2), (-4, 3), (-12, 7)]
    assert run(capsys, "search", "--pb", "bogus")[0] == EXIT_INPUT
    code, out = run(capsys, "verify", "-12", "7", "5", "30", "24")
    assert code == EXIT_OK and out[0]["tuple"] == [-3, -5, 2, 1, 1]
    assert run(capsys, "verify", "2", "1", "5", "7", "12")[0] == EXIT_FAIL
    assert run(capsys, "verify", "1", "2")[0] == EXIT_INPUT


def test_verify_theorem1(capsys):
    code, out = run(capsys, "verify", "--theorem1")
    assert code == EXIT_OK
    assert out[-1] == {"conclusion": "no solutions with d>1", "ok": True}
    assert len(out) == 9


def test_reduce(capsys):
    code, out = run(capsys, "reduce", "--tuple=3,1,5,6,7,2,1,10,11,3,13,14,15")
    assert code == EXIT_OK and out[0]["via"] == "subtuple"
    k23 = "5,6,7,2,1,10,11,3,13,14,15,1,17,2,19,5,21,22,23,6,1,26,3"
    code, out = run(capsys, "reduce", f"--tuple={k23}")
    assert code == EXIT_OK and out[-1]["reduces_to"] == [3, 1, 5, 6, 7, 2, 1]
    assert run(capsys, "reduce", "--tuple=1,2,3,5,7,11,13")[0] == EXIT_UNRESOLVED


def test_bad_input(capsys):
    assert main(["nosuch"]) == EXIT_INPUT
    assert main(["sieve", "--tuple=4,1"]) == EXIT_INPUT
    assert main(["pipeline", "--k", "7"]) == EXIT_INPUT


def test_pipeline_default(capsys):
    code, out = run(capsys, "pipeline", "--certificates")
    summary = out[-1]
    assert code == EXIT_OK
    assert summary["solutions"] == [[-12, 7], [-4, 3]]
    assert summary["counts_consistent"]
    certs = [r["certificate"] for r in out[:-1]]
    decided = summary["presieve_eliminated"] + summary["rank0_eliminated"] + summary["congruence_eliminated"]
    assert len(certs) == decided + len(summary["chabauty_resolved"])
    from apsieve.congruence_sieve import replay_certificate

    for c in certs:
        if c["stage"] in ("presieve", "congruence"):
            assert replay_certificate(c)


def test_pipeline_without_primes(capsys):
    code, out = run(capsys, "pipeline", "--primes=")
    s = out[-1]
    assert code == EXIT_UNRESOLVED
    assert s["solutions"] == [[-12, 7], [-4, 3]]
    assert {tuple(u["tuple"]) for u in s["unresolved"]} == {(-2, -5, 3, 1, 1), (-1, -15, -1, -2, 3)}


def test_pipeline_empty_store(capsys, tmp_path):
    f = tmp_path / "empty.jsonl"
    f.write_text("")
    code, out = run(capsys, "pipeline", "--fixtures", str(f))
    assert code == EXIT_UNRESOLVED and out[-1]["solutions"] == []


def test_pipeline_brute_crosscheck_reports_gap(capsys):
    code, out = run(capsys, "pipeline", "--dmin", "2", "--dmax", "200", "--pb", "eq:5")
    s = out[-1]
    assert code == EXIT_FAIL
    assert s["brute"]["unaccounted"] == [{"n": -3, "d": 2, "tuple": [-3, -1, 1, 3, 5], "tuple_generated": False}]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "apsieve", "alphabet", "--pmax", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["alphabet"] == [-2, -1, 1, 2]


def test_pipeline_with_5_dividing_first_term(capsys):
    # the extra run exposes the class of (-3, 2), whose tuple (5,3,1,-1,-3) is mirrored
    code, out = run(capsys, "pipeline", "--forced", "0,1,2")
    s = out[-1]
    assert code == EXIT_UNRESOLVED and s["generated"] == 1320
    assert {tuple(u["tuple"]) for u in s["unresolved"]} == {(5, 1, 3, 2, 1), (5, 3, 1, -1, -3)}
    assert s["solutions"] == [[-12, 7], [-4, 3]]
