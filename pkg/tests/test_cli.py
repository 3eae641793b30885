import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES
from quantsafe.cli import main
from quantsafe.core import LassoWord, parse_automaton
from quantsafe.decide import is_constant
from quantsafe.evaluate import evaluate_lasso
from quantsafe.generate import gadget, parse_nfa, random_automaton, serialize_nfa

FIG1A = str(FIXTURES / "fig1a.qa")


def run(capsys, *argv):
    code = main([str(x) for x in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval(capsys):
    assert run(capsys, "eval", FIG1A, "--lasso", "on")[:2] == (0, "2\n")
    assert run(capsys, "eval", FIG1A, "--prefix", "err", "--loop", "on")[:2] == (0, "0\n")
    assert run(capsys, "eval", FIXTURES / "dsum.qa", "--loop", "b")[:2] == (0, "2\n")
    assert run(capsys, "eval", FIG1A, "--lasso", "err | on")[:2] == (0, "0\n")


def test_safety_json(capsys):
    code, out, _ = run(capsys, "safety", FIG1A, "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["answer"] is False
    assert rep["witness"] == {"prefix": [], "loop": ["off"]}
    for key in ("version", "digest", "question", "timing_ms", "method", "schema"):
        assert key in rep


def test_liveness_human(capsys):
    code, out, _ = run(capsys, "liveness", FIXTURES / "fig1c.qa")
    assert code == 0 and out.splitlines()[0] == "live: true"
    code, out, _ = run(capsys, "liveness", FIG1A)
    assert out.splitlines() == ["live: false", "top: 2", "witness prefix: err"]


def test_limited(capsys):
    code, out, _ = run(capsys, "limited", FIXTURES / "dist_a1.qa")
    assert code == 0
    assert out.splitlines()[0] == "limited: false"
    assert "witness: (a)^w" in out
    code, out, _ = run(capsys, "limited", FIXTURES / "distance" / "d02_first_a.dist")
    assert out.splitlines()[0] == "limited: true"


def test_other_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "top", FIXTURES / "fig2.qa")
    assert code == 0 and out.splitlines()[0] == "2"
    code, out, _ = run(capsys, "constant", FIXTURES / "dsum.qa", "--decimal", "3")
    assert out.splitlines()[:2] == ["constant: false", "top: 2.000"]
    code, out, _ = run(capsys, "closure", FIG1A, "--det")
    c = parse_automaton(out)
    assert c.deterministic and c.valfn.tag == "inf"
    code, out, _ = run(capsys, "decompose", FIG1A, "-o", tmp_path)
    assert code == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    b = parse_automaton((tmp_path / "B.qa").read_text())
    c = parse_automaton((tmp_path / "C.qa").read_text())
    assert manifest["question"] == "decompose"
    a = parse_automaton(Path(FIG1A).read_text())
    w = LassoWord(["off"], ["eco", "on"])
    assert evaluate_lasso(a, w) == min(evaluate_lasso(b, w), evaluate_lasso(c, w))


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.qa"
    bad.write_text("valfn: limsup\nalphabet: a\ninitial: q\nq -- a:x --> q\n")
    code, _, err = run(capsys, "safety", bad)
    assert code == 2 and "line 4" in err
    nd = tmp_path / "nd.qa"
    nd.write_text("valfn: limsup\nalphabet: a\ninitial: q\nq -- a:0 --> q\nq -- a:1 --> q\n")
    code, _, err = run(capsys, "decompose", nd)
    assert code == 3 and "open" in err
    code, _, _ = run(capsys, "eval", FIG1A, "--lasso", "nope")
    assert code == 2
    code, _, _ = run(capsys, "safety", tmp_path / "missing.qa")
    assert code == 2


@settings(max_examples=40)
@given(st.text(alphabet="abq01:->#* \n\tvalfnisupxtrd/", max_size=120))
def test_malformed_inputs_exit_2(tmp_path_factory, text):
    path = tmp_path_factory.mktemp("m") / "x.qa"
    path.write_text(text)
    code = main(["constant", str(path)])
    assert code in (0, 2)
    if code == 0:
        parse_automaton(text)


def test_batch_directory_with_jobs(capsys, tmp_path):
    for seed in range(3):
        (tmp_path / f"r{seed}.qa").write_text(
            __import__("quantsafe").serialize_automaton(random_automaton(seed, 3, ("a", "b"), (0, 1, 2), "limsup")))
    code, out, _ = run(capsys, "safety", tmp_path, "--json", "--jobs", "2")
    lines = [json.loads(x) for x in out.splitlines()]
    assert code == 0 and len(lines) == 3
    code, out2, _ = run(capsys, "safety", tmp_path, "--json")
    strip = [{k: v for k, v in json.loads(x).items() if k != "timing_ms"} for x in out2.splitlines()]
    assert strip == [{k: v for k, v in x.items() if k != "timing_ms"} for x in lines]


def test_gen_reproducible(capsys):
    args = ["gen", "--seed", "7", "--states", "3", "--letters", "2", "--valfn", "limsup"]
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    a = parse_automaton(first)
    assert a.weights <= {0, 1, 2}
    assert "seed=7" in first


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6), st.sampled_from(["inf", "sup", "liminf", "limsup", "liminfavg", "limsupavg", "dsum"]),
       st.booleans())
def test_generated_always_valid(seed, valfn, det):
    a = random_automaton(seed, 4, ("a", "b", "c"), (0, 1, 2), valfn, det)
    assert a.weights <= {0, 1, 2}
    assert a.deterministic or not det


def test_gadget_command(capsys, tmp_path):
    code, out, _ = run(capsys, "gadget", FIXTURES / "nfa" / "n01_all.nfa")
    a = parse_automaton(out)
    assert set(a.alphabet) == {"a", "b", "#"}
    assert is_constant(a).answer
    nfa = parse_nfa((FIXTURES / "nfa" / "n02_a_star.nfa").read_text())
    v = is_constant(gadget(nfa, "limsup"))
    assert not v.answer and "#" in v.witness.prefix + v.witness.loop
    assert parse_nfa(serialize_nfa(nfa)) == nfa


def test_reports_revalidate_via_eval(capsys, tmp_path):
    for cmd, f in [("safety", FIG1A), ("constant", FIG1A), ("top", FIXTURES / "fig2.qa"),
                   ("constant", FIXTURES / "limavg.qa")]:
        _, out, _ = run(capsys, cmd, f, "--json")
        rep = json.loads(out)
        w = rep["witness"]
        _, val, _ = run(capsys, "eval", f, "--prefix", " ".join(w["prefix"]), "--loop", " ".join(w["loop"]),
                        "--json")
        value = Fraction(json.loads(val)["value"])
        if cmd == "top":
            assert value == Fraction(rep["value"])
        elif cmd == "constant":
            assert value < Fraction(rep["value"])


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "quantsafe.cli", "eval", FIG1A, "--lasso", "on"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "2\n"
