"""Command-line front-end.

Exit status is 0 whenever an analysis produced a verdict (true or false),
2 for parse and validation errors, and 3 for unsupported combinations.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .closure import determinize_inf, safety_closure_inf
from .core import (LassoWord, QuantsafeError, UnsupportedError, ValidationError, decimal_string,
                   format_rational, parse_automaton, serialize_automaton, to_dot)
from .decide import is_constant, is_live, is_safe
from .decompose import decompose
from .evaluate import evaluate_lasso, top_value
from .generate import gadget, parse_nfa, random_automaton
from .limitedness import is_limited, parse_distance_automaton, unlimited_witness

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 2, 3


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _render_value(x, digits):
    return decimal_string(x, digits) if digits is not None else format_rational(x)


def _report(path, data, question, started, **fields) -> dict:
    rep = {"schema": SCHEMA_VERSION, "version": __version__, "input": str(path), "digest": _digest(data),
           "question": question}
    rep.update(fields)
    rep.setdefault("method", [])
    rep["timing_ms"] = round((time.perf_counter() - started) * 1000, 3)
    return rep


def _lasso_from_args(args) -> LassoWord:
    if args.lasso is not None:
        text = args.lasso
        if "|" in text:
            pre, _, loop = text.partition("|")
            return LassoWord(pre.split(), loop.split())
        return LassoWord((), text.split())
    if args.loop is None:
        raise ValidationError("give --lasso or --loop")
    return LassoWord((args.prefix or "").split(), args.loop.split())


# ---------------------------------------------------------------------------
# analyses: each returns a report dict

def _verdict_report(path, data, started, verdict, a):
    j = verdict.to_json()
    fields = {"answer": j["answer"], "method": j["method"]}
    if "value" in j:
        fields["value"] = j["value"]
    if "witness" in j:
        fields["witness"] = j["witness"]
    if isinstance(verdict.witness, LassoWord):
        # values on the witness, so that a report can be re-checked with `eval`
        fields["witness_value"] = format_rational(evaluate_lasso(a, verdict.witness))
        if verdict.question == "safe":
            fields["closure_value"] = format_rational(evaluate_lasso(safety_closure_inf(a), verdict.witness))
    return _report(path, data, verdict.question, started, **fields)


def analyse(command: str, path: str, options: dict) -> dict:
    data = Path(path).read_bytes()
    text = data.decode("utf-8")
    started = time.perf_counter()
    if command == "limited":
        d = parse_distance_automaton(text)
        limited = is_limited(d)
        fields = {"answer": limited, "method": ["stabilization monoid closure"]}
        if not limited and d.total and d.accepting == frozenset(range(d.n_states)):
            wit = unlimited_witness(d)
            fields["witness"] = wit.word.to_json()
            fields["bound_m"] = wit.m
            fields["min_run_mean"] = format_rational(wit.min_loop_mean)
        return _report(path, data, "limited", started, **fields)
    a = parse_automaton(text)
    if command == "eval":
        w = options["lasso"]
        value = evaluate_lasso(a, w)
        return _report(path, data, "eval", started, value=format_rational(value), lasso=w.to_json())
    if command == "top":
        value, w = top_value(a)
        return _report(path, data, "top", started, value=format_rational(value), witness=w.to_json())
    if command == "closure":
        c = safety_closure_inf(a)
        method = ["state top values", "reweight transitions by target top value"]
        if options.get("det"):
            c = determinize_inf(c)
            method.append("determinize")
        return _report(path, data, "closure", started, automaton=serialize_automaton(c),
                       dot=to_dot(c) if options.get("dot") else None, method=method)
    if command == "constant":
        return _verdict_report(path, data, started, is_constant(a), a)
    if command == "safety":
        return _verdict_report(path, data, started, is_safe(a), a)
    if command == "liveness":
        return _verdict_report(path, data, started, is_live(a), a)
    if command == "decompose":
        dec = decompose(a)
        out = options.get("out")
        files = {}
        if out:
            outdir = Path(out)
            outdir.mkdir(parents=True, exist_ok=True)
            (outdir / "B.qa").write_text(serialize_automaton(dec.safety))
            (outdir / "C.qa").write_text(serialize_automaton(dec.liveness))
            files = {"safety": str(outdir / "B.qa"), "liveness": str(outdir / "C.qa")}
        rep = _report(path, data, "decompose", started, safety=serialize_automaton(dec.safety),
                      liveness=serialize_automaton(dec.liveness), files=files,
                      method=["safety closure as B", "top substitution for C"])
        if out:
            (Path(out) / "manifest.json").write_text(json.dumps(rep, indent=2) + "\n")
        return rep
    raise UnsupportedError(f"unknown command {command}")


def _print_human(rep: dict, digits):
    q = rep["question"]
    label = {"constant": "constant", "safe": "safe", "live": "live", "limited": "limited"}.get(q)
    if q in ("eval", "top"):
        from fractions import Fraction
        print(_render_value(Fraction(rep["value"]), digits))
        if q == "top":
            print("witness: " + str(LassoWord.from_json(rep["witness"])))
        return
    if q == "closure":
        print(rep["automaton"], end="")
        if rep.get("dot"):
            print(rep["dot"], end="")
        return
    if q == "decompose":
        print("# safety part B")
        print(rep["safety"], end="")
        print("# liveness part C")
        print(rep["liveness"], end="")
        return
    print(f"{label}: {str(rep['answer']).lower()}")
    if "value" in rep:
        from fractions import Fraction
        name = "value" if rep["answer"] else "top"
        print(f"{name}: " + _render_value(Fraction(rep["value"]), digits))
    w = rep.get("witness")
    if w is not None:
        if "loop" in w:
            print("witness: " + str(LassoWord.from_json(w)))
        else:
            print("witness prefix: " + " ".join(w["prefix"]))


def _run_one(job):
    command, path, options = job
    try:
        return EXIT_OK, analyse(command, path, options)
    except UnsupportedError as exc:
        return EXIT_UNSUPPORTED, {"input": str(path), "error": str(exc)}
    except (QuantsafeError, ValueError, OSError) as exc:
        return EXIT_INPUT, {"input": str(path), "error": str(exc)}


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quantsafe", description="Safety and liveness analyses for quantitative automata.")
    p.add_argument("--version", action="version", version=f"quantsafe {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, batch=True):
        sp.add_argument("--json", action="store_true", help="machine-readable report")
        sp.add_argument("--decimal", type=int, metavar="N", help="render values with N decimals")
        if batch:
            sp.add_argument("--jobs", type=int, default=1, metavar="N", help="parallel workers for directories")

    e = sub.add_parser("eval", help="value on a lasso word")
    e.add_argument("file")
    e.add_argument("--lasso", help='loop letters, or "prefix | loop"')
    e.add_argument("--prefix")
    e.add_argument("--loop")
    common(e, batch=False)

    for name, helptext in [("top", "top value with witness"), ("constant", "is the function constant"),
                           ("safety", "is it a safety property"), ("liveness", "is it a liveness property"),
                           ("limited", "limitedness of a distance automaton")]:
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("file", help="automaton file or directory of them")
        common(sp)

    c = sub.add_parser("closure", help="safety closure as an Inf automaton")
    c.add_argument("file")
    c.add_argument("--det", action="store_true", help="determinize the closure")
    c.add_argument("--dot", action="store_true", help="also print Graphviz")
    common(c, batch=False)

    d = sub.add_parser("decompose", help="safety-liveness decomposition")
    d.add_argument("file")
    d.add_argument("-o", "--out", metavar="DIR", help="write B.qa, C.qa and manifest.json")
    common(d, batch=False)

    g = sub.add_parser("gen", help="seeded random automaton")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--states", type=int, default=3)
    g.add_argument("--letters", type=int, default=2)
    g.add_argument("--valfn", default="limsup")
    g.add_argument("--weights", default="0,1,2")
    g.add_argument("--discount", default="1/2")
    g.add_argument("--branch", type=int, default=2, help="maximum transitions per state and letter")
    g.add_argument("--det", action="store_true", help="deterministic output")

    gd = sub.add_parser("gadget", help="constancy gadget from an NFA")
    gd.add_argument("nfa")
    gd.add_argument("--valfn", default="limsup")
    gd.add_argument("--discount", default="1/2")
    return p


def _collect(path: str) -> list[str]:
    p = Path(path)
    if p.is_dir():
        return sorted(str(x) for x in p.iterdir() if x.suffix in (".qa", ".dist"))
    return [path]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            if not 1 <= args.letters <= 26:
                raise ValidationError("--letters must lie in 1..26")
            alphabet = tuple("abcdefghijklmnopqrstuvwxyz"[: args.letters])
            a = random_automaton(args.seed, args.states, alphabet, args.weights.split(","), args.valfn,
                                 args.det, args.branch, args.discount)
            sys.stdout.write(f"# generated: seed={args.seed} states={args.states} letters={args.letters}\n")
            sys.stdout.write(serialize_automaton(a))
            return EXIT_OK
        if args.command == "gadget":
            nfa = parse_nfa(Path(args.nfa).read_text())
            sys.stdout.write(serialize_automaton(gadget(nfa, args.valfn, args.discount)))
            return EXIT_OK
        options = {}
        if args.command == "eval":
            options["lasso"] = _lasso_from_args(args)
        if args.command == "closure":
            options.update(det=args.det, dot=args.dot)
        if args.command == "decompose":
            options["out"] = args.out
    except UnsupportedError as exc:
        print(f"quantsafe: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (QuantsafeError, ValueError, OSError) as exc:
        print(f"quantsafe: error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    files = _collect(args.file)
    jobs = [(args.command, f, options) for f in files]
    workers = getattr(args, "jobs", 1) or 1
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]

    status = EXIT_OK
    for code, rep in results:
        if code != EXIT_OK:
            kind = "unsupported" if code == EXIT_UNSUPPORTED else "error"
            print(f"quantsafe: {kind}: {rep['input']}: {rep['error']}", file=sys.stderr)
            status = max(status, code)
            continue
        if args.json:
            print(json.dumps(rep, sort_keys=True))
        else:
            if len(results) > 1:
                print(f"== {rep['input']}")
            _print_human(rep, args.decimal)
    return status


if __name__ == "__main__":
    sys.exit(main())
