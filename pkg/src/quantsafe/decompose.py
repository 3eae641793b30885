"""Safety-liveness decomposition and the determinization front-ends it needs."""

from __future__ import annotations

from dataclasses import dataclass

from .closure import safety_closure_inf, safety_closure_val
from .core import Automaton, Transition, UnsupportedError, ValidationError, constant_automaton
from .evaluate import monotone_form, top_value
from .omega import COBUCHI, determinize_cobuchi, threshold_automaton


class NondeterministicInput(UnsupportedError):
    pass


@dataclass(frozen=True)
class Decomposition:
    safety: Automaton
    liveness: Automaton
    source: Automaton


def _top_substitution(src: Automaton, b: Automaton, top) -> Automaton:
    """Copy of ``src`` where a transition whose weight agrees with b's becomes ``top``."""
    assert len(src.transitions) == len(b.transitions)
    ts = tuple(Transition(s.source, s.letter, top if s.weight == t.weight else s.weight, s.target)
               for s, t in zip(src.transitions, b.transitions))
    return Automaton(src.alphabet, src.state_names, src.initial, ts, src.valfn)


def decompose(a: Automaton) -> Decomposition:
    """Split a deterministic automaton into ``min(B, C)`` with B safe and C live."""
    tag = a.valfn.tag
    if tag in ("liminfavg", "limsupavg"):
        raise UnsupportedError("decomposition of limit-average automata is an open problem and not provided")
    if not a.deterministic:
        if tag == "limsup":
            raise NondeterministicInput(
                "nondeterministic LimSup automata cannot always be determinized; "
                "their decomposition is left open")
        raise NondeterministicInput(f"decompose needs a deterministic automaton; run determinize_{tag} first")
    top, _ = top_value(a)
    if tag in ("inf", "dsum"):
        return Decomposition(a, constant_automaton(a.alphabet, top, a.valfn), a)
    if tag == "sup":
        src = monotone_form(a, "sup")
        b = safety_closure_inf(a)
        return Decomposition(b, _top_substitution(src, b, top), src)
    b = safety_closure_val(a)
    return Decomposition(b, _top_substitution(a, b, top), a)


def determinize_sup(a: Automaton) -> Automaton:
    """Deterministic Sup automaton: each state maps original states to their best running maximum.

    This is the subset construction over (state, running max) pairs of the
    monotone form, keeping only the largest memory per state since a larger
    running maximum can only help.
    """
    if a.valfn.tag != "sup":
        raise UnsupportedError(f"determinize_sup needs a Sup automaton, got {a.valfn}")
    n = a.n_states
    start = [None] * n
    start[a.initial] = min(a.weights)
    start = tuple(start)
    index = {start: 0}
    order = [start]
    ts = []
    i = 0
    while i < len(order):
        m = order[i]
        for li, letter in enumerate(a.alphabet):
            nxt = [None] * n
            for q in range(n):
                if m[q] is None:
                    continue
                for x, p in a.successors(q, li):
                    v = max(m[q], x)
                    if nxt[p] is None or v > nxt[p]:
                        nxt[p] = v
            nxt = tuple(nxt)
            j = index.get(nxt)
            if j is None:
                j = index[nxt] = len(order)
                order.append(nxt)
            ts.append(Transition(i, letter, max(v for v in nxt if v is not None), j))
        i += 1
    names = tuple("{" + ",".join(f"{a.state_names[q]}:{v}" for q, v in enumerate(m) if v is not None) + "}"
                  for m in order)
    return Automaton(a.alphabet, names, 0, tuple(ts), a.valfn)


def determinize_liminf(a: Automaton) -> Automaton:
    """Deterministic LimInf automaton from breakpoint-determinized threshold automata.

    One deterministic coBuchi component per weight ``v`` recognizes
    ``A(w) >= v``. Each product step emits the largest ``v`` such that the
    components of every threshold up to ``v`` move along accepting
    transitions; the least weight is emitted when none does.
    """
    if a.valfn.tag != "liminf":
        raise UnsupportedError(f"determinize_liminf needs a LimInf automaton, got {a.valfn}")
    weights = sorted(a.weights)
    comps = [determinize_cobuchi(threshold_automaton(a, v)) for v in weights[1:]]
    for c in comps:
        if not c.deterministic or not c.complete or c.acceptance != COBUCHI:
            raise ValidationError("breakpoint construction must yield a complete deterministic automaton")
    k = len(a.alphabet)
    start = tuple(c.initial for c in comps)
    index = {start: 0}
    order = [start]
    ts = []
    i = 0
    while i < len(order):
        s = order[i]
        for li, letter in enumerate(a.alphabet):
            nxt = []
            emit = weights[0]
            ok = True
            for c, q, v in zip(comps, s, weights[1:]):
                (t, acc), = c.succ(q, li)
                nxt.append(t)
                ok = ok and acc
                if ok:
                    emit = v
            nxt = tuple(nxt)
            j = index.get(nxt)
            if j is None:
                j = index[nxt] = len(order)
                order.append(nxt)
            ts.append(Transition(i, letter, emit, j))
        i += 1
    names = tuple("<" + ",".join(map(str, s)) + ">" for s in order)
    return Automaton(a.alphabet, names, 0, tuple(ts), a.valfn)
