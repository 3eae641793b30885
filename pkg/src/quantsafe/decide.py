"""Constant-function, safety and liveness checks with re-validated witnesses."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .closure import determinize_inf, safety_closure_inf
from .core import FINITE_VALUED, LIMIT_AVERAGE, Automaton, LassoWord, Transition, UnsupportedError
from .evaluate import evaluate_lasso, monotone_form, state_top_values, top_value
from .graph import WeightedGraph, detect_negative_cycle, johnson_reweight
from .limitedness import DistanceAutomaton, is_limited, unlimited_witness
from .omega import (NFA, contains, nfa_from_omega, nfa_universal, safety_closure_automaton,
                    is_safety_language, threshold_automaton, universal_automaton)


@dataclass
class Verdict:
    question: str
    answer: bool
    value: Fraction | None = None
    witness: LassoWord | tuple | None = None
    method: list = field(default_factory=list)
    prefix: tuple | None = None  # finite word behind a lasso witness, when one exists

    def to_json(self) -> dict:
        from .core import format_rational
        out = {"question": self.question, "answer": self.answer}
        if self.value is not None:
            out["value"] = format_rational(self.value)
        if isinstance(self.witness, LassoWord):
            out["witness"] = self.witness.to_json()
        elif self.witness is not None:
            out["witness"] = {"prefix": list(self.witness)}
        out["method"] = list(self.method)
        return out


class InternalError(AssertionError):
    """A guarantee of the construction was violated; indicates a bug."""


# ---------------------------------------------------------------------------
# constant function

def is_constant(a: Automaton) -> Verdict:
    tag = a.valfn.tag
    if tag == "dsum":
        return is_constant_dsum(a)
    if tag in LIMIT_AVERAGE:
        return is_constant_limavg(a)
    top, _ = top_value(a)
    method = [f"top value {top}", f"threshold automaton at {top}", "containment of all words"]
    r = contains(threshold_automaton(a, top), universal_automaton(a.alphabet))
    if r is True:
        return Verdict("constant", True, top, None, method)
    w = r.word
    if not evaluate_lasso(a, w) < top:
        raise InternalError(f"constant-check witness {w} does not fall below the top value")
    return Verdict("constant", False, top, w, method)


def _dsum_pruned(a: Automaton):
    """Tops per state and the finite-word automaton of optimal transitions."""
    table = state_top_values(a)
    T = table.values
    lam = a.valfn.discount
    keep = sorted({(t.source, t.letter, t.target) for t in a.transitions
                   if t.weight + lam * T[t.target] == T[t.source]},
                  key=lambda x: (x[0], a.alphabet.index(x[1]), x[2]))
    nfa = NFA(a.alphabet, a.n_states, frozenset([a.initial]), frozenset(a.states), tuple(keep))
    return table, nfa


def _runs_after(a: Automaton, u) -> dict:
    """Best discounted prefix weight of runs reaching each state after ``u``."""
    lam = a.valfn.discount
    cur = {a.initial: Fraction(0)}
    factor = Fraction(1)
    for x in u:
        li = a.letter_index(x)
        nxt: dict = {}
        for q, v in cur.items():
            for w, p in a.successors(q, li):
                c = v + factor * w
                if p not in nxt or c > nxt[p]:
                    nxt[p] = c
        cur = nxt
        factor *= lam
    return cur


def is_constant_dsum(a: Automaton) -> Verdict:
    """Constant iff the automaton of optimal transitions accepts every finite word."""
    if a.valfn.tag != "dsum":
        raise UnsupportedError("is_constant_dsum needs a DSum automaton")
    table, nfa = _dsum_pruned(a)
    top = table.values[a.initial]
    method = [f"top value {top}", "pruned non-optimal transitions", "finite-word universality"]
    r = nfa_universal(nfa)
    if r is True:
        return Verdict("constant", True, top, None, method)
    u = tuple(r)
    lam = a.valfn.discount
    factor = lam ** len(u)
    reach = _runs_after(a, u)
    q = max(reach, key=lambda p: (reach[p] + factor * table.values[p], -p))
    cont = table.witnesses[q]
    w = LassoWord(u + cont.prefix, cont.loop)
    if not evaluate_lasso(a, w) < top:
        raise InternalError(f"dsum witness {w} does not fall below the top value")
    return Verdict("constant", False, top, w, method, prefix=u)


def limavg_distance_automaton(a: Automaton, top: Fraction) -> DistanceAutomaton:
    """The distance automaton built from ``top - weight`` after Johnson reweighting and binarization."""
    a = a.restrict_to_reachable()
    negated = [top - t.weight for t in a.transitions]
    scale = lcm(*(x.denominator for x in negated))
    g = WeightedGraph(a.n_states)
    for t, x in zip(a.transitions, negated):
        g.add(t.source, t.target, x * scale, t)
    cyc = detect_negative_cycle(g)
    if cyc is not None:
        raise InternalError("negated automaton has a negative cycle; the top value is wrong")
    rw = johnson_reweight(g)
    ts = [(t.source, t.letter, 1 if x > 0 else 0, t.target) for t, x in zip(a.transitions, rw.reweighted)]
    return DistanceAutomaton(a.alphabet, a.n_states, frozenset([a.initial]), frozenset(a.states),
                             tuple(ts), a.state_names)


def is_constant_limavg(a: Automaton) -> Verdict:
    """Constant iff the derived distance automaton is limited."""
    if a.valfn.tag not in LIMIT_AVERAGE:
        raise UnsupportedError("is_constant_limavg needs a limit-average automaton")
    top, _ = top_value(a)
    method = [f"top value {top}", "subtract top and negate", "Johnson reweighting",
              "binarize positive weights", "limitedness"]
    d = limavg_distance_automaton(a, top)
    if is_limited(d):
        return Verdict("constant", True, top, None, method)
    wit = unlimited_witness(d)
    w = wit.word
    if not evaluate_lasso(a, w) < top:
        raise InternalError(f"limit-average witness {w} does not fall below the top value")
    return Verdict("constant", False, top, w, method + [f"segment bound m={wit.m}"])


# ---------------------------------------------------------------------------
# safety

def _threshold_weights(a: Automaton, c: Automaton):
    return sorted(a.weights | c.weights)


def is_safe(a: Automaton) -> Verdict:
    tag = a.valfn.tag
    if tag in ("inf", "dsum"):
        return Verdict("safe", True, None, None, [f"{tag} automata always express safety properties"])
    if tag in LIMIT_AVERAGE:
        return _is_safe_limavg(a)
    c = safety_closure_inf(a)
    method = ["safety closure", "per-threshold containment, closure side into automaton side"]
    for v in _threshold_weights(a, c):
        r = contains(threshold_automaton(a, v), threshold_automaton(c, v))
        if r is not True:
            w = r.word
            if not evaluate_lasso(c, w) > evaluate_lasso(a, w):
                raise InternalError(f"safety counterexample {w} does not separate closure and automaton")
            return Verdict("safe", False, None, w, method + [f"fails at threshold {v}"])
    return Verdict("safe", True, None, None, method)


def limavg_difference_product(a: Automaton, b: Automaton) -> Automaton:
    """Product of ``a`` with deterministic ``b``: each step weighs a's weight minus b's weight."""
    index = {(a.initial, b.initial): 0}
    order = [(a.initial, b.initial)]
    ts = []
    i = 0
    while i < len(order):
        p, s = order[i]
        for li, letter in enumerate(a.alphabet):
            (y, s2), = b.successors(s, li)
            for x, p2 in a.successors(p, li):
                key = (p2, s2)
                j = index.get(key)
                if j is None:
                    j = index[key] = len(order)
                    order.append(key)
                ts.append(Transition(i, letter, x - y, j))
        i += 1
    names = tuple(f"{a.state_names[p]}*{s}" for p, s in order)
    return Automaton(a.alphabet, names, 0, tuple(ts), a.valfn)


def _is_safe_limavg(a: Automaton) -> Verdict:
    closure = determinize_inf(safety_closure_inf(a)).with_valfn(a.valfn)
    diff = limavg_difference_product(a, closure)
    top, _ = top_value(diff)
    method = ["safety closure", "determinize closure", "difference product", "constant check of difference"]
    if top != 0:
        raise InternalError(f"difference product has top value {top}, expected 0")
    v = is_constant_limavg(diff)
    if v.answer:
        return Verdict("safe", True, None, None, method)
    w = v.witness
    if not evaluate_lasso(closure, w) > evaluate_lasso(a, w):
        raise InternalError(f"limit-average safety counterexample {w} does not separate closure and automaton")
    return Verdict("safe", False, None, w, method)


# ---------------------------------------------------------------------------
# liveness

def _closure_source(a: Automaton) -> Automaton:
    """An automaton whose per-state top values bound every continuation.

    Sup and Inf values depend on the running extremum, so their monotone
    forms carry it in the state.
    """
    if a.valfn.tag == "sup":
        return monotone_form(a, "limsup")
    if a.valfn.tag == "inf":
        return monotone_form(a, "inf")
    return a


def is_live(a: Automaton) -> Verdict:
    top, _ = top_value(a)
    if a.valfn.tag == "dsum":
        v = is_constant_dsum(a)
        return Verdict("live", v.answer, top, v.prefix, ["dsum closure is the automaton itself", "constant check"])
    c = safety_closure_inf(a)
    method = ["safety closure", "restrict to top-weight transitions", "subset construction"]
    succ = {}
    # closure weights never exceed the top, except in Inf inputs, which are their own closure
    for t in c.transitions:
        if t.weight >= top:
            succ.setdefault((t.source, t.letter), set()).add(t.target)
    start = frozenset([c.initial])
    seen = {start}
    queue = deque([(start, ())])
    witness = None
    while queue and witness is None:
        S, u = queue.popleft()
        for x in c.alphabet:
            T = frozenset(p for q in S for p in succ.get((q, x), ()))
            if not T:
                witness = u + (x,)
                break
            if T not in seen:
                seen.add(T)
                queue.append((T, u + (x,)))
    if witness is None:
        return Verdict("live", True, top, None, method)
    _check_live_witness(a, witness, top)
    return Verdict("live", False, top, witness, method)


def _check_live_witness(a: Automaton, u, top):
    src = _closure_source(a)
    theta = state_top_values(src).values
    cur = {src.initial}
    for x in u:
        li = src.letter_index(x)
        cur = {p for q in cur for _, p in src.successors(q, li)}
    best = max(theta[q] for q in cur)
    if not best < top:
        raise InternalError(f"liveness witness {u} still reaches top value {best}")


# ---------------------------------------------------------------------------
# threshold cross-checks

def crosscheck_safety_thresholds(a: Automaton) -> bool:
    if a.valfn.tag not in FINITE_VALUED:
        raise UnsupportedError(f"threshold cross-check needs a finite-valued automaton, not {a.valfn}")
    return all(is_safety_language(threshold_automaton(a, v)) for v in sorted(a.weights))


def crosscheck_liveness_thresholds(a: Automaton) -> bool:
    if a.valfn.tag not in FINITE_VALUED:
        raise UnsupportedError(f"threshold cross-check needs a finite-valued automaton, not {a.valfn}")
    top, _ = top_value(a)
    for v in sorted(a.weights):
        if v > top:
            continue
        closure = safety_closure_automaton(threshold_automaton(a, v))
        if nfa_universal(nfa_from_omega(closure)) is not True:
            return False
    return True
