"""Seeded random automata, the NFA fixture format and the constancy gadget."""

from __future__ import annotations

import random

from .core import Automaton, ParseError, ValueFunction, rational
from .omega import NFA

DEFAULT_WEIGHTS = (0, 1, 2)


def random_automaton(seed, n_states: int = 3, alphabet=("a", "b"), weights=DEFAULT_WEIGHTS,
                     valfn="limsup", deterministic: bool = False, max_branch: int = 2,
                     discount="1/2") -> Automaton:
    """Total random automaton; ``seed`` may be an int or a ``random.Random``."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    if not 1 <= n_states <= 64:
        raise ValueError("n_states must lie in 1..64")
    if max_branch < 1:
        raise ValueError("max_branch must be at least 1")
    if isinstance(valfn, str):
        valfn = ValueFunction(valfn, rational(discount) if valfn == "dsum" else None)
    weights = [rational(w) for w in weights]
    ts = []
    for q in range(n_states):
        for a in alphabet:
            k = 1 if deterministic else rng.randint(1, max_branch)
            for _ in range(k):
                ts.append((f"s{q}", a, rng.choice(weights), f"s{rng.randrange(n_states)}"))
    return Automaton.build(alphabet, ts, valfn, initial="s0", states=[f"s{q}" for q in range(n_states)])


def random_nfa(seed, n_states: int = 3, alphabet=("a", "b"), density: float = 0.4) -> NFA:
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    ts = []
    for q in range(n_states):
        for a in alphabet:
            for p in range(n_states):
                if rng.random() < density:
                    ts.append((q, a, p))
    acc = frozenset(q for q in range(n_states) if rng.random() < 0.6)
    return NFA(tuple(alphabet), n_states, frozenset([0]), acc, tuple(ts),
               tuple(f"s{q}" for q in range(n_states)))


# ---------------------------------------------------------------------------
# NFA text format
#
#   alphabet: a b            (optional, defaults to "a b")
#   states: s0 s1
#   initial: s0
#   accepting: s1
#   transitions:
#   s0 a s1
#   s1 b s1

def parse_nfa(text: str) -> NFA:
    headers = {}
    ts = []
    in_transitions = False
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" in line:
            key, _, value = line.partition(":")
            key = key.strip().lower()
            if key not in ("alphabet", "states", "initial", "accepting", "transitions"):
                raise ParseError(f"unknown header {key!r}", n, 1)
            if key in headers:
                raise ParseError(f"duplicate header {key!r}", n, 1)
            headers[key] = value.split()
            in_transitions = key == "transitions"
            continue
        if not in_transitions:
            raise ParseError("transition line outside the 'transitions:' block", n, 1)
        parts = line.split()
        if len(parts) != 3:
            raise ParseError("expected 'source letter target'", n, 1)
        ts.append((n, *parts))
    for key in ("states", "initial", "accepting", "transitions"):
        if key not in headers:
            raise ParseError(f"missing '{key}:' header")
    alphabet = tuple(headers.get("alphabet") or ("a", "b"))
    states = headers["states"]
    index = {s: i for i, s in enumerate(states)}
    if len(index) != len(states) or not states:
        raise ParseError("states must be nonempty and distinct")
    for key in ("initial", "accepting"):
        for s in headers[key]:
            if s not in index:
                raise ParseError(f"unknown state {s!r} in '{key}:'")
    if not headers["initial"]:
        raise ParseError("at least one initial state is required")
    out = []
    for n, s, a, d in ts:
        if s not in index or d not in index:
            raise ParseError("unknown state in transition", n, 1)
        if a not in alphabet:
            raise ParseError(f"letter {a!r} not in alphabet", n, 1)
        out.append((index[s], a, index[d]))
    return NFA(alphabet, len(states), frozenset(index[s] for s in headers["initial"]),
               frozenset(index[s] for s in headers["accepting"]), tuple(out), tuple(states))


def serialize_nfa(n: NFA) -> str:
    names = n.state_names or tuple(f"s{q}" for q in range(n.n_states))
    lines = ["alphabet: " + " ".join(n.alphabet), "states: " + " ".join(names),
             "initial: " + " ".join(names[q] for q in sorted(n.initial)),
             "accepting: " + " ".join(names[q] for q in sorted(n.accepting)), "transitions:"]
    lines += [f"{names[s]} {a} {names[d]}" for s, a, d in n.transitions]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# gadget

HASH = "#"


def gadget(nfa: NFA, valfn="limsup", discount="1/2") -> Automaton:
    """Quantitative automaton over ``Σ ∪ {#}`` that is constant iff ``nfa`` is universal.

    Letters of the NFA weigh 1. Reading ``#`` moves an accepting state to a
    sink looping with weight 1 and any other state to a sink looping with
    weight 0. A non-accepting sink completes the NFA first, and several
    initial states are merged into a fresh one.
    """
    if HASH in nfa.alphabet:
        raise ParseError("the NFA alphabet must not contain '#'")
    if isinstance(valfn, str):
        valfn = ValueFunction(valfn, rational(discount) if valfn == "dsum" else None)
    names = list(nfa.state_names or [f"s{q}" for q in range(nfa.n_states)])
    alphabet = tuple(nfa.alphabet) + (HASH,)
    ts = [(names[s], a, 1, names[d]) for s, a, d in nfa.transitions]
    accepting = {names[q] for q in nfa.accepting}
    states = list(names)
    have = {(s, a) for s, a, _ in nfa.transitions}
    if any((q, a) not in have for q in range(nfa.n_states) for a in nfa.alphabet):
        sink = "dead"
        states.append(sink)
        ts += [(sink, a, 1, sink) for a in nfa.alphabet]
        for q in range(nfa.n_states):
            for a in nfa.alphabet:
                if (q, a) not in have:
                    ts.append((names[q], a, 1, sink))
    if len(nfa.initial) > 1:
        init = "init"
        states.append(init)
        for s, a, d in nfa.transitions:
            if s in nfa.initial:
                ts.append((init, a, 1, names[d]))
        for a in nfa.alphabet:
            if not any(s in nfa.initial and b == a for s, b, _ in nfa.transitions):
                ts.append((init, a, 1, "dead"))
        if nfa.initial & nfa.accepting:
            accepting.add(init)
    else:
        init = names[next(iter(nfa.initial))]
    states += ["q0", "q1"]
    for s in states[:-2]:
        ts.append((s, HASH, 1, "q1") if s in accepting else (s, HASH, 0, "q0"))
    ts += [("q0", "*", 0, "q0"), ("q1", "*", 1, "q1")]
    return Automaton.build(alphabet, ts, valfn, initial=init, states=states)
