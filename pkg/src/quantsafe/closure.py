"""Safety closures and determinization of Inf automata."""

from __future__ import annotations

from .core import Automaton, Transition, UnsupportedError, ValueFunction, INF
from .evaluate import monotone_form, state_top_values


def safety_closure_inf(a: Automaton) -> Automaton:
    """Inf automaton expressing the safety closure of ``a``.

    Every transition entering ``q`` is reweighted to the top value of ``a``
    rerooted at ``q``. Sup inputs first pass through their monotone LimSup
    form. Inf and DSum automata are already safe and come back unchanged.
    """
    tag = a.valfn.tag
    if tag in ("inf", "dsum"):
        return a
    if tag == "sup":
        a = monotone_form(a, "limsup")
    theta = state_top_values(a).values
    ts = tuple(Transition(t.source, t.letter, theta[t.target], t.target) for t in a.transitions)
    return Automaton(a.alphabet, a.state_names, a.initial, ts, INF)


def safety_closure_val(a: Automaton) -> Automaton:
    """The Inf-form closure read under ``a``'s own value function.

    Sound because closure runs carry nonincreasing, eventually constant weights.
    """
    if a.valfn.tag not in ("liminf", "limsup", "liminfavg", "limsupavg"):
        raise UnsupportedError(f"value-form closure is defined for limit functions, not {a.valfn}")
    return safety_closure_inf(a).with_valfn(a.valfn)


def determinize_inf(a: Automaton) -> Automaton:
    """Deterministic Inf automaton with the same values.

    A state maps each original state to the best running minimum over runs
    reaching it (absent if none does); the emitted weight is the largest entry.
    """
    if a.valfn.tag != "inf":
        raise UnsupportedError(f"determinize_inf needs an Inf automaton, got {a.valfn}")
    n = a.n_states
    start = [None] * n
    start[a.initial] = max(a.weights)
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
                    v = min(m[q], x)
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
    return Automaton(a.alphabet, names, 0, tuple(ts), INF)
