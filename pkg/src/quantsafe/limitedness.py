"""Distance automata and limitedness.

Limitedness is decided with the stabilization monoid: letter matrices over
the ordered domain 0 < 1 < omega < inf are closed under min-max products and
under stabilization of idempotents. The automaton is unlimited exactly when
some matrix in the closure has value omega as its minimum over
(initial, accepting) pairs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .core import LassoWord, ParseError, QuantsafeError, ValidationError, parse_sections
from .graph import Edge, WeightedGraph, max_mean_cycle

ZERO, ONE, OMEGA, INFTY = 0, 1, 2, 3
SYMBOLS = {ZERO: "0", ONE: "1", OMEGA: "w", INFTY: "inf"}
GROWTH_CAP = 40


class Inconclusive(QuantsafeError):
    """The witness search ran out of budget; no claim is made."""


@dataclass(frozen=True, eq=False)
class DistanceAutomaton:
    alphabet: tuple[str, ...]
    n_states: int
    initial: frozenset
    accepting: frozenset
    transitions: tuple  # (src, letter, weight in {0,1}, dst)
    state_names: tuple | None = None

    def __post_init__(self):
        if not self.initial:
            raise ValidationError("distance automaton needs an initial state")
        for s, a, w, d in self.transitions:
            if w not in (0, 1):
                raise ValidationError(f"distance automaton weights must be 0 or 1, got {w}")
            if a not in self.alphabet:
                raise ValidationError(f"letter {a!r} not in alphabet")
            if not (0 <= s < self.n_states and 0 <= d < self.n_states):
                raise ValidationError("transition state out of range")

    @classmethod
    def build(cls, alphabet, transitions, initial, accepting=None, states=None):
        """From ``(src, letter, weight, dst)`` tuples over arbitrary state names."""
        names = list(states) if states is not None else []
        index = {s: i for i, s in enumerate(names)}

        def idx(s):
            if s not in index:
                index[s] = len(names)
                names.append(s)
            return index[s]

        init = frozenset(idx(s) for s in initial)
        ts = tuple((idx(s), a, int(w), idx(d)) for s, a, w, d in transitions)
        acc = frozenset(range(len(names))) if accepting is None else frozenset(idx(s) for s in accepting)
        return cls(tuple(alphabet), len(names), init, acc, ts, tuple(str(s) for s in names))

    def with_initial(self, initial) -> DistanceAutomaton:
        return DistanceAutomaton(self.alphabet, self.n_states, frozenset(initial), self.accepting,
                                 self.transitions, self.state_names)

    @property
    def total(self) -> bool:
        have = {(s, a) for s, a, _, _ in self.transitions}
        return all((q, a) in have for q in range(self.n_states) for a in self.alphabet)

    def succ(self, q, letter):
        return [(w, d) for s, a, w, d in self.transitions if s == q and a == letter]


def parse_distance_automaton(text: str) -> DistanceAutomaton:
    headers, raw = parse_sections(text)
    for key in ("valfn", "alphabet", "initial"):
        if key not in headers:
            raise ParseError(f"missing '{key}:' header")
    valfn, line, col = headers["valfn"]
    if valfn.strip().lower() != "distance":
        raise ParseError("distance automata need 'valfn: distance'", line, col)
    alphabet = tuple(headers["alphabet"][0].split())
    initial = headers["initial"][0].split()
    accepting = headers["accepting"][0].split() if "accepting" in headers else None
    states = headers["states"][0].split() if "states" in headers else None
    ts = []
    for n, src, label, weight, dst, wcol in raw:
        if weight not in ("0", "1"):
            raise ParseError(f"distance weights are 0 or 1, got {weight!r}", n, wcol)
        letters = alphabet if label == "*" else tuple(label.split(","))
        for a in letters:
            if a not in alphabet:
                raise ParseError(f"letter {a!r} not in alphabet", n, 1)
            ts.append((src, a, int(weight), dst))
    return DistanceAutomaton.build(alphabet, ts, initial, accepting, states)


def serialize_distance_automaton(d: DistanceAutomaton) -> str:
    names = d.state_names or tuple(str(i) for i in range(d.n_states))
    lines = ["valfn: distance", "alphabet: " + " ".join(d.alphabet), "states: " + " ".join(names),
             "initial: " + " ".join(names[q] for q in sorted(d.initial)),
             "accepting: " + " ".join(names[q] for q in sorted(d.accepting))]
    lines += [f"{names[s]} -- {a}:{w} --> {names[t]}" for s, a, w, t in d.transitions]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------

def distance(d: DistanceAutomaton, u) -> int | None:
    """Minimum weight of an accepting run on the finite word ``u``; ``None`` stands for infinity."""
    cost = {q: 0 for q in d.initial}
    for letter in u:
        nxt: dict = {}
        for q, c in cost.items():
            for w, p in d.succ(q, letter):
                if p not in nxt or c + w < nxt[p]:
                    nxt[p] = c + w
        cost = nxt
    finals = [c for q, c in cost.items() if q in d.accepting]
    return min(finals) if finals else None


def brute_force_growth(d: DistanceAutomaton, maxlen: int) -> list:
    """Per length 0..maxlen, the largest distance of an accepted word (``None`` if none is accepted).

    Exhaustive over words, grouped by their exact cost vectors.
    """
    if maxlen > GROWTH_CAP:
        raise ValidationError(f"maxlen {maxlen} exceeds the cap of {GROWTH_CAP}")
    n = d.n_states
    start = tuple(0 if q in d.initial else None for q in range(n))
    layer = {start}
    table = []
    for length in range(maxlen + 1):
        best = None
        for vec in layer:
            finals = [c for q, c in enumerate(vec) if c is not None and q in d.accepting]
            if finals:
                v = min(finals)
                best = v if best is None else max(best, v)
        table.append(best)
        if length == maxlen:
            break
        nxt = set()
        for vec in layer:
            for a in d.alphabet:
                out = [None] * n
                for q, c in enumerate(vec):
                    if c is None:
                        continue
                    for w, p in d.succ(q, a):
                        if out[p] is None or c + w < out[p]:
                            out[p] = c + w
                nxt.add(tuple(out))
        layer = nxt
    return table


# ---------------------------------------------------------------------------
# stabilization monoid

def _levels(x, n, transpose):
    """Bitmasks of entries at most each level, per row (or per column when ``transpose``)."""
    masks = []
    for v in (ZERO, ONE, OMEGA):
        vec = []
        for i in range(n):
            m = 0
            for j in range(n):
                if (x[j * n + i] if transpose else x[i * n + j]) <= v:
                    m |= 1 << j
            vec.append(m)
        masks.append(vec)
    return masks


def _product(x, y, n):
    """Min-max product: entry (i, k) is at most v iff some j has both factors at most v."""
    rows, cols = _levels(x, n, False), _levels(y, n, True)
    out = [INFTY] * (n * n)
    for i in range(n):
        r0, r1, r2 = rows[0][i], rows[1][i], rows[2][i]
        for k in range(n):
            if r2 & cols[2][k] == 0:
                continue
            if r0 & cols[0][k]:
                out[i * n + k] = ZERO
            elif r1 & cols[1][k]:
                out[i * n + k] = ONE
            else:
                out[i * n + k] = OMEGA
    return tuple(out)


def _stab(x, n):
    lift = {ZERO: ZERO, ONE: OMEGA, OMEGA: OMEGA, INFTY: INFTY}
    out = [INFTY] * (n * n)
    for i in range(n):
        for j in range(n):
            best = INFTY
            for k in range(n):
                v = max(x[i * n + k], lift[x[k * n + k]], x[k * n + j])
                best = min(best, v)
            out[i * n + j] = best
    return tuple(out)


def letter_matrices(d: DistanceAutomaton) -> dict:
    n = d.n_states
    mats = {}
    for a in d.alphabet:
        m = [INFTY] * (n * n)
        for s, b, w, t in d.transitions:
            if b == a:
                m[s * n + t] = min(m[s * n + t], w)
        mats[a] = tuple(m)
    return mats


@lru_cache(maxsize=256)
def matrix_closure(d: DistanceAutomaton) -> frozenset:
    """Least set containing the letter matrices, closed under product and stabilization of idempotents.

    Every element is a product of generators, namely letter matrices and stabilized idempotents, so
    closing under right multiplication by generators reaches the same set as closing under all products.
    """
    n = d.n_states
    gens = list(dict.fromkeys(letter_matrices(d).values()))
    seen = set(gens)
    elements = list(gens)
    work = deque(gens)
    while work:
        x = work.popleft()
        fresh = [_product(x, g, n) for g in gens]
        if _product(x, x, n) == x:
            s = _stab(x, n)
            if s not in gens:
                gens.append(s)
                # earlier elements have not been multiplied by the new generator yet
                fresh.extend(_product(y, s, n) for y in elements)
            fresh.append(s)
        for z in fresh:
            if z not in seen:
                seen.add(z)
                elements.append(z)
                work.append(z)
    return frozenset(seen)


def _unlimited_from(d: DistanceAutomaton, initial) -> bool:
    n = d.n_states
    for m in matrix_closure(d):
        best = min((m[i * n + f] for i in initial for f in d.accepting), default=INFTY)
        if best == OMEGA:
            return True
    return False


def is_limited(d: DistanceAutomaton) -> bool:
    """Is there a bound on the distance of all accepted words?"""
    return not _unlimited_from(d, d.initial)


# ---------------------------------------------------------------------------
# unlimitedness witnesses

@dataclass(frozen=True)
class UnlimitedWitness:
    word: LassoWord
    segments: tuple[tuple[str, ...], ...]
    loop_start: int
    m: int
    min_loop_mean: Fraction


def min_run_mean(d: DistanceAutomaton, w: LassoWord) -> Fraction:
    """Smallest limit average over all infinite runs of ``d`` on ``w``."""
    letters = list(w.prefix + w.loop)
    L, back = len(letters), len(w.prefix)
    index = {}
    nodes = []
    for q in sorted(d.initial):
        index[(q, 0)] = len(nodes)
        nodes.append((q, 0))
    edges = []
    k = 0
    while k < len(nodes):
        q, i = nodes[k]
        j = i + 1 if i + 1 < L else back
        for wt, p in d.succ(q, letters[i]):
            key = (p, j)
            if key not in index:
                index[key] = len(nodes)
                nodes.append(key)
            edges.append(Edge(k, index[key], Fraction(-wt)))
        k += 1
    mc = max_mean_cycle(WeightedGraph(len(nodes), edges))
    if mc is None:
        raise ValidationError("no infinite run on the witness word")
    return -mc.mean


def _segment_search(d: DistanceAutomaton, S: frozenset, budget: int):
    """Shortest nonempty word all of whose runs from ``S`` cost at least 1 and whose reached set stays unlimited."""
    n = d.n_states
    start = tuple(0 if q in S else None for q in range(n))
    prev = {start: None}
    queue = deque([(start, 0)])
    while queue:
        vec, depth = queue.popleft()
        if depth >= budget:
            continue
        for a in d.alphabet:
            out = [None] * n
            for q, c in enumerate(vec):
                if c is None:
                    continue
                for w, p in d.succ(q, a):
                    v = min(1, c + w)
                    if out[p] is None or v < out[p]:
                        out[p] = v
            out = tuple(out)
            if out in prev:
                continue
            prev[out] = (vec, a)
            reached = frozenset(q for q, c in enumerate(out) if c is not None)
            if reached and all(c == 1 for c in out if c is not None) and _unlimited_from(d, reached):
                word = []
                v = out
                while prev[v] is not None:
                    v, letter = prev[v]
                    word.append(letter)
                return tuple(word[::-1]), reached
            queue.append((out, depth + 1))
    return None


def unlimited_witness(d: DistanceAutomaton, budget: int | None = None) -> UnlimitedWitness:
    """Lasso on which every run has limit average at least ``1/m``.

    Segments are found one at a time from the current reachable state set;
    the lasso closes as soon as a state set repeats.
    """
    if not d.total:
        raise ValidationError("unlimited_witness needs a total distance automaton")
    if d.accepting != frozenset(range(d.n_states)):
        raise ValidationError("unlimited_witness needs every state accepting")
    if is_limited(d):
        raise ValidationError("automaton is limited; no unlimitedness witness exists")
    if budget is None:
        budget = 4 * 2 ** d.n_states
    S = frozenset(d.initial)
    history = [S]
    segments = []
    while True:
        found = _segment_search(d, S, budget)
        if found is None:
            raise Inconclusive(f"no segment found within word length {budget}")
        seg, S = found
        segments.append(seg)
        if S in history:
            j = history.index(S)
            break
        history.append(S)
    prefix = [x for seg in segments[:j] for x in seg]
    loop = [x for seg in segments[j:] for x in seg]
    word = LassoWord(prefix, loop)
    m = max(len(seg) for seg in segments)
    mean = min_run_mean(d, word)
    if mean < Fraction(1, m):
        raise AssertionError(f"witness check failed: min run mean {mean} < 1/{m}")
    return UnlimitedWitness(word, tuple(segments), j, m, mean)
