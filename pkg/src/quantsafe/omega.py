"""Boolean omega-automata with acceptance on transitions.

Four acceptance conditions are supported: safety (an infinite run exists),
reachability (some accepting transition is taken), Buchi (infinitely many
accepting transitions) and coBuchi (eventually only accepting transitions).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Callable

from .core import Automaton, LassoWord, UnsupportedError, ValidationError, rational
from .graph import tarjan

SAFETY = "safety"
REACHABILITY = "reachability"
BUCHI = "buchi"
COBUCHI = "cobuchi"
ACCEPTANCES = (SAFETY, REACHABILITY, BUCHI, COBUCHI)


@dataclass(frozen=True)
class OmegaTransition:
    source: int
    letter: str
    target: int
    accepting: bool = True


@dataclass(frozen=True, eq=False)
class OmegaAutomaton:
    alphabet: tuple[str, ...]
    n_states: int
    initial: int
    transitions: tuple[OmegaTransition, ...]
    acceptance: str
    state_names: tuple[str, ...] | None = None
    _succ: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.acceptance not in ACCEPTANCES:
            raise ValidationError(f"unknown acceptance {self.acceptance!r}")
        if not 0 <= self.initial < self.n_states:
            raise ValidationError("initial state out of range")
        li = {a: i for i, a in enumerate(self.alphabet)}
        succ = [[set() for _ in self.alphabet] for _ in range(self.n_states)]
        for t in self.transitions:
            if t.letter not in li:
                raise ValidationError(f"letter {t.letter!r} not in alphabet")
            if not (0 <= t.source < self.n_states and 0 <= t.target < self.n_states):
                raise ValidationError(f"transition {t} out of range")
            if self.acceptance == SAFETY and not t.accepting:
                raise ValidationError("safety automata carry only accepting transitions")
            succ[t.source][li[t.letter]].add((t.target, bool(t.accepting)))
        object.__setattr__(self, "_succ", tuple(tuple(tuple(sorted(s)) for s in row) for row in succ))

    @classmethod
    def build(cls, alphabet, transitions, acceptance, initial=0, n_states=None, state_names=None):
        """From ``(src, letter, dst, accepting)`` tuples over integer states."""
        ts = tuple(OmegaTransition(s, a, d, bool(acc)) for s, a, d, acc in transitions)
        if n_states is None:
            n_states = 1 + max([initial] + [max(t.source, t.target) for t in ts])
        return cls(tuple(alphabet), n_states, initial, ts, acceptance, state_names)

    def succ(self, q: int, li: int):
        """Pairs ``(target, accepting)`` for letter index ``li``."""
        return self._succ[q][li]

    @property
    def deterministic(self) -> bool:
        return all(len(self._succ[q][i]) <= 1 for q in range(self.n_states) for i in range(len(self.alphabet)))

    @property
    def complete(self) -> bool:
        return all(self._succ[q][i] for q in range(self.n_states) for i in range(len(self.alphabet)))

    def __repr__(self):
        return (f"OmegaAutomaton({self.acceptance}, states={self.n_states}, "
                f"alphabet={list(self.alphabet)}, transitions={len(self.transitions)})")


def universal_automaton(alphabet) -> OmegaAutomaton:
    return OmegaAutomaton.build(alphabet, [(0, a, 0, True) for a in alphabet], SAFETY, n_states=1)


def empty_automaton(alphabet) -> OmegaAutomaton:
    return OmegaAutomaton.build(alphabet, [(0, a, 0, False) for a in alphabet], BUCHI, n_states=1)


@dataclass(frozen=True)
class LassoCounterexample:
    """A lasso in the inner language but outside the outer one."""

    word: LassoWord
    side: str = "inner \\ outer"


# ---------------------------------------------------------------------------
# threshold automata

def threshold_automaton(a: Automaton, v) -> OmegaAutomaton:
    """Recognizer of ``{w | A(w) >= v}`` for Inf, Sup, LimInf and LimSup automata."""
    v = rational(v)
    tag = a.valfn.tag
    kind = {"inf": SAFETY, "sup": REACHABILITY, "limsup": BUCHI, "liminf": COBUCHI}.get(tag)
    if kind is None:
        raise UnsupportedError(f"threshold languages of {a.valfn} automata are not omega-regular")
    ts = set()
    for t in a.transitions:
        good = t.weight >= v
        if kind == SAFETY:
            if good:
                ts.add((t.source, t.letter, t.target, True))
        else:
            ts.add((t.source, t.letter, t.target, good))
    return OmegaAutomaton.build(a.alphabet, sorted(ts, key=lambda x: (x[0], a.alphabet.index(x[1]), x[2], x[3])),
                                kind, a.initial, a.n_states, a.state_names)


# ---------------------------------------------------------------------------
# generalized form: every condition becomes "eventually stay inside the
# co-edges (flag bit 0) while seeing each requirement bit infinitely often"

@dataclass
class _Gen:
    n_req: int
    init: object
    step: Callable  # (node, letter index) -> iterable of (node', flags)


def _gen(b: OmegaAutomaton) -> _Gen:
    acc = b.acceptance
    if acc == SAFETY:
        return _Gen(0, b.initial, lambda q, li: [(t, 1) for t, _ in b.succ(q, li)])
    if acc == BUCHI:
        return _Gen(1, b.initial, lambda q, li: [(t, 1 | (2 if f else 0)) for t, f in b.succ(q, li)])
    if acc == COBUCHI:
        return _Gen(0, b.initial, lambda q, li: [(t, 1 if f else 0) for t, f in b.succ(q, li)])

    def step(node, li):
        q, seen = node
        res = []
        for t, f in b.succ(q, li):
            s = seen or f
            res.append(((t, s), 1 | (2 if s else 0)))
        return res

    return _Gen(1, (b.initial, False), step)


def _gen_product(x: _Gen, y: _Gen) -> _Gen:
    shift = x.n_req

    def step(node, li):
        u, v = node
        res = []
        for u2, f in x.step(u, li):
            for v2, g in y.step(v, li):
                co = f & g & 1
                req = ((f >> 1) | ((g >> 1) << shift)) << 1
                res.append(((u2, v2), co | req))
        return res

    return _Gen(x.n_req + y.n_req, (x.init, y.init), step)


def _lasso_gen(w: LassoWord, alphabet) -> _Gen:
    letters = [alphabet.index(x) for x in w.prefix + w.loop]
    L, back = len(letters), len(w.prefix)

    def step(i, li):
        if letters[i] != li:
            return []
        return [(i + 1 if i + 1 < L else back, 1)]

    return _Gen(0, 0, step)


def _explore(g: _Gen, k: int):
    """Explicit reachable graph. Returns ``(nodes, out)``; ``out[u]`` lists ``(li, v, flags)``."""
    index = {g.init: 0}
    nodes = [g.init]
    out = []
    i = 0
    while i < len(nodes):
        u = nodes[i]
        row = []
        for li in range(k):
            for v, flags in g.step(u, li):
                j = index.get(v)
                if j is None:
                    j = index[v] = len(nodes)
                    nodes.append(v)
                row.append((li, j, flags))
        out.append(row)
        i += 1
    return nodes, out


def _good_components(n, out, n_req):
    """SCCs of the co-subgraph that carry every requirement bit on an internal co-edge."""
    full = (1 << n_req) - 1
    co_succ = [[v for _, v, f in row if f & 1] for row in out]
    good = []
    for comp in tarjan(n, co_succ):
        members = set(comp)
        bits = 0
        internal = False
        for u in comp:
            for _, v, f in out[u]:
                if f & 1 and v in members:
                    internal = True
                    bits |= f >> 1
        if internal and bits & full == full:
            good.append(members)
    return good


def _bfs(out, src, goal: Callable, allowed: Callable | None = None):
    """Shortest path from ``src`` to a node satisfying ``goal``; returns (letters, node)."""
    if goal(src):
        return [], src
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for li, v, f in out[u]:
            if allowed is not None and not allowed(u, v, f):
                continue
            if v not in prev:
                prev[v] = (u, li)
                if goal(v):
                    path, node = [], v
                    while prev[v] is not None:
                        p, l2 = prev[v]
                        path.append(l2)
                        v = p
                    return path[::-1], node
                queue.append(v)
    return None


def _witness(nodes, out, n_req):
    """A lasso (letter indices) accepted by the explicit generalized graph, or None."""
    comps = _good_components(len(nodes), out, n_req)
    if not comps:
        return None
    member = {}
    for i, c in enumerate(comps):
        for v in c:
            member[v] = i
    prefix, entry = _bfs(out, 0, lambda v: v in member)
    comp = comps[member[entry]]
    inside = lambda u, v, f: bool(f & 1) and v in comp
    loop: list = []
    cur = entry
    for bit in range(n_req):
        # walk to an edge carrying this bit, then take it
        target_bit = 1 << (bit + 1)
        best = None
        for u in comp:
            for li, v, f in out[u]:
                if f & 1 and v in comp and f & target_bit:
                    p = _bfs(out, cur, lambda x, u=u: x == u, inside)
                    if p is not None and (best is None or len(p[0]) < len(best[0])):
                        best = (p[0] + [li], v)
        loop += best[0]
        cur = best[1]
    back, _ = _bfs(out, cur, lambda x: x == entry, inside)
    loop += back
    if not loop:
        # no requirements: any cycle through the entry inside the component
        best = None
        for li, v, f in out[entry]:
            if inside(entry, v, f):
                p = _bfs(out, v, lambda x: x == entry, inside)
                if p is not None and (best is None or len(p[0]) + 1 < len(best)):
                    best = [li] + p[0]
        loop = best
    return prefix, loop


def _gen_empty(g: _Gen, alphabet):
    nodes, out = _explore(g, len(alphabet))
    w = _witness(nodes, out, g.n_req)
    if w is None:
        return None
    prefix, loop = w
    return LassoWord([alphabet[i] for i in prefix], [alphabet[i] for i in loop])


# ---------------------------------------------------------------------------
# membership and emptiness

def lasso_member(b: OmegaAutomaton, w: LassoWord) -> bool:
    for x in w.prefix + w.loop:
        if x not in b.alphabet:
            raise ValidationError(f"letter {x!r} not in alphabet {b.alphabet}")
    g = _gen_product(_gen(b), _lasso_gen(w, b.alphabet))
    nodes, out = _explore(g, len(b.alphabet))
    return bool(_good_components(len(nodes), out, g.n_req))


def is_empty(b: OmegaAutomaton) -> LassoWord | None:
    """``None`` if the language is empty, otherwise an accepted lasso."""
    w = _gen_empty(_gen(b), b.alphabet)
    if w is not None:
        w = w.canonical()
        assert lasso_member(b, w)
    return w


def _explore_automaton(b: OmegaAutomaton, from_node=None):
    g = _gen(b)
    if from_node is not None:
        g = _Gen(g.n_req, from_node, g.step)
    return g, _explore(g, len(b.alphabet))


def nonempty_states(b: OmegaAutomaton) -> set[int]:
    """States ``q`` whose rerooted automaton has a nonempty language."""
    result = set()
    for q in range(b.n_states):
        init = (q, False) if b.acceptance == REACHABILITY else q
        g, (nodes, out) = _explore_automaton(b, init)
        if _good_components(len(nodes), out, g.n_req):
            result.add(q)
    return result


def _live_states(b: OmegaAutomaton) -> set[int]:
    """States with at least one infinite run (all transitions count)."""
    succ = [set() for _ in range(b.n_states)]
    pred = [set() for _ in range(b.n_states)]
    for t in b.transitions:
        succ[t.source].add(t.target)
        pred[t.target].add(t.source)
    live = set()
    for comp in tarjan(b.n_states, [sorted(s) for s in succ]):
        if len(comp) > 1 or comp[0] in succ[comp[0]]:
            live.update(comp)
    stack = list(live)
    while stack:
        u = stack.pop()
        for p in pred[u]:
            if p not in live:
                live.add(p)
                stack.append(p)
    return live


# ---------------------------------------------------------------------------
# complementation and determinization

def _explicit(alphabet, init, step, acceptance, name=str) -> OmegaAutomaton:
    """Materialize a deterministic-or-not automaton given by ``step(state, li) -> [(state', acc)]``."""
    index = {init: 0}
    order = [init]
    ts = []
    i = 0
    while i < len(order):
        s = order[i]
        for li, a in enumerate(alphabet):
            for s2, acc in step(s, li):
                j = index.get(s2)
                if j is None:
                    j = index[s2] = len(order)
                    order.append(s2)
                ts.append((i, a, j, acc))
        i += 1
    return OmegaAutomaton.build(alphabet, ts, acceptance, 0, len(order), tuple(name(s) for s in order))


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _set_name(mask):
    return "{" + ",".join(str(i) for i in _bits(mask)) + "}"


def determinize_cobuchi(b: OmegaAutomaton) -> OmegaAutomaton:
    """Breakpoint construction: states ``(S, O)`` with ``O`` the runs accepting since the last breakpoint.

    A transition is rejecting exactly when it empties ``O``.
    """
    if b.acceptance != COBUCHI:
        raise UnsupportedError("determinize_cobuchi needs a coBuchi automaton")
    k = len(b.alphabet)
    all_succ = [[0] * k for _ in range(b.n_states)]
    acc_succ = [[0] * k for _ in range(b.n_states)]
    for q in range(b.n_states):
        for li in range(k):
            for t, f in b.succ(q, li):
                all_succ[q][li] |= 1 << t
                if f:
                    acc_succ[q][li] |= 1 << t

    def image(table, mask, li):
        r = 0
        for q in _bits(mask):
            r |= table[q][li]
        return r

    def step(state, li):
        S, O = state
        S2 = image(all_succ, S, li)
        O2 = image(acc_succ, S if O == 0 else O, li)
        return [((S2, O2), O2 != 0)]

    return _explicit(b.alphabet, (1 << b.initial, 0), step, COBUCHI,
                     lambda s: f"{_set_name(s[0])}/{_set_name(s[1])}")


def _tight_rankings(targets, bound, top):
    """Rankings of ``targets`` within per-state bounds whose odd ranks 1, 3, .., max are all used."""
    k = len(targets)
    for M in range(1, top + 1, 2):
        if (M + 1) // 2 > k:
            break
        caps = [min(bound.get(t, M), M) for t in targets]
        if max(caps) < M:
            continue
        for ranks in iproduct(*(range(c + 1) for c in caps)):
            used = set(ranks)
            if M in used and all(r in used for r in range(1, M, 2)):
                yield ranks


def complement_buchi(b: OmegaAutomaton) -> OmegaAutomaton:
    """Rank-based complementation for transition-based Buchi acceptance.

    A first deterministic phase tracks the reachable subset. At any step the
    complement may guess a tight level ranking (odd maximum, every smaller
    odd rank in use) and move to the second phase, with states
    ``(ranking, O)``. Ranks never increase along edges and an accepting edge
    leaving an odd rank must strictly decrease it. ``O`` holds even-ranked
    states since it last emptied; the complement accepts when ``O`` empties
    infinitely often. Ranks stay below ``2n``.
    """
    if b.acceptance != BUCHI:
        raise UnsupportedError("complement_buchi needs a Buchi automaton")
    n = b.n_states
    top = 2 * n - 1

    def ranked(targets, ranks, O, from_o):
        f2 = [-1] * n
        for t, r in zip(targets, ranks):
            f2[t] = r
        src = targets if O == 0 else [t for t in targets if t in from_o]
        O2 = 0
        for t in src:
            if f2[t] % 2 == 0:
                O2 |= 1 << t
        return (tuple(f2), O2), O2 == 0

    def step(state, li):
        if state[0] == "subset":
            S = state[1]
            T = sorted({t for q in _bits(S) for t, _ in b.succ(q, li)})
            mask = sum(1 << t for t in T)
            if not T:
                return [(("rank", (-1,) * n, 0), True)]
            res = [(("subset", mask), False)]
            for ranks in _tight_rankings(T, {}, top):
                f2, _ = ranked(T, ranks, 0, ())
                res.append((("rank", f2[0], 0), True))
            return res
        _, f, O = state
        bound: dict = {}
        from_o = set()
        for q in range(n):
            r = f[q]
            if r < 0:
                continue
            for t, acc in b.succ(q, li):
                cap = r - 1 if (acc and r % 2 == 1) else r
                bound[t] = min(bound.get(t, cap), cap)
                if O >> q & 1:
                    from_o.add(t)
        targets = sorted(bound)
        if any(bound[t] < 0 for t in targets):
            return []
        if not targets:
            return [(("rank", (-1,) * n, 0), True)]
        res = []
        for ranks in _tight_rankings(targets, bound, top):
            (f2, O2), acc = ranked(targets, ranks, O, from_o)
            res.append((("rank", f2, O2), acc))
        return res

    def name(s):
        if s[0] == "subset":
            return _set_name(s[1])
        return f"{list(s[1])}/{_set_name(s[2])}"

    return _explicit(b.alphabet, ("subset", 1 << b.initial), step, BUCHI, name)


def _complement_safety(b: OmegaAutomaton) -> OmegaAutomaton:
    live = _live_states(b)
    k = len(b.alphabet)

    def step(S, li):
        S2 = frozenset(t for q in S for t, _ in b.succ(q, li) if t in live)
        return [(S2, not S2)]

    init = frozenset([b.initial]) & frozenset(live)
    return _explicit(b.alphabet, init, step, REACHABILITY, lambda s: _set_name(sum(1 << q for q in s)))


def _complement_reachability(b: OmegaAutomaton) -> OmegaAutomaton:
    live = _live_states(b)

    def step(S, li):
        nxt = set()
        for q in S:
            for t, acc in b.succ(q, li):
                if t in live:
                    if acc:
                        return []
                    nxt.add(t)
        return [(frozenset(nxt), True)]

    init = frozenset([b.initial]) & frozenset(live)
    return _explicit(b.alphabet, init, step, SAFETY, lambda s: _set_name(sum(1 << q for q in s)))


def complement(b: OmegaAutomaton) -> OmegaAutomaton:
    """Complement through the construction that suits each acceptance condition."""
    if b.acceptance == BUCHI:
        return complement_buchi(b)
    if b.acceptance == COBUCHI:
        d = determinize_cobuchi(b)
        flipped = [(t.source, t.letter, t.target, not t.accepting) for t in d.transitions]
        return OmegaAutomaton.build(d.alphabet, flipped, BUCHI, d.initial, d.n_states, d.state_names)
    if b.acceptance == SAFETY:
        return _complement_safety(b)
    return _complement_reachability(b)


def contains_by_complement(outer: OmegaAutomaton, inner: OmegaAutomaton):
    """``True`` or a counterexample, via emptiness of inner x complement(outer)."""
    _same_alphabet(outer, inner)
    w = _gen_empty(_gen_product(_gen(inner), _gen(complement(outer))), inner.alphabet)
    if w is None:
        return True
    w = w.canonical()
    assert lasso_member(inner, w) and not lasso_member(outer, w)
    return LassoCounterexample(w)


def is_universal_by_complement(b: OmegaAutomaton):
    """``True`` or a lasso outside ``L(b)``."""
    w = is_empty(complement(b))
    if w is None:
        return True
    assert not lasso_member(b, w)
    return w


# ---------------------------------------------------------------------------
# containment by idempotent boxes

_G, _B = 1, 2  # a path kind is good (accepting in the condition's sense) or bad


def _kind_tables(acceptance):
    def compose(x, y):
        if acceptance == COBUCHI:
            return _G if x == _G and y == _G else _B
        if acceptance == SAFETY:
            return _G
        return _G if _G in (x, y) else _B

    table = [[0] * 4 for _ in range(4)]
    for m1 in range(4):
        for m2 in range(4):
            r = 0
            for x in (_G, _B):
                for y in (_G, _B):
                    if m1 & x and m2 & y:
                        r |= compose(x, y)
            table[m1][m2] = r
    return table


class _BoxAlgebra:
    """Boxes of one automaton: ``n*n`` path-kind masks for a finite word."""

    def __init__(self, b: OmegaAutomaton):
        self.b = b
        self.n = n = b.n_states
        self.table = _kind_tables(b.acceptance)
        self.letters = []
        for li in range(len(b.alphabet)):
            box = [0] * (n * n)
            for q in range(n):
                for t, acc in b.succ(q, li):
                    kind = _G if (acc or b.acceptance == SAFETY) else _B
                    box[q * n + t] |= kind
            self.letters.append(tuple(box))
        ident = _B if b.acceptance in (BUCHI, REACHABILITY) else _G
        row = [0] * n
        row[b.initial] = ident
        self.init_row = tuple(row)

    def mul(self, x, y):
        n, t = self.n, self.table
        out = [0] * (n * n)
        for i in range(n):
            base = i * n
            for j in range(n):
                a = x[base + j]
                if not a:
                    continue
                ta = t[a]
                jb = j * n
                for k in range(n):
                    c = y[jb + k]
                    if c:
                        out[base + k] |= ta[c]
        return tuple(out)

    def row_mul(self, r, y):
        n, t = self.n, self.table
        out = [0] * n
        for j in range(n):
            a = r[j]
            if not a:
                continue
            ta = t[a]
            jb = j * n
            for k in range(n):
                c = y[jb + k]
                if c:
                    out[k] |= ta[c]
        return tuple(out)

    def accepts(self, r, h) -> bool:
        """Does the word ``x y^omega`` belong, given row(x y) = r and idempotent box(y) = h?"""
        n, acc = self.n, self.b.acceptance
        for q in range(n):
            if not r[q]:
                continue
            d = h[q * n + q]
            if not d:
                continue
            if acc == SAFETY:
                return True
            if d & _G:
                return True
            if acc == REACHABILITY and r[q] & _G:
                return True
        return False


def _same_alphabet(x, y):
    if tuple(x.alphabet) != tuple(y.alphabet):
        raise ValidationError(f"alphabet mismatch: {x.alphabet} vs {y.alphabet}")


MINIMIZE_BUDGET = 200_000


def contains(outer: OmegaAutomaton, inner: OmegaAutomaton, minimize: bool = True):
    """Decide ``L(inner) ⊆ L(outer)``; returns ``True`` or a :class:`LassoCounterexample`.

    Enumerates the finite monoid of box pairs for both automata (a box
    records, for every pair of states, which kinds of paths a finite word
    admits). A counterexample ``x y^omega`` exists iff some prefix row and
    idempotent loop box make the inner side accept and the outer reject.
    """
    _same_alphabet(outer, inner)
    I, O = _BoxAlgebra(inner), _BoxAlgebra(outer)
    k = len(inner.alphabet)
    letters = [(I.letters[li], O.letters[li]) for li in range(k)]

    boxes = {}
    queue = deque()
    for li, pair in enumerate(letters):
        if pair not in boxes:
            boxes[pair] = (li,)
            queue.append(pair)
    while queue:
        x = queue.popleft()
        wx = boxes[x]
        for li, (li_i, li_o) in enumerate(letters):
            y = (I.mul(x[0], li_i), O.mul(x[1], li_o))
            if y not in boxes:
                boxes[y] = wx + (li,)
                queue.append(y)

    rows = {(I.init_row, O.init_row): ()}
    queue = deque(rows)
    while queue:
        r = queue.popleft()
        wr = rows[r]
        for li, (li_i, li_o) in enumerate(letters):
            s = (I.row_mul(r[0], li_i), O.row_mul(r[1], li_o))
            if s not in rows:
                rows[s] = wr + (li,)
                queue.append(s)

    found = None
    for h, wh in boxes.items():
        if I.mul(h[0], h[0]) != h[0] or O.mul(h[1], h[1]) != h[1]:
            continue
        for r, wr in rows.items():
            ri = I.row_mul(r[0], h[0])
            if not I.accepts(ri, h[0]):
                continue
            ro = O.row_mul(r[1], h[1])
            if O.accepts(ro, h[1]):
                continue
            cand = (len(wr) + 2 * len(wh), wr + wh, wh)
            if found is None or cand[0] < found[0]:
                found = cand
    if found is None:
        return True
    alpha = inner.alphabet
    w = LassoWord([alpha[i] for i in found[1]], [alpha[i] for i in found[2]]).canonical()
    assert lasso_member(inner, w) and not lasso_member(outer, w), "box counterexample failed to re-check"
    if minimize:
        w = _minimize(outer, inner, w)
    return LassoCounterexample(w)


def enumerate_lassos(alphabet, max_total: int):
    """Canonical lassos ordered by total length, then prefix length, then letter order."""
    for total in range(1, max_total + 1):
        for plen in range(total):
            for word in iproduct(alphabet, repeat=total):
                w = LassoWord(word[:plen], word[plen:])
                if w.canonical() == w:
                    yield w


def _minimize(outer, inner, w: LassoWord) -> LassoWord:
    total = len(w)
    k = len(inner.alphabet)
    if sum(k ** t * t for t in range(1, total + 1)) > MINIMIZE_BUDGET:
        return w
    for cand in enumerate_lassos(inner.alphabet, total):
        if lasso_member(inner, cand) and not lasso_member(outer, cand):
            return cand
    return w


# ---------------------------------------------------------------------------
# safety languages

def safety_closure_automaton(b: OmegaAutomaton) -> OmegaAutomaton:
    """Safety automaton for the topological closure of ``L(b)``."""
    g, (nodes, out) = _explore_automaton(b)
    comps = _good_components(len(nodes), out, g.n_req)
    good = set().union(*comps) if comps else set()
    pred = [[] for _ in nodes]
    for u, row in enumerate(out):
        for _, v, _ in row:
            pred[v].append(u)
    stack = list(good)
    while stack:
        u = stack.pop()
        for p in pred[u]:
            if p not in good:
                good.add(p)
                stack.append(p)
    if 0 not in good:
        # empty language: closure is empty too; keep one state without transitions
        return OmegaAutomaton.build(b.alphabet, [], SAFETY, 0, 1)
    keep = sorted(good)
    index = {v: i for i, v in enumerate(keep)}
    ts = set()
    for u in keep:
        for li, v, _ in out[u]:
            if v in index:
                ts.add((index[u], b.alphabet[li], index[v], True))
    return OmegaAutomaton.build(b.alphabet, sorted(ts), SAFETY, index[0], len(keep),
                                tuple(str(nodes[v]) for v in keep))


def safety_language_counterexample(b: OmegaAutomaton) -> LassoWord | None:
    r = contains(b, safety_closure_automaton(b))
    return None if r is True else r.word


def is_safety_language(b: OmegaAutomaton) -> bool:
    """Is ``L(b)`` closed, i.e. equal to the set of words all of whose prefixes extend into it?"""
    if b.acceptance == SAFETY:
        return True
    return safety_language_counterexample(b) is None


# ---------------------------------------------------------------------------
# finite-word automata

@dataclass(frozen=True)
class NFA:
    alphabet: tuple[str, ...]
    n_states: int
    initial: frozenset
    accepting: frozenset
    transitions: tuple  # (src, letter, dst)
    state_names: tuple | None = None

    def step(self, S: frozenset, letter: str) -> frozenset:
        return frozenset(d for s, a, d in self.transitions if a == letter and s in S)

    def accepts(self, word) -> bool:
        S = self.initial
        for x in word:
            S = self.step(S, x)
        return bool(S & self.accepting)


def nfa_from_omega(b: OmegaAutomaton) -> NFA:
    """Finite-word reading of the transition structure with every state accepting."""
    return NFA(b.alphabet, b.n_states, frozenset([b.initial]), frozenset(range(b.n_states)),
               tuple(sorted({(t.source, t.letter, t.target) for t in b.transitions},
                            key=lambda x: (x[0], b.alphabet.index(x[1]), x[2]))))


def nfa_universal(n: NFA):
    """``True`` if every finite word is accepted, else a shortest rejected word.

    Breadth-first subset construction; a subset is skipped when a subset of
    it was already seen, since anything it rejects the smaller set rejects
    no later.
    """
    succ = {}
    for s, a, d in n.transitions:
        succ.setdefault((s, a), set()).add(d)
    start = frozenset(n.initial)
    if not start & n.accepting:
        return ()
    seen = [start]
    queue = deque([(start, ())])
    while queue:
        S, word = queue.popleft()
        for a in n.alphabet:
            T = frozenset(d for s in S for d in succ.get((s, a), ()))
            w2 = word + (a,)
            if not T & n.accepting:
                return w2
            if any(V <= T for V in seen):
                continue
            seen.append(T)
            queue.append((T, w2))
    return True
