"""Exact semantics: lasso evaluation, top values, monotone form.

Nondeterminism is resolved by supremum. Parallel transitions between the
same pair of states on the same letter are collapsed to the heaviest one,
which is sound for every supremum-resolved value function used here.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .core import Automaton, LassoWord, Transition, UnsupportedError, ValidationError, ValueFunction
from .graph import Edge, WeightedGraph, max_mean_cycle, tarjan


# ---------------------------------------------------------------------------
# monotone form

def _monotone(a: Automaton, target: str, reachable_only: bool) -> Automaton:
    if a.valfn.tag not in ("inf", "sup"):
        raise UnsupportedError(f"monotone form needs an inf or sup automaton, got {a.valfn}")
    sup = a.valfn.tag == "sup"
    allowed = ("sup", "liminf", "limsup") if sup else ("inf", "liminf", "limsup")
    if target not in allowed:
        raise UnsupportedError(f"monotone form of a {a.valfn.tag} automaton cannot target {target}")
    weights = sorted(a.weights)
    start = weights[0] if sup else weights[-1]
    better = max if sup else min
    index: dict = {}
    order: list = []

    def node(q, m):
        key = (q, m)
        if key not in index:
            index[key] = len(order)
            order.append(key)
        return index[key]

    node(a.initial, start)
    if not reachable_only:
        for q in a.states:
            for m in weights:
                node(q, m)
    ts = []
    i = 0
    while i < len(order):
        q, m = order[i]
        for li, letter in enumerate(a.alphabet):
            for x, p in a.successors(q, li):
                m2 = better(m, x)
                ts.append(Transition(i, letter, m2, node(p, m2)))
        i += 1
    names = tuple(f"{a.state_names[q]}|{m}" for q, m in order)
    return Automaton(a.alphabet, names, 0, tuple(ts), ValueFunction(target))


@lru_cache(maxsize=4096)
def _monotone_cached(a: Automaton, target: str, reachable_only: bool) -> Automaton:
    return _monotone(a, target, reachable_only)


def monotone_form(a: Automaton, target: str | None = None) -> Automaton:
    """Equivalent automaton whose runs carry monotone, eventually constant weights.

    States are pairs (state, running max) for Sup and (state, running min)
    for Inf, restricted to the reachable part. Each transition emits the
    updated memory, so for Sup inputs every run is nondecreasing.
    """
    if target is None:
        target = a.valfn.tag
    return _monotone_cached(a, target, True)


def monotone_memory(a: Automaton, monotone_state: int, m: Automaton | None = None):
    """Decode a monotone-form state back into ``(state, memory)`` names."""
    m = m or monotone_form(a)
    name = m.state_names[monotone_state]
    q, mem = name.rsplit("|", 1)
    return q, Fraction(mem)


# ---------------------------------------------------------------------------
# products with lasso words

def _letter_indices(a: Automaton, w: LassoWord) -> list[int]:
    index = {x: i for i, x in enumerate(a.alphabet)}
    try:
        return [index[x] for x in w.prefix + w.loop]
    except KeyError as exc:
        raise ValidationError(f"letter {exc.args[0]!r} not in alphabet {a.alphabet}") from None


def lasso_product(a: Automaton, w: LassoWord):
    """Reachable part of A x lasso shape.

    Returns ``(nodes, out)`` where ``nodes[k] = (state, position)`` and
    ``out[k]`` is a list of ``(weight, k')``; node 0 is the start node.
    Loop positions wrap back to the first loop position.
    """
    letters = _letter_indices(a, w)
    L = len(letters)
    back = len(w.prefix)
    index = {(a.initial, 0): 0}
    nodes = [(a.initial, 0)]
    out = []
    k = 0
    while k < len(nodes):
        q, i = nodes[k]
        j = i + 1 if i + 1 < L else back
        best: dict = {}
        for x, p in a.successors(q, letters[i]):
            if p not in best or x > best[p]:
                best[p] = x
        row = []
        for p, x in best.items():
            key = (p, j)
            if key not in index:
                index[key] = len(nodes)
                nodes.append(key)
            row.append((x, index[key]))
        out.append(row)
        k += 1
    return nodes, out


def _max_internal_edge(n, out):
    succ = [[v for _, v in row] for row in out]
    comp_of = [0] * n
    comps = tarjan(n, succ)
    for c, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = c
    best = None
    for u in range(n):
        for x, v in out[u]:
            if comp_of[u] == comp_of[v] and (best is None or x > best):
                best = x
    return best


def _has_cycle(n, succ) -> bool:
    for comp in tarjan(n, succ):
        if len(comp) > 1 or comp[0] in succ[comp[0]]:
            return True
    return False


def _limsup(n, out):
    return _max_internal_edge(n, out)


def _liminf(n, out):
    for v in sorted({x for row in out for x, _ in row}, reverse=True):
        succ = [[t for x, t in row if x >= v] for row in out]
        if _has_cycle(n, succ):
            return v
    raise AssertionError("a total automaton always has a reachable cycle")


def _avg(n, out):
    g = WeightedGraph(n, [Edge(u, v, x) for u in range(n) for x, v in out[u]])
    return max_mean_cycle(g).mean


# ---------------------------------------------------------------------------
# discounted sums by exact policy iteration

def dsum_policy_iteration(out, lam: Fraction, policy=None):
    """Optimal discounted values on a finite graph where every node has an out-edge.

    ``out[u]`` lists ``(weight, v)``. Returns ``(values, policy)`` where
    ``policy[u]`` indexes the chosen edge. Each positional policy is solved
    exactly along its unique cycle: V = sum(lam^i w_i) / (1 - lam^len).
    """
    n = len(out)
    policy = list(policy) if policy is not None else [max(range(len(out[u])), key=lambda k: out[u][k][0]) for u in range(n)]
    while True:
        values = _policy_values(out, lam, policy)
        changed = False
        for u in range(n):
            cur = values[u]
            best_k, best = policy[u], cur
            for k, (x, v) in enumerate(out[u]):
                cand = x + lam * values[v]
                if cand > best:
                    best_k, best = k, cand
            if best_k != policy[u]:
                policy[u] = best_k
                changed = True
        if not changed:
            return values, policy


def _policy_values(out, lam, policy):
    n = len(out)
    values: list = [None] * n
    state = [0] * n  # 0 unseen, 1 on current walk, 2 done
    for s in range(n):
        if state[s]:
            continue
        walk = []
        u = s
        while state[u] == 0:
            state[u] = 1
            walk.append(u)
            u = out[u][policy[u]][1]
        if state[u] == 1:
            # u starts a fresh cycle inside the walk
            start = walk.index(u)
            cyc = walk[start:]
            total = Fraction(0)
            factor = Fraction(1)
            for c in cyc:
                total += factor * out[c][policy[c]][0]
                factor *= lam
            values[cyc[0]] = total / (1 - factor)
            for c in reversed(cyc[1:]):
                x, v = out[c][policy[c]]
                values[c] = x + lam * values[v]
            walk = walk[:start]
            for c in cyc:
                state[c] = 2
        for c in reversed(walk):
            x, v = out[c][policy[c]]
            values[c] = x + lam * values[v]
            state[c] = 2
    return values


# ---------------------------------------------------------------------------
# evaluation

def evaluate_lasso(a: Automaton, w: LassoWord) -> Fraction:
    """Exact value of ``a`` on ``w``: supremum over runs."""
    tag = a.valfn.tag
    if tag in ("inf", "sup"):
        return evaluate_lasso(monotone_form(a, "limsup"), w)
    nodes, out = lasso_product(a, w)
    n = len(nodes)
    if tag == "limsup":
        return _limsup(n, out)
    if tag == "liminf":
        return _liminf(n, out)
    if tag in ("liminfavg", "limsupavg"):
        return _avg(n, out)
    if tag == "dsum":
        values, _ = dsum_policy_iteration(out, a.valfn.discount)
        return values[0]
    raise UnsupportedError(tag)


def evaluate_lasso_min(a: Automaton, w: LassoWord) -> Fraction:
    """Infimum over runs of the limit average; re-checks witnesses that bound every run."""
    if a.valfn.tag not in ("liminfavg", "limsupavg"):
        raise UnsupportedError("infimum over runs is only provided for limit-average")
    nodes, out = lasso_product(a.with_weights(lambda t: -t.weight), w)
    return -_avg(len(nodes), out)


# ---------------------------------------------------------------------------
# top values

@dataclass(frozen=True)
class TopValueTable:
    values: tuple[Fraction, ...]
    witnesses: tuple[LassoWord, ...]

    def __getitem__(self, q):
        return self.values[q]


def _collapsed_edges(a: Automaton):
    """``out[q]`` = list of ``(weight, letter_index, target)`` with parallels merged by max."""
    out = []
    for q in a.states:
        row = []
        for li in range(len(a.alphabet)):
            best: dict = {}
            for x, p in a.successors(q, li):
                if p not in best or x > best[p]:
                    best[p] = x
            row.extend((x, li, p) for p, x in sorted(best.items()))
        out.append(row)
    return out


def _bfs_path(out, src, goal, allowed=None):
    """Shortest letter path ``src -> goal`` (empty if equal); ties by letter order."""
    if src == goal:
        return []
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for x, li, v in sorted(out[u], key=lambda e: (e[1], e[2])):
            if allowed is not None and not allowed(x, u, v):
                continue
            if v not in prev:
                prev[v] = (u, li)
                if v == goal:
                    path = []
                    while prev[v] is not None:
                        u2, l2 = prev[v]
                        path.append(l2)
                        v = u2
                    return path[::-1]
                queue.append(v)
    return None


def _bfs_to_set(out, src, targets):
    """Shortest path from ``src`` to any node in ``targets``; returns ``(letters, node)``."""
    if src in targets:
        return [], src
    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for x, li, v in sorted(out[u], key=lambda e: (e[1], e[2])):
            if v not in prev:
                prev[v] = (u, li)
                if v in targets:
                    path, node = [], v
                    while prev[v] is not None:
                        u2, l2 = prev[v]
                        path.append(l2)
                        v = u2
                    return path[::-1], node
                queue.append(v)
    return None


def _cycle_through(out, node, allowed=None):
    """Shortest cycle from ``node`` back to itself (letters)."""
    best = None
    for x, li, v in sorted(out[node], key=lambda e: (e[1], e[2])):
        if allowed is not None and not allowed(x, node, v):
            continue
        rest = _bfs_path(out, v, node, allowed)
        if rest is not None and (best is None or len(rest) + 1 < len(best)):
            best = [li] + rest
    return best


def _lasso(a, prefix, loop) -> LassoWord:
    return LassoWord([a.alphabet[i] for i in prefix], [a.alphabet[i] for i in loop]).canonical()


def state_top_values(a: Automaton) -> TopValueTable:
    """Top value of every rerooted automaton, in one shared pass, with witness lassos."""
    tag = a.valfn.tag
    if tag in ("inf", "sup"):
        m = _monotone_cached(a, "limsup", False)
        table = state_top_values(m)
        weights = sorted(a.weights)
        start = weights[0] if tag == "sup" else weights[-1]
        pos = {name: i for i, name in enumerate(m.state_names)}
        vals, wits = [], []
        for q in a.states:
            k = pos[f"{a.state_names[q]}|{start}"]
            vals.append(table.values[k])
            wits.append(table.witnesses[k])
        return TopValueTable(tuple(vals), tuple(wits))

    out = _collapsed_edges(a)
    n = a.n_states
    if tag == "dsum":
        simple = [[(x, p) for x, _, p in row] for row in out]
        values, policy = dsum_policy_iteration(simple, a.valfn.discount)
        wits = []
        for q in range(n):
            seen, letters, u = {}, [], q
            while u not in seen:
                seen[u] = len(letters)
                x, li, p = out[u][policy[u]]
                letters.append(li)
                u = p
            cut = seen[u]
            wits.append(_lasso(a, letters[:cut], letters[cut:]))
        return TopValueTable(tuple(values), tuple(wits))

    succ = [[p for _, _, p in row] for row in out]
    comps = tarjan(n, succ)  # sinks first
    comp_of = [0] * n
    for c, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = c

    if tag == "liminf":
        values: list = [None] * n
        anchor: list = [None] * n
        pred = [[] for _ in range(n)]
        for u in range(n):
            for _, _, v in out[u]:
                pred[v].append(u)
        for v in sorted({x for row in out for x, _, _ in row}, reverse=True):
            sub = [[p for x, _, p in row if x >= v] for row in out]
            on_cycle = set()
            for comp in tarjan(n, sub):
                if len(comp) > 1 or comp[0] in sub[comp[0]]:
                    on_cycle.update(comp)
            stack = [u for u in on_cycle]
            reach = set(on_cycle)
            while stack:
                u = stack.pop()
                for p in pred[u]:
                    if p not in reach:
                        reach.add(p)
                        stack.append(p)
            for q in reach:
                if values[q] is None:
                    values[q] = v
                    anchor[q] = on_cycle
        wits = []
        for q in range(n):
            v = values[q]
            path, node = _bfs_to_set(out, q, anchor[q])
            loop = _cycle_through(out, node, lambda x, u, p, v=v: x >= v)
            wits.append(_lasso(a, path, loop))
        return TopValueTable(tuple(values), tuple(wits))

    if tag == "limsup":
        local = [None] * len(comps)  # (weight, (u, li, v)) best internal edge
        for u in range(n):
            for x, li, v in out[u]:
                c = comp_of[u]
                if comp_of[v] == c and (local[c] is None or x > local[c][0]):
                    local[c] = (x, (u, li, v))
    elif tag in ("liminfavg", "limsupavg"):
        local = [None] * len(comps)
        for c, comp in enumerate(comps):
            members = set(comp)
            g = WeightedGraph(n)
            for u in comp:
                for x, li, v in out[u]:
                    if v in members:
                        g.edges.append(Edge(u, v, x, (u, li, v)))
            mc = max_mean_cycle(g)
            if mc is not None:
                local[c] = (mc.mean, [e.tag for e in mc.cycle])
    else:
        raise UnsupportedError(tag)

    best = [None] * len(comps)
    for c, comp in enumerate(comps):  # successors appear earlier in the list
        cand = local[c]
        for u in comp:
            for _, _, v in out[u]:
                d = comp_of[v]
                if d != c and best[d] is not None and (cand is None or best[d][0] > cand[0]):
                    cand = best[d]
        best[c] = cand

    values, wits = [], []
    for q in range(n):
        val, info = best[comp_of[q]]
        values.append(val)
        if tag == "limsup":
            u, li, v = info
            path = _bfs_path(out, q, u)
            back = _bfs_path(out, v, u)
            wits.append(_lasso(a, path, [li] + back))
        else:
            cyc = info
            path = _bfs_path(out, q, cyc[0][0])
            wits.append(_lasso(a, path, [li for _, li, _ in cyc]))
    return TopValueTable(tuple(values), tuple(wits))


def top_value(a: Automaton) -> tuple[Fraction, LassoWord]:
    table = state_top_values(a)
    return table.values[a.initial], table.witnesses[a.initial]
