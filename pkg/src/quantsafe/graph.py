"""Weighted multigraph algorithms: SCCs, maximum mean cycles, negative cycles, Johnson potentials.

Rational weights are scaled to integers by the LCM of their denominators
before the textbook recurrences run, and scaled back afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Any, Iterable


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    weight: Fraction
    tag: Any = None


@dataclass
class WeightedGraph:
    """Directed multigraph on vertices ``0..n-1``."""

    n: int
    edges: list = field(default_factory=list)

    @classmethod
    def from_triples(cls, n: int, triples: Iterable) -> WeightedGraph:
        g = cls(n)
        for t in triples:
            g.add(*t)
        return g

    def add(self, u: int, v: int, w, tag=None) -> Edge:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge ({u}, {v}) outside vertex range 0..{self.n - 1}")
        e = Edge(u, v, Fraction(w), tag)
        self.edges.append(e)
        return e

    def out_edges(self) -> list[list[Edge]]:
        out = [[] for _ in range(self.n)]
        for e in self.edges:
            out[e.source].append(e)
        return out

    def subgraph(self, keep_vertices) -> tuple[WeightedGraph, list[int]]:
        """Induced subgraph, renumbered; returns it with the list of original ids."""
        keep = sorted(set(keep_vertices))
        index = {v: i for i, v in enumerate(keep)}
        g = WeightedGraph(len(keep))
        for e in self.edges:
            if e.source in index and e.target in index:
                g.edges.append(Edge(index[e.source], index[e.target], e.weight, e))
        return g, keep


class NegativeCycle(Exception):
    def __init__(self, cycle: list[Edge]):
        self.cycle = cycle
        super().__init__(f"graph has a negative cycle of length {len(cycle)}")


# ---------------------------------------------------------------------------
# strongly connected components

def tarjan(n: int, succ) -> list[list[int]]:
    """Iterative Tarjan. ``succ[v]`` is an iterable of successor ids.

    Components come out in reverse topological order (sinks first).
    """
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


@dataclass(frozen=True)
class Component:
    vertices: tuple[int, ...]
    trivial: bool


def sccs(g: WeightedGraph) -> list[Component]:
    """SCCs in reverse topological order; a singleton is trivial iff it has no self-loop."""
    succ = [[] for _ in range(g.n)]
    loops = set()
    for e in g.edges:
        succ[e.source].append(e.target)
        if e.source == e.target:
            loops.add(e.source)
    out = []
    for comp in tarjan(g.n, succ):
        trivial = len(comp) == 1 and comp[0] not in loops
        out.append(Component(tuple(comp), trivial))
    return out


def cyclic_vertices(n: int, succ) -> set[int]:
    """Vertices lying on some cycle."""
    result = set()
    for comp in tarjan(n, succ):
        if len(comp) > 1:
            result.update(comp)
        elif comp[0] in succ[comp[0]]:
            result.add(comp[0])
    return result


# ---------------------------------------------------------------------------
# scaling helpers

def _scale(edges) -> int:
    return lcm(*(e.weight.denominator for e in edges)) if edges else 1


def _find_cycle(n: int, out: list[list[Edge]]) -> list[Edge] | None:
    """Any cycle in the given adjacency structure, as a list of edges."""
    color = [0] * n
    parent: list[Edge | None] = [None] * n
    for root in range(n):
        if color[root]:
            continue
        color[root] = 1
        work = [(root, iter(out[root]))]
        while work:
            v, it = work[-1]
            e = next(it, None)
            if e is None:
                color[v] = 2
                work.pop()
                continue
            w = e.target
            if color[w] == 0:
                color[w] = 1
                parent[w] = e
                work.append((w, iter(out[w])))
            elif color[w] == 1:
                cycle = [e]
                x = v
                while x != w:
                    pe = parent[x]
                    cycle.append(pe)
                    x = pe.source
                cycle.reverse()
                return cycle
    return None


# ---------------------------------------------------------------------------
# maximum mean cycle

@dataclass(frozen=True)
class MeanCycle:
    mean: Fraction
    cycle: tuple[Edge, ...]


def _karp_scc(n: int, edges: list[tuple[int, int, int]]) -> Fraction:
    """Karp's recurrence on a strongly connected graph with integer weights (maximization)."""
    NEG = None
    d = [[NEG] * n for _ in range(n + 1)]
    d[0][0] = 0
    for k in range(1, n + 1):
        prev, cur = d[k - 1], d[k]
        for u, v, w in edges:
            if prev[u] is not NEG:
                cand = prev[u] + w
                if cur[v] is NEG or cand > cur[v]:
                    cur[v] = cand
    best = None
    for v in range(n):
        if d[n][v] is NEG:
            continue
        worst = None
        for k in range(n):
            if d[k][v] is NEG:
                continue
            val = Fraction(d[n][v] - d[k][v], n - k)
            if worst is None or val < worst:
                worst = val
        if worst is not None and (best is None or worst > best):
            best = worst
    return best


def _zero_cycle(n: int, edges: list[Edge], mean: Fraction) -> list[Edge]:
    """A cycle of mean exactly ``mean`` in a graph whose maximum cycle mean is ``mean``.

    With weights shifted by ``-mean`` no cycle is positive, so longest-path
    potentials exist and every zero cycle consists of tight edges.
    """
    dist = [Fraction(0)] * n
    for _ in range(n):
        changed = False
        for e in edges:
            cand = dist[e.source] + e.weight - mean
            if cand > dist[e.target]:
                dist[e.target] = cand
                changed = True
        if not changed:
            break
    out = [[] for _ in range(n)]
    for e in edges:
        if dist[e.source] + e.weight - mean == dist[e.target]:
            out[e.source].append(e)
    cycle = _find_cycle(n, out)
    assert cycle is not None, "tight subgraph must contain an optimal cycle"
    return cycle


def max_mean_cycle(g: WeightedGraph) -> MeanCycle | None:
    """Maximum cycle mean with a witness cycle, or ``None`` when ``g`` is acyclic."""
    best: MeanCycle | None = None
    scale = _scale(g.edges)
    for comp in sccs(g):
        if comp.trivial:
            continue
        local = {v: i for i, v in enumerate(comp.vertices)}
        inner = [e for e in g.edges if e.source in local and e.target in local]
        ints = [(local[e.source], local[e.target], int(e.weight * scale)) for e in inner]
        mean = _karp_scc(len(local), ints) / scale
        if best is None or mean > best.mean:
            renamed = [Edge(local[e.source], local[e.target], e.weight, e) for e in inner]
            cyc = _zero_cycle(len(local), renamed, mean)
            best = MeanCycle(mean, tuple(e.tag for e in cyc))
    return best


# ---------------------------------------------------------------------------
# Bellman-Ford and Johnson

def _bellman_ford(g: WeightedGraph):
    """Shortest distances from a virtual source joined to every vertex by 0-edges.

    Returns ``(dist, None)`` or ``(None, cycle)`` for a negative cycle.
    """
    scale = _scale(g.edges)
    dist = [0] * g.n
    pred: list[Edge | None] = [None] * g.n
    ints = [(e, int(e.weight * scale)) for e in g.edges]
    last = None
    for _ in range(g.n + 1):
        last = None
        for e, w in ints:
            if dist[e.source] + w < dist[e.target]:
                dist[e.target] = dist[e.source] + w
                pred[e.target] = e
                last = e.target
        if last is None:
            return [Fraction(d, scale) for d in dist], None
    # walk back n steps to land on the cycle, then collect it
    v = last
    for _ in range(g.n):
        v = pred[v].source
    cycle = []
    u = v
    while True:
        e = pred[u]
        cycle.append(e)
        u = e.source
        if u == v:
            break
    cycle.reverse()
    return None, cycle


def detect_negative_cycle(g: WeightedGraph) -> list[Edge] | None:
    _, cycle = _bellman_ford(g)
    return cycle


@dataclass(frozen=True)
class ReweightResult:
    h: tuple[Fraction, ...]
    reweighted: tuple[Fraction, ...]  # parallel to g.edges

    def graph(self, g: WeightedGraph) -> WeightedGraph:
        return WeightedGraph(g.n, [Edge(e.source, e.target, w, e.tag) for e, w in zip(g.edges, self.reweighted)])


def johnson_reweight(g: WeightedGraph) -> ReweightResult:
    """Potentials ``h`` with ``w(u,v) + h(u) - h(v) >= 0`` on every edge."""
    dist, cycle = _bellman_ford(g)
    if cycle is not None:
        raise NegativeCycle(cycle)
    rw = tuple(e.weight + dist[e.source] - dist[e.target] for e in g.edges)
    assert all(w >= 0 for w in rw)
    return ReweightResult(tuple(dist), rw)
