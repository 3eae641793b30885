"""Quantitative automata, lasso words and the line-based text format.

Weights are :class:`fractions.Fraction` throughout; nothing on a verdict
path ever touches floating point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

VALUE_FUNCTIONS = ("inf", "sup", "liminf", "limsup", "liminfavg", "limsupavg", "dsum")
FINITE_VALUED = ("inf", "sup", "liminf", "limsup")
LIMIT_AVERAGE = ("liminfavg", "limsupavg")


class QuantsafeError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(QuantsafeError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class ValidationError(QuantsafeError):
    pass


class TotalityError(ValidationError):
    def __init__(self, state: str, letter: str):
        self.state = state
        self.letter = letter
        super().__init__(f"automaton is not total: no transition from state {state!r} on letter {letter!r}")


class UnsupportedError(QuantsafeError):
    """Raised when an operation is asked for a value function it cannot handle."""


def rational(value) -> Fraction:
    """Exact conversion; floats are refused so they cannot leak into verdicts."""
    if isinstance(value, float):
        raise TypeError("floating point weights are not accepted; use Fraction or 'p/q' strings")
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    return Fraction(value)


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decimal_string(x: Fraction, digits: int) -> str:
    """Human rendering with ``digits`` decimals, rounded half away from zero."""
    scale = 10 ** digits
    n = abs(x) * scale
    q, r = divmod(n.numerator, n.denominator)
    if 2 * r >= n.denominator:
        q += 1
    sign = "-" if x < 0 and q else ""
    s = str(q).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}" if digits else f"{sign}{s}"


@dataclass(frozen=True)
class ValueFunction:
    tag: str
    discount: Fraction | None = None

    def __post_init__(self):
        if self.tag not in VALUE_FUNCTIONS:
            raise ValidationError(f"unknown value function {self.tag!r}")
        if self.tag == "dsum":
            if self.discount is None:
                raise ValidationError("dsum requires a discount factor")
            if not 0 < self.discount < 1:
                raise ValidationError(f"discount factor must lie strictly between 0 and 1, got {self.discount}")
        elif self.discount is not None:
            raise ValidationError(f"discount factor is only allowed for dsum, not {self.tag}")

    def __str__(self):
        if self.tag == "dsum":
            return f"dsum({format_rational(self.discount)})"
        return self.tag


INF = ValueFunction("inf")
SUP = ValueFunction("sup")
LIMINF = ValueFunction("liminf")
LIMSUP = ValueFunction("limsup")
LIMINFAVG = ValueFunction("liminfavg")
LIMSUPAVG = ValueFunction("limsupavg")


def dsum(discount) -> ValueFunction:
    return ValueFunction("dsum", rational(discount))


@dataclass(frozen=True)
class Transition:
    source: int
    letter: str
    weight: Fraction
    target: int


@dataclass(frozen=True)
class LassoWord:
    """The ultimately periodic word ``prefix . loop^omega``."""

    prefix: tuple[str, ...]
    loop: tuple[str, ...]

    def __init__(self, prefix: Iterable[str] = (), loop: Iterable[str] = ()):
        object.__setattr__(self, "prefix", tuple(prefix))
        object.__setattr__(self, "loop", tuple(loop))
        if not self.loop:
            raise ValidationError("lasso loop must be nonempty")

    def __len__(self):
        return len(self.prefix) + len(self.loop)

    def letter_at(self, i: int) -> str:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.loop[(i - len(self.prefix)) % len(self.loop)]

    def take(self, n: int) -> tuple[str, ...]:
        return tuple(self.letter_at(i) for i in range(n))

    def canonical(self) -> LassoWord:
        """Shortest representation of the same infinite word."""
        loop = list(self.loop)
        n = len(loop)
        for d in range(1, n + 1):
            if n % d == 0 and loop == loop[:d] * (n // d):
                loop = loop[:d]
                break
        prefix = list(self.prefix)
        while prefix and prefix[-1] == loop[-1]:
            prefix.pop()
            loop = [loop[-1]] + loop[:-1]
        return LassoWord(prefix, loop)

    def to_json(self) -> dict:
        return {"prefix": list(self.prefix), "loop": list(self.loop)}

    @classmethod
    def from_json(cls, data: dict) -> LassoWord:
        return cls(data.get("prefix", ()), data["loop"])

    def __str__(self):
        pre = " ".join(self.prefix)
        return f"{pre} ({' '.join(self.loop)})^w".strip()


@dataclass(frozen=True, eq=False)
class Automaton:
    """Total, possibly nondeterministic quantitative automaton.

    States are dense integers ``0..n-1``; ``state_names`` is metadata used
    for printing and serialization. Parallel transitions are kept.
    """

    alphabet: tuple[str, ...]
    state_names: tuple[str, ...]
    initial: int
    transitions: tuple[Transition, ...]
    valfn: ValueFunction
    _out: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.alphabet:
            raise ValidationError("alphabet must be nonempty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValidationError("alphabet has duplicate letters")
        if not self.state_names:
            raise ValidationError("automaton needs at least one state")
        if len(set(self.state_names)) != len(self.state_names):
            raise ValidationError("duplicate state names")
        n = len(self.state_names)
        if not 0 <= self.initial < n:
            raise ValidationError(f"initial state {self.initial} out of range")
        letter_index = {a: i for i, a in enumerate(self.alphabet)}
        out = [[[] for _ in self.alphabet] for _ in range(n)]
        for t in self.transitions:
            if not (0 <= t.source < n and 0 <= t.target < n):
                raise ValidationError(f"transition {t} references an unknown state")
            if t.letter not in letter_index:
                raise ValidationError(f"transition letter {t.letter!r} not in alphabet")
            if not isinstance(t.weight, Fraction):
                raise ValidationError(f"transition weight {t.weight!r} is not a Fraction")
            out[t.source][letter_index[t.letter]].append((t.weight, t.target))
        for q in range(n):
            for i, a in enumerate(self.alphabet):
                if not out[q][i]:
                    raise TotalityError(self.state_names[q], a)
        object.__setattr__(self, "_out", tuple(tuple(tuple(x) for x in row) for row in out))

    @classmethod
    def build(cls, alphabet: Sequence[str], transitions, valfn: ValueFunction | str,
              initial=None, states: Sequence | None = None) -> Automaton:
        """Convenience constructor from ``(source, letter, weight, target)`` tuples.

        States may be given by any hashable names; they are numbered in order
        of first appearance unless ``states`` fixes the order.
        """
        if isinstance(valfn, str):
            valfn = ValueFunction(valfn)
        names: list = list(states) if states is not None else []
        index = {s: i for i, s in enumerate(names)}

        def idx(s):
            if s not in index:
                index[s] = len(names)
                names.append(s)
            return index[s]

        if initial is not None:
            idx(initial)
        alphabet = tuple(alphabet)
        ts = []
        for src, letter, weight, dst in transitions:
            letters = alphabet if letter == "*" else (letter,)
            for a in letters:
                ts.append(Transition(idx(src), a, rational(weight), idx(dst)))
        init = index[initial] if initial is not None else 0
        return cls(alphabet, tuple(str(s) for s in names), init, tuple(ts), valfn)

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    @property
    def states(self) -> range:
        return range(len(self.state_names))

    def successors(self, q: int, letter_idx: int) -> tuple[tuple[Fraction, int], ...]:
        """``(weight, target)`` pairs for state ``q`` on the letter with index ``letter_idx``."""
        return self._out[q][letter_idx]

    def letter_index(self, letter: str) -> int:
        try:
            return self.alphabet.index(letter)
        except ValueError:
            raise ValidationError(f"letter {letter!r} not in alphabet {self.alphabet}") from None

    def state_index(self, name: str) -> int:
        try:
            return self.state_names.index(str(name))
        except ValueError:
            raise ValidationError(f"unknown state {name!r}") from None

    @property
    def weights(self) -> frozenset[Fraction]:
        return frozenset(t.weight for t in self.transitions)

    @property
    def deterministic(self) -> bool:
        return all(len(self._out[q][i]) == 1 for q in self.states for i in range(len(self.alphabet)))

    def with_weights(self, weight_of) -> Automaton:
        """Same graph, each transition reweighted by ``weight_of(transition)``."""
        ts = tuple(Transition(t.source, t.letter, rational(weight_of(t)), t.target) for t in self.transitions)
        return Automaton(self.alphabet, self.state_names, self.initial, ts, self.valfn)

    def with_valfn(self, valfn: ValueFunction | str) -> Automaton:
        if isinstance(valfn, str):
            valfn = ValueFunction(valfn)
        return Automaton(self.alphabet, self.state_names, self.initial, self.transitions, valfn)

    def reachable_states(self, start: int | None = None) -> list[int]:
        start = self.initial if start is None else start
        seen = {start}
        stack = [start]
        order = [start]
        while stack:
            q = stack.pop()
            for row in self._out[q]:
                for _, p in row:
                    if p not in seen:
                        seen.add(p)
                        order.append(p)
                        stack.append(p)
        return sorted(order)

    def restrict_to_reachable(self) -> Automaton:
        keep = self.reachable_states()
        if len(keep) == self.n_states:
            return self
        remap = {q: i for i, q in enumerate(keep)}
        ts = tuple(Transition(remap[t.source], t.letter, t.weight, remap[t.target])
                   for t in self.transitions if t.source in remap)
        return Automaton(self.alphabet, tuple(self.state_names[q] for q in keep), remap[self.initial], ts, self.valfn)

    def __repr__(self):
        return (f"Automaton({self.valfn}, states={len(self.state_names)}, "
                f"alphabet={list(self.alphabet)}, transitions={len(self.transitions)})")


def reroot(a: Automaton, q) -> Automaton:
    """The same automaton with initial state ``q`` (index or name)."""
    if isinstance(q, str):
        q = a.state_index(q)
    if not isinstance(q, int) or not 0 <= q < a.n_states:
        raise ValidationError(f"unknown state {q!r}")
    return Automaton(a.alphabet, a.state_names, q, a.transitions, a.valfn)


def constant_automaton(alphabet: Sequence[str], value, valfn: ValueFunction | str = INF) -> Automaton:
    """One state expressing the constant function ``value`` under ``valfn``."""
    if isinstance(valfn, str):
        valfn = ValueFunction(valfn)
    value = rational(value)
    weight = value * (1 - valfn.discount) if valfn.tag == "dsum" else value
    return Automaton.build(alphabet, [("c", "*", weight, "c")], valfn, initial="c")


def isomorphic(a: Automaton, b: Automaton) -> bool:
    """Equality up to renaming of states, comparing transition multisets."""
    if (a.alphabet != b.alphabet or a.valfn != b.valfn or a.n_states != b.n_states
            or len(a.transitions) != len(b.transitions)):
        return False
    # both are total, so a bijection is forced along any spanning search from the initials
    mapping = {a.initial: b.initial}
    queue = [a.initial]
    while queue:
        q = queue.pop()
        p = mapping[q]
        for i in range(len(a.alphabet)):
            sa = sorted(a.successors(q, i))
            sb = sorted(b.successors(p, i))
            if len(sa) != len(sb):
                return False
            # group by weight; ambiguous groups fall back to brute force below
            for (wa, qa), (wb, qb) in zip(sa, sb):
                if wa != wb:
                    return False
    return _iso_search(a, b)


def _iso_search(a: Automaton, b: Automaton) -> bool:
    from collections import Counter
    from itertools import permutations

    ca = Counter((t.source, t.letter, t.weight, t.target) for t in a.transitions)
    cb = Counter((t.source, t.letter, t.weight, t.target) for t in b.transitions)
    n = a.n_states
    others = [q for q in range(n) if q != a.initial]
    targets = [q for q in range(n) if q != b.initial]
    if n > 8:
        raise ValidationError("isomorphism check limited to 8 states")
    for perm in permutations(targets):
        m = dict(zip(others, perm))
        m[a.initial] = b.initial
        mapped = Counter({(m[s], l, w, m[t]): c for (s, l, w, t), c in ca.items()})
        if mapped == cb:
            return True
    return False


# ---------------------------------------------------------------------------
# text format

# a comment is a line starting with "#" or a "#" with whitespace on both sides,
# so "#" itself can still be a letter (as in "#:1" or "alphabet: a b #")
_COMMENT = re.compile(r"^\s*#.*$|\s#\s.*$")
_TRANSITION = re.compile(r"^\s*(\S+)\s+--\s+(\S+?)\s*:\s*(\S+)\s+-->\s+(\S+)\s*$")
_HEADER = re.compile(r"^\s*([A-Za-z_]+)\s*:\s*(.*?)\s*$")


def _tokens(text: str):
    """Yield ``(line_no, kind, payload)`` with comments stripped."""
    for n, raw in enumerate(text.splitlines(), start=1):
        line = _COMMENT.sub("", raw)
        if not line.strip():
            continue
        if "-->" in line:
            m = _TRANSITION.match(line)
            if not m:
                col = len(raw) - len(raw.lstrip()) + 1
                raise ParseError("malformed transition, expected 'src -- letter:weight --> dst'", n, col)
            yield n, "transition", (m.group(1), m.group(2), m.group(3), m.group(4), raw.index(m.group(3)) + 1)
            continue
        m = _HEADER.match(line)
        if not m:
            raise ParseError(f"cannot parse line {line.strip()!r}", n, len(raw) - len(raw.lstrip()) + 1)
        yield n, "header", (m.group(1).lower(), m.group(2), raw.index(m.group(2)) + 1 if m.group(2) else 1)


def parse_sections(text: str) -> tuple[dict, list]:
    """Split a file into header fields and raw transitions (shared with distance automata)."""
    headers: dict = {}
    transitions = []
    for n, kind, payload in _tokens(text):
        if kind == "header":
            key, value, col = payload
            if key in headers:
                raise ParseError(f"duplicate header {key!r}", n, 1)
            headers[key] = (value, n, col)
        else:
            transitions.append((n,) + payload)
    return headers, transitions


def _require(headers: dict, key: str):
    if key not in headers:
        raise ParseError(f"missing '{key}:' header")
    return headers[key]


def _expand_letters(label: str, alphabet: tuple[str, ...], line: int) -> list[str]:
    if label == "*":
        return list(alphabet)
    letters = label.split(",")
    for a in letters:
        if a not in alphabet:
            raise ParseError(f"letter {a!r} not in alphabet", line, 1)
    return letters


def parse_automaton(text: str) -> Automaton:
    """Parse the line-based automaton format.

    ``*`` as a label expands to every letter and ``a,b`` to several letters;
    each expansion yields one transition per letter.
    """
    headers, raw = parse_sections(text)
    tag, line, col = _require(headers, "valfn")
    tag = tag.lower()
    if tag not in VALUE_FUNCTIONS:
        raise ParseError(f"unknown value function {tag!r}", line, col)
    discount = None
    if "discount" in headers:
        value, line, col = headers["discount"]
        if tag != "dsum":
            raise ParseError("'discount:' is only allowed with valfn dsum", line, col)
        try:
            discount = rational(value)
        except ValueError as exc:
            raise ParseError(str(exc), line, col) from None
    elif tag == "dsum":
        raise ParseError("valfn dsum requires a 'discount:' header", line, col)
    try:
        valfn = ValueFunction(tag, discount)
    except ValidationError as exc:
        raise ParseError(str(exc), *headers["discount"][1:]) from None

    alphabet = tuple(_require(headers, "alphabet")[0].split())
    if not alphabet:
        raise ParseError("empty alphabet", headers["alphabet"][1], 1)
    initial_text, line, col = _require(headers, "initial")
    if len(initial_text.split()) != 1:
        raise ParseError("quantitative automata have exactly one initial state", line, col)
    for key in headers:
        if key not in ("valfn", "discount", "alphabet", "initial", "states"):
            raise ParseError(f"unknown header {key!r}", headers[key][1], 1)
    states = headers["states"][0].split() if "states" in headers else None

    ts = []
    for n, src, label, weight, dst, wcol in raw:
        try:
            w = rational(weight)
        except ValueError:
            raise ParseError(f"bad weight {weight!r}", n, wcol) from None
        for a in _expand_letters(label, alphabet, n):
            ts.append((src, a, w, dst))
    if states is not None:
        known = set(states)
        for n, src, label, weight, dst, _ in raw:
            for s in (src, dst):
                if s not in known:
                    raise ParseError(f"state {s!r} not listed in 'states:'", n, 1)
    return Automaton.build(alphabet, ts, valfn, initial=initial_text.strip(), states=states)


def serialize_automaton(a: Automaton) -> str:
    lines = [f"valfn: {a.valfn.tag}"]
    if a.valfn.tag == "dsum":
        lines.append(f"discount: {format_rational(a.valfn.discount)}")
    lines.append("alphabet: " + " ".join(a.alphabet))
    lines.append("states: " + " ".join(a.state_names))
    lines.append(f"initial: {a.state_names[a.initial]}")
    for t in a.transitions:
        lines.append(f"{a.state_names[t.source]} -- {t.letter}:{format_rational(t.weight)} --> {a.state_names[t.target]}")
    return "\n".join(lines) + "\n"


def to_dot(a: Automaton) -> str:
    """Graphviz rendering; parallel edges are merged into one label per state pair."""
    labels: dict = {}
    for t in a.transitions:
        labels.setdefault((t.source, t.target), []).append(f"{t.letter}:{format_rational(t.weight)}")
    out = ["digraph automaton {", "  rankdir=LR;", '  __init [shape=point];',
           f'  __init -> "{a.state_names[a.initial]}";']
    for (s, t), ls in sorted(labels.items()):
        out.append(f'  "{a.state_names[s]}" -> "{a.state_names[t]}" [label="{", ".join(ls)}"];')
    out.append("}")
    return "\n".join(out) + "\n"
