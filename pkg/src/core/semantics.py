"""Run semantics of ordinal automata on finite-support words.

A run on a constant block σ^(ω^k) is summarised by a profile: the triples
(q, visited, p) such that some run on the block starts in q, visits exactly the
states in `visited` strictly before the block ends, and is in p at the block end.
Level k+1 is obtained from level k by a path followed by a cycle that is repeated
ω times; the cycle's visited union is the cofinal set fed to a limit transition.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from core.automata import OrdinalAutomaton, State
from core.errors import AlphabetMismatchError, OrdinalRangeError
from core.ordinals import ZERO, Ordinal, interval_type
from core.words import AlphaWord, Symbol, make

logger = logging.getLogger(__name__)

Triple = tuple[State, frozenset, State]
ReachRelation = frozenset  # of (state, state)


@dataclass(frozen=True)
class Profile:
    level: int
    triples: frozenset

    def relation(self) -> ReachRelation:
        return frozenset((q, p) for q, _, p in self.triples)


@dataclass
class SaturationReport:
    symbol: Symbol
    m: int
    multipliers: list[Ordinal]
    violations: list[Ordinal] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def identity(states: Iterable[State]) -> ReachRelation:
    return frozenset((q, q) for q in states)


def compose(r: ReachRelation, s: ReachRelation) -> ReachRelation:
    forward = defaultdict(list)
    for u, p in s:
        forward[u].append(p)
    return frozenset((q, p) for q, u in r for p in forward[u])


def power(r: ReachRelation, n: int, states: Iterable[State]) -> ReachRelation:
    result = identity(states)
    base = r
    while n:
        if n & 1:
            result = compose(result, base)
        n >>= 1
        if n:
            base = compose(base, base)
    return result


def image(r: ReachRelation, sources: Iterable[State]) -> frozenset:
    sources = set(sources)
    return frozenset(p for q, p in r if q in sources)


def relation_power_cycle(r: ReachRelation, states: Iterable[State]) -> tuple[int, int]:
    """Least (threshold, period) with r^(threshold+period) = r^threshold."""
    states = frozenset(states)
    seen: dict[ReachRelation, int] = {}
    current = identity(states)
    i = 0
    while current not in seen:
        seen[current] = i
        current = compose(current, r)
        i += 1
    threshold = seen[current]
    return threshold, i - threshold


def _path_closure(a: OrdinalAutomaton, edges: frozenset) -> set[Triple]:
    by_source = defaultdict(list)
    for q, visited, p in edges:
        by_source[q].append((visited, p))

    closure = {(q, frozenset(), q) for q in a.states}
    stack = list(closure)
    while stack:
        q, visited, u = stack.pop()
        for more, p in by_source[u]:
            item = (q, visited | more, p)
            if item not in closure:
                closure.add(item)
                stack.append(item)
    return closure


def _cycles_within(edges: frozenset, bound: frozenset) -> dict[frozenset, frozenset]:
    """Strongly connected parts of the edges visiting only `bound`, each with the states its cycles cover."""
    inner = [(q, v, p) for q, v, p in edges if v <= bound]
    graph = defaultdict(set)
    for q, _, p in inner:
        graph[q].add(p)

    reach = {q: _reachable(graph, q) for q in graph}
    found = {}
    for q in graph:
        if q not in reach[q]:
            continue
        component = frozenset(u for u in reach[q] if q in reach.get(u, ()))
        if component not in found:
            found[component] = frozenset().union(*(v for x, v, y in inner if x in component and y in component))
    return found


def _reachable(graph: dict, source: State) -> set[State]:
    # nodes reachable by a nonempty path
    seen = set()
    stack = list(graph.get(source, ()))
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(graph.get(u, ()))
    return seen


@lru_cache(maxsize=4096)
def _profile_triples(a: OrdinalAutomaton, symbol: Symbol, k: int) -> frozenset:
    if k == 0:
        return frozenset((q, frozenset([q]), p) for q, s, p in a.succ if s == symbol)

    edges = _profile_triples(a, symbol, k - 1)
    paths = _path_closure(a, edges)
    triples = set()
    cycles = {item for bound in a.limit_bounds for item in _cycles_within(edges, bound).items()}
    for component, cofinal in cycles:
        for p in a.limit_targets(cofinal):
            for q, visited, u in paths:
                if u in component:
                    triples.add((q, visited | cofinal, p))
    logger.debug("profile level %d on %r: %d triples", k, symbol, len(triples))
    return frozenset(triples)


def profiles(a: OrdinalAutomaton, symbol: Symbol, k: int) -> Profile:
    if k < 0:
        raise OrdinalRangeError(f"profile level must be >= 0, got {k}")
    return Profile(k, _profile_triples(a, symbol, k))


@lru_cache(maxsize=16384)
def const_reach(a: OrdinalAutomaton, symbol: Symbol, g: Ordinal) -> ReachRelation:
    result = identity(a.states)
    for j in range(g.degree, -1, -1):
        c = g.coefficient(j)
        if c:
            block = profiles(a, symbol, j).relation()
            result = compose(result, power(block, c, a.states))
    return result


def step_states(a: OrdinalAutomaton, current: Iterable[State], symbol: Symbol) -> frozenset:
    return frozenset(p for q in current for p in a.successors(q, symbol))


def gap_states(a: OrdinalAutomaton, current: Iterable[State], g: Ordinal) -> frozenset:
    if g.is_zero():
        return frozenset(current)
    return image(const_reach(a, a.alphabet.blank, g), current)


def _segments(w: AlphaWord) -> Iterator[tuple[Ordinal, Symbol | None]]:
    cursor = ZERO
    for position, symbol in w.entries:
        yield interval_type(cursor, position), symbol
        cursor = position.successor()
    yield interval_type(cursor, w.length), None


def _check_alphabet(a: OrdinalAutomaton, w: AlphaWord) -> None:
    if a.alphabet != w.alphabet:
        raise AlphabetMismatchError("word and automaton are over different alphabets")


def member(a: OrdinalAutomaton, w: AlphaWord) -> bool:
    _check_alphabet(a, w)
    current = a.initial
    for gap, symbol in _segments(w):
        current = gap_states(a, current, gap)
        if symbol is not None:
            current = step_states(a, current, symbol)
        if not current:
            return False
    return bool(current & a.final)


def run_relation(a: OrdinalAutomaton, w: AlphaWord) -> ReachRelation:
    _check_alphabet(a, w)
    result = identity(a.states)
    for gap, symbol in _segments(w):
        result = compose(result, const_reach(a, a.alphabet.blank, gap))
        if symbol is not None:
            result = compose(result, frozenset((q, p) for q, s, p in a.succ if s == symbol))
    return result


def saturation_check(
    a: OrdinalAutomaton, symbol: Symbol, m: int | None = None, multipliers: Sequence[Ordinal] = ()
) -> SaturationReport:
    m = len(a.states) if m is None else m
    report = SaturationReport(symbol, m, list(multipliers))
    base = const_reach(a, symbol, Ordinal.omega(m))
    for c in multipliers:
        if c.is_zero():
            raise OrdinalRangeError("saturation multipliers must be >= 1")
        if const_reach(a, symbol, c.omega_times(m)) != base:
            report.violations.append(c)
    if report.violations:
        logger.warning("saturation fails for %r at m=%d: %s", symbol, m, [str(c) for c in report.violations])
    return report


def enumerate_words(a: OrdinalAutomaton, length: Ordinal, positions: Iterable[Ordinal]) -> Iterator[AlphaWord]:
    slots = sorted(p for p in set(positions) if p < length)
    blank = a.alphabet.blank
    letters = a.alphabet.letters

    def walk(i: int, cursor: Ordinal, current: frozenset, entries: list) -> Iterator[AlphaWord]:
        if i == len(slots):
            if gap_states(a, current, interval_type(cursor, length)) & a.final:
                yield make(length, entries, a.alphabet)
            return
        position = slots[i]
        here = gap_states(a, current, interval_type(cursor, position))
        if not here:
            return
        after = position.successor()
        for symbol in (blank, *letters):
            following = step_states(a, here, symbol)
            if not following:
                continue
            chosen = entries if symbol == blank else entries + [(position, symbol)]
            yield from walk(i + 1, after, following, chosen)

    yield from walk(0, ZERO, a.initial, [])
