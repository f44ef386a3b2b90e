import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Sequence

from core.errors import AlphabetMismatchError, AutomatonError
from core.words import Alphabet, Symbol

logger = logging.getLogger(__name__)

State = Hashable


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.message}"


@dataclass(frozen=True)
class OrdinalAutomaton:
    states: frozenset
    alphabet: Alphabet
    initial: frozenset
    final: frozenset
    succ: frozenset
    limit: frozenset
    # a product keeps its two factors and answers limit queries through them
    factors: tuple = ()

    @classmethod
    def build(
        cls,
        states: Iterable[State],
        alphabet: Alphabet,
        initial: Iterable[State],
        final: Iterable[State],
        succ: Iterable[tuple[State, Symbol, State]],
        limit: Iterable[tuple[Iterable[State], State]],
        factors: tuple = (),
    ) -> "OrdinalAutomaton":
        return cls(
            frozenset(states),
            alphabet,
            frozenset(initial),
            frozenset(final),
            frozenset((q, s, p) for q, s, p in succ),
            frozenset((frozenset(left), p) for left, p in limit),
            tuple(factors),
        )

    def __hash__(self) -> int:
        return self._fingerprint

    @cached_property
    def _fingerprint(self) -> int:
        return hash((self.states, self.alphabet, self.initial, self.final, self.succ, self.limit, self.factors))

    @property
    def arity(self) -> int:
        return self.alphabet.arity

    @cached_property
    def _succ_index(self) -> dict[tuple[State, Symbol], frozenset]:
        index = defaultdict(set)
        for q, s, p in self.succ:
            index[q, s].add(p)
        return {key: frozenset(targets) for key, targets in index.items()}

    @cached_property
    def _limit_index(self) -> dict[frozenset, frozenset]:
        index = defaultdict(set)
        for left, p in self.limit:
            index[left].add(p)
        return {left: frozenset(targets) for left, targets in index.items()}

    def successors(self, q: State, symbol: Symbol) -> frozenset:
        return self._succ_index.get((q, symbol), frozenset())

    def limit_targets(self, cofinal: frozenset) -> frozenset:
        if not self.factors:
            return self._limit_index.get(cofinal, frozenset())
        a, b = self.factors
        left = a.limit_targets(frozenset(x for x, _ in cofinal))
        if not left:
            return frozenset()
        right = b.limit_targets(frozenset(y for _, y in cofinal))
        return frozenset(itertools.product(left, right))

    @cached_property
    def limit_bounds(self) -> list[frozenset]:
        if not self.factors:
            return list(self._limit_index)
        a, b = self.factors
        return [frozenset(itertools.product(x, y)) for x in a.limit_bounds for y in b.limit_bounds]

    def limit_rules(self) -> Iterator[tuple[frozenset, State]]:
        if not self.factors:
            yield from self.limit
            return
        a, b = self.factors
        for left_a, p in a.limit_rules():
            for left_b, q in b.limit_rules():
                for cofinal in _covering_subsets(left_a, left_b):
                    yield cofinal, (p, q)

    def __repr__(self) -> str:
        rules = "product" if self.factors else len(self.limit)
        return (
            f"OrdinalAutomaton(|Q|={len(self.states)}, arity={self.arity}, "
            f"|succ|={len(self.succ)}, |limit|={rules})"
        )


def validate(a: OrdinalAutomaton) -> list[Diagnostic]:
    problems = []
    if not a.states:
        problems.append(Diagnostic("warning", "automaton has no states"))
    for q in a.initial - a.states:
        problems.append(Diagnostic("error", f"initial state {q!r} is not declared"))
    for q in a.final - a.states:
        problems.append(Diagnostic("error", f"final state {q!r} is not declared"))

    for q, s, p in sorted(a.succ, key=repr):
        if q not in a.states or p not in a.states:
            problems.append(Diagnostic("error", f"successor transition {(q, s, p)!r} uses an unknown state"))
        if s not in a.alphabet:
            problems.append(Diagnostic("error", f"successor transition {(q, s, p)!r} uses an unknown symbol"))

    for left, p in sorted(a.limit, key=repr):
        if not left:
            problems.append(Diagnostic("warning", f"limit transition to {p!r} has an empty cofinal set and never fires"))
        if not left <= a.states:
            problems.append(Diagnostic("error", f"limit transition to {p!r} uses unknown states {sorted(left - a.states, key=repr)!r}"))
        if p not in a.states:
            problems.append(Diagnostic("error", f"limit transition targets unknown state {p!r}"))
    for factor in a.factors:
        problems.extend(validate(factor))
    return problems


def is_valid(a: OrdinalAutomaton) -> bool:
    return not any(d.severity == "error" for d in validate(a))


def _same_alphabet(a: OrdinalAutomaton, b: OrdinalAutomaton) -> None:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatchError("automata are over different alphabets")


def _covering_subsets(left: frozenset, right: frozenset) -> Iterator[frozenset]:
    pairs = list(itertools.product(sorted(left, key=repr), sorted(right, key=repr)))
    for mask in range(1, 1 << len(pairs)):
        chosen = frozenset(pair for i, pair in enumerate(pairs) if mask >> i & 1)
        if {x for x, _ in chosen} == left and {y for _, y in chosen} == right:
            yield chosen


def product(a: OrdinalAutomaton, b: OrdinalAutomaton) -> OrdinalAutomaton:
    _same_alphabet(a, b)
    by_symbol = defaultdict(list)
    for q, s, p in b.succ:
        by_symbol[s].append((q, p))
    succ = {((q1, q2), s, (p1, p2)) for q1, s, p1 in a.succ for q2, p2 in by_symbol[s]}

    # a state cofinal in one component run is cofinal together with some partner state,
    # so a product limit fires on the pair of projections of its cofinal set
    result = OrdinalAutomaton.build(
        itertools.product(a.states, b.states),
        a.alphabet,
        itertools.product(a.initial, b.initial),
        itertools.product(a.final, b.final),
        succ,
        (),
        (a, b),
    )
    logger.debug("product: %r x %r -> %r", a, b, result)
    return result


def union(a: OrdinalAutomaton, b: OrdinalAutomaton) -> OrdinalAutomaton:
    _same_alphabet(a, b)

    tagged = list(enumerate((a, b)))
    return OrdinalAutomaton.build(
        [(i, q) for i, auto in tagged for q in auto.states],
        a.alphabet,
        [(i, q) for i, auto in tagged for q in auto.initial],
        [(i, q) for i, auto in tagged for q in auto.final],
        [((i, q), s, (i, p)) for i, auto in tagged for q, s, p in auto.succ],
        [({(i, x) for x in left}, (i, p)) for i, auto in tagged for left, p in auto.limit_rules()],
    )


def embed(a: OrdinalAutomaton, arity: int, coords: Sequence[int]) -> OrdinalAutomaton:
    """Read Σ^arity and run `a` on the listed coordinates (repeats and permutations allowed)."""
    if len(coords) != a.arity:
        raise AutomatonError(f"{len(coords)} coordinates given for an automaton of arity {a.arity}")
    if any(not 0 <= c < arity for c in coords):
        raise AutomatonError(f"coordinates {list(coords)} out of range for arity {arity}")
    if a.factors:
        return product(*(embed(f, arity, coords) for f in a.factors))

    base = a.alphabet.base_alphabet
    target = base.product(arity)
    succ = []
    for symbol in target:
        parts = target.components(symbol)
        inner = a.alphabet.join([parts[c] for c in coords])
        for q in a.states:
            succ.extend((q, symbol, p) for p in a.successors(q, inner))
    return OrdinalAutomaton.build(a.states, target, a.initial, a.final, succ, a.limit)


def cylindrify(a: OrdinalAutomaton, arity: int, occupied: Sequence[int]) -> OrdinalAutomaton:
    if any(x >= y for x, y in zip(occupied, occupied[1:])):
        raise AutomatonError(f"occupied coordinates {list(occupied)} are not strictly increasing")
    return embed(a, arity, occupied)


def equality_automaton(alphabet: Alphabet, arity: int = 2) -> OrdinalAutomaton:
    target = alphabet.base_alphabet.product(arity)
    succ = [(0, target.join((s,) * arity), 0) for s in alphabet.base_alphabet]
    return OrdinalAutomaton.build([0], target, [0], [0], succ, [([0], 0)])


def universal_automaton(alphabet: Alphabet) -> OrdinalAutomaton:
    return OrdinalAutomaton.build([0], alphabet, [0], [0], [(0, s, 0) for s in alphabet], [([0], 0)])


def relabel(a: OrdinalAutomaton) -> OrdinalAutomaton:
    names = {q: i for i, q in enumerate(sorted(a.states, key=repr))}
    return OrdinalAutomaton.build(
        names.values(),
        a.alphabet,
        (names[q] for q in a.initial),
        (names[q] for q in a.final),
        ((names[q], s, names[p]) for q, s, p in a.succ),
        (({names[x] for x in left}, names[p]) for left, p in a.limit_rules()),
    )
