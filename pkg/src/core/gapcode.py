"""Finite-sequence view of finite-support words and classical NFAs over it.

A word of length α with support p_1 < … < p_n is the sequence
g_0 a_1 g_1 … a_n g_n of blank gap order types and letters. Gap types are
abstracted to classes (per-exponent coefficients, exact below a threshold and
periodic above it), which turns every ordinal automaton into an ordinary NFA
over a finite alphabet of classes and letters.
"""

import itertools
import logging
import math
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence

from config import SUBSET_STATE_LIMIT
from core.automata import OrdinalAutomaton
from core.errors import AlphabetMismatchError, AutomatonError, ConcretizationError, ResourceLimitError, WordError
from core.ordinals import ONE, ZERO, Ordinal, format_ordinal, interval_type, ordinal_sum
from core.semantics import const_reach, gap_states, power, relation_power_cycle
from core.words import Alphabet, AlphaWord, Symbol, make

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GapClass:
    coeffs: tuple[int, ...]

    @property
    def representative(self) -> Ordinal:
        return Ordinal(self.coeffs)

    def __str__(self) -> str:
        return f"[{format_ordinal(self.representative)}]"


Label = GapClass | Symbol


@dataclass(frozen=True)
class GapWord:
    length: Ordinal
    gaps: tuple[Ordinal, ...]
    letters: tuple[Symbol, ...]

    def __post_init__(self) -> None:
        if len(self.gaps) != len(self.letters) + 1:
            raise WordError(f"{len(self.gaps)} gaps do not interleave {len(self.letters)} letters")

    def total(self) -> Ordinal:
        parts = [self.gaps[0]]
        for gap in self.gaps[1:]:
            parts += [ONE, gap]
        return ordinal_sum(parts)

    def items(self) -> list:
        result = [self.gaps[0]]
        for letter, gap in zip(self.letters, self.gaps[1:]):
            result += [letter, gap]
        return result


@dataclass(frozen=True)
class CapPolicy:
    alpha: Ordinal
    thresholds: tuple[int, ...]
    periods: tuple[int, ...]

    def __post_init__(self) -> None:
        width = self.alpha.degree + 1
        if len(self.thresholds) != width or len(self.periods) != width:
            raise AutomatonError(f"cap policy for {self.alpha} needs {width} thresholds and periods")
        for j in range(width):
            if self.periods[j] < 1:
                raise AutomatonError(f"period {self.periods[j]} at exponent {j} must be >= 1")
            if self.thresholds[j] < self.alpha.coefficient(j) + 1:
                raise AutomatonError(f"threshold at exponent {j} is below {self.alpha.coefficient(j) + 1}")

    @property
    def width(self) -> int:
        return len(self.thresholds)

    def cap(self, j: int, c: int) -> int:
        lam, per = self.thresholds[j], self.periods[j]
        return c if c < lam else lam + (c - lam) % per

    def class_of(self, g: Ordinal) -> GapClass:
        if g.degree >= self.width:
            raise WordError(f"gap {g} is longer than the word length {self.alpha}")
        return GapClass(tuple(self.cap(j, g.coefficient(j)) for j in range(self.width)))

    def add(self, x: GapClass, y: GapClass) -> GapClass:
        return self.class_of(x.representative + y.representative)

    def fits(self, x: GapClass) -> bool:
        return x.representative <= self.alpha

    def saturate(self, x: Ordinal) -> Ordinal:
        return Ordinal(tuple(min(x.coefficient(j), self.alpha.coefficient(j) + 1) for j in range(self.width)))

    @cached_property
    def classes(self) -> tuple[GapClass, ...]:
        ranges = [range(lam + per) for lam, per in zip(self.thresholds, self.periods)]
        found = [GapClass(v) for v in itertools.product(*ranges) if Ordinal(v) <= self.alpha]
        return tuple(sorted(found, key=lambda c: c.representative))

    def __str__(self) -> str:
        caps = ", ".join(f"w^{j}: {lam}+{per}k" for j, (lam, per) in enumerate(zip(self.thresholds, self.periods)))
        return f"CapPolicy(alpha={self.alpha}; {caps})"


def combine_policies(policies: Sequence[CapPolicy]) -> CapPolicy:
    alpha = policies[0].alpha
    if any(p.alpha != alpha for p in policies):
        raise AutomatonError("cap policies for different word lengths cannot be combined")
    thresholds = tuple(max(p.thresholds[j] for p in policies) for j in range(alpha.degree + 1))
    periods = tuple(math.lcm(*(p.periods[j] for p in policies)) for j in range(alpha.degree + 1))
    return CapPolicy(alpha, thresholds, periods)


def blank_cycles(a: OrdinalAutomaton, alpha: Ordinal) -> list[tuple[int, int]]:
    blank = a.alphabet.blank
    return [
        relation_power_cycle(const_reach(a, blank, Ordinal.omega(j)), a.states) for j in range(alpha.degree + 1)
    ]


def cap_policy(working: Sequence[OrdinalAutomaton], alpha: Ordinal) -> CapPolicy:
    bases = {a.alphabet.base_alphabet for a in working}
    if len(bases) > 1:
        raise AlphabetMismatchError("cap policy needs automata over one base alphabet")

    width = alpha.degree + 1
    thresholds = [alpha.coefficient(j) + 1 for j in range(width)]
    periods = [1] * width
    for a in working:
        for j, (lam, per) in enumerate(blank_cycles(a, alpha)):
            thresholds[j] = max(thresholds[j], lam)
            periods[j] = math.lcm(periods[j], per)
    policy = CapPolicy(alpha, tuple(thresholds), tuple(periods))
    logger.debug("%s from %d automata, %d gap classes", policy, len(working), len(policy.classes))
    return policy


def covers(policy: CapPolicy, a: OrdinalAutomaton) -> bool:
    blank = a.alphabet.blank
    for j in range(policy.width):
        r = const_reach(a, blank, Ordinal.omega(j))
        lam, per = policy.thresholds[j], policy.periods[j]
        if power(r, lam + per, a.states) != power(r, lam, a.states):
            return False
    return True


def encode(w: AlphaWord) -> GapWord:
    gaps, letters = [], []
    cursor = ZERO
    for position, symbol in w.entries:
        gaps.append(interval_type(cursor, position))
        letters.append(symbol)
        cursor = position.successor()
    gaps.append(interval_type(cursor, w.length))
    return GapWord(w.length, tuple(gaps), tuple(letters))


def decode(gw: GapWord, alphabet: Alphabet) -> AlphaWord:
    if gw.total() != gw.length:
        raise WordError(f"gap word sums to {gw.total()}, not {gw.length}")
    entries = []
    cursor = gw.gaps[0]
    for letter, gap in zip(gw.letters, gw.gaps[1:]):
        entries.append((cursor, letter))
        cursor = cursor + ONE + gap
    return make(gw.length, entries, alphabet)


def abstract(policy: CapPolicy, w: AlphaWord | GapWord) -> tuple[Label, ...]:
    gw = encode(w) if isinstance(w, AlphaWord) else w
    return tuple(policy.class_of(x) if isinstance(x, Ordinal) else x for x in gw.items())


def concretize(policy: CapPolicy, labels: Sequence[Label]) -> GapWord:
    gaps = tuple(x.representative for x in labels[0::2])
    letters = tuple(labels[1::2])
    gw = GapWord(policy.alpha, gaps, letters)
    if gw.total() != policy.alpha:
        raise ConcretizationError(f"class representatives sum to {gw.total()}, not {policy.alpha}")
    return gw


@dataclass(frozen=True, eq=False)
class GapNFA:
    policy: CapPolicy
    alphabet: Alphabet
    states: frozenset
    initial: frozenset
    final: frozenset
    delta: dict

    @property
    def letters(self) -> tuple:
        return self.alphabet.letters

    def labels(self) -> list[Label]:
        return [*self.policy.classes, *self.letters]

    def moves(self, q: Hashable) -> dict:
        return self.delta.get(q, {})

    def step(self, current: Iterable[Hashable], label: Label) -> frozenset:
        return frozenset(p for q in current for p in self.moves(q).get(label, ()))

    def is_empty(self) -> bool:
        return not self.initial

    def transition_count(self) -> int:
        return sum(len(targets) for row in self.delta.values() for targets in row.values())

    def __repr__(self) -> str:
        return f"GapNFA(arity={self.alphabet.arity}, |Q|={len(self.states)}, |delta|={self.transition_count()})"


def _label_key(alphabet: Alphabet) -> Callable:
    def key(item):
        label, target = item
        if isinstance(label, GapClass):
            return 0, label.coeffs, repr(target)
        return 1, (alphabet.rank(label),), repr(target)

    return key


def _explore(
    policy: CapPolicy,
    alphabet: Alphabet,
    initial: Iterable[Hashable],
    moves: Callable[[Hashable], Iterable[tuple[Label, Hashable]]],
    accepting: Callable[[Hashable], bool],
    limit: int | None = None,
) -> GapNFA:
    initial = set(initial)
    key = _label_key(alphabet)
    order = sorted(initial, key=repr)
    seen = set(order)
    queue = deque(order)
    transitions = []
    while queue:
        state = queue.popleft()
        for label, target in sorted(moves(state), key=key):
            transitions.append((state, label, target))
            if target not in seen:
                if limit is not None and len(seen) >= limit:
                    raise ResourceLimitError(f"construction exceeds {limit} states")
                seen.add(target)
                order.append(target)
                queue.append(target)

    alive = _coreachable(transitions, {s for s in order if accepting(s)})
    names = {s: i for i, s in enumerate(s for s in order if s in alive)}
    delta = defaultdict(lambda: defaultdict(set))
    for q, label, p in transitions:
        if q in names and p in names:
            delta[names[q]][label].add(names[p])
    return GapNFA(
        policy,
        alphabet,
        frozenset(names.values()),
        frozenset(names[s] for s in initial if s in names),
        frozenset(names[s] for s in alive if accepting(s)),
        {q: {label: frozenset(ps) for label, ps in row.items()} for q, row in delta.items()},
    )


def _coreachable(transitions: list, final: set) -> set:
    backward = defaultdict(set)
    for q, _, p in transitions:
        backward[p].add(q)
    alive = set(final)
    stack = list(final)
    while stack:
        p = stack.pop()
        for q in backward[p] - alive:
            alive.add(q)
            stack.append(q)
    return alive


class Shape:
    """Tracks alternation and the saturated running sum; state = (sum, expecting_gap)."""

    def __init__(self, policy: CapPolicy) -> None:
        self.policy = policy
        self.start = (ZERO, True)

    def after_gap(self, state: tuple, c: GapClass) -> tuple | None:
        total, expecting_gap = state
        if not expecting_gap:
            return None
        total = self.policy.saturate(total + c.representative)
        return (total, False) if total <= self.policy.alpha else None

    def after_letter(self, state: tuple) -> tuple | None:
        total, expecting_gap = state
        if expecting_gap or not self.policy.width:
            return None
        total = self.policy.saturate(total + ONE)
        return (total, True) if total <= self.policy.alpha else None

    def accepting(self, state: tuple) -> bool:
        total, expecting_gap = state
        return not expecting_gap and total == self.policy.alpha

    def moves(self, state: tuple, letters: Sequence[Symbol]) -> Iterable[tuple[Label, tuple]]:
        for c in self.policy.classes:
            target = self.after_gap(state, c)
            if target is not None:
                yield c, target
        target = self.after_letter(state)
        if target is not None:
            for s in letters:
                yield s, target


def shape_nfa(policy: CapPolicy, alphabet: Alphabet) -> GapNFA:
    shape = Shape(policy)
    return _explore(policy, alphabet, [shape.start], lambda s: shape.moves(s, alphabet.letters), shape.accepting)


def to_gap_nfa(a: OrdinalAutomaton, policy: CapPolicy, alpha: Ordinal | None = None) -> GapNFA:
    if alpha is not None and alpha != policy.alpha:
        raise AutomatonError(f"cap policy is for length {policy.alpha}, not {alpha}")
    if not covers(policy, a):
        raise AutomatonError(f"cap policy does not cover {a!r}")
    shape = Shape(policy)

    def moves(state):
        q, sh = state
        for label, target in shape.moves(sh, a.alphabet.letters):
            if isinstance(label, GapClass):
                nexts = gap_states(a, [q], label.representative)
            else:
                nexts = a.successors(q, label)
            for p in nexts:
                yield label, (p, target)

    result = _explore(
        policy,
        a.alphabet,
        [(q, shape.start) for q in a.initial],
        moves,
        lambda state: state[0] in a.final and shape.accepting(state[1]),
    )
    logger.debug("gap NFA of %r: %r", a, result)
    return result


def accepts(n: GapNFA, labels: Sequence[Label]) -> bool:
    current = n.initial
    for label in labels:
        current = n.step(current, label)
        if not current:
            return False
    return bool(current & n.final)


def refines(fine: CapPolicy, coarse: CapPolicy) -> bool:
    return fine.alpha == coarse.alpha and all(
        lam >= lam0 and per % per0 == 0
        for lam, per, lam0, per0 in zip(fine.thresholds, fine.periods, coarse.thresholds, coarse.periods)
    )


def refine(n: GapNFA, policy: CapPolicy) -> GapNFA:
    """The same finite words read through the finer classes of `policy`."""
    if policy == n.policy:
        return n
    if not refines(policy, n.policy):
        raise AutomatonError(f"{policy} does not refine {n.policy}")
    finer = defaultdict(list)
    for c in policy.classes:
        finer[n.policy.class_of(c.representative)].append(c)

    def moves(q):
        for label, targets in n.moves(q).items():
            for new in finer[label] if isinstance(label, GapClass) else [label]:
                for p in targets:
                    yield new, p

    return _explore(policy, n.alphabet, n.initial, moves, lambda q: q in n.final)


def _aligned(m: GapNFA, n: GapNFA) -> tuple[GapNFA, GapNFA]:
    if m.alphabet != n.alphabet:
        raise AlphabetMismatchError("gap NFAs are over different alphabets")
    policy = combine_policies([m.policy, n.policy])
    return refine(m, policy), refine(n, policy)


def intersect(m: GapNFA, n: GapNFA) -> GapNFA:
    m, n = _aligned(m, n)

    def moves(state):
        q1, q2 = state
        right = n.moves(q2)
        for label, targets in m.moves(q1).items():
            for p1 in targets:
                for p2 in right.get(label, ()):
                    yield label, (p1, p2)

    return _explore(
        m.policy,
        m.alphabet,
        itertools.product(m.initial, n.initial),
        moves,
        lambda state: state[0] in m.final and state[1] in n.final,
    )


def union_nfa(m: GapNFA, n: GapNFA) -> GapNFA:
    m, n = _aligned(m, n)
    parts = (m, n)

    def moves(state):
        i, q = state
        for label, targets in parts[i].moves(q).items():
            for p in targets:
                yield label, (i, p)

    return _explore(
        m.policy,
        m.alphabet,
        [(0, q) for q in m.initial] + [(1, q) for q in n.initial],
        moves,
        lambda state: state[1] in parts[state[0]].final,
    )


def complement(n: GapNFA, limit: int = SUBSET_STATE_LIMIT) -> GapNFA:
    """Shape-valid words rejected by `n` (subset construction run in step with the shape tracker)."""
    shape = Shape(n.policy)

    def moves(state):
        subset, sh = state
        for label, target in shape.moves(sh, n.letters):
            yield label, (n.step(subset, label), target)

    result = _explore(
        n.policy,
        n.alphabet,
        [(n.initial, shape.start)],
        moves,
        lambda state: shape.accepting(state[1]) and not state[0] & n.final,
        limit,
    )
    logger.debug("complement: %r -> %r", n, result)
    return result


UNIT, LETTER = "unit", "letter"


class Eraser:
    """Reads a projected word one ω^e unit at a time while guessing the erased coordinate.

    A state (q, acc, bound, owed) is inside some gap of a source word of `n`: q is the
    state where that source gap began, acc its capped coefficients so far. Source units
    and erased letters are fed to a canonical-form check: an item survives into the
    projected gap unless a strictly larger unit follows it in the same projected gap.
    `bound` caps every later item, `owed` is the largest dropped item still waiting for
    a larger one (-1 when none).
    """

    def __init__(self, n: GapNFA, coord: int) -> None:
        self.n = n
        self.policy = n.policy
        source = n.alphabet
        self.target = source.base_alphabet.product(source.arity - 1)

        def drop(symbol):
            parts = source.components(symbol)
            return self.target.join(parts[:coord] + parts[coord + 1 :])

        self.kept = [(s, drop(s)) for s in source.letters if drop(s) != self.target.blank]
        self.erased = [s for s in source.letters if drop(s) == self.target.blank]
        self.top = self.policy.width - 1
        self.zero = (0,) * self.policy.width

    def start(self, q: Hashable) -> tuple:
        return q, self.zero, self.top, -1

    def _bump(self, acc: tuple, e: int) -> tuple | None:
        # units of a source gap come in non-increasing order
        if any(acc[:e]):
            return None
        lam, per = self.policy.thresholds[e], self.policy.periods[e]
        c = acc[e] + 1
        if c >= lam + per:
            c = lam
        bumped = acc[:e] + (c,) + acc[e + 1 :]
        return bumped if self.policy.fits(GapClass(bumped)) else None

    def _closing(self, q: Hashable, acc: tuple, symbol: Symbol) -> set:
        return {p2 for p in self.n.moves(q).get(GapClass(acc), ()) for p2 in self.n.moves(p).get(symbol, ())}

    @staticmethod
    def _canon(bound: int, owed: int, e: int, keep: bool) -> tuple[int, int] | None:
        if e > bound:
            return None
        if e > owed:
            owed = -1
        if keep:
            return None if owed >= 0 else (e, -1)
        return bound, max(owed, e)

    def moves(self, state: tuple) -> Iterable[tuple[tuple | None, tuple]]:
        # a None label is an item dropped from the projected gap
        q, acc, bound, owed = state
        for keep in (True, False):
            for e in range(self.policy.width):
                canon, bumped = self._canon(bound, owed, e, keep), self._bump(acc, e)
                if canon is not None and bumped is not None:
                    yield ((UNIT, e) if keep else None), (q, bumped, *canon)
            canon = self._canon(bound, owed, 0, keep)
            if canon is not None:
                for s in self.erased:
                    for p in self._closing(q, acc, s):
                        yield ((UNIT, 0) if keep else None), (p, self.zero, *canon)
        if owed < 0:
            for s, projected in self.kept:
                for p in self._closing(q, acc, s):
                    yield (LETTER, projected), (p, self.zero, self.top, -1)

    def accepting(self, state: tuple) -> bool:
        q, acc, _, owed = state
        return owed < 0 and bool(self.n.moves(q).get(GapClass(acc), frozenset()) & self.n.final)


def _closure(graph: dict, x: Hashable) -> frozenset:
    seen = {x}
    stack = [x]
    while stack:
        for y in graph.get(stack.pop(), ()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


def _reachable_graph(starts: Iterable[Hashable], moves: Callable) -> dict:
    edges = {}
    stack = list(starts)
    while stack:
        x = stack.pop()
        if x in edges:
            continue
        edges[x] = list(moves(x))
        stack.extend(y for _, y in edges[x])
    return edges


def exists_project(n: GapNFA, coord: int) -> GapNFA:
    """Projections of the words of `n` with coordinate `coord` erased.

    Erased letters merge neighbouring gaps, and a merged gap need not split back into
    the capped classes it came from, so the result is read through a finer cap policy
    on which its gap behaviour is periodic.
    """
    r = n.alphabet.arity
    if not 0 <= coord < r:
        raise AutomatonError(f"cannot project coordinate {coord} of arity {r}")
    eraser = Eraser(n, coord)
    edges = _reachable_graph([eraser.start(q) for q in n.initial], eraser.moves)
    states = list(edges)

    dropped = defaultdict(set)
    for x, out in edges.items():
        dropped[x].update(y for label, y in out if label is None)
    closure = {x: _closure(dropped, x) for x in states}

    units = []
    for e in range(n.policy.width):
        step = defaultdict(set)
        for x in states:
            for y in closure[x]:
                for label, z in edges[y]:
                    if label == (UNIT, e):
                        step[x].update(closure[z])
        units.append({x: frozenset(step[x]) for x in states})

    thresholds, periods = list(n.policy.thresholds), list(n.policy.periods)
    for e, step in enumerate(units):
        relation = frozenset((x, y) for x, ys in step.items() for y in ys)
        lam, per = relation_power_cycle(relation, states)
        thresholds[e] = max(thresholds[e], lam)
        periods[e] = math.lcm(periods[e], per)
    policy = CapPolicy(n.policy.alpha, tuple(thresholds), tuple(periods))

    def after_gap(x, c: GapClass) -> frozenset:
        current = closure[x]
        for e in range(policy.width - 1, -1, -1):
            for _ in range(c.coeffs[e]):
                current = frozenset(z for y in current for z in units[e][y])
        return current

    def moves(state):
        phase, x = state
        if phase == "gap":
            for c in policy.classes:
                for y in after_gap(x, c):
                    yield c, ("letter", y)
        else:
            for label, y in edges[x]:
                if label is not None and label[0] == LETTER:
                    yield label[1], ("gap", y)

    result = _explore(
        policy,
        eraser.target,
        [("gap", eraser.start(q)) for q in n.initial],
        moves,
        lambda state: state[0] == "letter" and eraser.accepting(state[1]),
    )
    logger.debug("project coordinate %d: %r -> %r under %s", coord, n, result, policy)
    return result


def cylindrify_nfa(n: GapNFA, arity: int, coords: Sequence[int]) -> GapNFA:
    """Words over Σ^arity whose coordinates `coords` spell a word of `n`."""
    if len(coords) != n.alphabet.arity:
        raise AutomatonError(f"{len(coords)} coordinates given for arity {n.alphabet.arity}")
    if any(x >= y for x, y in zip(coords, coords[1:])) or any(not 0 <= c < arity for c in coords):
        raise AutomatonError(f"coordinates {list(coords)} must increase strictly within {arity}")
    source = n.alphabet
    target = source.base_alphabet.product(arity)
    policy = n.policy
    unit = policy.class_of(ONE) if policy.width else None

    inner = {}
    for t in target.letters:
        parts = target.components(t)
        inner[t] = source.join([parts[c] for c in coords])

    def has_gaps(q):
        return any(isinstance(label, GapClass) for label in n.moves(q))

    # ("sync", q): aligned with n before a gap; ("gap", q, c) / ("letter", q, c): pending class c
    def moves(state):
        if state[0] == "sync":
            q = state[1]
            if has_gaps(q):
                for c in policy.classes:
                    yield c, ("gap", q, c)
        elif state[0] == "gap":
            _, q, c = state
            for t, old in inner.items():
                if old == source.blank:
                    if unit is None:
                        continue
                    pending = policy.add(c, unit)
                    if policy.fits(pending):
                        yield t, ("letter", q, pending)
                else:
                    for p in n.moves(q).get(c, ()):
                        for p2 in n.moves(p).get(old, ()):
                            yield t, ("sync", p2)
        else:
            _, q, c = state
            for c2 in policy.classes:
                pending = policy.add(c, c2)
                if policy.fits(pending):
                    yield c2, ("gap", q, pending)

    def accepting(state):
        if state[0] != "gap":
            return False
        _, q, c = state
        return bool(n.moves(q).get(c, frozenset()) & n.final)

    return _explore(policy, target, [("sync", q) for q in n.initial], moves, accepting)


def emptiness_witness(n: GapNFA) -> GapWord | None:
    parent: dict = {q: None for q in sorted(n.initial)}
    queue = deque(sorted(n.initial))
    key = _label_key(n.alphabet)
    while queue:
        q = queue.popleft()
        if q in n.final:
            labels = []
            while parent[q] is not None:
                q, label = parent[q]
                labels.append(label)
            return concretize(n.policy, labels[::-1])
        for label, p in sorted(((lab, p) for lab, ps in n.moves(q).items() for p in ps), key=key):
            if p not in parent:
                parent[p] = (q, label)
                queue.append(p)
    return None


def empty_nfa(policy: CapPolicy, alphabet: Alphabet) -> GapNFA:
    return _explore(policy, alphabet, [], lambda state: (), lambda state: False)
