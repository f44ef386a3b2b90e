"""Growth-rate machinery for finite α-words.

U_m(β) is the finite neighbourhood of β reached by perturbing its coefficients
at exponents ≤ m: either γ = β, or γ agrees with β above m, the highest
exponent k ≤ m where they differ has γ's coefficient at most β_k + m, and all
of γ's coefficients below k are at most m. Below ω^ω this is the whole
definition; the extra uncountable-cofinality clause never applies.
"""

import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Callable, Hashable, Iterable, Iterator, Sequence

from config import NORMALIZE_MAX_STEPS, NU_CHOICE_LIMIT, PREDICATE_FAMILY_LIMIT
from core.automata import OrdinalAutomaton
from core.errors import (
    AlphabetMismatchError,
    AutomatonError,
    FormulaArityError,
    NormalizationError,
    OrdinalRangeError,
    ResourceLimitError,
)
from core.logic import Presentation, find_witness, holds, parse_formula
from core.ordinals import ZERO, Ordinal, interval_type
from core.semantics import enumerate_words, member, run_relation
from core.words import AlphaWord, blank_word, concat_all, convolve, restrict, wellorder_compare

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------- U_m sets


def _head(x: Ordinal, m: int) -> Ordinal:
    # x with every coefficient at exponent <= m cleared
    if x.degree <= m:
        return ZERO
    return Ordinal((0,) * (m + 1) + x.coeffs[m + 1 :])


def u_contains(g: Ordinal, b: Ordinal, m: int) -> bool:
    if g == b:
        return True
    top = max(g.degree, b.degree, 0)
    if any(g.coefficient(j) != b.coefficient(j) for j in range(m + 1, top + 1)):
        return False
    for j in range(min(m, top), -1, -1):
        l, n = g.coefficient(j), b.coefficient(j)
        if l != n:
            return l <= n + m and all(g.coefficient(i) <= m for i in range(j))
    return True


def u_members(b: Ordinal, m: int) -> set[Ordinal]:
    head = _head(b, m)
    tail = [b.coefficient(j) for j in range(m, -1, -1)]
    found = {b}
    for idx in range(m + 1):
        for top in range(tail[idx] + m + 1):
            if top == tail[idx]:
                continue
            for low in itertools.product(range(m + 1), repeat=m - idx):
                high_to_low = (*tail[:idx], top, *low)
                found.add(head + Ordinal(tuple(reversed(high_to_low))))
    return found


def u_set(xs: Iterable[Ordinal], delta: Ordinal, m: int) -> set[Ordinal]:
    anchors = set(xs) | {ZERO, delta}
    return {g for b in anchors for g in u_members(b, m) if g < delta}


def u_iter_set(xs: Iterable[Ordinal], delta: Ordinal, m: int, i: int) -> set[Ordinal]:
    current = set(xs)
    for _ in range(i):
        current = u_set(current, delta, m)
    return current


def in_u(g: Ordinal, xs: Iterable[Ordinal], delta: Ordinal, m: int) -> bool:
    if g >= delta:
        return False
    return any(u_contains(g, b, m) for b in {*xs, ZERO, delta})


def c_m(xs: Iterable[Ordinal], m: int) -> int:
    return max((g.coefficient(j) for g in xs for j in range(min(m, max(g.degree, 0)) + 1)), default=0)


def d_m(xs: Iterable[Ordinal], m: int) -> int:
    return len({_head(g, m) for g in {*xs, ZERO}})


@dataclass
class BoundReport:
    xs: list[Ordinal]
    alpha: Ordinal
    m: int
    i: int
    size: int
    stated: int
    corrected: int

    @property
    def holds_stated(self) -> bool:
        return self.size <= self.stated

    @property
    def holds(self) -> bool:
        return self.size <= self.corrected


def bound_u(xs: Iterable[Ordinal], alpha: Ordinal, m: int, i: int) -> BoundReport:
    xs = sorted(set(xs))
    points = [*xs, alpha]
    c, d = c_m(points, m), d_m(points, m)
    # coefficients of U^i range over 0..c+im, which is c+im+1 values
    stated = (c + i * m) ** (m + 1) * (i * m + 1) * d
    corrected = (c + i * m + 1) ** (m + 1) * (i * m + 1) * d
    report = BoundReport(xs, alpha, m, i, len(u_iter_set(xs, alpha, m, i)), stated, corrected)
    if not report.holds_stated:
        logger.info("|U^%d_%d| = %d exceeds (c+im)^(m+1)(im+1)d = %d", i, m, report.size, stated)
    return report


# ------------------------------------------------------ indistinguishability


@dataclass(frozen=True)
class RelationFamily:
    automata: tuple[OrdinalAutomaton, ...]

    def __post_init__(self) -> None:
        if not self.automata:
            raise AutomatonError("a relation family needs at least one automaton")
        arities = {a.arity for a in self.automata}
        if len(arities) != 1:
            raise FormulaArityError(f"automata of a family must share one arity, got {sorted(arities)}")
        if len({a.alphabet.base_alphabet for a in self.automata}) != 1:
            raise AlphabetMismatchError("automata of a family must share one alphabet")

    @classmethod
    def of(cls, *automata: OrdinalAutomaton) -> "RelationFamily":
        return cls(tuple(automata))

    @property
    def p(self) -> int:
        return self.automata[0].arity - 1

    @property
    def n(self) -> int:
        return len(self.automata)

    @property
    def max_states(self) -> int:
        return max(len(a.states) for a in self.automata)


def k_const(phi: RelationFamily) -> int:
    return 2 ** (phi.max_states**2 * phi.n) + 1


def _tuples(parameters: Sequence[AlphaWord], p: int) -> Iterator[tuple[AlphaWord, ...]]:
    return itertools.product(parameters, repeat=p)


def signature(v: AlphaWord, parameters: Sequence[AlphaWord], phi: RelationFamily) -> tuple[bool, ...]:
    return tuple(
        member(a, convolve([v, *params])) for params in _tuples(parameters, phi.p) for a in phi.automata
    )


def equiv(v: AlphaWord, w: AlphaWord, parameters: Sequence[AlphaWord], phi: RelationFamily) -> bool:
    for params in _tuples(list(parameters), phi.p):
        for a in phi.automata:
            if member(a, convolve([v, *params])) != member(a, convolve([w, *params])):
                return False
    return True


def _wellorder_key():
    return cmp_to_key(wellorder_compare)


def classify(universe: Iterable[Hashable], key: Callable[[Hashable], Hashable], order=None) -> dict:
    classes: dict[Hashable, list] = defaultdict(list)
    for x in sorted(set(universe), key=order) if order is not None else list(dict.fromkeys(universe)):
        classes[key(x)].append(x)
    return dict(classes)


@dataclass
class FreeSetReport:
    parameters: list
    free: list
    classes: list[list] = field(default_factory=list)
    family: str = "all-subsets"
    nu: int | float | None = None

    def is_free(self, key: Callable[[Hashable], Hashable]) -> bool:
        keys = [key(x) for x in self.free]
        return len(set(keys)) == len(keys)


def maximal_free_set(
    universe: Iterable[AlphaWord], parameters: Sequence[AlphaWord], phi: RelationFamily
) -> FreeSetReport:
    """Greedy scan in ⊑ order keeping the first word of each ∼ class.

    Maximality is relative to the finite universe: every word left out is
    indistinguishable from one kept.
    """
    parameters = list(parameters)
    groups = signature_classes(universe, parameters, phi)
    return FreeSetReport(parameters, [group[0] for group in groups], groups, nu=len(groups))


def signature_classes(
    universe: Iterable[AlphaWord], parameters: Sequence[AlphaWord], phi: RelationFamily
) -> list[list[AlphaWord]]:
    parameters = list(parameters)
    classes = classify(universe, lambda v: signature(v, parameters, phi), order=_wellorder_key())
    return list(classes.values())


def relation_classes(
    universe: Iterable[Hashable],
    parameters: Sequence[Hashable],
    relations: Sequence[Callable[..., bool]],
    p: int,
) -> list[list]:
    parameters = list(parameters)

    def key(x):
        return tuple(r(x, *params) for params in itertools.product(parameters, repeat=p) for r in relations)

    return list(classify(universe, key).values())


# ------------------------------------------------------------------ families


class AllSubsets:
    name = "all-subsets"

    def largest_inside(self, g: frozenset) -> int:
        return len(g)

    def sets_of_size(self, n: int, universe: Sequence) -> Iterator[frozenset]:
        return (frozenset(c) for c in itertools.combinations(universe, n))

    def relevant(self, x) -> bool:
        return True


class ExplicitFamily:
    def __init__(self, sets: Iterable[Iterable], name: str = "explicit") -> None:
        self.sets = [frozenset(s) for s in sets]
        self.name = name
        self._members = frozenset().union(*self.sets) if self.sets else frozenset()

    def largest_inside(self, g: frozenset) -> int:
        # the empty set always belongs to the family
        return max((len(s) for s in self.sets if s <= g), default=0)

    def sets_of_size(self, n: int, universe: Sequence) -> Iterator[frozenset]:
        return (s for s in self.sets if len(s) == n)

    def relevant(self, x) -> bool:
        return x in self._members


class PredicateFamily:
    def __init__(self, predicate: Callable[[frozenset], bool], name: str = "predicate") -> None:
        self.predicate = predicate
        self.name = name

    def largest_inside(self, g: frozenset) -> int:
        if len(g) > PREDICATE_FAMILY_LIMIT:
            raise ResourceLimitError(f"predicate family scan over {len(g)} elements exceeds {PREDICATE_FAMILY_LIMIT}")
        items = list(g)
        for size in range(len(items), 0, -1):
            if any(self.predicate(frozenset(c)) for c in itertools.combinations(items, size)):
                return size
        return 0

    def sets_of_size(self, n: int, universe: Sequence) -> Iterator[frozenset]:
        return (frozenset(c) for c in itertools.combinations(universe, n) if self.predicate(frozenset(c)))

    def relevant(self, x) -> bool:
        return True


def all_subsets_family() -> AllSubsets:
    return AllSubsets()


def explicit_family(sets: Iterable[Iterable], name: str = "explicit") -> ExplicitFamily:
    return ExplicitFamily(sets, name)


def predicate_family(predicate: Callable[[frozenset], bool], name: str = "predicate") -> PredicateFamily:
    return PredicateFamily(predicate, name)


def antichain_family(less: Callable[[Hashable, Hashable], bool]) -> PredicateFamily:
    def pairwise_incomparable(s: frozenset) -> bool:
        return not any(less(x, y) for x in s for y in s if x != y)

    return PredicateFamily(pairwise_incomparable, "antichains")


def nu_from_classes(classes: Sequence[Sequence], family) -> int:
    """min over one-per-class choices G of the largest family member inside G."""
    if isinstance(family, AllSubsets):
        return len(classes)

    candidates = []
    for group in classes:
        inside = [x for x in group if family.relevant(x)]
        # words outside every family set are interchangeable
        outside = [x for x in group if not family.relevant(x)][:1]
        candidates.append(inside + outside)

    count = math.prod(len(c) for c in candidates)
    if count > NU_CHOICE_LIMIT:
        raise ResourceLimitError(f"{count} representative choices exceed {NU_CHOICE_LIMIT}")
    return min((family.largest_inside(frozenset(choice)) for choice in itertools.product(*candidates)), default=0)


def nu_of_E(universe: Iterable[AlphaWord], parameters: Sequence[AlphaWord], phi: RelationFamily, family=None) -> int:
    family = family or all_subsets_family()
    report = maximal_free_set(universe, parameters, phi)
    return nu_from_classes(report.classes, family)


def nu_of_n(
    universe: Sequence[AlphaWord],
    n: int,
    phi: RelationFamily,
    family=None,
    parameter_sets: Iterable[Iterable[AlphaWord]] | None = None,
) -> int | float:
    family = family or all_subsets_family()
    if parameter_sets is None:
        parameter_sets = family.sets_of_size(n, list(universe))
    values = [nu_of_E(universe, sorted(e, key=_wellorder_key()), phi, family) for e in parameter_sets]
    return min(values, default=math.inf)


# ------------------------------------------------------------ normalization


def _parameter_support(parameters: Iterable[AlphaWord]) -> set[Ordinal]:
    return set().union(*(e.support() for e in parameters))


def _window_profile(phi: RelationFamily, piece: AlphaWord) -> frozenset:
    blanks = [blank_word(piece.length, piece.alphabet)] * phi.p
    word = convolve([piece, *blanks])
    return frozenset((q, p, i) for i, a in enumerate(phi.automata) for q, p in run_relation(a, word))


def shrink_gap(
    v: AlphaWord, parameters: Sequence[AlphaWord], phi: RelationFamily, n: int, g: Ordinal, k: int | None = None
) -> AlphaWord:
    """Cut a run-invisible stretch out of the parameter-free window [g, g+ω^(n+1))."""
    alpha = v.length
    end = g + Ordinal.omega(n + 1)
    if end > alpha:
        raise NormalizationError(f"window [{g}, {end}) does not fit in {alpha}")
    if any(g <= x < end for x in _parameter_support(parameters)):
        raise NormalizationError(f"parameters have letters inside the window [{g}, {end})")

    k = k_const(phi) if k is None else k
    seen: dict[frozenset, int] = {}
    for j in range(k + 1):
        profile = _window_profile(phi, restrict(v, g, g + Ordinal.omega(n, j)))
        if profile in seen:
            first = seen[profile]
            break
        seen[profile] = j
    else:
        raise NormalizationError(f"no repeated window profile within {k} steps")

    w = concat_all([restrict(v, ZERO, g + Ordinal.omega(n, first)), restrict(v, g + Ordinal.omega(n, j), alpha)])
    if w.length != alpha:
        raise NormalizationError(f"shrinking changed the length from {alpha} to {w.length}")
    logger.debug("shrink at %s, n=%d: blocks %d..%d removed", g, n, first, j)
    return w


@dataclass(frozen=True)
class NormalizeStep:
    case: str
    beta: Ordinal
    word: AlphaWord


def _outside(v: AlphaWord, anchors: set[Ordinal], alpha: Ordinal, k: int) -> list[Ordinal]:
    return sorted(x for x in v.positions if not in_u(x, anchors, alpha, k))


def _measure(bad: list[Ordinal]) -> tuple:
    return len(bad), bad[0] if bad else ZERO


def _shrink_window(beta: Ordinal, k: int, blocked: set[Ordinal]) -> tuple[int, Ordinal] | None:
    for n in range(0, min(k, beta.degree) + 1):
        b_n = beta.coefficient(n)
        if b_n + 1 < k:
            continue
        low = _head(beta, n) + Ordinal.omega(n, b_n + 1 - k)
        high = _head(beta, n) + Ordinal.omega(n + 1)
        if not any(low <= x < high for x in blocked):
            return n, low
    return None


def _splice(v: AlphaWord, beta: Ordinal, support: set[Ordinal], alpha: Ordinal, k: int) -> AlphaWord:
    beta_k = _head(beta, k)
    below = [x for x in support | set(v.positions) if x < beta_k]
    g = max(below).successor() if below else ZERO
    delta = min([x for x in support if beta <= x < alpha] + [alpha])
    delta_k = _head(delta, k)
    if not beta < delta_k:
        raise NormalizationError(f"splice needs {beta} < {delta_k}")
    delta_prime = max(x for x in v.positions if x < delta_k).successor()

    block = Ordinal.omega(k)
    middle = interval_type(beta_k, delta_prime)
    eta = interval_type(g + block + middle, delta_k)
    return concat_all(
        [
            restrict(v, ZERO, g),
            blank_word(block, v.alphabet),
            restrict(v, beta_k, delta_prime),
            blank_word(eta, v.alphabet),
            restrict(v, delta_k, alpha),
        ]
    )


def normalize_steps(
    v: AlphaWord, parameters: Sequence[AlphaWord], phi: RelationFamily, k: int | None = None
) -> Iterator[NormalizeStep]:
    k = k_const(phi) if k is None else k
    if k < 2:
        raise OrdinalRangeError(f"normalization constant must be >= 2, got {k}")
    parameters = list(parameters)
    alpha = v.length
    support = _parameter_support(parameters)
    blocked = support | {alpha}

    bad = _outside(v, support, alpha, k)
    for _ in range(NORMALIZE_MAX_STEPS):
        if not bad:
            return
        beta = bad[0]
        window = _shrink_window(beta, k, blocked)
        if window is not None:
            n, g = window
            w, case = shrink_gap(v, parameters, phi, n, g, k), "shrink"
        else:
            w, case = _splice(v, beta, support, alpha, k), "splice"

        following = _outside(w, support, alpha, k)
        if following and not _measure(following) < _measure(bad):
            raise NormalizationError(f"{case} at {beta} made no progress")
        yield NormalizeStep(case, beta, w)
        v, bad = w, following
    raise ResourceLimitError(f"normalization did not finish within {NORMALIZE_MAX_STEPS} steps")


def normalize(
    v: AlphaWord, parameters: Sequence[AlphaWord], phi: RelationFamily, k: int | None = None, verify: bool = True
) -> AlphaWord:
    w = v
    for step in normalize_steps(v, parameters, phi, k):
        logger.debug("%s at %s", step.case, step.beta)
        w = step.word
    if verify and not equiv(v, w, parameters, phi):
        raise NormalizationError("normalized word is distinguishable from the input")
    return w


# ------------------------------------------------------------------- probes


@dataclass
class ProbeRow:
    n: int
    m: int
    nu: int | float
    power_bound: float
    linear_violations: list[int] = field(default_factory=list)

    @property
    def within_power(self) -> bool:
        return self.nu <= self.power_bound

    @property
    def ratio(self) -> float:
        return self.nu / self.m if self.m else math.inf


def growth_bound_probe(
    nu_at: Callable[[int], tuple[int, int | float]],
    c: float,
    n_list: Iterable[int],
    linear_constants: Sequence[int] = (),
) -> list[ProbeRow]:
    if c <= 1:
        raise OrdinalRangeError(f"the power exponent must exceed 1, got {c}")
    rows = []
    for n in n_list:
        m, nu = nu_at(n)
        row = ProbeRow(n, m, nu, float(m) ** c)
        row.linear_violations = [k for k in linear_constants if nu > m * k]
        rows.append(row)
        logger.info("n=%d m=%d nu=%s m^c=%.1f", n, m, nu, row.power_bound)
    return rows


def bit_graph_edge(i: int, j: int) -> bool:
    if i == j:
        return False
    low, high = min(i, j), max(i, j)
    return bool(high >> low & 1)


def rado_nu(n: int) -> tuple[int, int]:
    parameters = list(range(n))
    window = 2 ** (max(parameters, default=-1) + 2)
    classes = relation_classes(range(window), parameters, [bit_graph_edge], 1)
    return n, nu_from_classes(classes, all_subsets_family())


def rado_growth_demo(n_max: int = 4) -> list[tuple[int, int]]:
    return [rado_nu(n) for n in range(n_max + 1)]


# ------------------------------------------------------- squaring harness


def injective_multiplier(x: str, p: str, tag: str) -> str:
    """x makes (a, b) ↦ a·x + b injective on parameters whose support lies in p's."""
    a1, a2, b1, b2, t1, t2, s = (f"{v}_{tag}" for v in ("a1", "a2", "b1", "b2", "t1", "t2", "s"))
    same = (
        f"(exists {t1} (exists {t2} (exists {s} (and (Times {a1} {x} {t1}) (Plus {t1} {b1} {s})"
        f" (Times {a2} {x} {t2}) (Plus {t2} {b2} {s})))))"
    )
    guard = f"(and (Sub {a1} {p}) (Sub {a2} {p}) (Sub {b1} {p}) (Sub {b2} {p}))"
    body = f"(-> {guard} (-> {same} (and (= {a1} {a2}) (= {b1} {b2}))))"
    for var in (b2, b1, a2, a1):
        body = f"(forall {var} {body})"
    return body


def least_injective_multiplier(x: str, p: str) -> str:
    return f"(and {injective_multiplier(x, p, x)} (forall y (-> {injective_multiplier('y', p, 'y')} (Le {x} y))))"


def affine_image_formula() -> str:
    return (
        "(and (Sub a p) (Sub b p) (exists x (and "
        f"{least_injective_multiplier('x', 'p')} (exists t (and (Times a x t) (Plus t b c))))))"
    )


@dataclass
class SquaringStep:
    i: int
    support: list[Ordinal]
    size: int
    required: int

    @property
    def ok(self) -> bool:
        return self.size >= self.required


@dataclass
class SquaringReport:
    base: list[Ordinal]
    domain_size: int | None
    image_size: int | None
    steps: list[SquaringStep] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(step.ok for step in self.steps)


def _constant(presentation: Presentation, name: str) -> AlphaWord | None:
    if name not in presentation.relations:
        return None
    found = find_witness(parse_formula(f"(exists z ({name} z))", presentation.signature), presentation)
    return found[0] if found else None


def _domain_within(presentation: Presentation, positions: Iterable[Ordinal]) -> list[AlphaWord]:
    words = enumerate_words(presentation.domain, presentation.alpha, positions)
    return sorted(words, key=_wellorder_key())


def affine_images(presentation: Presentation, p: AlphaWord, pool: Sequence[AlphaWord], targets: Sequence[AlphaWord]):
    phi = parse_formula(affine_image_formula(), presentation.signature)
    found = set()
    for c in targets:
        for a, b in itertools.product(pool, repeat=2):
            if holds(phi, {"p": p, "a": a, "b": b, "c": c}, presentation):
                found.add(c)
                break
    return found


def squaring_experiment(
    presentation: Presentation, xs: Iterable[Ordinal], steps: int, m: int = 1, images: bool = True
) -> SquaringReport:
    alpha = presentation.alpha
    base = set(xs)
    # the constants are always admitted as parameters
    for name in ("Zero", "One"):
        word = _constant(presentation, name)
        if word is not None:
            base |= word.support()

    pool = _domain_within(presentation, base)
    report = SquaringReport(sorted(base), len(pool), None)

    if images:
        p = next((d for d in pool if d.support() == base), None)
        if p is None:
            logger.info("no domain word has support %s; skipping affine images", sorted(map(str, base)))
        else:
            targets = _domain_within(presentation, u_set(base, alpha, m))
            report.image_size = len(affine_images(presentation, p, pool, targets))

    previous = len(pool)
    for i in range(1, steps + 1):
        support = u_iter_set(base, alpha, m, i)
        size = len(_domain_within(presentation, support))
        report.steps.append(SquaringStep(i, sorted(support), size, previous**2))
        previous = size
    return report
