import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Iterable

from core.automata import OrdinalAutomaton, embed, universal_automaton
from core.errors import OrdinaliaError
from core.growth import (
    RelationFamily,
    explicit_family,
    maximal_free_set,
    nu_from_classes,
    relation_classes,
)
from core.logic import Presentation, Relation
from core.ordinals import ZERO, Ordinal
from core.semantics import enumerate_words
from core.words import Alphabet, AlphaWord, make

logger = logging.getLogger(__name__)

OMEGA2 = Ordinal.omega(2)
OMEGA2_ALPHABET = Alphabet.of(["a", "b"])
BINARY_ALPHABET = Alphabet.of(["0", "1"])
ZMOD2_ALPHABET = Alphabet.of(["1"])


@dataclass(frozen=True)
class StructureFixture:
    name: str
    presentation: Presentation
    description: str = ""


def _limit_free(alphabet: Alphabet, arity: int, accept: Callable[[tuple], bool]) -> OrdinalAutomaton:
    # one-letter words: a single step from the initial to the final state
    target = alphabet.product(arity)
    succ = [("s", symbol, "t") for symbol in target if accept(target.components(symbol))]
    return OrdinalAutomaton.build(["s", "t"], target, ["s"], ["t"], succ, [])


# ------------------------------------------------------------ orders on words


def wellorder_automaton(alphabet: Alphabet) -> OrdinalAutomaton:
    """(u, v) with u ⊑ v: equal, or smaller at the largest position where they differ."""
    verdicts = ("EQ", "LT", "GT")
    pairs = alphabet.product(2)
    succ = []
    for verdict in verdicts:
        for symbol in pairs:
            x, y = pairs.components(symbol)
            if x == y:
                after = verdict
            else:
                after = "LT" if alphabet.rank(x) < alphabet.rank(y) else "GT"
            succ.append((verdict, symbol, after))
    # finite support makes the verdict constant below every limit
    limit = [([v], v) for v in verdicts]
    return OrdinalAutomaton.build(verdicts, pairs, ["EQ"], ["EQ", "LT"], succ, limit)


def subsupp_automaton(alphabet: Alphabet) -> OrdinalAutomaton:
    pairs = alphabet.product(2)
    blank = alphabet.blank
    succ = [
        (0, symbol, 0)
        for symbol in pairs
        if not (pairs.components(symbol)[0] != blank and pairs.components(symbol)[1] == blank)
    ]
    return OrdinalAutomaton.build([0], pairs, [0], [0], succ, [([0], 0)])


# ------------------------------------------------- the ω² counting structure


def dn_set(n: int) -> set[Ordinal]:
    return {Ordinal((n2, n1)) for n1 in range(n + 1) for n2 in range(n + 1 - n1)}


def tn_automaton(n: int, alphabet: Alphabet = OMEGA2_ALPHABET) -> OrdinalAutomaton:
    """Words over ω² whose support is exactly D_n.

    ("b", b, o) is block b before offset o; offset n-b+1 means the block's letters are done.
    """
    states = ["past"]
    succ = [("past", alphabet.blank, "past")]
    limit = [(["past"], "past")]
    for b in range(n + 1):
        done = n - b + 1
        states.extend(("b", b, o) for o in range(done + 1))
        for o in range(done):
            succ.extend((("b", b, o), x, ("b", b, o + 1)) for x in alphabet.letters)
        succ.append((("b", b, done), alphabet.blank, ("b", b, done)))
        limit.append(([("b", b, done)], ("b", b + 1, 0) if b < n else "past"))
    return OrdinalAutomaton.build(states, alphabet, [("b", 0, 0)], ["past"], succ, limit)


def tn_words(n: int, alphabet: Alphabet = OMEGA2_ALPHABET) -> list[AlphaWord]:
    positions = sorted(dn_set(n))
    return [
        make(OMEGA2, zip(positions, letters), alphabet)
        for letters in itertools.product(alphabet.letters, repeat=len(positions))
    ]


def tn_enumerate(n: int) -> list[AlphaWord]:
    return list(enumerate_words(tn_automaton(n), OMEGA2, dn_set(n)))


def f_automaton(tag: str, alphabet: Alphabet = OMEGA2_ALPHABET) -> OrdinalAutomaton:
    """(w, v, u) with u = f_tag(w, v) over ω².

    ("in", d, c): d is w's letter just read, owed to u at the next position;
    c is v's letter at the current block start, owed to u at the next limit.
    ("lim", c) is a block start where u must read c; block 0 owes the tag.
    """
    if tag not in alphabet.letters:
        raise OrdinaliaError(f"tag {tag!r} is not a letter of {alphabet.symbols!r}")
    blank = alphabet.blank
    triples = alphabet.product(3)
    states = ["end", *(("lim", c) for c in alphabet), *(("in", d, c) for d in alphabet for c in alphabet)]
    succ = []
    for symbol in triples:
        w, v, u = triples.components(symbol)
        for c in alphabet:
            if u == c:
                succ.append((("lim", c), symbol, ("in", w, v)))
            for d in alphabet:
                if u == d:
                    succ.append((("in", d, c), symbol, ("in", w, c)))
    limit = [([("in", blank, c)], ("lim", c)) for c in alphabet]
    limit.append(([("in", blank, blank), ("lim", blank)], "end"))
    return OrdinalAutomaton.build(states, triples, [("lim", tag)], ["end"], succ, limit)


def f_word(tag: str, w: AlphaWord, v: AlphaWord) -> AlphaWord:
    entries = [(ZERO, tag)]
    entries.extend((p.successor(), x) for p, x in w.entries)
    entries.extend((p + Ordinal.omega(1), x) for p, x in v.entries if p.coefficient(0) == 0)
    return make(w.length, entries, w.alphabet)


def omega2_family(alphabet: Alphabet = OMEGA2_ALPHABET) -> RelationFamily:
    # element u first, parameters w and v after it
    return RelationFamily.of(*(embed(f_automaton(tag, alphabet), 3, [1, 2, 0]) for tag in alphabet.letters))


def omega2_structure() -> StructureFixture:
    domain = universal_automaton(OMEGA2_ALPHABET)
    relations = {
        f"F{tag}": Relation(f"F{tag}", 3, f_automaton(tag)) for tag in OMEGA2_ALPHABET.letters
    }
    presentation = Presentation(OMEGA2, domain, relations, name="omega2")
    return StructureFixture("omega2", presentation, "finite ω²-words with the pairing functions f_a, f_b")


def omega2_universe(n: int) -> list[AlphaWord]:
    # T_{n+1} plus one word outside it
    return [*tn_words(n + 1), make(OMEGA2, [], OMEGA2_ALPHABET)]


def omega2_nu(n: int, via_automata: bool | None = None) -> tuple[int, int]:
    """(|T_n|, ν at parameters T_n) for the family {T_0, T_1, ...}."""
    via_automata = n <= 1 if via_automata is None else via_automata
    parameters = tn_words(n)
    universe = omega2_universe(n)
    family = explicit_family((tn_words(k) for k in range(n + 2)), "T")

    if via_automata:
        classes = maximal_free_set(universe, parameters, omega2_family()).classes
    else:
        preimages = {}
        for tag in OMEGA2_ALPHABET.letters:
            for w, v in itertools.product(parameters, repeat=2):
                preimages.setdefault(f_word(tag, w, v), set()).add((tag, w, v))
        classes = relation_classes(universe, [None], [lambda u, _: frozenset(preimages.get(u, ()))], 1)
    nu = nu_from_classes(classes, family)
    logger.info("omega2 n=%d: m=%d nu=%d", n, len(parameters), nu)
    return len(parameters), nu


# ---------------------------------------------------------------- arithmetic


def _digit(symbol: str) -> int:
    return 1 if symbol == "1" else 0


def binary_domain_automaton() -> OrdinalAutomaton:
    # least significant bit first, no trailing zero digit, then the blank tail
    succ = [
        ("ok", "0", "zero"),
        ("ok", "1", "ok"),
        ("zero", "0", "zero"),
        ("zero", "1", "ok"),
        ("ok", "_", "tail"),
        ("tail", "_", "tail"),
    ]
    return OrdinalAutomaton.build(["ok", "zero", "tail"], BINARY_ALPHABET, ["ok"], ["tail"], succ, [(["tail"], "tail")])


def binary_plus_automaton() -> OrdinalAutomaton:
    triples = BINARY_ALPHABET.product(3)
    succ = []
    for carry in (0, 1):
        for symbol in triples:
            x, y, z = (_digit(s) for s in triples.components(symbol))
            total = x + y + carry
            if total % 2 == z:
                succ.append((f"c{carry}", symbol, f"c{total // 2}"))
    return OrdinalAutomaton.build(["c0", "c1"], triples, ["c0"], ["c0"], succ, [(["c0"], "c0")])


def nat_word(n: int) -> AlphaWord:
    if n < 0:
        raise OrdinaliaError(f"naturals only, got {n}")
    digits = bin(n)[2:][::-1] if n else ""
    return make(Ordinal.omega(1), ((Ordinal.of(i), d) for i, d in enumerate(digits)), BINARY_ALPHABET)


def word_nat(w: AlphaWord) -> int:
    return sum(_digit(s) << p.coefficient(0) for p, s in w.entries)


def presburger_fixture() -> StructureFixture:
    presentation = Presentation(
        Ordinal.omega(1),
        binary_domain_automaton(),
        {"Plus": Relation("Plus", 3, binary_plus_automaton())},
        name="presburger",
    )
    return StructureFixture("presburger", presentation, "(N, +) with Plus x y z meaning x + y = z")


PRESBURGER_SENTENCES: list[tuple[str, bool]] = [
    ("(exists x (Plus x x x))", True),
    ("(forall x (forall y (exists z (Plus x y z))))", True),
    ("(forall x (forall y (forall z (-> (Plus x y z) (Plus y x z)))))", True),
    ("(forall x (exists y (Plus y y x)))", False),
    ("(exists x (exists y (and (not (= x y)) (Plus x y x))))", True),
    ("(forall x (forall y (exists z (or (Plus x z y) (Plus y z x)))))", True),
    ("(exists x (forall y (Plus x y y)))", True),
    ("(forall x (forall y (-> (Plus x x y) (Plus y y x))))", False),
    ("(forall x (exists y (and (not (= x y)) (exists z (Plus x z y)))))", True),
    ("(exists x (forall y (exists z (Plus y z x))))", False),
    ("(forall x (forall y (forall u (-> (and (Plus x x u) (Plus y y u)) (= x y)))))", True),
    ("(exists x (exists y (and (Plus x x y) (not (= x y)))))", True),
]


def zmod2_ring_fixture() -> StructureFixture:
    alphabet = ZMOD2_ALPHABET

    def values(parts: Iterable) -> list[int]:
        return [_digit(s) for s in parts]

    def plus(parts):
        x, y, z = values(parts)
        return (x + y) % 2 == z

    def times(parts):
        x, y, z = values(parts)
        return x * y == z

    relations = {
        "Plus": Relation("Plus", 3, _limit_free(alphabet, 3, plus)),
        "Times": Relation("Times", 3, _limit_free(alphabet, 3, times)),
        "Zero": Relation("Zero", 1, _limit_free(alphabet, 1, lambda parts: values(parts) == [0])),
        "One": Relation("One", 1, _limit_free(alphabet, 1, lambda parts: values(parts) == [1])),
        "Le": Relation("Le", 2, wellorder_automaton(alphabet)),
        "Sub": Relation("Sub", 2, subsupp_automaton(alphabet)),
    }
    presentation = Presentation(Ordinal.of(1), universal_automaton(alphabet), relations, name="zmod2")
    return StructureFixture("zmod2", presentation, "the field Z/2 on words of length 1")


FIXTURES: dict[str, Callable[[], StructureFixture]] = {
    "presburger": presburger_fixture,
    "zmod2": zmod2_ring_fixture,
    "omega2": omega2_structure,
}

AUTOMATA: dict[str, Callable[[], OrdinalAutomaton]] = {
    "wellorder": lambda: wellorder_automaton(OMEGA2_ALPHABET),
    "subsupp": lambda: subsupp_automaton(OMEGA2_ALPHABET),
    "t1": lambda: tn_automaton(1),
    "fa": lambda: f_automaton("a"),
    "fb": lambda: f_automaton("b"),
}


def fixture(name: str) -> StructureFixture:
    if name not in FIXTURES:
        raise OrdinaliaError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}")
    return FIXTURES[name]()
