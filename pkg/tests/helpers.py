import itertools
import random

from core.automata import OrdinalAutomaton
from core.ordinals import Ordinal
from core.words import Alphabet, AlphaWord, make

A = Alphabet.of(["a"])
AB = Alphabet.of(["a", "b"])

W = Ordinal.omega(1)
W2 = Ordinal.omega(2)


def o(*coeffs: int) -> Ordinal:
    """Ordinal from its coefficients, highest exponent first: o(2, 1) is ω·2+1."""
    return Ordinal(tuple(reversed(coeffs)))


def random_automaton(rng: random.Random, alphabet: Alphabet, n_states: int, density: float = 0.4) -> OrdinalAutomaton:
    states = list(range(n_states))
    succ = [(q, s, p) for q in states for s in alphabet for p in states if rng.random() < density]
    limit = []
    for _ in range(rng.randint(0, n_states + 1)):
        left = [q for q in states if rng.random() < 0.5] or [rng.choice(states)]
        limit.append((left, rng.choice(states)))
    initial = [q for q in states if rng.random() < 0.5] or [0]
    final = [q for q in states if rng.random() < 0.5]
    return OrdinalAutomaton.build(states, alphabet, initial, final, succ, limit)


def classical_accepts(a: OrdinalAutomaton, w: AlphaWord) -> bool:
    # finite words only: no limit position is ever reached
    n = w.length.coefficient(0)
    current = set(a.initial)
    for i in range(n):
        symbol = w[Ordinal.of(i)]
        current = {p for q in current for p in a.successors(q, symbol)}
    return bool(current & a.final)


def finite_words(alphabet: Alphabet, n: int) -> list[AlphaWord]:
    words = []
    for symbols in itertools.product(alphabet.symbols, repeat=n):
        entries = [(Ordinal.of(i), s) for i, s in enumerate(symbols) if s != alphabet.blank]
        words.append(make(Ordinal.of(n), entries, alphabet))
    return words


def words_on(alphabet: Alphabet, length: Ordinal, positions) -> list[AlphaWord]:
    """Every word of the given length whose support lies in `positions`."""
    positions = sorted(positions)
    words = []
    for symbols in itertools.product(alphabet.symbols, repeat=len(positions)):
        entries = [(p, s) for p, s in zip(positions, symbols) if s != alphabet.blank]
        words.append(make(length, entries, alphabet))
    return words


def random_word(rng: random.Random, alphabet: Alphabet, length: Ordinal, positions, k: int) -> AlphaWord:
    chosen = rng.sample(sorted(positions), min(k, len(positions)))
    return make(length, ((p, rng.choice(alphabet.letters)) for p in chosen), alphabet)


def late_letter(alphabet: Alphabet) -> OrdinalAutomaton:
    """Length-ω words with exactly one letter, at a position >= 1."""
    blank = alphabet.blank
    succ = [(0, blank, 1), (1, blank, 1), (2, blank, 2)] + [(1, s, 2) for s in alphabet.letters]
    return OrdinalAutomaton.build(range(4), alphabet, [0], [3], succ, [([2], 3)])


def shifted_pair(alphabet: Alphabet) -> OrdinalAutomaton:
    """(x, y) where y has one letter at some p >= 1 and x has one letter at p + 1."""
    pairs = alphabet.product(2)
    blank = alphabet.blank
    succ = [(0, pairs.blank, 1), (1, pairs.blank, 1), (3, pairs.blank, 3)]
    succ += [(1, (blank, s), 2) for s in alphabet.letters] + [(2, (s, blank), 3) for s in alphabet.letters]
    return OrdinalAutomaton.build(range(5), pairs, [0], [4], succ, [([3], 4)])


def early_support(alphabet: Alphabet, k: int) -> OrdinalAutomaton:
    """Length-ω words whose letters all lie below position k."""
    succ = [(i, s, i + 1) for i in range(k) for s in alphabet] + [(k, alphabet.blank, k)]
    return OrdinalAutomaton.build(range(k + 2), alphabet, [0], [k + 1], succ, [([k], k + 1)])
