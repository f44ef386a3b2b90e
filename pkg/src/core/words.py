import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Sequence

from config import BLANK, TUPLE_SEPARATOR
from core.errors import AlphabetMismatchError, WordError
from core.ordinals import Ordinal, format_ordinal, interval_type, parse

Symbol = Hashable

_WORD_LITERAL = re.compile(r"^len=([^;]+)(?:;\{(.*)\})?$", re.DOTALL)


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple
    blank: Symbol = BLANK
    arity: int = 1
    base: "Alphabet | None" = None

    def __post_init__(self) -> None:
        if not self.symbols:
            raise WordError("alphabet must not be empty")
        if self.symbols[0] != self.blank:
            raise WordError(f"blank {self.blank!r} must be the first (least) symbol of {self.symbols!r}")
        if len(set(self.symbols)) != len(self.symbols):
            raise WordError(f"duplicate symbols in {self.symbols!r}")

    @classmethod
    def of(cls, letters: Iterable[str], blank: str = BLANK) -> "Alphabet":
        return cls((blank, *(s for s in letters if s != blank)), blank)

    @property
    def letters(self) -> tuple:
        return self.symbols[1:]

    @property
    def base_alphabet(self) -> "Alphabet":
        return self.base if self.base is not None else self

    @cached_property
    def _ranks(self) -> dict[Symbol, int]:
        return {s: i for i, s in enumerate(self.symbols)}

    def rank(self, symbol: Symbol) -> int:
        return self._ranks[symbol]

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._ranks

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def product(self, r: int) -> "Alphabet":
        if self.base is not None:
            raise AlphabetMismatchError("product alphabets are built from a base alphabet")
        if r == 1:
            return self
        return Alphabet(tuple(itertools.product(self.symbols, repeat=r)), (self.blank,) * r, r, self)

    def components(self, symbol: Symbol) -> tuple:
        return (symbol,) if self.base is None else symbol

    def join(self, parts: Sequence) -> Symbol:
        return parts[0] if self.base is None else tuple(parts)

    def format_symbol(self, symbol: Symbol) -> str:
        return str(symbol) if self.base is None else TUPLE_SEPARATOR.join(map(str, symbol))

    def parse_symbol(self, text: str) -> Symbol:
        symbol = text if self.base is None else tuple(text.split(TUPLE_SEPARATOR))
        if symbol not in self:
            raise WordError(f"unknown symbol {text!r}")
        return symbol


@dataclass(frozen=True)
class AlphaWord:
    length: Ordinal
    entries: tuple[tuple[Ordinal, Symbol], ...]
    alphabet: Alphabet

    def __post_init__(self) -> None:
        previous = None
        for position, symbol in self.entries:
            if position >= self.length:
                raise WordError(f"position {position} is outside a word of length {self.length}")
            if symbol == self.alphabet.blank:
                raise WordError(f"blank entry at position {position}")
            if symbol not in self.alphabet:
                raise WordError(f"symbol {symbol!r} is not in the alphabet")
            if previous is not None and position <= previous:
                raise WordError("entries must be sorted by strictly increasing position")
            previous = position

    @cached_property
    def _index(self) -> dict[Ordinal, Symbol]:
        return dict(self.entries)

    def __getitem__(self, position: Ordinal) -> Symbol:
        return self._index.get(position, self.alphabet.blank)

    def support(self) -> frozenset[Ordinal]:
        return frozenset(self._index)

    @property
    def positions(self) -> tuple[Ordinal, ...]:
        return tuple(p for p, _ in self.entries)

    def __str__(self) -> str:
        return format_word(self)


def make(length: Ordinal, entries: Iterable[tuple[Ordinal, Symbol]], alphabet: Alphabet) -> AlphaWord:
    items = sorted(entries, key=lambda item: item[0])
    for (p, _), (q, _) in zip(items, items[1:]):
        if p == q:
            raise WordError(f"duplicate position {p}")
    return AlphaWord(length, tuple(items), alphabet)


def blank_word(length: Ordinal, alphabet: Alphabet) -> AlphaWord:
    return AlphaWord(length, (), alphabet)


def support(w: AlphaWord) -> frozenset[Ordinal]:
    return w.support()


def restrict(w: AlphaWord, g: Ordinal, d: Ordinal) -> AlphaWord:
    if not g <= d <= w.length:
        raise WordError(f"cannot restrict a word of length {w.length} to [{g}, {d})")
    entries = tuple((interval_type(g, p), s) for p, s in w.entries if g <= p < d)
    return AlphaWord(interval_type(g, d), entries, w.alphabet)


def concat(u: AlphaWord, v: AlphaWord) -> AlphaWord:
    if u.alphabet != v.alphabet:
        raise AlphabetMismatchError("cannot concatenate words over different alphabets")
    # v's entry at q lands on len(u) + q; u's entries keep their positions
    shifted = tuple((u.length + q, s) for q, s in v.entries)
    return AlphaWord(u.length + v.length, u.entries + shifted, u.alphabet)


def concat_all(words: Sequence[AlphaWord]) -> AlphaWord:
    result = words[0]
    for w in words[1:]:
        result = concat(result, w)
    return result


def convolve(ws: Sequence[AlphaWord]) -> AlphaWord:
    if not ws:
        raise WordError("cannot convolve an empty tuple of words")
    first = ws[0]
    for w in ws:
        if w.length != first.length:
            raise WordError(f"length mismatch: {w.length} vs {first.length}")
        if w.alphabet != first.alphabet or w.alphabet.base is not None:
            raise AlphabetMismatchError("convolution needs words over one base alphabet")
    if len(ws) == 1:
        return first

    alphabet = first.alphabet.product(len(ws))
    positions = sorted(set().union(*(w.support() for w in ws)))
    entries = tuple((p, tuple(w[p] for w in ws)) for p in positions)
    return AlphaWord(first.length, entries, alphabet)


def select(w: AlphaWord, coords: Sequence[int]) -> AlphaWord:
    source = w.alphabet
    base = source.base_alphabet
    target = base.product(len(coords)) if coords else base.product(0)
    entries = []
    for p, s in w.entries:
        parts = source.components(s)
        symbol = target.join([parts[c] for c in coords])
        if symbol != target.blank:
            entries.append((p, symbol))
    return AlphaWord(w.length, tuple(entries), target)


def project(w: AlphaWord, coord: int) -> AlphaWord:
    return select(w, [coord])


def split(w: AlphaWord) -> list[AlphaWord]:
    return [project(w, i) for i in range(w.alphabet.arity)]


def wellorder_compare(u: AlphaWord, v: AlphaWord) -> int:
    """Compare at the largest position where u and v differ (blank is least)."""
    if u.alphabet != v.alphabet:
        raise AlphabetMismatchError("cannot compare words over different alphabets")
    for p in sorted(u.support() | v.support(), reverse=True):
        a, b = u.alphabet.rank(u[p]), v.alphabet.rank(v[p])
        if a != b:
            return -1 if a < b else 1
    return 0


def parse_word(text: str, alphabet: Alphabet) -> AlphaWord:
    compact = "".join(text.split())
    match = _WORD_LITERAL.match(compact)
    if not match:
        raise WordError(f"bad word literal {text!r}")

    length = parse(match.group(1))
    body = match.group(2) or ""
    entries = []
    for item in filter(None, body.split(",")):
        position, sep, symbol = item.rpartition(":")
        if not sep:
            raise WordError(f"bad word entry {item!r}")
        entries.append((parse(position), alphabet.parse_symbol(symbol)))
    return make(length, entries, alphabet)


def format_word(w: AlphaWord) -> str:
    body = ", ".join(f"{format_ordinal(p)}:{w.alphabet.format_symbol(s)}" for p, s in w.entries)
    return f"len={format_ordinal(w.length)}; {{{body}}}"
