import pytest

from core.errors import AlphabetMismatchError, WordError
from core.ordinals import ONE, ZERO, Ordinal
from core.words import (
    Alphabet,
    blank_word,
    concat,
    concat_all,
    convolve,
    format_word,
    make,
    parse_word,
    project,
    restrict,
    select,
    split,
    support,
    wellorder_compare,
)

from helpers import AB, W, W2, o


def test_alphabet_blank_must_come_first():
    with pytest.raises(WordError):
        Alphabet(("a", "_"), "_")
    assert AB.symbols == ("_", "a", "b")
    assert AB.letters == ("a", "b")


def test_product_alphabet():
    pairs = AB.product(2)
    assert pairs.blank == ("_", "_")
    assert pairs.symbols[0] == ("_", "_")
    assert len(pairs) == 9
    assert AB.product(1) is AB
    assert pairs.format_symbol(("a", "_")) == "a|_"
    assert pairs.parse_symbol("b|a") == ("b", "a")
    with pytest.raises(AlphabetMismatchError):
        pairs.product(2)


def test_make_validates_entries():
    w = make(W, [(Ordinal.of(3), "a"), (ZERO, "b")], AB)
    assert w.positions == (ZERO, Ordinal.of(3))
    assert w[Ordinal.of(3)] == "a"
    assert w[ONE] == "_"
    with pytest.raises(WordError):
        make(W, [(ZERO, "a"), (ZERO, "b")], AB)
    with pytest.raises(WordError):
        make(W, [(W, "a")], AB)
    with pytest.raises(WordError):
        make(W, [(ZERO, "_")], AB)
    with pytest.raises(WordError):
        make(W, [(ZERO, "c")], AB)


def test_restrict_and_concat():
    w = make(W2, [(Ordinal.of(2), "a"), (o(1, 3), "b"), (o(5, 0), "a")], AB)
    left, right = restrict(w, ZERO, o(1, 0)), restrict(w, o(1, 0), W2)
    assert left.length == o(1, 0)
    assert right.length == W2
    assert right.positions == (Ordinal.of(3), o(4, 0))
    assert concat(left, right) == w
    assert support(w) == {Ordinal.of(2), o(1, 3), o(5, 0)}


def test_concat_absorbs_short_prefix():
    prefix = make(ONE, [(ZERO, "a")], AB)
    w = concat(prefix, blank_word(W, AB))
    assert w.length == W
    assert w.positions == (ZERO,)
    tail = concat(blank_word(W, AB), prefix)
    assert tail.length == o(1, 1)
    assert tail.positions == (W,)


def test_concat_all():
    parts = [make(ONE, [(ZERO, "a")], AB), blank_word(W, AB), make(ONE, [(ZERO, "b")], AB)]
    w = concat_all(parts)
    assert w.length == o(1, 1)
    assert [(p, s) for p, s in w.entries] == [(ZERO, "a"), (W, "b")]


def test_concat_rejects_other_alphabet():
    with pytest.raises(AlphabetMismatchError):
        concat(blank_word(ONE, AB), blank_word(ONE, Alphabet.of(["a"])))


def test_convolve_and_split():
    u = make(W, [(ZERO, "a")], AB)
    v = make(W, [(Ordinal.of(2), "b")], AB)
    w = convolve([u, v])
    assert w.alphabet.arity == 2
    assert w.entries == ((ZERO, ("a", "_")), (Ordinal.of(2), ("_", "b")))
    assert split(w) == [u, v]
    assert project(w, 1) == v
    assert select(w, [1, 0]) == convolve([v, u])
    assert convolve([u]) is u
    with pytest.raises(WordError):
        convolve([u, blank_word(W2, AB)])


def test_wellorder_compare_looks_at_largest_difference():
    x = make(W, [(ZERO, "b")], AB)
    y = make(W, [(ONE, "a")], AB)
    assert wellorder_compare(x, y) == -1
    assert wellorder_compare(y, x) == 1
    assert wellorder_compare(x, x) == 0
    z = make(W, [(ZERO, "a"), (ONE, "a")], AB)
    assert wellorder_compare(y, z) == -1


def test_word_literals():
    w = parse_word("len=w^2; {w:a, 3:b}", AB)
    assert w.length == W2
    assert w.entries == ((Ordinal.of(3), "b"), (W, "a"))
    assert format_word(w) == "len=w^2; {3:b, w:a}"
    assert parse_word(format_word(w), AB) == w
    assert parse_word("len=0", AB) == blank_word(ZERO, AB)
    with pytest.raises(WordError):
        parse_word("w; {0:a}", AB)


def test_tuple_word_literal():
    pairs = AB.product(2)
    w = parse_word("len=w; {1:a|_}", pairs)
    assert w.entries == ((ONE, ("a", "_")),)
