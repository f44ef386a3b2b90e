import pytest

from core.automata import (
    OrdinalAutomaton,
    cylindrify,
    embed,
    equality_automaton,
    is_valid,
    product,
    relabel,
    union,
    universal_automaton,
    validate,
)
from core.errors import AlphabetMismatchError, AutomatonError
from core.ordinals import ONE, ZERO, Ordinal
from core.semantics import member
from core.words import blank_word, convolve, make

from helpers import A, AB, W, W2, o, words_on


def exactly_omega(alphabet):
    return OrdinalAutomaton.build(
        [0, 1], alphabet, [0], [1], [(0, s, 0) for s in alphabet], [([0], 1)]
    )


def starts_with_a(alphabet):
    return OrdinalAutomaton.build(
        [0, 1], alphabet, [0], [1], [(0, "a", 1)] + [(1, s, 1) for s in alphabet], [([1], 1)]
    )


def sample_words(alphabet):
    words = []
    for length in (ZERO, ONE, Ordinal.of(2), W, o(1, 1), W2):
        words.extend(words_on(alphabet, length, [p for p in (ZERO, ONE, W) if p < length]))
    return words


def test_product_is_intersection():
    a, b = exactly_omega(AB), starts_with_a(AB)
    both = product(a, b)
    for w in sample_words(AB):
        assert member(both, w) == (member(a, w) and member(b, w)), w
    assert member(both, make(W, [(ZERO, "a")], AB))
    assert not member(both, make(o(1, 1), [(ZERO, "a")], AB))


def test_union_is_disjunction():
    a, b = exactly_omega(AB), starts_with_a(AB)
    either = union(a, b)
    for w in sample_words(AB):
        assert member(either, w) == (member(a, w) or member(b, w)), w


def test_product_needs_one_alphabet():
    with pytest.raises(AlphabetMismatchError):
        product(exactly_omega(A), exactly_omega(AB))
    with pytest.raises(AlphabetMismatchError):
        union(exactly_omega(A), exactly_omega(AB))


def test_product_of_wide_automata():
    states = range(5)
    wide = OrdinalAutomaton.build(states, A, [0], [0], [(q, "_", (q + 1) % 5) for q in states], [(states, 0)])
    both = product(wide, wide)
    assert both.limit_targets(frozenset((q, (q + 2) % 5) for q in states)) == {(0, 0)}
    assert not both.limit_targets(frozenset((q, q) for q in range(4)))
    for length in (ZERO, Ordinal.of(5), Ordinal.of(7), W, o(1, 5), W2):
        w = blank_word(length, A)
        assert member(both, w) == member(wide, w), length


def test_embed_of_product_keeps_factors():
    a, b = exactly_omega(AB), starts_with_a(AB)
    second = embed(product(a, b), 2, [1])
    assert len(second.factors) == 2
    for u in words_on(AB, W, [ZERO]):
        for v in words_on(AB, W, [ZERO, ONE]):
            assert member(second, convolve([u, v])) == (member(a, v) and member(b, v))


def test_embed_reads_selected_coordinate():
    a = starts_with_a(AB)
    second = embed(a, 2, [1])
    assert second.arity == 2
    for u in words_on(AB, W, [ZERO]):
        for v in words_on(AB, W, [ZERO]):
            assert member(second, convolve([u, v])) == member(a, v)


def test_embed_with_repeated_coordinates():
    eq = equality_automaton(AB)
    diagonal = embed(eq, 1, [0, 0])
    assert diagonal.arity == 1
    assert member(diagonal, make(W, [(ONE, "b")], AB))


def test_embed_rejects_bad_coordinates():
    a = starts_with_a(AB)
    with pytest.raises(AutomatonError):
        embed(a, 2, [0, 1])
    with pytest.raises(AutomatonError):
        embed(a, 2, [2])
    with pytest.raises(AutomatonError):
        cylindrify(equality_automaton(AB), 3, [2, 0])


def test_equality_automaton():
    eq = equality_automaton(AB)
    u = make(W2, [(W, "a")], AB)
    v = make(W2, [(W, "b")], AB)
    assert member(eq, convolve([u, u]))
    assert not member(eq, convolve([u, v]))
    assert not member(eq, convolve([u, blank_word(W2, AB)]))


def test_universal_automaton_accepts_everything():
    every = universal_automaton(AB)
    assert all(member(every, w) for w in sample_words(AB))


def test_validate_reports_problems():
    broken = OrdinalAutomaton.build([0], A, [0], [7], [(0, "z", 0)], [([], 0), ([0, 9], 0)])
    problems = validate(broken)
    messages = [str(d) for d in problems]
    assert any("final state 7" in m for m in messages)
    assert any("unknown symbol" in m for m in messages)
    assert any(d.severity == "warning" and "never fires" in d.message for d in problems)
    assert any("unknown states [9]" in m for m in messages)
    assert not is_valid(broken)
    assert is_valid(exactly_omega(A))
    assert validate(exactly_omega(A)) == []


def test_relabel_keeps_language():
    a = product(exactly_omega(AB), starts_with_a(AB))
    b = relabel(a)
    assert all(isinstance(q, int) for q in b.states)
    for w in sample_words(AB):
        assert member(a, w) == member(b, w)
