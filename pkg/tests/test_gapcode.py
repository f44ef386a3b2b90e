import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.automata import embed, product
from core.errors import AutomatonError, ConcretizationError, WordError
from core.gapcode import (
    CapPolicy,
    GapClass,
    GapWord,
    abstract,
    accepts,
    cap_policy,
    combine_policies,
    complement,
    concretize,
    covers,
    cylindrify_nfa,
    decode,
    emptiness_witness,
    encode,
    exists_project,
    intersect,
    refine,
    refines,
    shape_nfa,
    to_gap_nfa,
    union_nfa,
)
from core.ordinals import ONE, ZERO, Ordinal
from core.semantics import member
from core.words import convolve, make

from helpers import A, AB, W, W2, early_support, late_letter, o, random_automaton, shifted_pair, words_on

POSITIONS = [ZERO, ONE, Ordinal.of(4), W, o(1, 1), o(3, 0)]


def test_encode_and_decode():
    w = make(W2, [(ONE, "a"), (o(1, 2), "b")], AB)
    gw = encode(w)
    assert gw.gaps == (ONE, o(1, 2), W2)
    assert gw.letters == ("a", "b")
    assert gw.total() == W2
    assert decode(gw, AB) == w


def test_decode_rejects_wrong_total():
    with pytest.raises(WordError):
        decode(GapWord(W, (ONE, ONE), ("a",)), AB)
    with pytest.raises(WordError):
        GapWord(W, (ONE,), ("a",))


def test_cap_policy_classes():
    policy = CapPolicy(o(1, 0), (2, 3), (2, 1))
    assert policy.class_of(Ordinal.of(7)) == GapClass((3, 0))
    assert policy.class_of(Ordinal.of(8)) == GapClass((2, 0))
    assert policy.class_of(W) == GapClass((0, 1))
    with pytest.raises(WordError):
        policy.class_of(W2)
    assert all(c.representative <= o(1, 0) for c in policy.classes)
    with pytest.raises(AutomatonError):
        CapPolicy(o(2, 0), (1, 2), (1, 1))
    with pytest.raises(AutomatonError):
        CapPolicy(W, (1,), (1,))


def test_combine_policies():
    p = CapPolicy(W, (3, 2), (2, 1))
    q = CapPolicy(W, (1, 4), (3, 1))
    both = combine_policies([p, q])
    assert both.thresholds == (3, 4)
    assert both.periods == (6, 1)
    with pytest.raises(AutomatonError):
        combine_policies([p, CapPolicy(W2, (1, 1, 2), (1, 1, 1))])


def test_concretize_checks_total():
    policy = CapPolicy(W, (1, 2), (1, 1))
    gw = concretize(policy, [GapClass((0, 1))])
    assert gw.total() == W
    with pytest.raises(ConcretizationError):
        concretize(policy, [GapClass((1, 0))])


def test_shape_nfa_accepts_only_well_formed_sequences():
    policy = CapPolicy(W, (1, 2), (1, 1))
    shape = shape_nfa(policy, AB)
    assert accepts(shape, abstract(policy, make(W, [(Ordinal.of(3), "a")], AB)))
    assert not accepts(shape, (GapClass((0, 1)), "a"))
    assert not accepts(shape, (GapClass((1, 0)),))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n_states=st.integers(1, 3))
def test_gap_nfa_agrees_with_member(seed, n_states):
    rng = random.Random(seed)
    a = random_automaton(rng, AB, n_states)
    policy = cap_policy([a], W2)
    assert covers(policy, a)
    nfa = to_gap_nfa(a, policy, W2)
    rejected = complement(nfa)
    for w in words_on(AB, W2, rng.sample(POSITIONS, 3)):
        labels = abstract(policy, w)
        inside = member(a, w)
        assert accepts(nfa, labels) == inside, w
        assert accepts(rejected, labels) != inside, w


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_emptiness_witness_is_accepted(seed):
    rng = random.Random(seed)
    a = random_automaton(rng, AB, 3)
    policy = cap_policy([a], o(1, 2))
    nfa = to_gap_nfa(a, policy)
    gw = emptiness_witness(nfa)
    if gw is None:
        assert nfa.is_empty()
        assert not any(member(a, w) for w in words_on(AB, o(1, 2), POSITIONS[:5]))
    else:
        assert member(a, decode(gw, AB))


def test_intersect_and_union():
    rng = random.Random(11)
    a, b = random_automaton(rng, AB, 2), random_automaton(rng, AB, 2)
    policy = cap_policy([a, b], W)
    m, n = to_gap_nfa(a, policy), to_gap_nfa(b, policy)
    both, either = intersect(m, n), union_nfa(m, n)
    for w in words_on(AB, W, [ZERO, ONE, Ordinal.of(5)]):
        labels = abstract(policy, w)
        assert accepts(both, labels) == (member(a, w) and member(b, w))
        assert accepts(either, labels) == (member(a, w) or member(b, w))


def test_to_gap_nfa_checks_length():
    rng = random.Random(5)
    a = random_automaton(rng, AB, 2)
    policy = cap_policy([a], W)
    with pytest.raises(AutomatonError):
        to_gap_nfa(a, policy, W2)


FIRST_SIX = [Ordinal.of(i) for i in range(6)]


def test_intersect_keeps_initial_states():
    a = late_letter(AB)
    policy = cap_policy([a], W)
    nfa = to_gap_nfa(a, policy)
    both = intersect(nfa, nfa)
    assert both.initial
    for w in words_on(AB, W, [ZERO, ONE, Ordinal.of(3)]):
        assert accepts(both, abstract(policy, w)) == member(a, w)


def test_intersect_aligns_policies():
    a, b = late_letter(AB), early_support(AB, 3)
    m = to_gap_nfa(a, cap_policy([a], W))
    n = to_gap_nfa(b, CapPolicy(W, (6, 2), (2, 1)))
    both = intersect(m, n)
    assert refines(both.policy, m.policy) and refines(both.policy, n.policy)
    for w in words_on(AB, W, [ZERO, ONE, Ordinal.of(2), Ordinal.of(5)]):
        assert accepts(both, abstract(both.policy, w)) == (member(a, w) and member(b, w)), w


def test_refine_keeps_the_language():
    a = late_letter(AB)
    coarse = cap_policy([a], W)
    fine = CapPolicy(W, (coarse.thresholds[0] + 3, coarse.thresholds[1]), (coarse.periods[0] * 3, coarse.periods[1]))
    assert refines(fine, coarse)
    assert not refines(coarse, fine)
    nfa = to_gap_nfa(a, coarse)
    finer = refine(nfa, fine)
    assert finer.policy == fine
    for w in words_on(AB, W, FIRST_SIX[:4] + [Ordinal.of(9)]):
        assert accepts(finer, abstract(fine, w)) == accepts(nfa, abstract(coarse, w))
    with pytest.raises(AutomatonError):
        refine(finer, coarse)


def test_exists_project_does_not_split_merged_gaps():
    # x needs a letter of y right before its own, which rules out x = {1: a}
    a = shifted_pair(A)
    nfa = to_gap_nfa(a, cap_policy([a], W))
    projected = exists_project(nfa, 1)
    assert projected.alphabet == A
    rejected = complement(projected)
    ys = words_on(A, W, FIRST_SIX)
    for x in words_on(A, W, FIRST_SIX):
        labels = abstract(projected.policy, x)
        found = any(member(a, convolve([x, y])) for y in ys)
        assert accepts(projected, labels) == found, x
        assert accepts(rejected, labels) != found, x
    assert not accepts(projected, abstract(projected.policy, make(W, [(ONE, "a")], A)))
    assert accepts(projected, abstract(projected.policy, make(W, [(Ordinal.of(2), "a")], A)))


def test_exists_project_first_coordinate():
    a = shifted_pair(A)
    nfa = to_gap_nfa(a, cap_policy([a], W))
    projected = exists_project(nfa, 0)
    xs = words_on(A, W, FIRST_SIX + [Ordinal.of(6)])
    for y in words_on(A, W, FIRST_SIX[:5]):
        found = any(member(a, convolve([x, y])) for x in xs)
        assert accepts(projected, abstract(projected.policy, y)) == found, y


def test_exists_project_checks_coordinate():
    a = shifted_pair(A)
    nfa = to_gap_nfa(a, cap_policy([a], W))
    with pytest.raises(AutomatonError):
        exists_project(nfa, 2)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10**6), coord=st.integers(0, 1))
def test_exists_project_agrees_with_search(seed, coord):
    # both coordinates are boxed below position 3, so a finite search is exhaustive
    rng = random.Random(seed)
    box = early_support(A, 3)
    core = random_automaton(rng, A.product(2), 2)
    a = product(product(core, embed(box, 2, [0])), embed(box, 2, [1]))
    projected = exists_project(to_gap_nfa(a, cap_policy([a], W)), coord)
    others = words_on(A, W, FIRST_SIX[:3])
    for kept in words_on(A, W, FIRST_SIX[:4]):
        found = any(member(a, convolve([kept, y] if coord == 1 else [y, kept])) for y in others)
        assert accepts(projected, abstract(projected.policy, kept)) == found, kept


def test_cylindrify_nfa_agrees_with_member():
    a = late_letter(A)
    policy = cap_policy([a], W)
    wide = cylindrify_nfa(to_gap_nfa(a, policy), 2, [1])
    assert wide.policy == policy
    for x in words_on(A, W, FIRST_SIX[:4]):
        for y in words_on(A, W, FIRST_SIX[:4]):
            assert accepts(wide, abstract(policy, convolve([x, y]))) == member(a, y), (x, y)
    with pytest.raises(AutomatonError):
        cylindrify_nfa(to_gap_nfa(a, policy), 2, [2])
