import math

from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_reduced_words, generator_products, schreier_generators, words
from splitkit.automata import express, fold_build, membership, rank_index
from splitkit.words import product

BASIS = ("a", "b")


def test_whole_group_is_finite_index_one():
    aut = fold_build(["a", "b"], BASIS)
    assert rank_index(aut) == (2, 1)
    assert aut.is_complete()


def test_index_two_subgroup():
    aut = fold_build(["aa", "b", "aba"], BASIS)
    assert aut.rank_index() == (3, 2)


def test_infinite_index_and_membership():
    aut = fold_build(["ab", "ba"], BASIS)
    rank, index = aut.rank_index()
    assert rank == 2
    assert index == math.inf
    assert membership(aut, "abba")
    assert membership(aut, "")
    assert not membership(aut, "a")


def test_folding_reduces_rank_of_redundant_generators():
    aut = fold_build(["a", "aa", "b", "ab"], BASIS)
    assert aut.rank_index() == (2, 1)


def test_trivial_subgroup():
    aut = fold_build([], BASIS)
    assert aut.rank_index() == (0, math.inf)
    assert aut.contains("")
    assert not aut.contains("a")


def test_express_returns_factorisation():
    gens = ["aab", "bA"]
    aut = fold_build(gens, BASIS)
    target = product("aab", "bA", "bA", "BAA")
    expression = express(aut, target)
    assert expression is not None
    assert aut.evaluate(expression) == target
    assert express(aut, "a") is None


def test_generator_path_starts_and_ends_at_base():
    aut = fold_build(["abA", "bb"], BASIS)
    for i in range(2):
        path = aut.generator_path(i)
        assert path[0] == aut.base
        assert path[-1] == aut.base


def test_to_dot_marks_base_state():
    text = fold_build(["ab"], BASIS).to_dot("H")
    assert text.startswith('digraph "H" {')
    assert 'peripheries=2' in text


@st.composite
def generator_sets(draw):
    return draw(st.lists(words(BASIS, 6), min_size=1, max_size=3))


@settings(max_examples=80)
@given(generator_sets(), st.lists(st.tuples(st.integers(0, 2), st.sampled_from([1, -1])), max_size=6))
def test_products_of_generators_are_members_with_witnesses(gens, picks):
    aut = fold_build(gens, BASIS)
    chosen = [(i % len(gens), sign) for i, sign in picks]
    element = aut.evaluate(chosen)
    assert aut.contains(element)
    expression = aut.express(element)
    assert expression is not None
    assert aut.evaluate(expression) == element


@settings(max_examples=60)
@given(generator_sets())
def test_rejected_words_are_not_short_products(gens):
    aut = fold_build(gens, BASIS)
    products = generator_products(gens, 3)
    assert all(aut.contains(p) for p in products)
    for w in all_reduced_words(BASIS, 4):
        if not aut.contains(w):
            assert w not in products


def _cycle(order):
    image = [0] * len(order)
    for i, point in enumerate(order):
        image[point] = order[(i + 1) % len(order)]
    return tuple(image)


@settings(max_examples=60)
@given(st.integers(1, 5).flatmap(lambda k: st.tuples(st.permutations(range(k)), st.permutations(range(k)))))
def test_finite_index_rank_follows_schreier_formula(perms):
    a, order = perms
    gens = schreier_generators({"a": tuple(a), "b": _cycle(order)})
    rank, index = fold_build(gens, BASIS).rank_index()
    assert index == len(a)
    assert rank == index * (len(BASIS) - 1) + 1


@settings(max_examples=80)
@given(generator_sets())
def test_rank_and_index_agree_whenever_index_is_finite(gens):
    rank, index = fold_build(gens, BASIS).rank_index()
    if index != math.inf:
        assert rank == index * (len(BASIS) - 1) + 1


def test_schreier_formula_on_index_three():
    gens = schreier_generators({"a": (1, 2, 0), "b": (0, 2, 1)})
    assert fold_build(gens, BASIS).rank_index() == (4, 3)
