import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_conjugator, nontrivial_words, words
from splitkit.common.errors import WordError
from splitkit.words import (
    are_conjugate,
    check_word,
    commensurable,
    common_root_exponents,
    commutes,
    conjugate,
    conjugator,
    cyclic_normal_form,
    cyclic_reduce,
    inverse,
    is_reduced,
    parse_word,
    power,
    power_of,
    product,
    reduce_concat,
    reduce_word,
    root,
    simultaneous_conjugacy,
)

BASIS = ("a", "b", "c")


def test_reduce_word_examples():
    assert reduce_word("aAb") == "b"
    assert reduce_word("abBA") == ""
    assert reduce_word("abBc") == "ac"
    assert reduce_word("") == ""


def test_parse_word_accepts_identity_and_separators():
    assert parse_word("1") == ""
    assert parse_word("") == ""
    assert parse_word("a.b.B", BASIS) == "a"
    assert parse_word("a b A", BASIS) == "abA"


def test_check_word_rejects_foreign_letters():
    with pytest.raises(WordError):
        check_word("ax", BASIS)
    with pytest.raises(WordError):
        check_word("a1")


def test_power_and_conjugate():
    assert power("ab", 3) == "ababab"
    assert power("ab", -2) == "BABA"
    assert power("ab", 0) == ""
    assert conjugate("c", "ab") == "cabC"


def test_root_is_maximal():
    assert root("abab") == ("ab", 2)
    assert root("cababC") == ("cabC", 2)
    assert root("aaa") == ("a", 3)
    with pytest.raises(WordError):
        root("")


def test_power_of_and_commensurable():
    assert power_of("ababab", "abab") is None
    assert power_of("abab", "ab") == 2
    assert power_of("BABA", "ab") == -2
    assert commensurable("abab", "BABABA")
    assert not commensurable("ab", "ba")
    with pytest.raises(WordError):
        commensurable("", "a")


def test_common_root_exponents():
    rho, exponents = common_root_exponents(["aa", "AAA", "a"])
    assert rho == "a"
    assert exponents == [2, -3, 1]
    with pytest.raises(WordError):
        common_root_exponents(["a", "b"])


def test_cyclic_reduce_and_normal_form():
    assert cyclic_reduce("abcA") == ("a", "bc")
    assert cyclic_normal_form("cab") == cyclic_normal_form("abc")
    assert str(cyclic_normal_form("aA")) == "1"


def test_simultaneous_conjugacy_examples():
    assert simultaneous_conjugacy(("a", "b"), ("baB", "b")) == "b"
    assert simultaneous_conjugacy(("a", "b"), ("a", "c")) is None
    assert simultaneous_conjugacy(("", ""), ("", "")) == ""
    assert simultaneous_conjugacy(("", ""), ("a", "")) is None
    with pytest.raises(WordError):
        simultaneous_conjugacy(("a",), ("a", "b"))


@given(words(BASIS), words(BASIS))
def test_reduce_concat_matches_full_reduction(u, v):
    assert reduce_concat(u, v) == reduce_word(u + v)
    assert is_reduced(product(u, v))


@given(words(BASIS))
def test_inverse_cancels(w):
    assert product(w, inverse(w)) == ""
    assert inverse(inverse(w)) == w


@given(nontrivial_words(BASIS))
def test_root_power_recovers_word(w):
    r, k = root(w)
    assert power(r, k) == w
    assert root(r) == (r, 1)


@given(words(BASIS), words(BASIS))
def test_conjugator_is_found_for_conjugates(w, g):
    target = conjugate(g, w)
    assert are_conjugate(w, target)
    found = conjugator(w, target)
    assert found is not None
    assert conjugate(found, w) == target


@given(nontrivial_words(BASIS, 8), nontrivial_words(BASIS, 8))
def test_commutes_iff_common_root(u, v):
    assert commutes(u, v) == commensurable(u, v)


@st.composite
def tuple_pairs(draw):
    basis = ("a", "b")
    xs = (draw(words(basis, 5)), draw(words(basis, 5)))
    if draw(st.booleans()):
        g = draw(words(basis, 3))
        ys = (conjugate(g, xs[0]), conjugate(g, xs[1]))
    else:
        ys = (draw(words(basis, 5)), draw(words(basis, 5)))
    return xs, ys


@settings(max_examples=100)
@given(tuple_pairs())
def test_simultaneous_conjugacy_agrees_with_brute_force(pair):
    xs, ys = pair
    found = simultaneous_conjugacy(xs, ys)
    brute = brute_force_conjugator(xs, ys, ("a", "b"), 8)
    if brute is not None:
        assert found is not None
    if found is not None:
        assert all(conjugate(found, x) == y for x, y in zip(xs, ys))
    else:
        assert brute is None


def test_cyclic_normal_form_follows_basis_order():
    star_basis = ("r", "u", "v", "w", "z", "t")
    assert cyclic_normal_form("tvw", star_basis).letters == "vwt"
    assert cyclic_normal_form("zt", star_basis).letters == "zt"
    assert cyclic_normal_form("zt").letters == "tz"
    assert cyclic_normal_form("tvw").letters == "tvw"
    assert cyclic_normal_form("Aa" + "ab", ("b", "a")).letters == "ba"
    assert cyclic_normal_form("bA", ("b", "a")).letters == "bA"
    with pytest.raises(WordError):
        cyclic_normal_form("zq", star_basis)


@settings(max_examples=200)
@given(words(BASIS, 10), words(BASIS, 10))
def test_basis_order_normal_form_decides_conjugacy(x, y):
    order = ("c", "a", "b")
    assert (cyclic_normal_form(x, order) == cyclic_normal_form(y, order)) == are_conjugate(x, y)
    assert cyclic_normal_form(x, tuple(sorted(BASIS))) == cyclic_normal_form(x)
