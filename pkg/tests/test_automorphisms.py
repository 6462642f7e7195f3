import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import words
from splitkit.automorphisms import (
    Automorphism,
    apply_automorphism,
    compose,
    dehn_twist,
    twist_orbit_distinct,
)
from splitkit.common.errors import AutomorphismError, HypothesisError, WordError
from splitkit.graph_of_groups import retree
from splitkit.words import inverse, product

STAR_EDGES = ["e_RZ", "e_UZ", "e_VZ", "e_ZW"]


def test_twist_about_pendant_edge_conjugates_one_letter(star):
    tau = dehn_twist(star.graph, "e_ZW", 1)
    assert apply_automorphism(tau, "w") == "zwZ"
    for letter in "ruvzt":
        assert tau(letter) == letter


def test_twist_moves_stable_letters_on_the_twisted_side(star):
    tau = dehn_twist(star.graph, "e_RZ", 2)
    assert tau("r") == "zzrZZ"
    assert tau("t") == "zzt"
    assert tau("u") == "u"


def test_twist_on_terminus_side_corrects_stable_letter(star):
    tau = dehn_twist(star.graph, "e_VZ", 1)
    assert tau("v") == "zvZ"
    assert tau("t") == "tZ"
    assert tau("tvT") == "tvT"


@pytest.mark.parametrize("edge_id", STAR_EDGES)
def test_zero_twist_is_identity(star, edge_id):
    assert dehn_twist(star.graph, edge_id, 0) == Automorphism.identity(star.graph.basis)


@pytest.mark.parametrize("edge_id", STAR_EDGES)
def test_twists_add_up(star, edge_id):
    graph = star.graph
    for a, b in ((1, 2), (-1, 3), (2, -2)):
        combined = compose(dehn_twist(graph, edge_id, b), dehn_twist(graph, edge_id, a))
        assert combined == dehn_twist(graph, edge_id, a + b)


@pytest.mark.parametrize("edge_id", STAR_EDGES)
def test_twists_are_automorphisms_fixing_the_edge_root(star, edge_id):
    for k in (-2, 1, 3):
        tau = dehn_twist(star.graph, edge_id, k)
        assert tau.is_automorphism()
        assert tau("z") == "z"


def test_twist_rejects_trivial_edges(star):
    with pytest.raises(HypothesisError):
        dehn_twist(star.graph, "e_t", 1)


def test_non_tree_twist_agrees_with_tree_twist_up_to_conjugation(star):
    tree_twist = dehn_twist(star.graph, "e_RZ", 1)
    retreed = retree(star.graph, "e_t")
    non_tree_twist = dehn_twist(retreed, "e_RZ", 1)
    assert non_tree_twist == Automorphism.conjugation(star.graph.basis, "Z").compose(tree_twist)


def test_automorphism_validation():
    with pytest.raises(AutomorphismError):
        Automorphism(("a", "b"), ("a",))
    with pytest.raises(AutomorphismError):
        Automorphism.identity(("a", "b")).compose(Automorphism.identity(("a", "c")))
    with pytest.raises(WordError):
        Automorphism.identity(("a", "b")).image("x")
    squaring = Automorphism(("a", "b"), ("aa", "b"))
    assert not squaring.is_automorphism()
    with pytest.raises(AutomorphismError):
        squaring.inverse()


def test_conjugation_and_mapping():
    conj = Automorphism.conjugation(("a", "b"), "b")
    assert conj("a") == "baB"
    assert conj.fixes(["b", "bb"])
    phi = Automorphism.from_mapping(("a", "b"), {"a": "ab"})
    assert phi.to_dict() == {"a": "ab", "b": "b"}
    assert phi.power(3)("a") == "abbb"
    assert phi.power(-1)("a") == "aB"


@st.composite
def nielsen_automorphisms(draw, basis=("a", "b", "c")):
    phi = Automorphism.identity(basis)
    for _ in range(draw(st.integers(min_value=0, max_value=4))):
        i, j = draw(st.lists(st.sampled_from(range(len(basis))), min_size=2, max_size=2, unique=True))
        images = list(phi.images)
        images[i] = product(images[i], images[j] if draw(st.booleans()) else inverse(images[j]))
        phi = Automorphism(basis, tuple(images))
    return phi


@settings(max_examples=100)
@given(nielsen_automorphisms(), words(("a", "b", "c"), 10))
def test_inverse_roundtrip(phi, g):
    assert phi.is_automorphism()
    phi_inv = phi.inverse()
    assert apply_automorphism(compose(phi, phi_inv), g) == g
    assert apply_automorphism(phi_inv, apply_automorphism(phi, g)) == g


def test_twist_orbit_is_distinct_for_star(star):
    assert twist_orbit_distinct(star.graph, "e_ZW", ("r", "w"), 8)
    assert twist_orbit_distinct(star.graph, "e_ZW", ("r", "w"), 0)


def test_twist_orbit_repeats_when_twist_is_trivial_on_pair(star):
    assert not twist_orbit_distinct(star.graph, "e_RZ", ("u", "w"), 2)


def test_twist_orbit_preconditions(star):
    with pytest.raises(HypothesisError):
        twist_orbit_distinct(star.graph, "e_ZW", ("z", "zz"), 3)
    with pytest.raises(ValueError):
        twist_orbit_distinct(star.graph, "e_ZW", ("r", "w"), -1)
