from dataclasses import replace

import pytest
from hypothesis import given, settings

from oracles import words
from splitkit.common.errors import NormalizationError
from splitkit.graph_of_groups import VertexKind, base_path
from splitkit.minimal import (
    Subgraph,
    blocks,
    minimal_subgraph,
    sandwich_decompose,
    saturated_words,
)
from splitkit.words import product


def test_subgraph_closure_and_order(star):
    sub = Subgraph(frozenset({"e_ZW"}), frozenset())
    assert not sub.is_closed(star.graph)
    closed = sub.closure(star.graph)
    assert closed.vertices == {"Z", "W"}
    assert closed <= Subgraph.whole(star.graph)
    assert (closed & Subgraph.point("R")).is_empty()
    assert Subgraph.of(star.graph, ["e_ZW", "e_t"]).fa_part(star.graph).edges == {"e_ZW"}


def test_minimal_subgraph_of_vertex_element(star):
    sub = minimal_subgraph(star.graph, ["w"])
    assert sub.edges == {"e_RZ", "e_ZW"}
    assert sub.vertices == {"R", "Z", "W"}
    assert sub.is_connected(star.graph)


def test_minimal_subgraph_of_nothing_is_the_base(star):
    assert minimal_subgraph(star.graph, []) == Subgraph.point("R")
    assert minimal_subgraph(star.graph, ["rzR"]) == Subgraph.point("R")


def test_minimal_subgraph_grows_with_generators(star):
    small = minimal_subgraph(star.graph, ["w"])
    large = minimal_subgraph(star.graph, ["w", "u"])
    assert small <= large
    assert large.edges == {"e_RZ", "e_ZW", "e_UZ"}


def test_loop_conjugate_splits_into_three_terms(loop_placement):
    terms = sandwich_decompose(loop_placement.graph, "tyT")
    assert [t.word for t in terms] == ["t", "y", "T"]
    assert terms[0].left_trivial_edge == "e_t"
    assert terms[0].imprint == Subgraph.point("U")
    assert terms[1].imprint.edges == {"e_UZ", "e_VZ"}
    assert terms[1].left_trivial_edge is None and terms[1].right_trivial_edge is None


def test_edge_conjugate_is_one_term_with_point_imprint(edge_placement):
    (term,) = sandwich_decompose(edge_placement.graph, "tyT")
    assert term.word == "tyT"
    assert term.left_trivial_edge == term.right_trivial_edge == "e_t"
    assert term.imprint == Subgraph.point("V")
    assert not term.is_elliptic


def test_chain_terms_and_imprints(chain):
    b_terms = sandwich_decompose(chain.graph, "gwGfyzxyE")
    assert [t.word for t in b_terms] == ["gwG", "fyzxyE"]
    assert b_terms[0].imprint == Subgraph.point("U4")
    assert b_terms[1].imprint.edges == {"e_Z2U3", "e_U2Z2"}
    assert b_terms[1].imprint.vertices == {"U3", "Z2", "U2"}

    c_terms = sandwich_decompose(chain.graph, "hyxHkzywwzyK")
    assert [t.word for t in c_terms] == ["hyxH", "kzywwzyK"]
    assert c_terms[0].imprint == Subgraph.point("U2")
    assert c_terms[1].imprint.edges == {"e_U3Z3", "e_Z3U4"}


def test_terms_multiply_back(chain, star):
    for graph, w in ((chain.graph, "gwGfyzxyE"), (star.graph, "tvwTurU"), (star.graph, "w")):
        assert product(*(t.word for t in sandwich_decompose(graph, w))) == w
    assert sandwich_decompose(star.graph, "") == []


@pytest.mark.parametrize("name", ["loop_placement", "edge_placement", "star", "chain"])
def test_terms_multiply_back_on_random_words(scenarios, name):
    graph = scenarios[name].graph

    @settings(max_examples=200)
    @given(words(graph.basis, 20))
    def check(w):
        assert product(*(t.word for t in sandwich_decompose(graph, w))) == w

    check()


def test_star_conjugate_then_vertex_element(star):
    terms = sandwich_decompose(star.graph, "tvTu")
    assert [t.word for t in terms] == ["tvT", "u"]
    assert terms[0].left_trivial_edge == terms[0].right_trivial_edge == "e_t"
    assert terms[0].imprint == Subgraph.point("V")
    assert terms[1].imprint.edges == {"e_RZ", "e_UZ"}
    path = base_path(star.graph, "tvTu")
    assert list(path.vertices) == ["R", "V", "R", "Z", "U", "Z", "R"]
    assert path.interior_translates == [2]


def test_elliptic_term(star):
    (term,) = sandwich_decompose(star.graph, "rz")
    assert term.is_elliptic
    assert term.imprint == Subgraph.point("R")


def test_trivial_edge_inside_a_term_is_rejected(star):
    graph = star.graph
    edges = tuple(replace(e, origin="U") if e.id == "e_t" else e for e in graph.edges)
    with pytest.raises(NormalizationError):
        sandwich_decompose(graph.replace(edges=edges), "t")


def test_saturated_words():
    assert saturated_words(["a", "b"], 1) == ["a", "b"]
    words = saturated_words(["a", "b"], 2)
    assert words[:2] == ["a", "b"]
    assert len(words) == 14
    assert "" not in words


def test_star_blocks(star):
    found = blocks(star.graph, ["u", "tvwT"], prefix="C")
    assert [b.id for b in found] == ["C0", "C1"]
    assert found[0].subgraph.edges == {"e_RZ", "e_UZ"}
    assert found[1].subgraph.edges == {"e_t", "e_VZ", "e_ZW"}
    (bw,) = blocks(star.graph, ["w"])
    assert bw.subgraph.edges == {"e_RZ", "e_ZW"}


def test_chain_blocks_stay_apart(chain):
    found = blocks(chain.graph, ["gwGfyzxyE"])
    assert len(found) == 2
    assert {frozenset(b.subgraph.edges) for b in found} == {
        frozenset({"t4"}), frozenset({"t3", "e_Z2U3", "e_U2Z2", "t2"})}


def test_saturation_is_recorded_as_caveat(star):
    found = blocks(star.graph, ["u", "tvwT"], saturation_length=2)
    assert [b.subgraph.edges for b in found] == [b.subgraph.edges for b in blocks(star.graph, ["u", "tvwT"])]
    assert all(b.saturation_length == 2 and "2" in b.caveat for b in found)
    with pytest.raises(ValueError):
        blocks(star.graph, ["u"], saturation_length=0)


@pytest.mark.parametrize("side", ["b", "c"])
@pytest.mark.parametrize("name", ["loop_placement", "edge_placement", "star", "chain"])
def test_blocks_are_stable_under_saturation(scenarios, name, side):
    scenario = scenarios[name]
    gens = list(scenario.params) + list(scenario.tuple(side))
    found = [sorted(sorted(b.subgraph.edges) for b in blocks(scenario.graph, gens, s)) for s in (1, 2, 3)]
    assert found[0] == found[1] == found[2]


@pytest.mark.parametrize("side", ["b", "c"])
@pytest.mark.parametrize("name", ["loop_placement", "edge_placement", "star", "chain"])
def test_distinct_blocks_meet_only_in_ztype_or_base_vertices(scenarios, name, side):
    scenario = scenarios[name]
    graph = scenario.graph
    found = blocks(graph, list(scenario.params) + list(scenario.tuple(side)))
    for i, first in enumerate(found):
        for second in found[i + 1:]:
            meet = first.subgraph & second.subgraph
            assert not meet.edges
            for vid in meet.vertices:
                assert vid == graph.base or graph.vertex(vid).kind == VertexKind.ZTYPE


def test_elliptic_generators_have_no_blocks(star):
    assert blocks(star.graph, ["r", "z"]) == []
