"""
automorphisms.py
Automorphisms of the ambient free group given by basis images, Dehn twists
about cyclic edges of a decomposition, and the twist-orbit distinctness test.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Mapping, Sequence, Tuple

import networkx as nx

from .automata import fold_build
from .common.errors import AutomorphismError, HypothesisError, WordError
from .graph_of_groups import GraphOfGroups, VertexKind
from .words import Word, commutes, conjugate, inverse, power, product, simultaneous_conjugacy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Automorphism:
    """Endomorphism of the free group on `basis` given by one image per letter."""
    basis: Tuple[str, ...]
    images: Tuple[Word, ...]

    def __post_init__(self):
        if len(self.basis) != len(self.images):
            raise AutomorphismError(f"{len(self.images)} images for a basis of rank {len(self.basis)}")

    @classmethod
    def identity(cls, basis: Sequence[str]) -> "Automorphism":
        return cls(tuple(basis), tuple(basis))

    @classmethod
    def conjugation(cls, basis: Sequence[str], g: Word) -> "Automorphism":
        """Conj(g): x -> g.x.g^-1."""
        return cls(tuple(basis), tuple(conjugate(g, x) for x in basis))

    @classmethod
    def from_mapping(cls, basis: Sequence[str], mapping: Mapping[str, Word]) -> "Automorphism":
        return cls(tuple(basis), tuple(product(mapping.get(x, x)) for x in basis))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def image(self, letter: str) -> Word:
        try:
            index = self.basis.index(letter.lower())
        except ValueError:
            raise WordError(f"letter {letter!r} is not in the basis {''.join(self.basis)}") from None
        g = self.images[index]
        return g if letter.islower() else inverse(g)

    def apply(self, word: Word) -> Word:
        return product(*(self.image(ch) for ch in word))

    __call__ = apply

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self after other: x -> self(other(x))."""
        if self.basis != other.basis:
            raise AutomorphismError("cannot compose automorphisms over different bases")
        return Automorphism(self.basis, tuple(self.apply(g) for g in other.images))

    def power(self, exponent: int) -> "Automorphism":
        step = self if exponent >= 0 else self.inverse()
        result = Automorphism.identity(self.basis)
        for _ in range(abs(exponent)):
            result = step.compose(result)
        return result

    def is_automorphism(self) -> bool:
        return fold_build(self.images, self.basis).rank_index() == (self.rank, 1)

    def inverse(self) -> "Automorphism":
        """
        Inverse by expressing each basis letter over the images.

        Raises:
            AutomorphismError: If the images do not form a basis.
        """
        aut = fold_build(self.images, self.basis)
        if aut.rank_index() != (self.rank, 1):
            raise AutomorphismError("images do not generate the free group; not invertible")
        images = []
        for letter in self.basis:
            expression = aut.express(letter)
            images.append(product(*(
                self.basis[i] if sign > 0 else inverse(self.basis[i]) for i, sign in expression
            )))
        return Automorphism(self.basis, tuple(images))

    def fixes(self, words: Sequence[Word]) -> bool:
        return all(self.apply(w) == product(w) for w in words)

    def to_dict(self) -> Dict[str, Word]:
        return dict(zip(self.basis, self.images))


def apply_automorphism(phi: Automorphism, word: Word) -> Word:
    return phi.apply(word)


def compose(phi: Automorphism, psi: Automorphism) -> Automorphism:
    """phi after psi."""
    return phi.compose(psi)


# ─── Dehn twists ──────────────────────────────────────────────────────────────

def dehn_twist(graph: GraphOfGroups, edge_id: str, exponent: int) -> Automorphism:
    """
    Dehn twist about a cyclic F_A edge.

    Conjugates by (edge generator)^exponent everything on the side of the
    edge holding its non-ztype endpoint; stable letters crossing into that
    side pick up the twisting element.

    Raises:
        HypothesisError: For trivial edges or edges outside the F_A-subgraph.
    """
    e = graph.edge(edge_id)
    if e.is_trivial:
        raise HypothesisError(f"cannot twist about trivially stabilized edge {edge_id}")
    if edge_id not in graph.fa_edges:
        raise HypothesisError(f"edge {edge_id} is not in the F_A-subgraph")
    ends = [x for x in (e.origin, e.terminus) if graph.vertex(x).kind != VertexKind.ZTYPE]
    if not ends:
        raise HypothesisError(f"edge {edge_id} joins two ztype vertices")
    x = ends[0]
    gamma = power(e.generator_at(x), exponent)

    new_images = {}
    if e.in_tree:
        cut = graph.tree_graph.copy()
        cut.remove_edge(e.origin, e.terminus)
        side = nx.node_connected_component(cut, x)
        for f in graph.edges:
            if f.in_tree:
                continue
            s = f.stable_letter
            if f.origin in side:
                s = product(gamma, s)
            if f.terminus in side:
                s = product(s, inverse(gamma))
            new_images[("stable", f.id)] = s
    else:
        # agrees with the tree-edge rule up to conjugation by gamma
        side = set()
        s = product(inverse(gamma), e.stable_letter) if x == e.origin else product(e.stable_letter, gamma)
        new_images[("stable", e.id)] = s

    gens = []
    for kind, owner, word in graph.splitting_generators:
        if kind == "vertex":
            gens.append(conjugate(gamma, word) if owner in side else word)
        else:
            gens.append(new_images.get((kind, owner), word))

    images = []
    for letter in graph.basis:
        expression = graph.splitting_automaton.express(letter)
        if expression is None:
            raise HypothesisError(f"basis letter {letter} is not generated by the splitting")
        images.append(product(*(gens[i] if sign > 0 else inverse(gens[i]) for i, sign in expression)))
    twist = Automorphism(graph.basis, tuple(images))
    logger.debug("dehn_twist(%s, %d): %s", edge_id, exponent, twist.to_dict())
    return twist


def twist_orbit_distinct(graph: GraphOfGroups, edge_id: str, pair: Tuple[Word, Word], count: int) -> bool:
    """
    True iff tau^m(pair), m = 0..count, are pairwise non-conjugate tuples.

    Raises:
        HypothesisError: If the pair generates an abelian subgroup.
    """
    first, second = (product(w) for w in pair)
    if commutes(first, second):
        raise HypothesisError("twist-orbit hypothesis: the pair generates an abelian subgroup")
    if count < 0:
        raise ValueError("count must be non-negative")
    tau = dehn_twist(graph, edge_id, 1)
    orbit = [(first, second)]
    for _ in range(count):
        x, y = orbit[-1]
        orbit.append((tau.apply(x), tau.apply(y)))
    for i in range(len(orbit)):
        for j in range(i + 1, len(orbit)):
            if simultaneous_conjugacy(orbit[i], orbit[j]) is not None:
                logger.info("twist orbit repeats: m=%d and m=%d are conjugate", i, j)
                return False
    return True
