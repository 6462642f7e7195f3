"""
minimal.py
Subgraphs of the decomposition, minimal subgraphs, sandwich terms and blocks.
"""
import logging
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .common.errors import NormalizationError
from .graph_of_groups import (
    GraphOfGroups,
    ProjectedPath,
    Step,
    VertexKind,
    base_path,
    evaluate_path,
    normal_form,
)
from .words import Word, inverse, product, reduce_word

logger = logging.getLogger(__name__)


# ─── Subgraphs ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Subgraph:
    """Edge and vertex id sets; closed when every edge's endpoints are included."""
    edges: FrozenSet[str] = field(default_factory=frozenset)
    vertices: FrozenSet[str] = field(default_factory=frozenset)

    @classmethod
    def of(cls, graph: GraphOfGroups, edges: Iterable[str] = (), vertices: Iterable[str] = ()) -> "Subgraph":
        """Closed subgraph spanned by the given edges and vertices."""
        return cls(frozenset(edges), frozenset(vertices)).closure(graph)

    @classmethod
    def whole(cls, graph: GraphOfGroups) -> "Subgraph":
        return cls(frozenset(graph.edge_ids), frozenset(graph.vertex_ids))

    @classmethod
    def point(cls, vertex: str) -> "Subgraph":
        return cls(frozenset(), frozenset([vertex]))

    def closure(self, graph: GraphOfGroups) -> "Subgraph":
        vertices = set(self.vertices)
        for eid in self.edges:
            e = graph.edge(eid)
            vertices.update((e.origin, e.terminus))
        return Subgraph(self.edges, frozenset(vertices))

    def is_closed(self, graph: GraphOfGroups) -> bool:
        return self.closure(graph) == self

    def union(self, other: "Subgraph") -> "Subgraph":
        return Subgraph(self.edges | other.edges, self.vertices | other.vertices)

    def intersection(self, other: "Subgraph") -> "Subgraph":
        return Subgraph(self.edges & other.edges, self.vertices & other.vertices)

    def __or__(self, other: "Subgraph") -> "Subgraph":
        return self.union(other)

    def __and__(self, other: "Subgraph") -> "Subgraph":
        return self.intersection(other)

    def __le__(self, other: "Subgraph") -> bool:
        return self.edges <= other.edges and self.vertices <= other.vertices

    def is_empty(self) -> bool:
        return not self.edges and not self.vertices

    def fa_part(self, graph: GraphOfGroups) -> "Subgraph":
        return Subgraph(self.edges & graph.fa_edges, self.vertices & graph.fa_vertices)

    def as_networkx(self, graph: GraphOfGroups) -> nx.MultiGraph:
        view = nx.MultiGraph()
        view.add_nodes_from(self.vertices)
        for eid in self.edges:
            e = graph.edge(eid)
            view.add_edge(e.origin, e.terminus, key=eid)
        return view

    def is_connected(self, graph: GraphOfGroups) -> bool:
        if not self.vertices:
            return True
        return nx.is_connected(self.as_networkx(graph))

    def describe(self) -> str:
        return f"edges={sorted(self.edges)} vertices={sorted(self.vertices)}"

    def to_dict(self) -> dict:
        return {"edges": sorted(self.edges), "vertices": sorted(self.vertices)}


def path_subgraph(graph: GraphOfGroups, path: ProjectedPath) -> Subgraph:
    """Edges and vertices a projected path visits, plus the base vertex."""
    return Subgraph(path.edge_ids, frozenset(path.vertices) | {graph.base})


def minimal_subgraph(graph: GraphOfGroups, gens: Sequence[Word]) -> Subgraph:
    """
    Projection of the pointed minimal subtree of <gens>.

    The hull of H.v_A is the union of H-translates of the generator paths,
    so its image is the union of the generator path images.
    """
    result = Subgraph.point(graph.base)
    for g in gens:
        result = result | path_subgraph(graph, base_path(graph, g))
    return result


# ─── Sandwich terms ───────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SandwichTerm:
    word: Word
    steps: Tuple[Step, ...]
    vertices: Tuple[str, ...]
    left_trivial_edge: Optional[str]
    right_trivial_edge: Optional[str]
    imprint: Subgraph

    @property
    def subgraph(self) -> Subgraph:
        """Minimal subgraph of the term: its whole path and the base vertex."""
        return Subgraph(frozenset(eid for eid, _ in self.steps), frozenset(self.vertices))

    @property
    def is_elliptic(self) -> bool:
        return not self.steps

    def to_dict(self) -> dict:
        return {
            "word": self.word,
            "left_trivial_edge": self.left_trivial_edge,
            "right_trivial_edge": self.right_trivial_edge,
            "imprint": self.imprint.to_dict(),
            "path": [{"edge": eid, "direction": d} for eid, d in self.steps],
        }


def _make_term(graph: GraphOfGroups, word: Word, steps: Sequence[Step], vertices: Sequence[str]) -> SandwichTerm:
    trivial = [i for i, (eid, _) in enumerate(steps) if graph.edge(eid).is_trivial]
    last = len(steps) - 1
    for i in trivial:
        if i not in (0, last):
            raise NormalizationError(
                f"trivially stabilized edge {steps[i][0]} inside the term {word!r} away from a "
                "translate of the base vertex; the decomposition is not normalized")
    left = steps[0][0] if 0 in trivial else None
    right = steps[last][0] if last in trivial and (last != 0 or left is None) else None
    lo = 1 if left is not None else 0
    hi = last if right is not None else last + 1
    middle_steps = steps[lo:hi]
    middle_vertices = vertices[lo:hi + 1] if middle_steps else vertices[lo:lo + 1]
    imprint = Subgraph(frozenset(eid for eid, _ in middle_steps), frozenset(middle_vertices))
    outside = imprint.edges - graph.fa_edges
    if outside:
        raise NormalizationError(f"imprint of {word!r} leaves the F_A-subgraph through {sorted(outside)}")
    return SandwichTerm(word, tuple(steps), tuple(vertices), left, right, imprint)


def sandwich_decompose(graph: GraphOfGroups, g: Word) -> List[SandwichTerm]:
    """
    Cut the base path of g at every interior translate of the base vertex.

    Returns:
        Terms whose product is g; [] for the identity.

    Raises:
        NormalizationError: If a trivially stabilized edge sits inside a term.
    """
    g = reduce_word(g)
    if not g:
        return []
    nf = normal_form(graph, g)
    if nf.is_elliptic:
        return [SandwichTerm(g, (), (graph.base,), None, None, Subgraph.point(graph.base))]
    cuts = [0] + [i for i in range(1, nf.length) if nf.vertices[i] == graph.base] + [nf.length]
    terms = []
    for j, (lo, hi) in enumerate(zip(cuts, cuts[1:])):
        elements = [nf.elements[0] if j == 0 else ""] + list(nf.elements[lo + 1:hi + 1])
        steps = nf.steps[lo:hi]
        word = evaluate_path(graph, elements, steps)
        terms.append(_make_term(graph, word, steps, nf.vertices[lo:hi + 1]))
    logger.debug("sandwich_decompose(%r): %d terms", g, len(terms))
    return terms


# ─── Blocks ───────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Block:
    id: str
    subgraph: Subgraph
    member_terms: Tuple[SandwichTerm, ...]
    saturation_length: int
    caveat: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "edges": sorted(self.subgraph.edges),
            "vertices": sorted(self.subgraph.vertices),
            "terms": sorted({t.word for t in self.member_terms}),
            "saturation_length": self.saturation_length,
            "caveat": self.caveat,
        }


def saturated_words(gens: Sequence[Word], saturation_length: int) -> List[Word]:
    """Distinct non-trivial products of at most `saturation_length` generators and inverses."""
    letters = []
    for g in gens:
        g = reduce_word(g)
        if g:
            letters.extend([g, inverse(g)])
    letters = list(dict.fromkeys(letters))
    words: Dict[Word, None] = {}
    for g in gens:
        g = reduce_word(g)
        if g:
            words[g] = None
    for length in range(2, saturation_length + 1):
        for combo in cartesian(letters, repeat=length):
            w = product(*combo)
            if w:
                words[w] = None
    return list(words)


def _joins(graph: GraphOfGroups, a: Subgraph, b: Subgraph) -> bool:
    if a.edges & b.edges:
        return True
    return any(v != graph.base and graph.vertex(v).kind != VertexKind.ZTYPE for v in a.vertices & b.vertices)


def blocks(graph: GraphOfGroups, gens: Sequence[Word], saturation_length: int = 1,
           prefix: str = "block") -> List[Block]:
    """
    Blocks of the subgroup generated by `gens`.

    Sandwich terms of all products of at most `saturation_length` generators
    are merged whenever their minimal subgraphs share an edge or a vertex
    that is neither ztype nor the base vertex.
    """
    if saturation_length < 1:
        raise ValueError("saturation_length must be at least 1")
    terms: List[SandwichTerm] = []
    for w in saturated_words(gens, saturation_length):
        terms.extend(t for t in sandwich_decompose(graph, w) if t.steps)
    if not terms:
        return []

    merged = nx.utils.UnionFind(range(len(terms)))
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            if _joins(graph, terms[i].subgraph, terms[j].subgraph):
                merged.union(i, j)

    caveat = (f"sandwich terms saturated over products of at most {saturation_length} "
              "generator(s); longer products may merge blocks further")
    grouped = []
    for members in merged.to_sets():
        member_terms = [terms[i] for i in sorted(members)]
        subgraph = Subgraph()
        for t in member_terms:
            subgraph = subgraph | t.subgraph
        grouped.append((subgraph, member_terms))
    grouped.sort(key=lambda item: (sorted(item[0].edges), sorted(item[0].vertices)))
    result = [
        Block(f"{prefix}{i}", subgraph, tuple(member_terms), saturation_length, caveat)
        for i, (subgraph, member_terms) in enumerate(grouped)
    ]
    logger.debug("blocks: %d terms -> %d blocks", len(terms), len(result))
    return result
