"""
cylinders.py
Cylinders of F_A edges, the quotient-level tree of cylinders, envelopes and
the disjoint-envelope-cover decision.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .common.config import DISJOINTNESS_MODES
from .common.errors import GraphOfGroupsError, UnsupportedError
from .graph_of_groups import (
    EdgeClass,
    EdgeData,
    GraphOfGroups,
    VertexData,
    VertexKind,
)
from .minimal import Subgraph
from .words import Word, common_root_exponents, gcd_all, inverse, power, power_of, root

logger = logging.getLogger(__name__)


# ─── Cylinders ────────────────────────────────────────────────────────────────

def _root_key(word: Word) -> Word:
    r, _ = root(word)
    return min(r, inverse(r))


def cylinder_classes(graph: GraphOfGroups, edge_ids: Optional[Iterable[str]] = None) -> List[List[str]]:
    """
    Partition cyclic edges into cylinders: edges meeting at a vertex are
    joined when their generators seen from that vertex share a root.

    Args:
        graph: The decomposition.
        edge_ids: Edges to partition; defaults to the F_A edges.

    Returns:
        Sorted list of sorted edge-id lists.
    """
    ids = sorted(graph.fa_edges if edge_ids is None else edge_ids)
    for eid in ids:
        if graph.edge(eid).is_trivial:
            raise GraphOfGroupsError("trivially stabilized edges have no cylinder")
    classes = nx.utils.UnionFind(ids)
    by_vertex: Dict[Tuple[str, Word], List[str]] = {}
    for eid in ids:
        e = graph.edge(eid)
        for vertex in {e.origin, e.terminus}:
            by_vertex.setdefault((vertex, _root_key(e.generator_at(vertex))), []).append(eid)
    for members in by_vertex.values():
        classes.union(*members)
    return sorted(sorted(group) for group in classes.to_sets())


def cylinders(graph: GraphOfGroups) -> Dict[str, str]:
    """Cylinder label of every F_A edge."""
    labels: Dict[str, str] = {}
    for members in cylinder_classes(graph):
        label = _cylinder_label(graph, members)
        for eid in members:
            labels[eid] = label
    return labels


def _cylinder_label(graph: GraphOfGroups, members: Sequence[str]) -> str:
    shared = set.intersection(*({graph.edge(e).origin, graph.edge(e).terminus} for e in members))
    ztypes = sorted(v for v in shared if graph.vertex(v).kind == VertexKind.ZTYPE)
    if len(ztypes) == 1:
        return ztypes[0]
    return f"cylinder({min(members)})"


def cylinder_of_edge(graph: GraphOfGroups, edge_id: str) -> str:
    """
    Cylinder label of an F_A edge: its ztype endpoint in star-shaped
    cylinders, otherwise "cylinder(<smallest edge id>)".

    Raises:
        GraphOfGroupsError: For trivial edges or edges outside the F_A-subgraph.
    """
    edge = graph.edge(edge_id)
    if edge.is_trivial:
        raise GraphOfGroupsError("trivially stabilized edges have no cylinder")
    if edge_id not in graph.fa_edges:
        raise GraphOfGroupsError(f"edge {edge_id} is not in the F_A-subgraph")
    return cylinders(graph)[edge_id]


# ─── Tree of cylinders ────────────────────────────────────────────────────────

def _edge_index(graph: GraphOfGroups, edge: EdgeData, vertex: str) -> Optional[int]:
    """Index of the edge group in a cyclic vertex group, or None if not finite."""
    v = graph.vertex(vertex)
    if v.rank != 1:
        return None
    rho, exponents = common_root_exponents([g for g in v.group.generators if g])
    k = power_of(edge.generator_at(vertex), power(rho, gcd_all(exponents)))
    return abs(k) if k else None


def _smallest_power_in(vertex: VertexData, rho: Word, bound: int) -> int:
    for j in range(1, bound + 1):
        if bound % j == 0 and vertex.contains(power(rho, j)):
            return j
    return bound


def tree_of_cylinders(graph: GraphOfGroups) -> GraphOfGroups:
    """
    Quotient-level tree of cylinders of a tree of groups with cyclic edges.

    Vertices whose lifts lie in a single cylinder (non-base, cyclic group,
    tree valence at least 2) are absorbed into that cylinder's vertex; all
    other vertices are kept with their kind and joined to one new ztype
    vertex per cylinder. A kept cyclic vertex (the base, or a leaf whose edge
    group is the whole vertex group) stays ztype.

    Raises:
        GraphOfGroupsError: If trivial edges are present.
        UnsupportedError: If the graph is not a tree.
    """
    if any(e.is_trivial for e in graph.edges):
        raise GraphOfGroupsError("tree of cylinders needs cyclic edges only; trivial edges present")
    if any(not e.in_tree for e in graph.edges):
        raise UnsupportedError("tree of cylinders is only built for tree-shaped graphs of groups")

    classes = cylinder_classes(graph, graph.edge_ids)
    class_of = {eid: i for i, members in enumerate(classes) for eid in members}

    interior: Dict[str, int] = {}
    for v in graph.vertices:
        incident = graph.incident_edges(v.id)
        if v.id == graph.base or not incident or v.rank != 1:
            continue
        if len({class_of[e.id] for e in incident}) != 1:
            continue
        indices = [_edge_index(graph, e, v.id) for e in incident]
        if any(i is None for i in indices) or sum(indices) < 2:
            continue
        interior[v.id] = class_of[incident[0].id]

    vertices: List[VertexData] = []
    for v in graph.vertices:
        if v.id in interior:
            continue
        vertices.append(VertexData(v.id, v.kind, v.generators))

    edges: List[EdgeData] = []
    for i, members in enumerate(classes):
        absorbed = sorted(v for v, c in interior.items() if c == i)
        cylinder_id = "+".join(absorbed) if absorbed else f"C({members[0]})"
        rho, _ = root(graph.edge(members[0]).generator)
        vertices.append(VertexData(cylinder_id, VertexKind.ZTYPE, (rho,)))

        boundary: Dict[str, List[EdgeData]] = {}
        for eid in members:
            e = graph.edge(eid)
            for end in (e.origin, e.terminus):
                if end not in interior:
                    boundary.setdefault(end, []).append(e)
        for x in sorted(boundary):
            attached = boundary[x]
            exponents = [abs(power_of(e.generator_at(x), rho) or 0) for e in attached]
            j = _smallest_power_in(graph.vertex(x), rho, min(k for k in exponents if k) if any(exponents) else 1)
            only = attached[0]
            if len(attached) == 1 and only.other_end(x) in interior:
                edge_id = only.id
            else:
                edge_id = f"{x}~{cylinder_id}"
            edges.append(EdgeData(edge_id, x, cylinder_id, EdgeClass.CYCLIC, power(rho, j), True, ""))

    vertex_ids = {v.id for v in vertices}
    fa = frozenset(v for v in vertex_ids if v in graph.fa_vertices or v not in graph.vertex_ids)
    result = GraphOfGroups(graph.basis, tuple(vertices), tuple(edges), graph.base, fa)
    logger.debug("tree_of_cylinders: %d cylinders, %d absorbed vertices", len(classes), len(interior))
    return result


# ─── Envelopes ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Envelope:
    center: str
    edges: FrozenSet[str]

    def closure(self, graph: GraphOfGroups) -> Subgraph:
        return Subgraph.of(graph, self.edges, [self.center])

    def to_dict(self) -> dict:
        return {"center": self.center, "edges": sorted(self.edges)}


@dataclass(frozen=True)
class EnvelopeCover:
    envelopes: Tuple[Envelope, ...]

    def to_dict(self) -> dict:
        return {"envelopes": [env.to_dict() for env in self.envelopes]}


def is_envelope(graph: GraphOfGroups, center: str, edges: Iterable[str]) -> bool:
    """True iff (center, edges) is an envelope of a rigid vertex."""
    v = graph.vertex(center)
    if v.kind not in (VertexKind.RIGID, VertexKind.BASE):
        return False
    edges = list(edges)
    ends = []
    for eid in edges:
        if not graph.has_edge(eid) or eid not in graph.fa_edges:
            return False
        e = graph.edge(eid)
        if center not in (e.origin, e.terminus) or e.is_loop:
            return False
        other = e.other_end(center)
        if graph.vertex(other).kind != VertexKind.ZTYPE:
            return False
        ends.append(other)
    if len(set(ends)) != len(ends) or len(set(edges)) != len(edges):
        return False
    if center == graph.base and graph.fa_graph.degree(center) == 1 and len(edges) > 1:
        return False
    return True


def _disjoint(first: Subgraph, second: Subgraph, graph: GraphOfGroups, mode: str) -> bool:
    shared = first.vertices & second.vertices
    if mode == "lenient":
        return all(graph.vertex(v).kind == VertexKind.ZTYPE for v in shared) and not (first.edges & second.edges)
    return not shared


def _cover_is_valid(graph: GraphOfGroups, assignment: Dict[str, set], mode: str) -> bool:
    closures = []
    for center, edges in assignment.items():
        if not is_envelope(graph, center, edges):
            return False
        closures.append(Subgraph.of(graph, edges, [center]))
    return all(_disjoint(a, b, graph, mode) for a, b in combinations(closures, 2))


def envelope_cover(graph: GraphOfGroups, target: Subgraph, disjointness: str = "vertex") -> Optional[EnvelopeCover]:
    """
    Cover a closed subgraph by pairwise disjoint envelopes of rigid vertices.

    Each edge's center is forced to its non-ztype endpoint. Ztype vertices
    of the target without target edges are attached through an extra edge
    to some adjacent rigid center, by exhaustive backtracking.

    Args:
        graph: The decomposition.
        target: Closed subgraph.
        disjointness: "vertex" (closures share no vertex) or "lenient"
            (closures may share ztype vertices).

    Returns:
        EnvelopeCover or None.
    """
    if disjointness not in DISJOINTNESS_MODES:
        raise ValueError(f"unknown disjointness mode {disjointness!r}")

    for vid in target.vertices:
        if graph.vertex(vid).kind == VertexKind.SURFACE:
            logger.debug("envelope_cover: surface vertex %s", vid)
            return None

    assignment: Dict[str, set] = {}
    covered_ztypes = set()
    for eid in sorted(target.edges):
        e = graph.edge(eid)
        if e.is_trivial or eid not in graph.fa_edges:
            logger.debug("envelope_cover: %s cannot lie in an envelope", eid)
            return None
        ends = [x for x in (e.origin, e.terminus) if graph.vertex(x).kind != VertexKind.ZTYPE]
        if len(ends) != 1 or e.is_loop:
            return None
        center = ends[0]
        assignment.setdefault(center, set()).add(eid)
        covered_ztypes.add(e.other_end(center))

    for vid in target.vertices:
        if graph.vertex(vid).kind != VertexKind.ZTYPE:
            assignment.setdefault(vid, set())

    pending = sorted(v for v in target.vertices
                     if graph.vertex(v).kind == VertexKind.ZTYPE and v not in covered_ztypes)

    def options(z: str) -> List[Tuple[str, str]]:
        found = []
        for e in graph.incident_edges(z):
            if e.id not in graph.fa_edges or e.is_loop:
                continue
            center = e.other_end(z)
            if graph.vertex(center).kind in (VertexKind.RIGID, VertexKind.BASE):
                found.append((center, e.id))
        return sorted(found)

    def search(index: int) -> Optional[Dict[str, set]]:
        if index == len(pending):
            return assignment if _cover_is_valid(graph, assignment, disjointness) else None
        for center, eid in options(pending[index]):
            fresh = center not in assignment
            assignment.setdefault(center, set()).add(eid)
            found = search(index + 1)
            if found is not None:
                return found
            assignment[center].discard(eid)
            if fresh:
                del assignment[center]
        return None

    result = search(0)
    if result is None:
        logger.debug("envelope_cover: no cover for %s", target.describe())
        return None
    envelopes = tuple(Envelope(center, frozenset(edges)) for center, edges in sorted(result.items()))
    return EnvelopeCover(envelopes)
