"""
graph_of_groups.py
Graphs of groups with cyclic or trivial edge groups over a free ambient group.

Presentation conventions:
- tree edges carry one generator g lying in both endpoint groups;
- a non-tree edge e from o to t carries a stable letter s with g in G_o and
  s^-1.g.s in G_t (the terminus-side generator);
- an element is a closed edge path at the base vertex, g_0 e_1 g_1 ... e_k g_k,
  evaluated by inserting s (forward) or s^-1 (backward) for non-tree edges.
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .automata import SubgroupAutomaton, fold_build
from .common.errors import GraphOfGroupsError, WordError
from .words import (
    Word,
    common_root_exponents,
    conjugate,
    gcd_all,
    inverse,
    power,
    power_of,
    product,
    reduce_word,
    root,
)

logger = logging.getLogger(__name__)

Step = Tuple[str, int]


class VertexKind(str, Enum):
    BASE = "base"
    RIGID = "rigid"
    SURFACE = "surface"
    ZTYPE = "ztype"


class EdgeClass(str, Enum):
    CYCLIC = "cyclic"
    TRIVIAL = "trivial"


# ─── Data ─────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class VertexData:
    id: str
    kind: VertexKind
    generators: Tuple[Word, ...]

    @cached_property
    def group(self) -> SubgroupAutomaton:
        return fold_build(self.generators)

    @property
    def rank(self) -> int:
        return self.group.rank_index()[0]

    def contains(self, word: Word) -> bool:
        return self.group.contains(word)


@dataclass(frozen=True)
class EdgeData:
    id: str
    origin: str
    terminus: str
    edge_class: EdgeClass
    generator: Word = ""
    in_tree: bool = True
    stable_letter: Word = ""

    @property
    def is_trivial(self) -> bool:
        return self.edge_class == EdgeClass.TRIVIAL

    @property
    def is_loop(self) -> bool:
        return self.origin == self.terminus

    @property
    def terminus_generator(self) -> Word:
        if self.in_tree or not self.generator:
            return self.generator
        return product(inverse(self.stable_letter), self.generator, self.stable_letter)

    def side_generator(self, direction: int) -> Word:
        """Edge group generator seen from the end a step in `direction` arrives at."""
        return self.terminus_generator if direction > 0 else self.generator

    def generator_at(self, vertex: str) -> Word:
        if vertex == self.origin:
            return self.generator
        if vertex == self.terminus:
            return self.terminus_generator
        raise GraphOfGroupsError(f"edge {self.id} is not incident to {vertex}")

    def other_end(self, vertex: str) -> str:
        return self.terminus if vertex == self.origin else self.origin

    def letter(self, direction: int) -> Word:
        """Word contributed by traversing the edge in `direction`."""
        if self.in_tree:
            return ""
        return self.stable_letter if direction > 0 else inverse(self.stable_letter)


def step_source(edge: EdgeData, direction: int) -> str:
    return edge.origin if direction > 0 else edge.terminus


def step_target(edge: EdgeData, direction: int) -> str:
    return edge.terminus if direction > 0 else edge.origin


@dataclass(frozen=True)
class GraphOfGroups:
    """
    The decomposition: vertices, edges, spanning tree (via `in_tree`), base
    vertex and the vertex set of the F_A-subgraph. Structural problems raise
    GraphOfGroupsError on construction.
    """
    basis: Tuple[str, ...]
    vertices: Tuple[VertexData, ...]
    edges: Tuple[EdgeData, ...]
    base: str
    fa_vertices: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise GraphOfGroupsError("duplicate vertex ids")
        edge_ids = [e.id for e in self.edges]
        if len(set(edge_ids)) != len(edge_ids):
            raise GraphOfGroupsError("duplicate edge ids")
        bases = [v.id for v in self.vertices if v.kind == VertexKind.BASE]
        if len(bases) != 1:
            raise GraphOfGroupsError(f"expected exactly one base vertex, found {len(bases)}")
        if bases[0] != self.base:
            raise GraphOfGroupsError(f"base {self.base!r} is not the vertex of kind base ({bases[0]!r})")
        known = set(ids)
        for e in self.edges:
            for end in (e.origin, e.terminus):
                if end not in known:
                    raise GraphOfGroupsError(f"edge {e.id} has dangling endpoint {end!r}")
            if e.is_trivial and e.generator:
                raise GraphOfGroupsError(f"trivial edge {e.id} carries a generator")
            if not e.is_trivial and not e.generator:
                raise GraphOfGroupsError(f"cyclic edge {e.id} has no generator")
            if e.in_tree and e.stable_letter:
                raise GraphOfGroupsError(f"tree edge {e.id} carries a stable letter")
            if not e.in_tree and not e.stable_letter:
                raise GraphOfGroupsError(f"non-tree edge {e.id} has no stable letter")
            if e.in_tree and e.is_loop:
                raise GraphOfGroupsError(f"loop {e.id} cannot be a spanning-tree edge")
        unknown_fa = set(self.fa_vertices) - known
        if unknown_fa:
            raise GraphOfGroupsError(f"F_A-subgraph names unknown vertices {sorted(unknown_fa)}")
        tree = self.tree_graph
        if tree.number_of_edges() != len(ids) - 1 or not nx.is_connected(tree):
            raise GraphOfGroupsError("tree edges do not form a spanning tree")

    # ─── Lookups ──────────────────────────────────────────────────────────────

    @cached_property
    def _vertex_map(self) -> Dict[str, VertexData]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def _edge_map(self) -> Dict[str, EdgeData]:
        return {e.id: e for e in self.edges}

    def vertex(self, vertex_id: str) -> VertexData:
        try:
            return self._vertex_map[vertex_id]
        except KeyError:
            raise GraphOfGroupsError(f"unknown vertex {vertex_id!r}") from None

    def edge(self, edge_id: str) -> EdgeData:
        try:
            return self._edge_map[edge_id]
        except KeyError:
            raise GraphOfGroupsError(f"unknown edge {edge_id!r}") from None

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edge_map

    def has_vertex(self, vertex_id: str) -> bool:
        return vertex_id in self._vertex_map

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def vertex_ids(self) -> Tuple[str, ...]:
        return tuple(v.id for v in self.vertices)

    @property
    def edge_ids(self) -> Tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    def incident_edges(self, vertex_id: str) -> List[EdgeData]:
        return [e for e in self.edges if vertex_id in (e.origin, e.terminus)]

    @cached_property
    def fa_edges(self) -> FrozenSet[str]:
        """Cyclic edges with both endpoints in the F_A-subgraph."""
        return frozenset(
            e.id for e in self.edges
            if not e.is_trivial and e.origin in self.fa_vertices and e.terminus in self.fa_vertices
        )

    # ─── Graph views ──────────────────────────────────────────────────────────

    @cached_property
    def tree_graph(self) -> nx.Graph:
        tree = nx.Graph()
        tree.add_nodes_from(v.id for v in self.vertices)
        for e in self.edges:
            if e.in_tree:
                tree.add_edge(e.origin, e.terminus, id=e.id)
        return tree

    @cached_property
    def fa_graph(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(v.id for v in self.vertices if v.id in self.fa_vertices)
        for e in self.edges:
            if e.id in self.fa_edges:
                graph.add_edge(e.origin, e.terminus, key=e.id)
        return graph

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        for v in self.vertices:
            graph.add_node(v.id, kind=v.kind.value)
        for e in self.edges:
            graph.add_edge(e.origin, e.terminus, key=e.id, edge_class=e.edge_class.value)
        return graph

    def tree_path(self, start: str, end: str) -> List[Step]:
        """Steps of the spanning-tree path from start to end."""
        if start == end:
            return []
        nodes = nx.shortest_path(self.tree_graph, start, end)
        steps = []
        for a, b in zip(nodes, nodes[1:]):
            edge = self.edge(self.tree_graph[a][b]["id"])
            steps.append((edge.id, 1 if edge.origin == a else -1))
        return steps

    # ─── Splitting generators ─────────────────────────────────────────────────

    @cached_property
    def splitting_generators(self) -> Tuple[Tuple[str, str, Word], ...]:
        """(kind, owner id, word): vertex generators, then stable letters."""
        gens: List[Tuple[str, str, Word]] = []
        for v in self.vertices:
            gens.extend(("vertex", v.id, g) for g in v.generators if reduce_word(g))
        for e in self.edges:
            if not e.in_tree:
                gens.append(("stable", e.id, e.stable_letter))
        return tuple(gens)

    @cached_property
    def splitting_automaton(self) -> SubgroupAutomaton:
        return fold_build([w for _, _, w in self.splitting_generators], self.basis)

    @cached_property
    def fa_automaton(self) -> SubgroupAutomaton:
        gens = [g for v in self.vertices if v.id in self.fa_vertices for g in v.generators]
        gens += [e.stable_letter for e in self.edges if e.id in self.fa_edges and not e.in_tree]
        return fold_build(gens, self.basis)

    def replace(self, **changes) -> "GraphOfGroups":
        return replace(self, **changes)


# ─── Normal forms ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class NormalForm:
    """Closed edge path at the base: elements[i] sits at vertices[i]."""
    elements: Tuple[Word, ...]
    steps: Tuple[Step, ...]
    vertices: Tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def is_elliptic(self) -> bool:
        return not self.steps

    def to_dict(self) -> dict:
        return {
            "elements": list(self.elements),
            "steps": [{"edge": eid, "direction": d} for eid, d in self.steps],
            "vertices": list(self.vertices),
        }


@dataclass(frozen=True)
class ProjectedPath:
    """Image of the geodesic [v_A, g.v_A]; translates[i] marks base-vertex hits."""
    steps: Tuple[Step, ...]
    vertices: Tuple[str, ...]
    translates: Tuple[bool, ...]

    @property
    def interior_translates(self) -> List[int]:
        return [i for i in range(1, len(self.vertices) - 1) if self.translates[i]]

    @property
    def edge_ids(self) -> FrozenSet[str]:
        return frozenset(eid for eid, _ in self.steps)

    def to_dict(self) -> dict:
        return {
            "steps": [{"edge": eid, "direction": d} for eid, d in self.steps],
            "vertices": list(self.vertices),
            "interior_translates": self.interior_translates,
        }


def in_edge_group(graph: GraphOfGroups, step: Step, element: Word) -> bool:
    """Whether `element`, at the vertex `step` arrives at, lies in that edge group."""
    edge = graph.edge(step[0])
    if edge.is_trivial:
        return not element
    return power_of(element, edge.side_generator(step[1])) is not None


class _PathReducer:
    """Stack reduction of an edge-path word; pops each pinch as it appears."""

    def __init__(self, graph: GraphOfGroups):
        self.graph = graph
        self.stack: List[list] = [[None, "", graph.base]]
        self.pinches = 0

    def multiply(self, word: Word) -> None:
        top = self.stack[-1]
        top[1] = product(top[1], word)

    def push(self, step: Step) -> None:
        edge = self.graph.edge(step[0])
        top = self.stack[-1]
        if step_source(edge, step[1]) != top[2]:
            raise GraphOfGroupsError(f"step {step} does not leave vertex {top[2]}")
        previous = top[0]
        if (previous is not None and previous[0] == step[0] and previous[1] == -step[1]
                and in_edge_group(self.graph, previous, top[1])):
            self.stack.pop()
            carried = conjugate(edge.letter(previous[1]), top[1])
            self.multiply(carried)
            self.pinches += 1
            return
        self.stack.append([step, "", step_target(edge, step[1])])

    def walk(self, steps: Iterable[Step]) -> None:
        for step in steps:
            self.push(step)

    def result(self) -> NormalForm:
        return NormalForm(
            elements=tuple(entry[1] for entry in self.stack),
            steps=tuple(entry[0] for entry in self.stack[1:]),
            vertices=tuple(entry[2] for entry in self.stack),
        )


def normal_form(graph: GraphOfGroups, g: Word) -> NormalForm:
    """
    Reduced splitting-relative normal form of g.

    Args:
        graph: A decomposition whose splitting generators generate the ambient group.
        g: Ambient word.

    Returns:
        NormalForm

    Raises:
        GraphOfGroupsError: If g cannot be expressed over the splitting
            generators (the decomposition does not generate).
    """
    g = reduce_word(g)
    expression = graph.splitting_automaton.express(g)
    if expression is None:
        raise GraphOfGroupsError(f"internal: {g!r} is not in the group generated by the splitting")
    gens = graph.splitting_generators
    reducer = _PathReducer(graph)
    for index, sign in expression:
        kind, owner, word = gens[index]
        if kind == "vertex":
            reducer.walk(graph.tree_path(graph.base, owner))
            reducer.multiply(word if sign > 0 else inverse(word))
            reducer.walk(graph.tree_path(owner, graph.base))
        else:
            edge = graph.edge(owner)
            start, end = (edge.origin, edge.terminus) if sign > 0 else (edge.terminus, edge.origin)
            reducer.walk(graph.tree_path(graph.base, start))
            reducer.push((owner, sign))
            reducer.walk(graph.tree_path(end, graph.base))
    nf = reducer.result()
    logger.debug("normal_form(%r): %d factors, %d pinches, length %d",
                 g, len(expression), reducer.pinches, nf.length)
    return nf


def evaluate_path(graph: GraphOfGroups, elements: Sequence[Word], steps: Sequence[Step]) -> Word:
    """Multiply out g_0 s(e_1) g_1 ... without membership checks."""
    parts = [elements[0]]
    for (eid, direction), element in zip(steps, elements[1:]):
        parts.append(graph.edge(eid).letter(direction))
        parts.append(element)
    return product(*parts)


def eval_normal_form(graph: GraphOfGroups, nf: NormalForm) -> Word:
    """
    Ambient word of a normal form.

    Raises:
        GraphOfGroupsError: If the path is broken or a factor is outside its vertex group.
    """
    if len(nf.elements) != len(nf.steps) + 1:
        raise GraphOfGroupsError("normal form needs one more element than steps")
    vertex = graph.base
    vertices = [vertex]
    for eid, direction in nf.steps:
        edge = graph.edge(eid)
        if step_source(edge, direction) != vertex:
            raise GraphOfGroupsError(f"step ({eid}, {direction}) does not leave {vertex}")
        vertex = step_target(edge, direction)
        vertices.append(vertex)
    if vertex != graph.base:
        raise GraphOfGroupsError("normal form path does not return to the base vertex")
    for element, v in zip(nf.elements, vertices):
        if not graph.vertex(v).contains(element):
            raise GraphOfGroupsError(f"factor {element!r} is not in the group of vertex {v}")
    return evaluate_path(graph, nf.elements, nf.steps)


def find_pinch(graph: GraphOfGroups, nf: NormalForm) -> Optional[int]:
    """Index i of a pinch e_i g_i e_{i+1} with e_{i+1} the reverse of e_i, or None."""
    for i in range(1, len(nf.steps)):
        before, after = nf.steps[i - 1], nf.steps[i]
        if before[0] == after[0] and before[1] == -after[1] and in_edge_group(graph, before, nf.elements[i]):
            return i
    return None


def base_path(graph: GraphOfGroups, g: Word) -> ProjectedPath:
    nf = normal_form(graph, g)
    return ProjectedPath(
        steps=nf.steps,
        vertices=nf.vertices,
        translates=tuple(v == graph.base for v in nf.vertices),
    )


# ─── Validation ───────────────────────────────────────────────────────────────

CHECK_NAMES = (
    "trivial_edges_at_base",
    "fa_bipartite",
    "edge_generators_in_groups",
    "generates_ambient",
    "cylinder_stars",
    "fa_subgraph",
    "ztype_rank",
)


@dataclass
class ValidationReport:
    checks: Dict[str, bool]
    details: Dict[str, List[str]]
    warnings: List[str]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [
                {"name": name, "passed": passed, "details": self.details.get(name, [])}
                for name, passed in self.checks.items()
            ],
            "warnings": list(self.warnings),
        }


def validate_normalized(graph: GraphOfGroups) -> ValidationReport:
    """
    Check that the decomposition is normalized.

    Structural errors were already raised when the graph was built; every
    semantic condition here is reported rather than raised.
    """
    details: Dict[str, List[str]] = {name: [] for name in CHECK_NAMES}

    for e in graph.edges:
        if e.is_trivial and graph.base not in (e.origin, e.terminus):
            details["trivial_edges_at_base"].append(f"{e.id} does not touch base vertex {graph.base}")

    for eid in sorted(graph.fa_edges):
        e = graph.edge(eid)
        ztypes = [graph.vertex(x).kind == VertexKind.ZTYPE for x in (e.origin, e.terminus)]
        if ztypes[0] == ztypes[1]:
            details["fa_bipartite"].append(f"{e.id} does not join a ztype vertex to a non-ztype vertex")

    for e in graph.edges:
        if e.is_trivial:
            continue
        if not graph.vertex(e.origin).contains(e.generator):
            details["edge_generators_in_groups"].append(f"{e.id}: {e.generator!r} not in {e.origin}")
        if not graph.vertex(e.terminus).contains(e.terminus_generator):
            details["edge_generators_in_groups"].append(
                f"{e.id}: {e.terminus_generator!r} not in {e.terminus}")

    rank, index = graph.splitting_automaton.rank_index()
    if (rank, index) != (graph.rank, 1):
        details["generates_ambient"].append(
            f"splitting generators give rank {rank}, index {index}; expected rank {graph.rank}, index 1")

    for v in graph.vertices:
        if v.kind != VertexKind.ZTYPE or v.id not in graph.fa_vertices:
            continue
        sides = [(e.id, e.generator_at(v.id)) for e in graph.incident_edges(v.id) if e.id in graph.fa_edges]
        roots = {}
        for eid, g in sides:
            r, _ = root(g)
            roots[eid] = min(r, inverse(r))
        if len(set(roots.values())) > 1:
            details["cylinder_stars"].append(
                f"edges at {v.id} are not commensurable: {', '.join(sorted(roots))}")

    if graph.base not in graph.fa_vertices:
        details["fa_subgraph"].append(f"base vertex {graph.base} is not in the F_A-subgraph")
    elif not nx.is_connected(graph.fa_graph):
        details["fa_subgraph"].append("F_A-subgraph is not connected")

    for v in graph.vertices:
        if v.kind == VertexKind.ZTYPE and v.rank != 1:
            details["ztype_rank"].append(f"ztype vertex {v.id} has rank {v.rank}")

    warnings = []
    if graph.base in graph.fa_vertices:
        fa_degree = graph.fa_graph.degree(graph.base)
        if fa_degree == 1 and graph.vertex(graph.base).rank == 1:
            warnings.append(
                f"base vertex {graph.base} is a pendant cyclic vertex; "
                "the pendant edge placement is accepted as given")
    for message in warnings:
        logger.warning(message)

    checks = {name: not details[name] for name in CHECK_NAMES}
    report = ValidationReport(checks=checks, details={k: v for k, v in details.items() if v}, warnings=warnings)
    logger.info("validate_normalized: %s", "ok" if report.ok else
                ", ".join(name for name, passed in checks.items() if not passed))
    return report


# ─── Surgery ──────────────────────────────────────────────────────────────────

def _merged_id(*ids: str) -> str:
    members = set()
    for vid in ids:
        members.update(vid.split("+"))
    return "+".join(sorted(members))


def _dedupe(words: Iterable[Word]) -> Tuple[Word, ...]:
    seen = []
    for w in words:
        w = reduce_word(w)
        if w and w not in seen:
            seen.append(w)
    return tuple(seen)


def _merge_vertices(graph: GraphOfGroups, members: Sequence[str], extra_generators: Sequence[Word] = (),
                    drop_edges: Iterable[str] = (), new_edges: Sequence[EdgeData] = ()) -> GraphOfGroups:
    """Identify `members` into one vertex; edges are redirected, `drop_edges` removed."""
    members = list(dict.fromkeys(members))
    merged = _merged_id(*members)
    datas = [graph.vertex(m) for m in members]
    if any(v.kind == VertexKind.BASE for v in datas):
        kind = VertexKind.BASE
    elif len(datas) == 1:
        kind = datas[0].kind
    else:
        kind = VertexKind.RIGID
    gens = _dedupe([g for v in datas for g in v.generators] + list(extra_generators))
    new_vertex = VertexData(merged, kind, gens)

    vertices = []
    for v in graph.vertices:
        if v.id in members:
            if v.id == members[0]:
                vertices.append(new_vertex)
        else:
            vertices.append(v)

    dropped = set(drop_edges)
    edges = []
    inserted = False
    for e in graph.edges:
        if e.id in dropped:
            if not inserted:
                edges.extend(new_edges)
                inserted = True
            continue
        origin = merged if e.origin in members else e.origin
        terminus = merged if e.terminus in members else e.terminus
        edges.append(replace(e, origin=origin, terminus=terminus))
    if not inserted:
        edges.extend(new_edges)

    fa = set(graph.fa_vertices)
    if fa & set(members):
        fa -= set(members)
        fa.add(merged)
    base = merged if graph.base in members else graph.base
    return GraphOfGroups(graph.basis, tuple(vertices), tuple(edges), base, frozenset(fa))


def retree(graph: GraphOfGroups, edge_id: str) -> GraphOfGroups:
    """
    Exchange a non-tree edge into the spanning tree.

    The first tree edge f on the tree path between the endpoints leaves the
    tree; the vertex groups on the side of f away from the base are
    conjugated so that the edge relation of `edge_id` becomes an identity.
    """
    e = graph.edge(edge_id)
    if e.in_tree:
        return graph
    if e.is_loop:
        raise GraphOfGroupsError(f"loop {edge_id} cannot join the spanning tree")
    f_id = graph.tree_path(e.origin, e.terminus)[0][0]
    f = graph.edge(f_id)
    cut = graph.tree_graph.copy()
    cut.remove_edge(f.origin, f.terminus)
    base_side = nx.node_connected_component(cut, graph.base)
    far = f.terminus if f.origin in base_side else f.origin
    side = nx.node_connected_component(cut, far)
    c = e.stable_letter if e.terminus in side else inverse(e.stable_letter)

    vertices = tuple(
        replace(v, generators=tuple(conjugate(c, g) for g in v.generators)) if v.id in side else v
        for v in graph.vertices
    )
    edges = []
    for h in graph.edges:
        o_in, t_in = h.origin in side, h.terminus in side
        if h.in_tree and h.id != f_id:
            if o_in and t_in:
                h = replace(h, generator=conjugate(c, h.generator))
            edges.append(h)
            continue
        s = h.stable_letter if not h.in_tree else ""
        g = conjugate(c, h.generator) if o_in and h.generator else h.generator
        if o_in:
            s = product(c, s)
        if t_in:
            s = product(s, inverse(c))
        if h.id == edge_id:
            if s:
                raise GraphOfGroupsError(f"internal: retree left stable letter {s!r} on {edge_id}")
            edges.append(replace(h, generator=g, in_tree=True, stable_letter=""))
        else:
            edges.append(replace(h, generator=g, in_tree=False, stable_letter=s))
    logger.debug("retree %s: %s leaves the tree, %d vertices conjugated by %r", edge_id, f_id, len(side), c)
    return graph.replace(vertices=vertices, edges=tuple(edges))


def collapse_edges(graph: GraphOfGroups, edge_ids: Sequence[str]) -> GraphOfGroups:
    """
    Collapse edges to points, one at a time.

    Loops add their stable letter to the vertex group; non-tree edges are
    first exchanged into the tree, then contracted.
    """
    current = graph
    for eid in edge_ids:
        e = current.edge(eid)
        if e.is_loop:
            v = current.vertex(e.origin)
            new_vertex = replace(v, generators=_dedupe(list(v.generators) + [e.stable_letter]))
            current = current.replace(
                vertices=tuple(new_vertex if x.id == v.id else x for x in current.vertices),
                edges=tuple(x for x in current.edges if x.id != eid),
            )
            continue
        if not e.in_tree:
            current = retree(current, eid)
            e = current.edge(eid)
        current = _merge_vertices(current, [e.origin, e.terminus], drop_edges=[eid])
        logger.debug("collapsed %s", eid)
    return current


def fold_cylinder_edges(graph: GraphOfGroups, parts: Sequence[Sequence[str]]) -> GraphOfGroups:
    """
    Fold each part (tree edges sharing a ztype endpoint, with commensurable
    generators) into one edge, merging the other endpoints.

    Raises:
        GraphOfGroupsError: If a part violates the precondition.
    """
    used = set()
    for part in parts:
        for eid in part:
            if eid in used:
                raise GraphOfGroupsError(f"edge {eid} appears in two parts")
            used.add(eid)

    current = graph
    for part in parts:
        part = list(part)
        edges = [current.edge(eid) for eid in part]
        if len(edges) < 2:
            continue
        for e in edges:
            if e.is_trivial or not e.in_tree:
                raise GraphOfGroupsError(f"edge {e.id} must be a cyclic tree edge to be folded")
        shared = set.intersection(*({e.origin, e.terminus} for e in edges))
        centers = [x for x in shared if current.vertex(x).kind == VertexKind.ZTYPE]
        if len(centers) != 1:
            raise GraphOfGroupsError(f"edges {part} do not share a single ztype endpoint")
        z = centers[0]
        try:
            rho, exponents = common_root_exponents([e.generator_at(z) for e in edges])
        except WordError as exc:
            raise GraphOfGroupsError(f"edges {part} are not commensurable: {exc}") from None
        others = [e.other_end(z) for e in edges]
        merged = _merged_id(*others)
        first = edges[0]
        generator = power(rho, gcd_all(exponents))
        origin, terminus = (z, merged) if first.origin == z else (merged, z)
        folded = EdgeData("+".join(sorted(part)), origin, terminus, EdgeClass.CYCLIC, generator, True, "")
        current = _merge_vertices(current, others, drop_edges=part, new_edges=[folded])
        logger.debug("folded %s at %s into %s", part, z, folded.id)
    return current


def restrict_to_fa(graph: GraphOfGroups) -> GraphOfGroups:
    """The F_A-subgraph as a graph of groups of its own."""
    vertices = tuple(v for v in graph.vertices if v.id in graph.fa_vertices)
    edges = tuple(e for e in graph.edges if e.id in graph.fa_edges)
    if graph.base not in graph.fa_vertices:
        raise GraphOfGroupsError("the F_A-subgraph does not contain the base vertex")
    return GraphOfGroups(graph.basis, vertices, edges, graph.base, frozenset(v.id for v in vertices))


def same_subgroup(a: SubgroupAutomaton, b: SubgroupAutomaton) -> bool:
    return all(b.contains(g) for g in a.generators) and all(a.contains(g) for g in b.generators)


def _edge_group_key(generator: Word) -> FrozenSet[Word]:
    return frozenset((generator, inverse(generator))) if generator else frozenset()


def _incidence_graph(graph: GraphOfGroups) -> nx.Graph:
    incidence = nx.Graph()
    for v in graph.vertices:
        incidence.add_node(("v", v.id), role="vertex", kind=v.kind, group=v.group,
                           fa=v.id in graph.fa_vertices)
    for e in graph.edges:
        incidence.add_node(("e", e.id), role="edge", edge_class=e.edge_class,
                           key=_edge_group_key(e.generator), loop=e.is_loop)
        incidence.add_edge(("e", e.id), ("v", e.origin))
        incidence.add_edge(("e", e.id), ("v", e.terminus))
    return incidence


def _node_match(a: dict, b: dict) -> bool:
    if a["role"] != b["role"]:
        return False
    if a["role"] == "vertex":
        return a["kind"] == b["kind"] and a["fa"] == b["fa"] and same_subgroup(a["group"], b["group"])
    return a["edge_class"] == b["edge_class"] and a["key"] == b["key"] and a["loop"] == b["loop"]


def isomorphic(first: GraphOfGroups, second: GraphOfGroups) -> bool:
    """
    Isomorphism of underlying graphs respecting kinds, vertex groups (as
    subgroups) and edge groups. Edge orientation is ignored.
    """
    if len(first.vertices) != len(second.vertices) or len(first.edges) != len(second.edges):
        return False
    return nx.is_isomorphic(_incidence_graph(first), _incidence_graph(second), node_match=_node_match)
