"""
engine.py
Independence engine: the block-intersection criterion, chain certificates
and their verifier, automorphism witnesses, and amalgamation of two
decompositions along a shared F_A-subgraph.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from string import ascii_lowercase
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .automorphisms import Automorphism, dehn_twist
from .common.errors import GraphOfGroupsError, HypothesisError, UnsupportedError
from .cylinders import EnvelopeCover, cylinders, envelope_cover
from .graph_of_groups import EdgeData, GraphOfGroups, VertexData, VertexKind, same_subgroup
from .minimal import Block, SandwichTerm, Subgraph, blocks, minimal_subgraph, sandwich_decompose
from .words import Word, product, reduce_word, simultaneous_conjugacy

logger = logging.getLogger(__name__)

SIDES = ("b", "c")


# ─── Criterion ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class BlockPair:
    b_block: str
    c_block: str
    intersection: Subgraph
    cover: Optional[EnvelopeCover]

    @property
    def covered(self) -> bool:
        return self.cover is not None

    def to_dict(self) -> dict:
        return {
            "b_block": self.b_block,
            "c_block": self.c_block,
            "intersection": self.intersection.to_dict(),
            "covered": self.covered,
            "cover": self.cover.to_dict() if self.cover else None,
        }


@dataclass(frozen=True)
class Verdict:
    criterion_met: bool
    pairs: Tuple[BlockPair, ...]
    certificate: Optional["ChainCertificate"] = None
    failures: Tuple[Tuple[str, str], ...] = ()
    b_blocks: Tuple[Block, ...] = ()
    c_blocks: Tuple[Block, ...] = ()

    def to_dict(self) -> dict:
        return {
            "criterion_met": self.criterion_met,
            "pairs": [pair.to_dict() for pair in self.pairs],
            "failures": [{"b_block": b, "c_block": c} for b, c in self.failures],
            "blocks": {
                "B": [block.to_dict() for block in self.b_blocks],
                "C": [block.to_dict() for block in self.c_blocks],
            },
            "certificate": self.certificate.to_dict() if self.certificate else None,
        }


def _side_gens(params: Sequence[Word], words: Sequence[Word]) -> List[Word]:
    return [reduce_word(w) for w in list(params) + list(words)]


def check_criterion(graph: GraphOfGroups, params: Sequence[Word], b: Sequence[Word], c: Sequence[Word],
                    saturation: int = 1, disjointness: str = "vertex") -> Verdict:
    """
    Decide the block-intersection criterion for b and c over A.

    Every block of A∪b must meet every block of A∪c in a subgraph that is
    covered by pairwise disjoint envelopes.

    Args:
        graph: Normalized decomposition relative to A.
        params: Generators of A.
        b: First tuple.
        c: Second tuple.
        saturation: Longest generator product fed into the blocks.
        disjointness: Envelope disjointness mode.

    Returns:
        Verdict. When the criterion holds it carries the greedy chain
        certificate, which is None only if the greedy search stalled.
    """
    b_blocks = blocks(graph, _side_gens(params, b), saturation, prefix="B")
    c_blocks = blocks(graph, _side_gens(params, c), saturation, prefix="C")
    pairs = []
    failures = []
    for x in b_blocks:
        for y in c_blocks:
            meet = x.subgraph & y.subgraph
            cover = envelope_cover(graph, meet, disjointness)
            pairs.append(BlockPair(x.id, y.id, meet, cover))
            if cover is None:
                failures.append((x.id, y.id))
    certificate = None if failures else chain_certificate(graph, params, b, c, saturation, disjointness)
    verdict = Verdict(not failures, tuple(pairs), certificate, tuple(failures), tuple(b_blocks), tuple(c_blocks))
    logger.info("criterion %s: %d b-blocks, %d c-blocks, %d failing pairs",
                "met" if verdict.criterion_met else "not met", len(b_blocks), len(c_blocks), len(failures))
    return verdict


# ─── Chain certificates ───────────────────────────────────────────────────────

@dataclass(frozen=True)
class ChainCertificate:
    """
    Filtration from the base vertex to the whole graph with each side's
    terms split into parts.

    `leading` names the side whose part i lives in the odd stratum 2i+1;
    the other side's part i lives in stratum 2i.
    """
    chain: Tuple[Subgraph, ...]
    leading: str
    block_parts: Dict[str, int]
    term_parts: Dict[str, Tuple[Tuple[Word, ...], ...]]
    params: Tuple[Word, ...]
    b: Tuple[Word, ...]
    c: Tuple[Word, ...]
    saturation: int
    blocks: Dict[str, Subgraph] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "leading": self.leading,
            "chain": [stratum.to_dict() for stratum in self.chain],
            "partitions": {
                "B": [list(part) for part in self.term_parts["b"]],
                "C": [list(part) for part in self.term_parts["c"]],
            },
            "block_parts": dict(sorted(self.block_parts.items())),
            "saturation": self.saturation,
        }


def _connect_fa(graph: GraphOfGroups, sub: Subgraph) -> Subgraph:
    """Join the F_A components of `sub` to the base component by shortest F_A paths."""
    if graph.base not in graph.fa_vertices:
        return sub
    fa = graph.fa_graph
    while True:
        part = sub.fa_part(graph).as_networkx(graph)
        part.add_node(graph.base)
        anchored = nx.node_connected_component(part, graph.base)
        stray = sorted(set(part.nodes) - anchored)
        if not stray:
            return sub
        best = None
        for v in stray:
            try:
                length, path = nx.multi_source_dijkstra(fa, set(anchored), target=v)
            except nx.NetworkXNoPath:
                continue
            if best is None or (length, v) < (best[0], best[1]):
                best = (length, v, path)
        if best is None:
            logger.debug("F_A components of %s cannot reach the base", sub.describe())
            return sub
        path = best[2]
        edges = [min(fa[a][b]) for a, b in zip(path, path[1:])]
        sub = sub | Subgraph.of(graph, edges, path)


def _has_cover(graph: GraphOfGroups, target: Subgraph, mode: str) -> bool:
    return envelope_cover(graph, target, mode) is not None


class _ChainBuilder:
    """Greedy alternating construction of a chain certificate."""

    def __init__(self, graph: GraphOfGroups, side_blocks: Dict[str, List[Block]], mode: str):
        self.graph = graph
        self.mode = mode
        self.pending: Dict[str, List[Block]] = {side: list(side_blocks[side]) for side in SIDES}

    def _acceptable(self, block: Block, prev: Subgraph, current: Subgraph,
                    skip: Sequence[Block]) -> Optional[Subgraph]:
        if not _has_cover(self.graph, block.subgraph & prev, self.mode):
            return None
        tentative = _connect_fa(self.graph, current | block.subgraph)
        for side in SIDES:
            for other in self.pending[side]:
                if other is block or other in skip:
                    continue
                if not _has_cover(self.graph, other.subgraph & tentative, self.mode):
                    return None
        return tentative

    def cheapest(self, side: str, prev: Subgraph) -> Optional[int]:
        costs = []
        for block in self.pending[side]:
            tentative = self._acceptable(block, prev, prev, ())
            if tentative is not None:
                costs.append(len(tentative.edges - prev.edges))
        return min(costs) if costs else None

    def step(self, side: str, prev: Subgraph) -> Tuple[Subgraph, List[Block]]:
        current = prev
        accepted: List[Block] = []
        while True:
            ranked = []
            for block in self.pending[side]:
                if block in accepted:
                    continue
                grown = _connect_fa(self.graph, current | block.subgraph)
                ranked.append((len(grown.edges - current.edges), block.id, block))
            ranked.sort(key=lambda item: (item[0], item[1]))
            for _, _, block in ranked:
                tentative = self._acceptable(block, prev, current, accepted)
                if tentative is not None:
                    accepted.append(block)
                    current = tentative
                    break
            else:
                return current, accepted


def _block_of_term(term: SandwichTerm, side_blocks: Sequence[Block]) -> Optional[Block]:
    for block in side_blocks:
        if term in block.member_terms:
            return block
    return None


def _term_parts(graph: GraphOfGroups, gens: Sequence[Word], side_blocks: Sequence[Block],
                block_parts: Mapping[str, int]) -> Tuple[Tuple[Word, ...], ...]:
    parts: Dict[int, List[Word]] = {}
    for w in gens:
        for term in sandwich_decompose(graph, w):
            block = _block_of_term(term, side_blocks)
            index = block_parts[block.id] if block is not None else 0
            parts.setdefault(index, []).append(term.word)
    size = max(parts, default=-1) + 1
    return tuple(tuple(parts.get(i, ())) for i in range(size))


def chain_certificate(graph: GraphOfGroups, params: Sequence[Word], b: Sequence[Word], c: Sequence[Word],
                      saturation: int = 1, disjointness: str = "vertex") -> Optional[ChainCertificate]:
    """
    Build a chain certificate greedily.

    Strata alternate between the leading side and the other side. At each
    step the pending blocks of that side are tried in order of how few new
    edges they add; a block is accepted when its intersection with the
    previous stratum is envelope-covered and every other pending block
    meets the grown stratum in an envelope-covered subgraph. Grown strata
    are joined to the base through the F_A-subgraph.

    Returns:
        ChainCertificate, or None when two consecutive steps accept nothing
        while blocks remain (the greedy search stalled).
    """
    gens = {"b": _side_gens(params, b), "c": _side_gens(params, c)}
    prefixes = {"b": "B", "c": "C"}
    side_blocks = {side: blocks(graph, gens[side], saturation, prefix=prefixes[side]) for side in SIDES}
    builder = _ChainBuilder(graph, side_blocks, disjointness)
    whole = Subgraph.whole(graph)
    chain = [Subgraph.point(graph.base)]

    costs = {side: builder.cheapest(side, chain[0]) for side in SIDES}
    if costs["c"] is not None and (costs["b"] is None or costs["c"] < costs["b"]):
        leading = "c"
    else:
        leading = "b"
    trailing = "c" if leading == "b" else "b"
    logger.debug("chain_certificate: leading side %s (costs %s)", leading, costs)

    block_parts: Dict[str, int] = {}
    idle = 0
    k = 0
    while builder.pending["b"] or builder.pending["c"]:
        k += 1
        side, opposite = (leading, trailing) if k % 2 else (trailing, leading)
        part = (k - 1) // 2 if side == leading else k // 2
        prev = chain[-1]
        if not builder.pending[opposite] and all(
                _has_cover(graph, block.subgraph & prev, disjointness) for block in builder.pending[side]):
            for block in builder.pending[side]:
                block_parts[block.id] = part
            builder.pending[side] = []
            chain.append(whole)
            break
        current, accepted = builder.step(side, prev)
        for block in accepted:
            block_parts[block.id] = part
            builder.pending[side].remove(block)
        chain.append(current)
        if accepted:
            idle = 0
            logger.debug("stratum %d (%s): %s", k, side, [block.id for block in accepted])
        else:
            idle += 1
            if idle >= 2:
                logger.info("chain_certificate: greedy search stalled with %s pending",
                            [block.id for s in SIDES for block in builder.pending[s]])
                return None

    if chain[-1] != whole:
        chain.append(whole)

    term_parts = {side: _term_parts(graph, gens[side], side_blocks[side], block_parts) for side in SIDES}
    return ChainCertificate(
        chain=tuple(chain),
        leading=leading,
        block_parts=block_parts,
        term_parts=term_parts,
        params=tuple(reduce_word(w) for w in params),
        b=tuple(reduce_word(w) for w in b),
        c=tuple(reduce_word(w) for w in c),
        saturation=saturation,
        blocks={block.id: block.subgraph for side in SIDES for block in side_blocks[side]},
    )


def chain_problems(graph: GraphOfGroups, cert: ChainCertificate, disjointness: str = "vertex") -> List[str]:
    """Every reason the certificate fails; empty when it is valid."""
    problems: List[str] = []
    chain = cert.chain
    if not chain:
        return ["empty chain"]
    if chain[0] != Subgraph.point(graph.base):
        problems.append("the chain does not start at the base vertex")
    if chain[-1] != Subgraph.whole(graph):
        problems.append("the chain does not end at the whole graph")
    for i, stratum in enumerate(chain):
        if not stratum.is_closed(graph):
            problems.append(f"stratum {i} is not closed")
        if not stratum.fa_part(graph).is_connected(graph):
            problems.append(f"stratum {i} has a disconnected F_A part")
        if i and not chain[i - 1] <= stratum:
            problems.append(f"stratum {i - 1} is not contained in stratum {i}")
    if cert.leading not in SIDES:
        problems.append(f"unknown leading side {cert.leading!r}")
        return problems

    gens = {"b": _side_gens(cert.params, cert.b), "c": _side_gens(cert.params, cert.c)}
    prefixes = {"b": "B", "c": "C"}
    side_blocks = {side: blocks(graph, gens[side], cert.saturation, prefix=prefixes[side]) for side in SIDES}
    recomputed = {block.id: block.subgraph for side in SIDES for block in side_blocks[side]}
    if recomputed != cert.blocks:
        problems.append("blocks do not match the recomputed blocks")
        return problems

    top = len(chain) - 1
    trivial_edges = {}
    for side in SIDES:
        leading = side == cert.leading
        terms = [t for w in gens[side] for t in sandwich_decompose(graph, w)]
        listed = Counter(w for part in cert.term_parts[side] for w in part)
        if listed != Counter(t.word for t in terms):
            problems.append(f"{side}-side terms do not match the sandwich decompositions")
            continue
        for index, part in enumerate(cert.term_parts[side]):
            for word in part:
                for term in (t for t in terms if t.word == word):
                    block = _block_of_term(term, side_blocks[side])
                    if block is not None and cert.block_parts.get(block.id) != index:
                        problems.append(f"term {word!r} sits in part {index} but its block "
                                        f"{block.id} does not")
        for block in side_blocks[side]:
            index = cert.block_parts.get(block.id)
            if index is None or index < 0:
                problems.append(f"block {block.id} has no part")
                continue
            upper, lower = (2 * index + 1, 2 * index) if leading else (2 * index, 2 * index - 1)
            if upper > top:
                problems.append(f"block {block.id} lies beyond the last stratum")
                continue
            if not block.subgraph <= chain[upper]:
                problems.append(f"block {block.id} is not inside stratum {upper}")
            if lower >= 0 and not _has_cover(graph, block.subgraph & chain[lower], disjointness):
                problems.append(f"block {block.id} meets stratum {lower} without an envelope cover")
        edges = set()
        for w in (cert.b if side == "b" else cert.c):
            for term in sandwich_decompose(graph, w):
                edges.update(e for e in (term.left_trivial_edge, term.right_trivial_edge) if e)
        trivial_edges[side] = edges
    shared = trivial_edges.get("b", set()) & trivial_edges.get("c", set())
    if shared:
        problems.append(f"trivially stabilized edges {sorted(shared)} are used by both sides")
    return problems


def verify_chain(graph: GraphOfGroups, cert: ChainCertificate, disjointness: str = "vertex") -> bool:
    problems = chain_problems(graph, cert, disjointness)
    for problem in problems:
        logger.info("verify_chain: %s", problem)
    return not problems


# ─── Witnesses ────────────────────────────────────────────────────────────────

def _twist_product(graph: GraphOfGroups, twists: Sequence[Tuple[str, int]]) -> Automorphism:
    result = Automorphism.identity(graph.basis)
    for edge_id, exponent in twists:
        result = result.compose(dehn_twist(graph, edge_id, exponent))
    return result


def _check_supports(graph: GraphOfGroups, twists: Sequence[Tuple[str, int]]) -> None:
    for support, _ in twists:
        if graph.has_vertex(support):
            if graph.vertex(support).kind == VertexKind.SURFACE:
                raise UnsupportedError(f"automorphisms supported on surface vertex {support} are not supported")
            raise HypothesisError(f"{support} is a vertex, not an edge to twist about")
        graph.edge(support)


def mod_witness(graph: GraphOfGroups, params: Sequence[Word], b: Sequence[Word], c: Sequence[Word],
                twists: Sequence[Tuple[str, int]], conjugator: Word = "",
                saturation: int = 1, disjointness: str = "vertex") -> Optional[Automorphism]:
    """
    Turn an automorphism fixing A into one fixing A and c that agrees with it on b.

    theta = Conj(conjugator) after the product of the given Dehn twists
    (rightmost applied first). Twists about edges outside the minimal
    subgraph of A∪b are dropped; each remaining twist is spread over the
    edges of its c-block in the same cylinder. The conjugator is kept when
    it still fixes A, otherwise recomputed.

    Returns:
        The witness, or None when the criterion fails, b is not in F_A, or
        theta does not fix A.

    Raises:
        UnsupportedError: For surface supports or shapes the construction
            does not reach.
    """
    if not check_criterion(graph, params, b, c, saturation, disjointness).criterion_met:
        logger.info("mod_witness: criterion not met")
        return None
    fa = graph.fa_automaton
    if not all(fa.contains(w) for w in b):
        logger.info("mod_witness: b is not contained in F_A")
        return None
    _check_supports(graph, twists)

    params = [reduce_word(a) for a in params]
    theta = Automorphism.conjugation(graph.basis, conjugator).compose(_twist_product(graph, twists))
    if not theta.fixes(params):
        logger.info("mod_witness: theta does not fix A")
        return None

    reach = minimal_subgraph(graph, params + [reduce_word(w) for w in b])
    c_blocks = blocks(graph, _side_gens(params, c), saturation, prefix="C")
    labels = cylinders(graph)
    kept: List[Tuple[str, int]] = []
    for edge_id, exponent in twists:
        if edge_id not in reach.edges:
            continue
        block = next((blk for blk in c_blocks if edge_id in blk.subgraph.edges), None)
        if block is None:
            kept.append((edge_id, exponent))
            continue
        label = labels.get(edge_id)
        mates = sorted(f for f in block.subgraph.edges if f in labels and labels[f] == label)
        kept.extend((f, exponent) for f in mates)
    phi = _twist_product(graph, kept)

    g = conjugator
    if not Automorphism.conjugation(graph.basis, g).compose(phi).fixes(params):
        g = simultaneous_conjugacy([phi.apply(a) for a in params], params)
        if g is None:
            raise UnsupportedError("no conjugator restores A after spreading the twists")
    alpha = Automorphism.conjugation(graph.basis, g).compose(phi)
    if not alpha.fixes(params + list(c)):
        raise UnsupportedError("witness construction does not fix c for this shape")
    if any(alpha.apply(w) != theta.apply(w) for w in b):
        raise UnsupportedError("witness construction does not agree with theta on b for this shape")
    logger.debug("mod_witness: twists %s -> %s, conjugator %r", list(twists), kept, g)
    return alpha


# ─── Amalgamation ─────────────────────────────────────────────────────────────

def _fa_letters(graph: GraphOfGroups) -> List[str]:
    words = [g for v in graph.vertices if v.id in graph.fa_vertices for g in v.generators]
    for eid in sorted(graph.fa_edges):
        e = graph.edge(eid)
        words += [e.generator, e.stable_letter]
    letters = {ch.lower() for w in words for ch in w}
    return [x for x in graph.basis if x in letters]


def _check_shared_fa(first: GraphOfGroups, second: GraphOfGroups) -> None:
    if first.fa_vertices != second.fa_vertices:
        raise GraphOfGroupsError("F_A-subgraphs have different vertices")
    if first.base != second.base:
        raise GraphOfGroupsError("base vertices differ")
    for vid in sorted(first.fa_vertices):
        u, v = first.vertex(vid), second.vertex(vid)
        if u.kind != v.kind or not same_subgroup(u.group, v.group):
            raise GraphOfGroupsError(f"F_A vertex {vid} differs between the decompositions")
    if first.fa_edges != second.fa_edges:
        raise GraphOfGroupsError("F_A-subgraphs have different edges")
    for eid in sorted(first.fa_edges):
        if first.edge(eid) != second.edge(eid):
            raise GraphOfGroupsError(f"F_A edge {eid} differs between the decompositions")
    letters = _fa_letters(first)
    if letters != _fa_letters(second):
        raise GraphOfGroupsError("F_A-subgraphs use different basis letters")
    for graph in (first, second):
        missing = [x for x in letters if not graph.fa_automaton.contains(x)]
        if missing:
            raise GraphOfGroupsError(f"F_A-subgraph is not spanned by basis letters; missing {missing}")


def amalgam_renaming(first: GraphOfGroups, second: GraphOfGroups) -> Dict[str, str]:
    """
    Letter renaming applied to the second decomposition: F_A letters stay,
    the others move to the first unused lowercase letters.
    """
    _check_shared_fa(first, second)
    shared = set(_fa_letters(first))
    used = set(first.basis) | shared
    mapping = {x: x for x in second.basis if x in shared}
    for letter in second.basis:
        if letter in shared:
            continue
        fresh = next((ch for ch in ascii_lowercase if ch not in used), None)
        if fresh is None:
            raise GraphOfGroupsError("ran out of basis letters for the amalgam")
        mapping[letter] = fresh
        used.add(fresh)
    return mapping


def rename_word(word: Word, mapping: Mapping[str, str]) -> Word:
    return "".join(mapping[ch] if ch.islower() else mapping[ch.lower()].upper() for ch in word)


def amalgamate(first: GraphOfGroups, second: GraphOfGroups) -> GraphOfGroups:
    """
    Glue two decompositions relative to the same A along their common
    F_A-subgraph.

    The second decomposition's non-F_A letters are renamed (see
    amalgam_renaming) and its non-F_A vertices and edges get a "'" suffix.

    Raises:
        GraphOfGroupsError: If the F_A data differ or are not spanned by
            basis letters.
    """
    mapping = amalgam_renaming(first, second)
    fresh = [mapping[x] for x in second.basis if mapping[x] not in first.basis]

    def vertex_name(vid: str) -> str:
        return vid if vid in second.fa_vertices else f"{vid}'"

    vertices = list(first.vertices)
    for v in second.vertices:
        if v.id in second.fa_vertices:
            continue
        vertices.append(VertexData(vertex_name(v.id), v.kind,
                                   tuple(rename_word(g, mapping) for g in v.generators)))
    edges = list(first.edges)
    for e in second.edges:
        if e.id in second.fa_edges:
            continue
        edges.append(EdgeData(f"{e.id}'", vertex_name(e.origin), vertex_name(e.terminus), e.edge_class,
                              rename_word(e.generator, mapping), e.in_tree,
                              rename_word(e.stable_letter, mapping)))
    amalgam = GraphOfGroups(first.basis + tuple(fresh), tuple(vertices), tuple(edges),
                            first.base, first.fa_vertices)
    logger.info("amalgamate: rank %d + %d -> %d", first.rank, second.rank, amalgam.rank)
    return amalgam


def rename_tuple(words: Sequence[Word], mapping: Mapping[str, str]) -> List[Word]:
    return [product(rename_word(w, mapping)) for w in words]
