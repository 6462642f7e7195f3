"""
dot_export.py
Graphviz rendering of a decomposition with highlighted subgraphs.

Ztype vertices are drawn as stars, rigid and base vertices as dots (the base
vertex doubled), surface vertices as boxes; trivially stabilized edges are
dashed and cyclic edges solid.
"""
import logging
from dataclasses import dataclass
from typing import List, Sequence

from .common.errors import ScenarioError
from .graph_of_groups import GraphOfGroups, VertexKind
from .minimal import Subgraph, blocks, minimal_subgraph
from .scenario import Scenario

logger = logging.getLogger(__name__)

PALETTE = (
    "#1f77b4",  # blue
    "#d62728",  # red
    "#2ca02c",  # green
    "#9467bd",  # purple
    "#ff7f0e",  # orange
    "#8c564b",  # brown
    "#e377c2",  # pink
    "#17becf",  # teal
)


@dataclass(frozen=True)
class Overlay:
    name: str
    subgraph: Subgraph


def _quote(text: str) -> str:
    return '"' + text.replace('\\', '\\\\').replace('"', '\\"') + '"'


def resolve_overlays(scenario: Scenario, names: Sequence[str], saturation: int = 1) -> List[Overlay]:
    """
    Turn overlay names into subgraphs.

    "fa" is the F_A-subgraph, "blocks:T" yields one overlay per block of
    A together with tuple T, and a bare tuple name T is the minimal subgraph
    of A together with T.

    Raises:
        ScenarioError: For unknown overlay names.
    """
    graph = scenario.graph
    overlays: List[Overlay] = []
    for name in names:
        if name == "fa":
            overlays.append(Overlay("fa", Subgraph(graph.fa_edges, graph.fa_vertices)))
        elif name.startswith("blocks:"):
            key = name.split(":", 1)[1]
            if key not in scenario.tuples:
                raise ScenarioError(f"unknown overlay {name!r}", "--overlay")
            gens = list(scenario.params) + list(scenario.tuples[key])
            for block in blocks(graph, gens, saturation, prefix=f"{key}:block"):
                overlays.append(Overlay(block.id, block.subgraph))
        elif name in scenario.tuples:
            gens = list(scenario.params) + list(scenario.tuples[name])
            overlays.append(Overlay(name, minimal_subgraph(graph, gens)))
        else:
            raise ScenarioError(f"unknown overlay {name!r}", "--overlay")
    return overlays


def export_dot(graph: GraphOfGroups, overlays: Sequence[Overlay] = (), name: str = "splitkit") -> str:
    """
    Deterministic DOT text for the decomposition.

    Args:
        graph: The decomposition.
        overlays: Subgraphs to colour; an element in several overlays gets
            a colour list.
        name: Graph name.

    Returns:
        str: An undirected DOT graph.
    """
    colors = {overlay.name: PALETTE[i % len(PALETTE)] for i, overlay in enumerate(overlays)}
    lines = [f"graph {_quote(name)} {{", "  node [fontname=\"Helvetica\"];", "  edge [fontname=\"Helvetica\"];"]
    for overlay in overlays:
        lines.append(f"  // overlay {overlay.name}: {colors[overlay.name]}")

    for v in sorted(graph.vertices, key=lambda item: item.id):
        attrs = []
        if v.kind == VertexKind.ZTYPE:
            attrs += ["shape=star", f"label={_quote(v.id)}"]
        elif v.kind == VertexKind.SURFACE:
            attrs += ["shape=box", f"label={_quote(v.id)}"]
        else:
            attrs += ["shape=point", "width=0.12", f"xlabel={_quote(v.id)}"]
            if v.kind == VertexKind.BASE:
                attrs.append("peripheries=2")
        hits = [colors[o.name] for o in overlays if v.id in o.subgraph.vertices]
        if hits:
            attrs += [f"color={_quote(hits[0])}", "penwidth=2"]
        attrs.append(f"tooltip={_quote(', '.join(v.generators) or '1')}")
        lines.append(f"  {_quote(v.id)} [{', '.join(attrs)}];")

    for e in sorted(graph.edges, key=lambda item: item.id):
        label = e.id
        if e.generator:
            label += f": {e.generator}"
        if e.stable_letter:
            label += f" / {e.stable_letter}"
        attrs = [f"label={_quote(label)}", "style=dashed" if e.is_trivial else "style=solid"]
        hits = [colors[o.name] for o in overlays if e.id in o.subgraph.edges]
        if hits:
            attrs += [f"color={_quote(':'.join(hits))}", "penwidth=2"]
        lines.append(f"  {_quote(e.origin)} -- {_quote(e.terminus)} [{', '.join(attrs)}];")
    lines.append("}")
    logger.debug("export_dot: %d overlays", len(overlays))
    return "\n".join(lines) + "\n"
