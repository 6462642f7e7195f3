"""
scenario.py
Scenario files: a decomposition, the parameter set A and named word tuples,
stored as JSON with schema "splitkit-scenario/1".
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .common.config import DISJOINTNESS_MODES
from .common.errors import GraphOfGroupsError, ScenarioError, WordError
from .graph_of_groups import EdgeClass, EdgeData, GraphOfGroups, VertexData, VertexKind
from .words import Word, parse_word

logger = logging.getLogger(__name__)

SCHEMA = "splitkit-scenario/1"


@dataclass(frozen=True)
class Scenario:
    graph: GraphOfGroups
    params: Tuple[Word, ...]
    tuples: Dict[str, Tuple[Word, ...]] = field(default_factory=dict)
    options: Dict[str, Any] = field(default_factory=dict)
    name: str = ""

    def tuple(self, name: str) -> Tuple[Word, ...]:
        try:
            return self.tuples[name]
        except KeyError:
            known = ", ".join(sorted(self.tuples)) or "none"
            raise ScenarioError(f"unknown tuple {name!r} (known: {known})", "$.tuples") from None

    def option(self, key: str, default: Any = None) -> Any:
        return self.options.get(key, default)


# ─── Parsing ──────────────────────────────────────────────────────────────────

def _require(mapping: dict, key: str, location: str) -> Any:
    if key not in mapping:
        raise ScenarioError(f"missing required field {key!r}", location)
    return mapping[key]


def _expect(value: Any, kind: type, location: str, what: str) -> Any:
    if kind is int and isinstance(value, bool):
        raise ScenarioError(f"expected {what}", location)
    if not isinstance(value, kind):
        raise ScenarioError(f"expected {what}", location)
    return value


def _word(value: Any, basis: Sequence[str], location: str) -> Word:
    _expect(value, str, location, "a word string")
    try:
        return parse_word(value, basis)
    except WordError as exc:
        raise ScenarioError(str(exc), location) from exc


def _words(value: Any, basis: Sequence[str], location: str) -> Tuple[Word, ...]:
    _expect(value, list, location, "a list of words")
    return tuple(_word(item, basis, f"{location}[{i}]") for i, item in enumerate(value))


def _parse_basis(data: dict) -> Tuple[str, ...]:
    basis = _expect(_require(data, "basis", "$"), list, "$.basis", "a list of letters")
    for i, letter in enumerate(basis):
        if not (isinstance(letter, str) and len(letter) == 1 and letter.isascii() and letter.islower()):
            raise ScenarioError("basis entries must be single lowercase letters", f"$.basis[{i}]")
        if letter in basis[:i]:
            raise ScenarioError(f"duplicate basis letter {letter!r}", f"$.basis[{i}]")
    rank = _expect(_require(data, "rank", "$"), int, "$.rank", "an integer")
    if rank != len(basis):
        raise ScenarioError(f"rank {rank} does not match {len(basis)} basis letters", "$.rank")
    return tuple(basis)


def _parse_vertices(data: dict, basis: Sequence[str]) -> List[VertexData]:
    items = _expect(_require(data, "vertices", "$"), list, "$.vertices", "a list of vertices")
    kinds = [k.value for k in VertexKind]
    vertices = []
    seen = set()
    for i, item in enumerate(items):
        here = f"$.vertices[{i}]"
        _expect(item, dict, here, "a vertex object")
        vid = _expect(_require(item, "id", here), str, f"{here}.id", "a string id")
        if not vid or vid in seen:
            raise ScenarioError(f"vertex id {vid!r} is empty or duplicated", f"{here}.id")
        seen.add(vid)
        kind = _require(item, "kind", here)
        if kind not in kinds:
            raise ScenarioError(f"kind must be one of {kinds}", f"{here}.kind")
        gens = _words(item.get("generators", []), basis, f"{here}.generators")
        vertices.append(VertexData(vid, VertexKind(kind), gens))
    return vertices


def _parse_edges(data: dict, basis: Sequence[str], vertex_ids: set) -> List[EdgeData]:
    items = _expect(_require(data, "edges", "$"), list, "$.edges", "a list of edges")
    classes = [c.value for c in EdgeClass]
    edges = []
    seen = set()
    for i, item in enumerate(items):
        here = f"$.edges[{i}]"
        _expect(item, dict, here, "an edge object")
        eid = _expect(_require(item, "id", here), str, f"{here}.id", "a string id")
        if not eid or eid in seen:
            raise ScenarioError(f"edge id {eid!r} is empty or duplicated", f"{here}.id")
        seen.add(eid)
        ends = []
        for key in ("from", "to"):
            end = _require(item, key, here)
            if end not in vertex_ids:
                raise ScenarioError(f"unknown vertex {end!r}", f"{here}.{key}")
            ends.append(end)
        edge_class = _require(item, "class", here)
        if edge_class not in classes:
            raise ScenarioError(f"class must be one of {classes}", f"{here}.class")
        in_tree = _expect(item.get("tree", True), bool, f"{here}.tree", "a boolean")
        generator = _word(item.get("generator", ""), basis, f"{here}.generator")
        if edge_class == EdgeClass.CYCLIC.value and not generator:
            raise ScenarioError("cyclic edges need a non-trivial generator", f"{here}.generator")
        if edge_class == EdgeClass.TRIVIAL.value and generator:
            raise ScenarioError("trivial edges carry no generator", f"{here}.generator")
        stable = _word(item.get("stable_letter", ""), basis, f"{here}.stable_letter")
        if not in_tree and not stable:
            raise ScenarioError("non-tree edges need a stable letter", f"{here}.stable_letter")
        if in_tree and stable:
            raise ScenarioError("tree edges carry no stable letter", f"{here}.stable_letter")
        edges.append(EdgeData(eid, ends[0], ends[1], EdgeClass(edge_class), generator, in_tree, stable))
    return edges


def _parse_options(data: dict) -> Dict[str, Any]:
    options = _expect(data.get("options", {}), dict, "$.options", "an options object")
    parsed: Dict[str, Any] = {}
    for key, value in options.items():
        here = f"$.options.{key}"
        if key == "saturation":
            if _expect(value, int, here, "an integer") < 1:
                raise ScenarioError("saturation must be at least 1", here)
        elif key == "envelope_disjointness":
            if value not in DISJOINTNESS_MODES:
                raise ScenarioError(f"must be one of {list(DISJOINTNESS_MODES)}", here)
        else:
            raise ScenarioError(f"unknown option {key!r}", here)
        parsed[key] = value
    return parsed


def parse_scenario(data: Any, name: str = "") -> Scenario:
    """
    Validate a decoded scenario document and build the model.

    Raises:
        ScenarioError: With the JSON path of the first violation.
    """
    _expect(data, dict, "$", "a scenario object")
    schema = _require(data, "schema", "$")
    if schema != SCHEMA:
        raise ScenarioError(f"unsupported schema {schema!r}; expected {SCHEMA!r}", "$.schema")
    basis = _parse_basis(data)
    vertices = _parse_vertices(data, basis)
    vertex_ids = {v.id for v in vertices}
    edges = _parse_edges(data, basis, vertex_ids)

    base = _require(data, "base", "$")
    if base not in vertex_ids:
        raise ScenarioError(f"unknown vertex {base!r}", "$.base")
    fa = _expect(data.get("fa_subgraph", []), list, "$.fa_subgraph", "a list of vertex ids")
    for i, vid in enumerate(fa):
        if vid not in vertex_ids:
            raise ScenarioError(f"unknown vertex {vid!r}", f"$.fa_subgraph[{i}]")

    try:
        graph = GraphOfGroups(basis, tuple(vertices), tuple(edges), base, frozenset(fa))
    except GraphOfGroupsError as exc:
        raise ScenarioError(str(exc), "$") from exc

    params = _words(data.get("params_A", []), basis, "$.params_A")
    base_vertex = graph.vertex(base)
    for i, a in enumerate(params):
        if not base_vertex.contains(a):
            raise ScenarioError(f"parameter {a!r} is not in the base vertex group", f"$.params_A[{i}]")

    raw_tuples = _expect(data.get("tuples", {}), dict, "$.tuples", "a mapping of named tuples")
    tuples = {key: _words(value, basis, f"$.tuples.{key}") for key, value in raw_tuples.items()}
    scenario = Scenario(graph, params, tuples, _parse_options(data), name or str(data.get("name", "")))
    logger.debug("parsed scenario %r: rank %d, %d vertices, %d edges, tuples %s",
                 scenario.name, graph.rank, len(vertices), len(edges), sorted(tuples))
    return scenario


def load_scenario(path: str) -> Scenario:
    """
    Read and validate a scenario file.

    Raises:
        ScenarioError: On schema violations.
        json.JSONDecodeError: On malformed JSON.
    """
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    return parse_scenario(data)


# ─── Serialization ────────────────────────────────────────────────────────────

def graph_to_dict(graph: GraphOfGroups) -> dict:
    edges = []
    for e in graph.edges:
        item = {"id": e.id, "from": e.origin, "to": e.terminus, "class": e.edge_class.value, "tree": e.in_tree}
        if e.generator:
            item["generator"] = e.generator
        if e.stable_letter:
            item["stable_letter"] = e.stable_letter
        edges.append(item)
    return {
        "rank": graph.rank,
        "basis": list(graph.basis),
        "vertices": [{"id": v.id, "kind": v.kind.value, "generators": list(v.generators)} for v in graph.vertices],
        "edges": edges,
        "base": graph.base,
        "fa_subgraph": sorted(graph.fa_vertices),
    }


def scenario_to_dict(scenario: Scenario) -> dict:
    data: Dict[str, Any] = {"schema": SCHEMA}
    if scenario.name:
        data["name"] = scenario.name
    data.update(graph_to_dict(scenario.graph))
    data["params_A"] = list(scenario.params)
    data["tuples"] = {key: list(words) for key, words in scenario.tuples.items()}
    if scenario.options:
        data["options"] = dict(scenario.options)
    return data


def dump_scenario(scenario: Scenario, indent: Optional[int] = 2) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=indent)
