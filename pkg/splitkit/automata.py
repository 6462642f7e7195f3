"""
automata.py
Folded subgroup automata (core graphs) for finitely generated subgroups of
the ambient free group, with expression witnesses.

Every edge carries a label: a reduced word over the original generators,
stored as a tuple of signed 1-based generator indices. Folding keeps the
labels consistent so that reading any base loop multiplies out to an
expression of the loop's word in the generators.
"""
import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .words import Word, inverse, reduce_word

logger = logging.getLogger(__name__)

Label = Tuple[int, ...]
Expression = List[Tuple[int, int]]

BASE_STATE = 0


def _reduce_label(items: Iterable[int]) -> Label:
    stack: List[int] = []
    for item in items:
        if stack and stack[-1] == -item:
            stack.pop()
        else:
            stack.append(item)
    return tuple(stack)


def _inverse_label(label: Label) -> Label:
    return tuple(-item for item in reversed(label))


def _concat(*labels: Label) -> Label:
    return _reduce_label(item for label in labels for item in label)


class SubgroupAutomaton:
    """
    Folded, trimmed core graph of a subgroup with a base state.

    Edges are stored with positive letters only; traversing an edge against
    its direction reads the inverse letter.
    """

    def __init__(self, generators: Sequence[Word], basis: Sequence[str],
                 edges: Sequence[Tuple[int, str, int, Label]], states: Sequence[int]):
        self.generators: Tuple[Word, ...] = tuple(generators)
        self.basis: Tuple[str, ...] = tuple(basis)
        self.states: Tuple[int, ...] = tuple(states)
        self.edges: Tuple[Tuple[int, str, int, Label], ...] = tuple(edges)
        self._forward: Dict[Tuple[int, str], Tuple[int, Label]] = {}
        self._backward: Dict[Tuple[int, str], Tuple[int, Label]] = {}
        for src, letter, dst, label in self.edges:
            self._forward[(src, letter)] = (dst, label)
            self._backward[(dst, letter)] = (src, label)

    @property
    def base(self) -> int:
        return BASE_STATE

    def __repr__(self) -> str:
        return (f"SubgroupAutomaton(generators={list(self.generators)}, "
                f"states={len(self.states)}, edges={len(self.edges)})")

    # ─── Reading ──────────────────────────────────────────────────────────────

    def step(self, state: int, ch: str) -> Optional[Tuple[int, Label]]:
        """Follow one letter; returns (next state, label read) or None."""
        if ch.islower():
            return self._forward.get((state, ch))
        hit = self._backward.get((state, ch.lower()))
        if hit is None:
            return None
        src, label = hit
        return src, _inverse_label(label)

    def read(self, word: Word, start: int = BASE_STATE) -> Optional[Tuple[List[int], Label]]:
        """
        Read a word from a state.

        Returns:
            (visited states, reduced label product) or None if the word falls
            off the automaton.
        """
        state = start
        visited = [state]
        collected: List[int] = []
        for ch in word:
            hit = self.step(state, ch)
            if hit is None:
                return None
            state, label = hit
            visited.append(state)
            collected.extend(label)
        return visited, _reduce_label(collected)

    def contains(self, word: Word) -> bool:
        outcome = self.read(reduce_word(word))
        return outcome is not None and outcome[0][-1] == BASE_STATE

    def express(self, word: Word) -> Optional[Expression]:
        """
        Factor a member over the original generators.

        Args:
            word: Any word; it is reduced first.

        Returns:
            List of (generator index, sign) whose product reduces to word,
            or None for non-members.
        """
        outcome = self.read(reduce_word(word))
        if outcome is None or outcome[0][-1] != BASE_STATE:
            return None
        return [(abs(item) - 1, 1 if item > 0 else -1) for item in outcome[1]]

    def generator_path(self, index: int) -> List[int]:
        """States visited when generator `index` is read from the base."""
        outcome = self.read(reduce_word(self.generators[index]))
        if outcome is None:
            raise RuntimeError(f"generator {index} is not readable; automaton is inconsistent")
        return outcome[0]

    # ─── Invariants ───────────────────────────────────────────────────────────

    def is_complete(self) -> bool:
        """True iff every state has both transitions for every basis letter."""
        if not self.basis:
            return True
        for state in self.states:
            for letter in self.basis:
                if (state, letter) not in self._forward or (state, letter) not in self._backward:
                    return False
        return True

    def rank_index(self) -> Tuple[int, Union[int, float]]:
        rank = len(self.edges) - len(self.states) + 1
        index: Union[int, float] = len(self.states) if self.is_complete() else math.inf
        return rank, index

    def evaluate(self, expression: Expression) -> Word:
        parts = []
        for index, sign in expression:
            g = self.generators[index]
            parts.append(g if sign > 0 else inverse(g))
        return reduce_word("".join(parts))

    def to_dot(self, name: str = "subgroup") -> str:
        """Graphviz digraph of the core graph; the base state is doubled."""
        lines = [f'digraph "{name}" {{', '  rankdir=LR;', '  node [shape=circle];']
        for state in self.states:
            extra = ', peripheries=2' if state == BASE_STATE else ''
            lines.append(f'  "{state}" [label="{state}"{extra}];')
        for src, letter, dst, _ in sorted(self.edges):
            lines.append(f'  "{src}" -> "{dst}" [label="{letter}"];')
        lines.append('}')
        return "\n".join(lines) + "\n"


# ─── Construction ─────────────────────────────────────────────────────────────

def _find_conflict(edges: Dict[int, list]) -> Optional[Tuple[int, int, int]]:
    """Two edges sharing (source, letter) or (target, letter); direction +1/-1."""
    seen: Dict[Tuple[int, str, int], int] = {}
    for eid in sorted(edges):
        src, letter, dst, _ = edges[eid]
        for key, direction in (((src, letter, 1), 1), ((dst, letter, -1), -1)):
            other = seen.get(key)
            if other is not None:
                return other, eid, direction
            seen[key] = eid
    return None


def _fold(edges: Dict[int, list]) -> int:
    folds = 0
    while True:
        conflict = _find_conflict(edges)
        if conflict is None:
            return folds
        e1, e2, direction = conflict
        folds += 1
        far = 2 if direction > 0 else 0
        w1, w2 = edges[e1][far], edges[e2][far]
        if w1 == w2:
            del edges[e2]
            continue
        keep_edge, drop_edge = e1, e2
        if w2 == BASE_STATE:
            keep_edge, drop_edge = e2, e1
        keep, drop = edges[keep_edge][far], edges[drop_edge][far]
        lk, lr = edges[keep_edge][3], edges[drop_edge][3]
        if direction > 0:
            d = _concat(_inverse_label(lk), lr)
        else:
            d = _concat(lk, _inverse_label(lr))
        d_inv = _inverse_label(d)
        del edges[drop_edge]
        for edge in edges.values():
            src_hit, dst_hit = edge[0] == drop, edge[2] == drop
            if src_hit and dst_hit:
                edge[3] = _concat(d, edge[3], d_inv)
            elif src_hit:
                edge[3] = _concat(d, edge[3])
            elif dst_hit:
                edge[3] = _concat(edge[3], d_inv)
            if src_hit:
                edge[0] = keep
            if dst_hit:
                edge[2] = keep


def _trim(edges: Dict[int, list], states: set) -> None:
    while True:
        degree = {state: 0 for state in states}
        for src, _, dst, _ in edges.values():
            degree[src] += 1
            degree[dst] += 1
        leaves = {s for s, deg in degree.items() if deg <= 1 and s != BASE_STATE}
        if not leaves:
            return
        states -= leaves
        for eid in [eid for eid, e in edges.items() if e[0] in leaves or e[2] in leaves]:
            del edges[eid]


def fold_build(generators: Sequence[Word], basis: Optional[Sequence[str]] = None) -> SubgroupAutomaton:
    """
    Build the folded core automaton of the subgroup generated by `generators`.

    Args:
        generators: Words; they are reduced first. Empty input gives the
            trivial subgroup.
        basis: Ambient basis letters, used for completeness (index) checks.
            Defaults to the letters occurring in the generators.

    Returns:
        SubgroupAutomaton
    """
    gens = [reduce_word(g) for g in generators]
    if basis is None:
        basis = sorted({ch.lower() for g in gens for ch in g})

    edges: Dict[int, list] = {}
    next_state = 1
    for index, word in enumerate(gens):
        if not word:
            continue
        path = [BASE_STATE]
        for _ in range(len(word) - 1):
            path.append(next_state)
            next_state += 1
        path.append(BASE_STATE)
        for j, ch in enumerate(word):
            label: Label = (index + 1,) if j == 0 else ()
            src, dst = path[j], path[j + 1]
            if ch.isupper():
                src, dst, label = dst, src, _inverse_label(label)
            edges[len(edges)] = [src, ch.lower(), dst, label]

    folds = _fold(edges)
    states = {BASE_STATE} | {e[0] for e in edges.values()} | {e[2] for e in edges.values()}
    _trim(edges, states)

    # renumber so equal subgroups built the same way print the same way
    order = sorted(states)
    renumber = {old: new for new, old in enumerate(order)}
    final = sorted(
        (renumber[src], letter, renumber[dst], label)
        for src, letter, dst, label in edges.values()
    )
    logger.debug("fold_build: %d generators, %d folds, %d states, %d edges",
                 len(gens), folds, len(order), len(final))
    return SubgroupAutomaton(gens, basis, final, range(len(order)))


# ─── Functional API ───────────────────────────────────────────────────────────

def membership(aut: SubgroupAutomaton, word: Word) -> bool:
    return aut.contains(word)


def express(aut: SubgroupAutomaton, word: Word) -> Optional[Expression]:
    return aut.express(word)


def rank_index(aut: SubgroupAutomaton) -> Tuple[int, Union[int, float]]:
    """(rank, index) of the subgroup; index is math.inf unless the core graph is a cover."""
    return aut.rank_index()
