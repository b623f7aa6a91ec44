"""Identity graphs: which identifiers vouch for which.

Nodes are identifiers with a validity flag and a reliability weight;
edges point from an identifier to the pre-existing identifiers it was
established from. Sharing is allowed (one document may support several
others) so the structure is a DAG, never a cycle: an identifier cannot
transitively vouch for itself.

Validity reduces conjunctively over supports: a node is valid when its
own flag is set and every support evaluates valid. Reliability is the
node's weight times the weakest support's reliability; the formula is
deliberately isolated in :func:`evaluate_reliability` so a different
aggregation can be swapped in.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import CycleDetected, InvalidNode, UnknownNode


class SourceKind(enum.Enum):
    STATE_GUARANTEED = "state-guaranteed"
    BIOMETRIC = "biometric"
    COMMERCIAL = "commercial"
    SELF_ASSERTED = "self-asserted"


@dataclass
class IdentityNode:
    id: str
    source: SourceKind = SourceKind.SELF_ASSERTED
    weight: float = 1.0
    valid: bool = True
    supports: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"node {self.id!r}: weight {self.weight} outside [0, 1]")


class IdentityGraph:
    """A DAG of identity nodes keyed by id."""

    def __init__(self, nodes: list[IdentityNode] | None = None):
        self.nodes: dict[str, IdentityNode] = {}
        for node in nodes or []:
            if node.id in self.nodes:
                raise ValueError(f"duplicate node id {node.id!r}")
            self.nodes[node.id] = node
        for node in self.nodes.values():
            for child in node.supports:
                if child not in self.nodes:
                    raise UnknownNode(f"node {node.id!r} supports unknown node {child!r}")
        cyc = self._find_cycle()
        if cyc:
            raise CycleDetected(" -> ".join(cyc))

    def _find_cycle(self) -> list[str] | None:
        state: dict[str, int] = {}  # 1 = on stack, 2 = done
        stack_path: list[str] = []

        def visit(nid: str) -> list[str] | None:
            state[nid] = 1
            stack_path.append(nid)
            for child in self.nodes[nid].supports:
                mark = state.get(child)
                if mark == 1:
                    return stack_path[stack_path.index(child) :] + [child]
                if mark is None:
                    found = visit(child)
                    if found:
                        return found
            stack_path.pop()
            state[nid] = 2
            return None

        for nid in self.nodes:
            if nid not in state:
                found = visit(nid)
                if found:
                    return found
        return None

    def node(self, nid: str) -> IdentityNode:
        try:
            return self.nodes[nid]
        except KeyError:
            raise UnknownNode(f"no node {nid!r} in graph") from None

    def _reachable(self, start: str) -> set[str]:
        seen: set[str] = set()
        frontier = [start]
        while frontier:
            nid = frontier.pop()
            if nid in seen:
                continue
            seen.add(nid)
            frontier.extend(self.nodes[nid].supports)
        return seen


def add_support(g: IdentityGraph, parent: str, child: str) -> IdentityGraph:
    """Record that ``parent`` was established from ``child``.

    Rejects any edge that would close a cycle, leaving the graph
    untouched; re-adding an existing edge is a no-op.
    """
    p = g.node(parent)
    g.node(child)
    if child in p.supports:
        return g
    if parent == child or parent in g._reachable(child):
        raise CycleDetected(f"edge {parent!r} -> {child!r} would close a cycle")
    p.supports.append(child)
    return g


def provenance_paths(g: IdentityGraph, nid: str) -> set[tuple[str, ...]]:
    """Every maximal downward path from ``nid`` to a leaf.

    A leaf yields the singleton path. A node reachable along several
    routes appears on each of them: paths enumerate the unfolding of
    the graph, not its node set.
    """
    g.node(nid)
    paths: set[tuple[str, ...]] = set()

    def walk(cur: str, trail: tuple[str, ...]) -> None:
        trail = trail + (cur,)
        children = g.nodes[cur].supports
        if not children:
            paths.add(trail)
            return
        for child in children:
            walk(child, trail)

    walk(nid, ())
    return paths


def evaluate_validity(g: IdentityGraph, nid: str) -> bool:
    """A node is valid iff its flag is set and all its supports are valid."""
    g.node(nid)
    memo: dict[str, bool] = {}

    def valid(cur: str) -> bool:
        if cur not in memo:
            node = g.nodes[cur]
            memo[cur] = node.valid and all(valid(c) for c in node.supports)
        return memo[cur]

    return valid(nid)


def evaluate_reliability(g: IdentityGraph, nid: str) -> float:
    """Weight times the weakest support, recursively; leaves score their weight.

    Only defined on valid nodes; raises InvalidNode otherwise. Lowering
    any weight in the subgraph can only lower (or keep) this score.
    """
    g.node(nid)
    if not evaluate_validity(g, nid):
        raise InvalidNode(f"node {nid!r} does not evaluate valid")
    memo: dict[str, float] = {}

    def rel(cur: str) -> float:
        if cur not in memo:
            node = g.nodes[cur]
            if not node.supports:
                memo[cur] = node.weight
            else:
                memo[cur] = node.weight * min(rel(c) for c in node.supports)
        return memo[cur]

    return rel(nid)
