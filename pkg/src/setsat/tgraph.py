"""Bipartite place/node graphs over a partition's blocks.

Places stand for the blocks of a partition; a node is an unordered set of
one or two places.  Distribution edges run from nodes to product places
("tensor places") and say where the pair content generated over the node's
blocks may land.  Membership edges (place in node) are implicit.

Nodes of size three or more never appear: a set of one or two elements
cannot meet three pairwise disjoint blocks, so bigger nodes generate no
pair content at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import SizeLimit
from .hfset import HFSet
from .semantics import Partition

PlaceId = Hashable
Node = frozenset  # frozenset[PlaceId], size 1 or 2


def node_of(*places: PlaceId) -> Node:
    return frozenset(places)


@dataclass(frozen=True)
class TGraph:
    """places: all vertices on the place side;
    otimes_places: places that may receive distribution edges;
    targets: node -> set of receiving places (only nonempty entries stored);
    saturated: nodes whose entire pair content must land inside the
    partition's domain."""

    places: frozenset
    otimes_places: frozenset
    targets: Mapping[Node, frozenset] = field(default_factory=dict)
    saturated: frozenset = frozenset()

    def __post_init__(self):
        if not self.otimes_places <= self.places:
            raise ValueError("otimes_places must be a subset of places")
        for node, tgts in self.targets.items():
            if not 1 <= len(node) <= 2:
                raise ValueError(f"node {set(node)} must have 1 or 2 members")
            if not node <= self.places:
                raise ValueError(f"node {set(node)} mentions unknown places")
            if not tgts <= self.otimes_places:
                raise ValueError(
                    f"targets of {set(node)} must be otimes places"
                )
        for node in self.saturated:
            if not 1 <= len(node) <= 2 or not node <= self.places:
                raise ValueError(f"bad saturated node {set(node)}")

    def in_edges(self) -> dict:
        """place -> sorted list of source nodes."""
        incoming: dict = {p: [] for p in self.places}
        for node in _sorted_nodes(self.targets):
            for place in self.targets[node]:
                incoming[place].append(node)
        return incoming

    def edge_set(self) -> frozenset:
        return frozenset(
            (node, place)
            for node, tgts in self.targets.items()
            for place in tgts
        )


def _place_key(place: PlaceId):
    # canonical sort key for heterogeneous place ids
    if isinstance(place, frozenset):
        return (1, tuple(sorted(map(str, place))))
    return (0, str(place))


def sort_places(places: Iterable[PlaceId]) -> list:
    return sorted(places, key=_place_key)


def _node_key(node: Node):
    return (len(node), tuple(sorted(map(_place_key, node))))


def _sorted_nodes(nodes: Iterable[Node]) -> list:
    return sorted(nodes, key=_node_key)


def population_closure(graph: TGraph) -> tuple[frozenset, bool]:
    """Least fixpoint of: non-tensor places are populated outright; a tensor
    place becomes populated once some node targeting it has all members
    populated.  Returns (populated places, whether that is all of them)."""
    populated = set(graph.places - graph.otimes_places)
    changed = True
    while changed:
        changed = False
        for node, tgts in graph.targets.items():
            if node <= populated:
                fresh = tgts - populated
                if fresh:
                    populated.update(fresh)
                    changed = True
    return frozenset(populated), len(populated) == len(graph.places)


def population_layers(graph: TGraph) -> dict:
    """place -> closure step at which it is first populated (0 for seeds).
    Unpopulated places are absent."""
    layer = {p: 0 for p in graph.places - graph.otimes_places}
    step = 0
    while True:
        step += 1
        fresh = {}
        for node, tgts in graph.targets.items():
            if all(m in layer for m in node):
                for place in tgts:
                    if place not in layer and place not in fresh:
                        fresh[place] = step
        if not fresh:
            return layer
        layer.update(fresh)


def detect_saturation_cycle(graph: TGraph) -> list | None:
    """A cycle alternating places and saturated nodes, or None.

    The cycle graph has an arc place -> node when the place belongs to a
    saturated node whose members are all populated, and node -> place when
    the (populated) place is among the node's targets.  A cycle here is what
    lets saturation feed itself forever.
    """
    populated, _ = population_closure(graph)
    live_nodes = [
        n for n in graph.saturated if n <= populated
    ]
    succ: dict = {}
    for node in live_nodes:
        succ[("n", node)] = [
            ("p", place)
            for place in sort_places(graph.targets.get(node, frozenset()))
            if place in populated
        ]
        for place in node:
            succ.setdefault(("p", place), []).append(("n", node))
    for key in succ:
        if key[0] == "p":
            succ[key].sort(key=lambda v: _node_key(v[1]))

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in succ}
    start_order = sorted(
        (v for v in succ if v[0] == "p"), key=lambda v: _place_key(v[1])
    ) + sorted((v for v in succ if v[0] == "n"), key=lambda v: _node_key(v[1]))

    for start in start_order:
        if color[start] != WHITE:
            continue
        stack = [(start, iter(succ.get(start, ())))]
        color[start] = GRAY
        path = [start]
        while stack:
            vertex, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in succ:
                    continue
                if color[nxt] == GRAY:
                    # found a cycle; slice it out of the current path
                    idx = path.index(nxt)
                    cycle = path[idx:] + [nxt]
                    if cycle[0][0] == "n":  # rotate so it starts at a place
                        cycle = cycle[1:-1] + cycle[:2]
                    return [
                        v[1] if v[0] == "p" else v[1] for v in cycle
                    ]
                if color[nxt] == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, iter(succ.get(nxt, ()))))
                    path.append(nxt)
                    advanced = True
                    break
            if not advanced:
                color[vertex] = BLACK
                stack.pop()
                path.pop()
    return None


def induce_from_partition(
    partition: Partition, place_ids: Sequence[PlaceId] | None = None
) -> TGraph:
    """The graph a concrete partition complies with.

    A block is a tensor place when every one of its elements is a one- or
    two-element subset of the partition's domain.  Each such element has a
    unique support node (the blocks its members live in, possible because
    blocks are disjoint), which yields the distribution edges.  A node is
    saturated when all of the pair content over its blocks is already placed
    somewhere in the domain; that is checked by counting, so large blocks
    never force a power-set materialization.
    """
    blocks = partition.blocks
    ids = list(place_ids) if place_ids is not None else list(range(len(blocks)))
    if len(ids) != len(blocks):
        raise ValueError("need exactly one place id per block")
    if len(set(ids)) != len(ids):
        raise ValueError("place ids must be distinct")
    owner: dict[HFSet, PlaceId] = {}
    for pid, block in zip(ids, blocks):
        for element in block:
            owner[element] = pid
    block_of = dict(zip(ids, blocks))

    def support(element: HFSet) -> Node | None:
        if not 1 <= len(element) <= 2:
            return None
        members = []
        for item in element:
            pid = owner.get(item)
            if pid is None:
                return None
            members.append(pid)
        return frozenset(members)

    otimes_places = []
    support_of: dict[HFSet, Node] = {}
    for pid, block in zip(ids, blocks):
        if all(support(e) is not None for e in block):
            otimes_places.append(pid)
    tally: dict[Node, int] = {}
    for element in owner:
        node = support(element)
        if node is not None:
            support_of[element] = node
            tally[node] = tally.get(node, 0) + 1

    targets: dict[Node, set] = {}
    for pid in otimes_places:
        for element in block_of[pid]:
            targets.setdefault(support_of[element], set()).add(pid)

    def expected(node: Node) -> int:
        members = list(node)
        if len(members) == 1:
            n = len(block_of[members[0]])
            return n + n * (n - 1) // 2
        return len(block_of[members[0]]) * len(block_of[members[1]])

    saturated = []
    id_set = set(ids)
    for i, a in enumerate(ids):
        for b in ids[i:]:
            node = frozenset((a, b))
            if tally.get(node, 0) == expected(node):
                saturated.append(node)

    return TGraph(
        places=frozenset(id_set),
        otimes_places=frozenset(otimes_places),
        targets={n: frozenset(t) for n, t in targets.items()},
        saturated=frozenset(saturated),
    )


def weak_isomorphic(
    g1: TGraph, g2: TGraph, strict: bool = False, cap: int = 12
) -> dict | None:
    """A bijection between the place sets that preserves tensor labels and
    distribution edges in both directions (extended to nodes memberwise),
    or None.  With ``strict`` the saturation flags must correspond too.

    Backtracking search; refuses graphs above ``cap`` places.
    """
    if len(g1.places) != len(g2.places):
        return None
    if len(g1.places) > cap:
        raise SizeLimit(
            f"isomorphism search capped at {cap} places, got {len(g1.places)}"
        )

    def check(mapping: dict) -> bool:
        if frozenset(map(mapping.get, g1.otimes_places)) != g2.otimes_places:
            return False
        mapped_edges = frozenset(
            (frozenset(mapping[p] for p in node), mapping[place])
            for node, place in g1.edge_set()
        )
        if mapped_edges != g2.edge_set():
            return False
        if strict:
            mapped_sat = frozenset(
                frozenset(mapping[p] for p in node) for node in g1.saturated
            )
            if mapped_sat != g2.saturated:
                return False
        return True

    if g1.places == g2.places:
        identity = {p: p for p in g1.places}
        if check(identity):
            return identity

    def fingerprint(graph: TGraph, place: PlaceId):
        indeg = sum(1 for _, tgts in graph.targets.items() if place in tgts)
        memdeg = sum(1 for node in graph.targets if place in node)
        satdeg = sum(1 for node in graph.saturated if place in node) if strict else 0
        return (place in graph.otimes_places, indeg, memdeg, satdeg)

    left = sort_places(g1.places)
    prints2: dict = {}
    for place in g2.places:
        prints2.setdefault(fingerprint(g2, place), []).append(place)
    for bucket in prints2.values():
        bucket.sort(key=_place_key)

    candidates = []
    for place in left:
        bucket = prints2.get(fingerprint(g1, place))
        if not bucket:
            return None
        candidates.append(bucket)

    used: set = set()
    mapping: dict = {}

    def extend(i: int) -> dict | None:
        if i == len(left):
            return dict(mapping) if check(mapping) else None
        for candidate in candidates[i]:
            if candidate in used:
                continue
            mapping[left[i]] = candidate
            used.add(candidate)
            found = extend(i + 1)
            if found is not None:
                return found
            used.discard(candidate)
            del mapping[left[i]]
        return None

    return extend(0)


def format_place(place: PlaceId) -> str:
    if isinstance(place, frozenset):
        return "{%s}" % ",".join(sorted(map(str, place)))
    return str(place)


def format_node(node: Node) -> str:
    return "[%s]" % " ".join(format_place(p) for p in sort_places(node))


def to_dot(graph: TGraph, name: str = "tgraph") -> str:
    """DOT rendering: places are circles (tensor places double circles),
    nodes are boxes (saturated ones bold), membership edges dashed,
    distribution edges solid."""
    lines = [f"digraph {name} {{"]
    for place in sort_places(graph.places):
        shape = "doublecircle" if place in graph.otimes_places else "circle"
        lines.append(f'  "{format_place(place)}" [shape={shape}];')
    nodes = set(graph.targets) | set(graph.saturated)
    for node in _sorted_nodes(nodes):
        style = ', style=bold' if node in graph.saturated else ""
        lines.append(f'  "{format_node(node)}" [shape=box{style}];')
        for place in sort_places(node):
            lines.append(
                f'  "{format_place(place)}" -> "{format_node(node)}" '
                "[style=dashed];"
            )
        for place in sort_places(graph.targets.get(node, frozenset())):
            lines.append(
                f'  "{format_node(node)}" -> "{format_place(place)}";'
            )
    lines.append("}")
    return "\n".join(lines)
