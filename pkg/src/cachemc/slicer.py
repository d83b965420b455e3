"""Graph reduction before tracking one block.

Only accesses to the tracked block's cache set matter, and a node that does
not access the block while the block is definitely absent on entry can only
map "absent" to "absent", so it is bypassed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .ai import AgeBoundState
from .model import AccessGraph, AccessPoint, MemoryBlock


@dataclass(frozen=True)
class Slice:
    graph: AccessGraph
    tracked: MemoryBlock
    # sliced access point -> access point in the original graph
    origin: Mapping[AccessPoint, AccessPoint]
    removed: frozenset[str]


def removable_nodes(graph: AccessGraph, a: MemoryBlock, may_in: Mapping[str, AgeBoundState]) -> set[str]:
    out = set()
    for node, seq in graph.nodes.items():
        if a in seq:
            continue
        state = may_in.get(node)
        if state is None or a not in state:
            out.add(node)
    return out


def slice_graph(graph: AccessGraph, a: MemoryBlock, may_in: Mapping[str, AgeBoundState]) -> Slice:
    removable = removable_nodes(graph, a, may_in)
    entry_cleared = graph.entry in removable
    removed = removable - {graph.entry}

    nodes: dict[str, tuple[MemoryBlock, ...]] = {}
    origin: dict[AccessPoint, AccessPoint] = {}
    for node, seq in graph.nodes.items():
        if node in removed:
            continue
        kept = []
        if not (node == graph.entry and entry_cleared):
            for offset, block in enumerate(seq):
                if block.set_index == a.set_index:
                    origin[AccessPoint(node, len(kept))] = AccessPoint(node, offset)
                    kept.append(block)
        nodes[node] = tuple(kept)

    edges = []
    for node in nodes:
        # successors reached through runs of removed nodes collapse to direct edges
        seen: set[str] = set()
        stack = list(graph.successors[node])
        while stack:
            nxt = stack.pop()
            if nxt in seen:
                continue
            seen.add(nxt)
            if nxt in removed:
                stack.extend(graph.successors[nxt])
            else:
                edges.append((node, nxt))
    rank = {n: i for i, n in enumerate(nodes)}
    edges.sort(key=lambda e: (rank[e[0]], rank[e[1]]))
    return Slice(AccessGraph(nodes, tuple(edges), graph.entry), a, origin, frozenset(removed))
