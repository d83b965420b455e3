"""Explicit-state reachability over (program position, tracked state) pairs."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from . import kernels
from .kernels import CeilingExceeded
from .model import AccessGraph, AccessPoint, MemoryBlock
from .tracked import EPSILON, Inside, TrackedState, tracked_update

DEFAULT_STATE_CEILING = 5_000_000

__all__ = [
    "CeilingExceeded",
    "CheckKind",
    "CheckVerdict",
    "Exploration",
    "check_access",
    "explore",
    "explore_reference",
    "reachable_pre_states",
    "verdict_of",
]


class CheckKind(enum.Enum):
    ALL_HIT = "all-hit"
    ALL_MISS = "all-miss"
    MIXED = "mixed"
    UNREACHABLE = "unreachable"


@dataclass(frozen=True)
class CheckVerdict:
    kind: CheckKind
    pre_states: frozenset = frozenset()


def verdict_of(states) -> CheckVerdict:
    states = frozenset(states)
    cached = {isinstance(s, Inside) for s in states}
    if not states:
        kind = CheckKind.UNREACHABLE
    elif cached == {True}:
        kind = CheckKind.ALL_HIT
    elif cached == {False}:
        kind = CheckKind.ALL_MISS
    else:
        kind = CheckKind.MIXED
    return CheckVerdict(kind, states)


class Exploration:
    """Result of one reachability pass for a tracked block.

    Built either from kernel bit masks (decoded on first use) or from
    already-decoded state sets.
    """

    def __init__(self, tracked: MemoryBlock, node_states=None, pre=None, raw=None):
        self.tracked = tracked
        self._node_states = node_states
        self._pre = pre
        self._raw = raw

    @property
    def node_states(self) -> dict[str, set[TrackedState]]:
        if self._node_states is None:
            names, blocks, masks, _, _ = self._raw
            self._node_states = {
                names[i]: {_decode(m, blocks) for m in ms} for i, ms in enumerate(masks)
            }
        return self._node_states

    @property
    def pre(self) -> dict[AccessPoint, set[TrackedState]]:
        if self._pre is None:
            _, blocks, _, pre_masks, points = self._raw
            self._pre = {points[j]: {_decode(m, blocks) for m in ms} for j, ms in pre_masks.items()}
        return self._pre

    @property
    def state_count(self) -> int:
        if self._raw is not None:
            return sum(len(ms) for ms in self._raw[2])
        return sum(len(s) for s in self.node_states.values())

    def verdict(self, point: AccessPoint) -> CheckVerdict:
        return verdict_of(self.pre.get(point, ()))


def _encode(graph: AccessGraph, a: MemoryBlock):
    names, index, succ_off, succ, seq_off, points, flat = graph.skeleton
    blocks = [a.id] + [b.id for b in graph.blocks() if b.set_index == a.set_index and b != a]
    bindex = {b: i for i, b in enumerate(blocks)}
    seq = [bindex[b.id] if b.set_index == a.set_index else -1 for b in flat]
    return names, blocks, (succ_off, succ, seq_off, seq), index[graph.entry], points


def _decode(mask: int, blocks: list[str]) -> TrackedState:
    if mask == 1:
        return EPSILON
    return Inside(frozenset(blocks[i] for i in range(1, len(blocks)) if (mask >> i) & 1))


def explore(
    graph: AccessGraph,
    a: MemoryBlock,
    k: int,
    ceiling: int = DEFAULT_STATE_CEILING,
    backend: str | None = None,
) -> Exploration:
    """One reachability pass for tracked block ``a``; records the tracked
    states seen on entry to every node and just before every access to ``a``.

    The exploration starts in the empty cache, i.e. with ``a`` absent.
    Raises :class:`CeilingExceeded` past ``ceiling`` product states.
    """
    names, blocks, csr, entry, points = _encode(graph, a)
    node_masks, pre_masks = kernels.tracked_reach(
        *csr, entry, 0, k, ceiling, n_blocks=len(blocks), backend=backend
    )
    return Exploration(a, raw=(names, blocks, node_masks, pre_masks, points))


def explore_reference(graph: AccessGraph, a: MemoryBlock, k: int) -> Exploration:
    """Same search written directly over :func:`tracked_update`; used to
    cross-check the kernels."""
    start = (graph.entry, EPSILON)
    seen = {start}
    work = [start]
    node_states: dict[str, set] = {n: set() for n in graph.nodes}
    node_states[graph.entry].add(EPSILON)
    pre: dict[AccessPoint, set] = {}
    while work:
        node, state = work.pop()
        for offset, c in enumerate(graph.nodes[node]):
            if c == a:
                pre.setdefault(AccessPoint(node, offset), set()).add(state)
            state = tracked_update(state, c, a, k)
        for succ in graph.successors[node]:
            if (succ, state) not in seen:
                seen.add((succ, state))
                node_states[succ].add(state)
                work.append((succ, state))
    return Exploration(a, node_states, pre)


def reachable_pre_states(
    sliced: AccessGraph, a: MemoryBlock, target: AccessPoint, k: int, ceiling: int = DEFAULT_STATE_CEILING
) -> set[TrackedState]:
    seq = sliced.nodes.get(target.node, ())
    if target.offset >= len(seq) or seq[target.offset] != a:
        raise ValueError(f"{target} is not an access to {a.id}")
    return explore(sliced, a, k, ceiling).pre.get(target, set())


def check_access(
    sliced: AccessGraph, a: MemoryBlock, target: AccessPoint, k: int, ceiling: int = DEFAULT_STATE_CEILING
) -> CheckVerdict:
    return verdict_of(reachable_pre_states(sliced, a, target, k, ceiling))


def product_to_dot(graph: AccessGraph, exploration: Exploration, k: int) -> str:
    """Render the explored product automaton, one vertex per (node, entry state)."""

    def label(state):
        return "eps" if state is EPSILON else "{" + ",".join(sorted(state.younger)) + "}"

    def vid(node, state):
        return f'"{node}|{label(state)}"'

    a = exploration.tracked
    out = [f'digraph "product_{a.id}" {{']
    for node in graph.nodes:
        for state in sorted(exploration.node_states.get(node, ()), key=lambda s: s.sort_key()):
            shape = "doublecircle" if node == graph.entry and state is EPSILON else "ellipse"
            out.append(f"  {vid(node, state)} [shape={shape}];")
            after = state
            for c in graph.nodes[node]:
                after = tracked_update(after, c, a, k)
            for succ in graph.successors[node]:
                out.append(f"  {vid(node, state)} -> {vid(succ, after)};")
    out.append("}")
    return "\n".join(out) + "\n"
