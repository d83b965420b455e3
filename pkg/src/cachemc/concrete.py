"""Exact LRU semantics, trace simulation and brute-force ground-truth oracles."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import AccessGraph, AccessPoint, CacheConfig, MemoryBlock

DEFAULT_PATH_CEILING = 2_000_000


class OracleExplosion(RuntimeError):
    pass


@dataclass(frozen=True)
class ConcreteCacheState:
    """Per-set LRU queues, youngest first, padded with ``None`` for empty lines."""

    ways: int
    lines: tuple[tuple[MemoryBlock | None, ...], ...]

    @classmethod
    def empty(cls, config: CacheConfig) -> "ConcreteCacheState":
        return cls(config.ways, ((None,) * config.ways,) * config.sets)

    def set_lines(self, set_index: int) -> tuple[MemoryBlock | None, ...]:
        return self.lines[set_index]

    def age(self, block: MemoryBlock) -> int | None:
        queue = self.lines[block.set_index]
        return queue.index(block) if block in queue else None

    def __contains__(self, block: MemoryBlock) -> bool:
        return block in self.lines[block.set_index]

    def check(self):
        for queue in self.lines:
            assert len(queue) == self.ways
            present = [b for b in queue if b is not None]
            assert len(set(present)) == len(present), "duplicate block in set"
            assert all(b is not None for b in queue[: len(present)]), "hole before empty line"


def lru_update(queue: tuple, block) -> tuple:
    """LRU update of one set's queue (youngest first, fixed length)."""
    if block in queue:
        i = queue.index(block)
        return (block,) + queue[:i] + queue[i + 1 :]
    return (block,) + queue[:-1]


def concrete_update(state: ConcreteCacheState, block: MemoryBlock) -> ConcreteCacheState:
    s = block.set_index
    lines = state.lines[:s] + (lru_update(state.lines[s], block),) + state.lines[s + 1 :]
    return ConcreteCacheState(state.ways, lines)


class Outcome(enum.Enum):
    HIT = "H"
    MISS = "M"


def simulate_trace(
    init: ConcreteCacheState, trace: Iterable[MemoryBlock]
) -> tuple[list[Outcome], ConcreteCacheState]:
    outcomes = []
    state = init
    for block in trace:
        outcomes.append(Outcome.HIT if block in state else Outcome.MISS)
        state = concrete_update(state, block)
    return outcomes, state


class OracleKind(enum.Enum):
    ONLY_HITS = "only-hits"
    ONLY_MISSES = "only-misses"
    MIXED = "mixed"
    NEVER_REACHED = "never-reached"


@dataclass(frozen=True)
class OracleVerdict:
    hits: int = 0
    misses: int = 0

    @property
    def kind(self) -> OracleKind:
        if self.hits and self.misses:
            return OracleKind.MIXED
        if self.hits:
            return OracleKind.ONLY_HITS
        if self.misses:
            return OracleKind.ONLY_MISSES
        return OracleKind.NEVER_REACHED


def saturation_bound(graph: AccessGraph) -> int:
    """Path length after which no new tracked-block situation can appear."""
    per_set: dict[int, int] = {}
    for block in graph.blocks():
        per_set[block.set_index] = per_set.get(block.set_index, 0) + 1
    widest = max(per_set.values(), default=0)
    return len(graph.nodes) * (2**widest + 1)


def _tally(graph: AccessGraph, counts: dict) -> dict[AccessPoint, OracleVerdict]:
    return {
        point: OracleVerdict(*counts.get(point, (0, 0))) for point, _ in graph.access_points()
    }


def enumerate_paths_oracle(
    graph: AccessGraph,
    config: CacheConfig,
    bound: int | None = None,
    ceiling: int = DEFAULT_PATH_CEILING,
) -> dict[AccessPoint, OracleVerdict]:
    """Simulate every path from the entry with at most ``bound`` nodes, starting
    from the empty cache.  Counts are numbers of witnessing path prefixes.

    Raises ``OracleExplosion`` once more than ``ceiling`` paths were enumerated.
    """
    if bound is None:
        bound = saturation_bound(graph)
    if bound < 1:
        raise ValueError("bound must be >= 1")
    counts: dict[AccessPoint, list[int]] = {}
    stack = [(graph.entry, ConcreteCacheState.empty(config), 1)]
    paths = 0
    while stack:
        node, state, depth = stack.pop()
        paths += 1
        if paths > ceiling:
            raise OracleExplosion(f"more than {ceiling} paths of length <= {bound}")
        for offset, block in enumerate(graph.nodes[node]):
            c = counts.setdefault(AccessPoint(node, offset), [0, 0])
            c[0 if block in state else 1] += 1
            state = concrete_update(state, block)
        if depth < bound:
            for nxt in graph.successors[node]:
                stack.append((nxt, state, depth + 1))
    return _tally(graph, counts)


def concrete_reachability_oracle(
    graph: AccessGraph, config: CacheConfig, bound: int | None = None
) -> dict[AccessPoint, OracleVerdict]:
    """Breadth-first search over (node, concrete cache) pairs reachable along
    paths of at most ``bound`` nodes.

    Gives the same hit/miss/mixed answer as :func:`enumerate_paths_oracle`
    for the same bound without enumerating paths one by one; counts are
    numbers of distinct concrete pre-states instead of paths.
    """
    if bound is None:
        bound = saturation_bound(graph)
    start = (graph.entry, ConcreteCacheState.empty(config))
    seen = {start}
    frontier = deque([(start, 1)])
    observed: dict[AccessPoint, tuple[set, set]] = {}
    while frontier:
        (node, state), depth = frontier.popleft()
        for offset, block in enumerate(graph.nodes[node]):
            hit_states, miss_states = observed.setdefault(AccessPoint(node, offset), (set(), set()))
            (hit_states if block in state else miss_states).add(state)
            state = concrete_update(state, block)
        if depth < bound:
            for nxt in graph.successors[node]:
                key = (nxt, state)
                if key not in seen:
                    seen.add(key)
                    frontier.append((key, depth + 1))
    counts = {p: (len(h), len(m)) for p, (h, m) in observed.items()}
    return _tally(graph, counts)


def path_traces(graph: AccessGraph, bound: int) -> Iterable[list[tuple[AccessPoint, MemoryBlock]]]:
    """Yield the access sequence of every maximal path prefix of at most ``bound`` nodes."""
    stack: list[tuple[str, int, list]] = [(graph.entry, 1, [])]
    while stack:
        node, depth, trace = stack.pop()
        trace = trace + [(AccessPoint(node, i), b) for i, b in enumerate(graph.nodes[node])]
        succs: Sequence[str] = graph.successors[node] if depth < bound else ()
        if not succs:
            yield trace
        for nxt in succs:
            stack.append((nxt, depth + 1, trace))
