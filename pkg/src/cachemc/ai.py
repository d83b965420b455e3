"""May/must age-bound abstract interpretation of LRU caches."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .model import AccessGraph, AccessPoint, CacheConfig, Classification, Kind, MemoryBlock, Provenance

MAY = "may"
MUST = "must"


@dataclass(frozen=True)
class AgeBoundState:
    """Partial map block -> age bound.

    For ``may`` the bound is a lower bound on the age of a block that might be
    cached (absent means definitely not cached); for ``must`` it is an upper
    bound on the age of a block that is definitely cached.
    """

    polarity: str
    ways: int
    ages: Mapping[MemoryBlock, int] = field(default_factory=dict)

    def __contains__(self, block: MemoryBlock) -> bool:
        return block in self.ages

    def get(self, block: MemoryBlock) -> int | None:
        return self.ages.get(block)

    def as_queue(self, set_index: int = 0) -> list[frozenset[str]]:
        """Blocks grouped by bound, youngest first, as drawn in ``[b,{a,d},c,⊥]``."""
        slots: list[set[str]] = [set() for _ in range(self.ways)]
        for block, age in self.ages.items():
            if block.set_index == set_index:
                slots[age].add(block.id)
        return [frozenset(s) for s in slots]

    def check(self):
        assert all(0 <= a < self.ways for a in self.ages.values())
        if self.polarity == MUST:
            per_set: dict[int, list[int]] = {}
            for block, age in self.ages.items():
                per_set.setdefault(block.set_index, []).append(age)
            for ages in per_set.values():
                assert len(ages) <= self.ways
                for bound in range(self.ways):
                    assert sum(1 for a in ages if a <= bound) <= bound + 1


def empty_state(polarity: str, config: CacheConfig) -> AgeBoundState:
    return AgeBoundState(polarity, config.ways, {})


def _update(state: AgeBoundState, block: MemoryBlock, age_ties: bool) -> AgeBoundState:
    k = state.ways
    old = state.ages.get(block)
    limit = k if old is None else old
    ages = {block: 0}
    for other, age in state.ages.items():
        if other == block:
            continue
        if other.set_index == block.set_index and (age < limit or (age_ties and age == old)):
            age += 1
            if age >= k:
                continue
        ages[other] = age
    return AgeBoundState(state.polarity, k, ages)


def must_update(state: AgeBoundState, block: MemoryBlock) -> AgeBoundState:
    """Accessed block becomes age 0; blocks strictly younger than its bound age."""
    assert state.polarity == MUST
    return _update(state, block, age_ties=False)


def may_update(state: AgeBoundState, block: MemoryBlock) -> AgeBoundState:
    """Accessed block becomes age 0; blocks whose lower bound does not exceed its
    bound age (all of them on a certain miss)."""
    assert state.polarity == MAY
    return _update(state, block, age_ties=True)


def must_join(s1: AgeBoundState, s2: AgeBoundState) -> AgeBoundState:
    ages = {b: max(a, s2.ages[b]) for b, a in s1.ages.items() if b in s2.ages}
    return AgeBoundState(MUST, s1.ways, ages)


def may_join(s1: AgeBoundState, s2: AgeBoundState) -> AgeBoundState:
    ages = dict(s2.ages)
    for b, a in s1.ages.items():
        ages[b] = min(a, ages.get(b, a))
    return AgeBoundState(MAY, s1.ways, ages)


@dataclass
class FixpointResult:
    node_in: dict[str, tuple[AgeBoundState, AgeBoundState]]
    node_out: dict[str, tuple[AgeBoundState, AgeBoundState]]
    access_in: dict[AccessPoint, tuple[AgeBoundState, AgeBoundState]]
    iterations: int = 0

    def may_in(self) -> dict[str, AgeBoundState]:
        return {n: may for n, (may, _) in self.node_in.items()}


def transfer(may: AgeBoundState, must: AgeBoundState, seq: Sequence[MemoryBlock]):
    pre = []
    for block in seq:
        pre.append((may, must))
        may, must = may_update(may, block), must_update(must, block)
    return (may, must), pre


def fixpoint(graph: AccessGraph, config: CacheConfig, order: Sequence[str] | None = None) -> FixpointResult:
    """Worklist solution of the may/must dataflow equations.

    Nodes are drained in reverse postorder unless ``order`` gives another
    priority.  Nodes unreachable from the entry get no state at all.
    """
    live = graph.reachable
    order = [n for n in (order or graph.reverse_postorder()) if n in live]
    rank = {n: i for i, n in enumerate(order)}
    empty_may, empty_must = empty_state(MAY, config), empty_state(MUST, config)

    node_in: dict[str, tuple[AgeBoundState, AgeBoundState]] = {}
    node_out: dict[str, tuple[AgeBoundState, AgeBoundState]] = {}
    heap = [rank[graph.entry]]
    queued = {graph.entry}
    iterations = 0
    while heap:
        node = order[heapq.heappop(heap)]
        queued.discard(node)
        iterations += 1
        incoming = [node_out[p] for p in graph.predecessors[node] if p in node_out]
        if node == graph.entry:
            incoming.append((empty_may, empty_must))
        may, must = incoming[0]
        for m, u in incoming[1:]:
            may, must = may_join(may, m), must_join(must, u)
        node_in[node] = (may, must)
        out, _ = transfer(may, must, graph.nodes[node])
        if node_out.get(node) != out:
            node_out[node] = out
            for succ in graph.successors[node]:
                if succ not in queued:
                    queued.add(succ)
                    heapq.heappush(heap, rank[succ])

    access_in = {}
    for node, (may, must) in node_in.items():
        _, pre = transfer(may, must, graph.nodes[node])
        for offset, states in enumerate(pre):
            access_in[AccessPoint(node, offset)] = states
    return FixpointResult(node_in, node_out, access_in, iterations)


def classify_ai(may: AgeBoundState, must: AgeBoundState, block: MemoryBlock) -> Classification:
    if block in must:
        return Classification(Kind.ALWAYS_HIT, Provenance.AI)
    if block not in may:
        return Classification(Kind.ALWAYS_MISS, Provenance.AI)
    return Classification(Kind.UNKNOWN, Provenance.AI)
