"""Single-block abstraction of LRU cache sets.

For a tracked block ``a`` a cache set is summarised either as "``a`` is not
cached" (:data:`EPSILON`) or as the set of blocks currently younger than
``a`` (:class:`Inside`).  Whether ``a`` is cached after any access depends
only on this summary, so nothing about ``a`` is lost.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .model import MemoryBlock


class Epsilon:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EPSILON"

    def __reduce__(self):
        return (Epsilon, ())

    def sort_key(self):
        return (0, ())


EPSILON = Epsilon()


@dataclass(frozen=True)
class Inside:
    younger: frozenset[str] = frozenset()

    def __repr__(self):
        return "Inside({" + ",".join(sorted(self.younger)) + "})"

    def sort_key(self):
        return (1, tuple(sorted(self.younger)))


TrackedState = Union[Epsilon, Inside]


def is_cached(state: TrackedState) -> bool:
    return isinstance(state, Inside)


def alpha(lines: Sequence[MemoryBlock | None], a: MemoryBlock) -> TrackedState:
    """Abstract one set's queue (youngest first) with respect to ``a``."""
    if a not in lines:
        return EPSILON
    return Inside(frozenset(b.id for b in lines[: lines.index(a)]))


def tracked_update(state: TrackedState, c: MemoryBlock, a: MemoryBlock, k: int) -> TrackedState:
    if c.set_index != a.set_index:
        return state
    if c == a:
        return Inside()
    if state is EPSILON:
        return EPSILON
    if c.id in state.younger:
        return state
    if len(state.younger) < k - 1:
        return Inside(state.younger | {c.id})
    return EPSILON


def check_state(state: TrackedState, a: MemoryBlock, k: int):
    if isinstance(state, Inside):
        assert a.id not in state.younger
        assert len(state.younger) <= k - 1
