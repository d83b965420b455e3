import itertools
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from cachemc.concrete import ConcreteCacheState, Outcome, concrete_update, simulate_trace
from cachemc.model import CacheConfig, MemoryBlock
from cachemc.tracked import EPSILON, Inside, alpha, check_state, tracked_update
from conftest import A, B, C, D, E


def test_alpha_examples():
    assert alpha((A, None, None, None), A) == Inside(frozenset())
    assert alpha((D, C, B, A), A) == Inside(frozenset("bcd"))
    assert alpha((B, C, None, None), A) is EPSILON


def test_update_examples():
    assert tracked_update(Inside(), B, A, 4) == Inside(frozenset("b"))
    assert tracked_update(Inside(frozenset("bcd")), B, A, 4) == Inside(frozenset("bcd"))
    assert tracked_update(EPSILON, C, A, 4) is EPSILON
    assert tracked_update(EPSILON, A, A, 4) == Inside()
    assert tracked_update(Inside(frozenset("bcd")), E, A, 4) is EPSILON
    assert tracked_update(Inside(frozenset("bc")), A, A, 4) == Inside()


def test_other_set_is_identity():
    s = Inside(frozenset("b"))
    assert tracked_update(s, MemoryBlock("z", 1), A, 2) == s


def test_one_way_cache_evicts_on_any_other_access():
    assert tracked_update(Inside(), B, A, 1) is EPSILON


def test_states_hash_canonically():
    assert {Inside(frozenset("cb")), Inside(frozenset(["b", "c"]))} == {Inside(frozenset("bc"))}
    assert Inside(frozenset("cb")).sort_key() == (1, ("b", "c"))


def _reachable_queues(ways, universe):
    """All queues reachable from the empty set by concrete updates."""
    start = ConcreteCacheState.empty(CacheConfig(ways=ways))
    seen, todo = {start}, [start]
    while todo:
        s = todo.pop()
        for b in universe:
            t = concrete_update(s, b)
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return seen


def test_commutation_small():
    universe = [MemoryBlock(x) for x in "abc"]
    for ways in (1, 2, 3):
        for s in _reachable_queues(ways, universe):
            for a, c in itertools.product(universe, repeat=2):
                lhs = alpha(concrete_update(s, c).lines[0], a)
                rhs = tracked_update(alpha(s.lines[0], a), c, a, ways)
                assert lhs == rhs
                check_state(rhs, a, ways)


@settings(max_examples=300)
@given(
    ways=st.integers(1, 5),
    trace=st.lists(st.sampled_from([MemoryBlock(x) for x in "abcdefg"]), max_size=40),
)
def test_hit_iff_inside_and_distinct_count(ways, trace):
    outcomes, _ = simulate_trace(ConcreteCacheState.empty(CacheConfig(ways=ways)), trace)
    for a in {b for b in trace}:
        state = EPSILON
        for t, (c, outcome) in enumerate(zip(trace, outcomes)):
            if c == a:
                assert (outcome is Outcome.HIT) == isinstance(state, Inside)
                # distinct blocks since the previous access to a
                prev = [i for i in range(t) if trace[i] == a]
                if prev:
                    distinct = {b for b in trace[prev[-1] + 1 : t]}
                    assert (outcome is Outcome.HIT) == (len(distinct) < ways)
            state = tracked_update(state, c, a, ways)
            check_state(state, a, ways)
