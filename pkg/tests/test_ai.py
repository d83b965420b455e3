import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cachemc.ai import (
    MAY,
    MUST,
    AgeBoundState,
    classify_ai,
    fixpoint,
    may_join,
    may_update,
    must_join,
    must_update,
)
from cachemc.concrete import ConcreteCacheState, concrete_update, path_traces
from cachemc.model import AccessGraph, AccessPoint, CacheConfig, Kind, MemoryBlock
from conftest import A, B, C, D
from graphgen import random_graph


def must(**ages):
    return AgeBoundState(MUST, 4, {MemoryBlock(b): a for b, a in ages.items()})


def may(**ages):
    return AgeBoundState(MAY, 4, {MemoryBlock(b): a for b, a in ages.items()})


def test_must_update_examples():
    assert must_update(must(a=0), B) == must(b=0, a=1)
    # a is aged out by an access to an unseen block
    assert must_update(must(a=3), B) == must(b=0)
    assert must_update(must(b=0), B) == must(b=0)


def test_must_update_keeps_equal_bounds():
    assert must_update(must(x=1, b=1, y=0), B) == must(b=0, x=1, y=1)


def test_must_join_examples():
    assert must_join(must(a=0), must(d=0, c=1, b=2, a=3)) == must(a=3)
    s = must(d=0, c=1)
    assert must_join(s, s) == s
    assert must_join(must(a=1), must(b=1)) == must()


def test_may_update_examples():
    assert may_update(may(a=0, d=0, c=1, b=2), B) == may(b=0, a=1, d=1, c=2)
    assert may_update(may(a=0), B) == may(b=0, a=1)
    assert may_update(may(b=0), B) == may(b=0)


def test_may_update_ages_blocks_tied_with_accessed_one():
    assert may_update(may(b=0, a=1, d=1, c=2), A) == may(a=0, b=1, d=2, c=2)


def test_may_join_examples():
    assert may_join(may(a=0), may(d=0, c=1, b=2, a=3)) == may(a=0, d=0, c=1, b=2)
    s = may(a=1, b=0)
    assert may_join(s, may()) == s
    assert may_join(s, s) == s


def test_fixpoint_fig1_exit_states(fig1):
    result = fixpoint(*fig1)
    out = {n: (m.as_queue(), u.as_queue()) for n, (m, u) in result.node_out.items()}
    q = lambda *slots: [frozenset(s) for s in slots]  # noqa: E731
    assert out["n1"] == (q("a", "", "", ""), q("a", "", "", ""))
    assert out["n2"] == (q("b", "a", "", ""), q("b", "a", "", ""))
    assert out["n3"] == (q("c", "b", "a", ""), q("c", "b", "a", ""))
    assert out["n4"] == (q("d", "c", "b", "a"), q("d", "c", "b", "a"))
    assert out["n5"] == (q("b", "ad", "c", ""), q("b", "", "", ""))
    assert out["n6"][1] == q("a", "b", "", "")
    assert result.node_in["n5"][1] == must(a=3)


def test_fixpoint_straight_line():
    graph = AccessGraph({"n": (A,)}, (), "n")
    result = fixpoint(graph, CacheConfig(ways=2))
    may_in, must_in = result.access_in[AccessPoint("n", 0)]
    assert not may_in.ages and not must_in.ages
    assert result.node_out["n"][0].ages == {A: 0} == result.node_out["n"][1].ages


def test_fixpoint_self_loop():
    graph = AccessGraph({"n": (A,)}, (("n", "n"),), "n")
    result = fixpoint(graph, CacheConfig(ways=2))
    may_in, must_in = result.node_in["n"]
    # entry joins the cold state with the loop's out-state
    assert may_in.ages == {A: 0}
    assert must_in.ages == {}
    assert result.node_out["n"][1].ages == {A: 0}


def test_classify_examples(fig1):
    result = fixpoint(*fig1)
    assert classify_ai(*result.access_in[AccessPoint("n6", 0)], A).kind is Kind.UNKNOWN
    may_in, must_in = result.access_in[AccessPoint("n2", 0)]
    assert may_in.ages == {A: 0}
    assert classify_ai(may_in, must_in, B).kind is Kind.ALWAYS_MISS
    assert classify_ai(may(b=0), must(b=0), B).kind is Kind.ALWAYS_HIT


def test_dead_nodes_get_no_state():
    graph = AccessGraph({"n": (A,), "dead": (B,)}, (("dead", "n"),), "n")
    result = fixpoint(graph, CacheConfig(ways=2))
    assert "dead" not in result.node_in


def _check_sound(graph, config, bound):
    result = fixpoint(graph, config)
    for trace in path_traces(graph, bound):
        s = ConcreteCacheState.empty(config)
        for point, block in trace:
            may_in, must_in = result.access_in[point]
            may_in.check()
            must_in.check()
            if classify_ai(may_in, must_in, block).kind is Kind.ALWAYS_HIT:
                assert block in s
            if block not in may_in:
                assert block not in s
            for y in {b for b in graph.blocks()}:
                age = s.age(y)
                if y in must_in:
                    assert age is not None and age <= must_in.get(y)
                if age is not None:
                    assert y in may_in and may_in.get(y) <= age
            s = concrete_update(s, block)


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_soundness_and_bound_sandwich(seed):
    rng = random.Random(seed)
    graph = random_graph(rng, max_nodes=12, max_blocks=6, sets=rng.choice([1, 2]), back_edges=rng.randint(0, 2))
    config = CacheConfig(ways=rng.randint(1, 4), sets=2)
    _check_sound(graph, config, bound=min(12, len(graph.nodes) + 3))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_fixpoint_is_order_independent(seed):
    rng = random.Random(seed)
    graph = random_graph(rng, back_edges=3, dead_prob=0.1)
    config = CacheConfig(ways=rng.randint(1, 4))
    reference = fixpoint(graph, config)
    order = list(graph.nodes)
    rng.shuffle(order)
    shuffled = fixpoint(graph, config, order=order)
    assert shuffled.node_in == reference.node_in
    assert shuffled.access_in == reference.access_in


@pytest.mark.parametrize("op", [must_update, may_update])
def test_updates_keep_bounds_below_ways(op):
    s = (must if op is must_update else may)(a=0, b=1, c=2, d=3)
    for block in (A, B, C, D, MemoryBlock("e")):
        s = op(s, block)
        s.check()


def test_drawn_node6_may_state_would_be_unsound():
    # [b, a, c, d] respects every lower bound of the node-5 exit state
    # b@0, a@1, d@1, c@2, and accessing a leaves c at age 2, so no sound
    # may state after that access can claim c is at least 3 lines old.
    before = may(b=0, a=1, d=1, c=2)
    queue = (B, A, C, D)
    assert all(before.get(x) <= queue.index(x) for x in queue)
    after = ConcreteCacheState(4, (queue,))
    after = concrete_update(after, A)
    assert after.age(C) == 2
    assert may_update(before, A).get(C) == 2
