import random

from hypothesis import given, settings
from hypothesis import strategies as st

from cachemc.ai import fixpoint
from cachemc.checker import explore
from cachemc.model import AccessGraph, AccessPoint, CacheConfig, MemoryBlock
from cachemc.slicer import slice_graph
from cachemc.tracked import EPSILON
from conftest import A, B, C
from graphgen import random_graph


def _slice(graph, config, a):
    return slice_graph(graph, a, fixpoint(graph, config).may_in())


def test_fig1_nothing_removable(fig1):
    graph, config = fig1
    sl = _slice(graph, config, A)
    assert sl.graph.nodes == graph.nodes
    assert set(sl.graph.edges) == set(graph.edges)
    assert not sl.removed


def test_evicted_region_collapses_to_one_edge():
    nodes = {"n0": (A,), "n1": (B,), "n2": (C,)}
    nodes.update({f"x{i}": (MemoryBlock(f"y{i % 3}"),) for i in range(10)})
    nodes["last"] = (A,)
    names = list(nodes)
    graph = AccessGraph(nodes, tuple(zip(names, names[1:])), "n0")
    sl = _slice(graph, CacheConfig(ways=2), A)
    assert sl.removed == {f"x{i}" for i in range(10)}
    assert sl.graph.edges == (("n0", "n1"), ("n1", "n2"), ("n2", "last"))
    assert sl.graph.size() == (4, 4)


def test_block_never_accessed_leaves_only_entry_marker():
    graph = AccessGraph({"n0": (B,), "n1": (C,)}, (("n0", "n1"), ("n1", "n0")), "n0")
    sl = _slice(graph, CacheConfig(ways=2), A)
    assert sl.graph.nodes == {"n0": ()}
    assert sl.graph.edges == (("n0", "n0"),)


def test_other_sets_dropped_and_origin_tracked():
    a, z = MemoryBlock("a", 0), MemoryBlock("z", 1)
    graph = AccessGraph({"n": (z, a, z, a)}, (), "n")
    sl = _slice(graph, CacheConfig(ways=2, sets=2), a)
    assert sl.graph.nodes["n"] == (a, a)
    assert sl.origin == {AccessPoint("n", 0): AccessPoint("n", 1), AccessPoint("n", 1): AccessPoint("n", 3)}


def test_nodes_accessing_the_block_are_kept_even_when_absent():
    # the reload after a certain eviction stays in the graph
    graph = AccessGraph({"n0": (A, B, C), "n1": (B,), "n2": (A,)}, (("n0", "n1"), ("n1", "n2")), "n0")
    sl = _slice(graph, CacheConfig(ways=2), A)
    assert sl.removed == {"n1"}
    assert "n2" in sl.graph.nodes


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_absent_in_may_means_only_epsilon_arrives(seed):
    rng = random.Random(seed)
    graph = random_graph(rng, back_edges=rng.randint(0, 3))
    config = CacheConfig(ways=rng.choice([2, 3, 4]))
    may_in = fixpoint(graph, config).may_in()
    for a in graph.blocks():
        exploration = explore(graph, a, config.ways)
        for node, state in may_in.items():
            if a not in state:
                assert exploration.node_states[node] <= {EPSILON}


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32))
def test_slicing_preserves_pre_states(seed):
    rng = random.Random(seed)
    graph = random_graph(rng, back_edges=rng.randint(0, 3), sets=rng.choice([1, 2]), dead_prob=0.1)
    config = CacheConfig(ways=rng.choice([2, 4]), sets=2)
    may_in = fixpoint(graph, config).may_in()
    for a in graph.blocks():
        sl = slice_graph(graph, a, may_in)
        full = explore(graph, a, config.ways)
        cut = explore(sl.graph, a, config.ways)
        for p, orig in sl.origin.items():
            if sl.graph.nodes[p.node][p.offset] == a:
                assert cut.pre.get(p, set()) == full.pre.get(orig, set())
        assert len(sl.graph.nodes) <= len(graph.nodes)
        assert sl.graph.size()[1] <= graph.size()[1]
