"""Compare the compiled and pure-Python reachability kernels.

    python benchmarks/bench_kernels.py [--nodes 200] [--blocks 24] [--ways 16] [--back-edges 80]
"""

import argparse
import random
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from cachemc import kernels  # noqa: E402
from cachemc.checker import _encode, explore  # noqa: E402
from cachemc.driver import analyze  # noqa: E402
from cachemc.model import AccessGraph, CacheConfig, MemoryBlock  # noqa: E402


def loop_program(rng, n_nodes, n_blocks, per_node=3, back_edges=None):
    blocks = [MemoryBlock(f"b{i}") for i in range(n_blocks)]
    names = [f"n{i}" for i in range(n_nodes)]
    nodes = {n: tuple(rng.choice(blocks) for _ in range(rng.randint(1, per_node))) for n in names}
    edges = [(names[i - 1], names[i]) for i in range(1, n_nodes)]
    edges += [(names[i], names[min(n_nodes - 1, i + rng.randint(2, 6))]) for i in range(0, n_nodes - 1, 3)]
    for _ in range(back_edges if back_edges is not None else n_nodes // 10):
        i = rng.randrange(1, n_nodes)
        edges.append((names[i], names[max(0, i - rng.randint(1, 12))]))
    return AccessGraph(nodes, tuple(edges), names[0])


def timed(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nodes", type=int, default=200)
    p.add_argument("--blocks", type=int, default=24)
    p.add_argument("--ways", type=int, default=16)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--back-edges", type=int, default=80)
    args = p.parse_args(argv)

    rng = random.Random(args.seed)
    graph = loop_program(rng, args.nodes, args.blocks, back_edges=args.back_edges)
    config = CacheConfig(ways=args.ways)
    targets = graph.blocks()[:8]
    backends = kernels.available_backends()
    print(f"graph: {len(graph.nodes)} nodes, {len(graph.edges)} edges, {args.blocks} blocks, k={args.ways}")
    print(f"backends: {', '.join(backends)}")

    rows = {}
    for backend in backends:
        states = sum(explore(graph, a, args.ways, backend=backend).state_count for a in targets)
        t = timed(lambda: [explore(graph, a, args.ways, backend=backend) for a in targets], args.repeat)
        rows[backend] = t
        print(f"  explore x{len(targets)} [{backend:8}] {t * 1e3:9.1f} ms  ({states} product states)")
    if len(rows) == 2:
        print(f"  explore speedup: {rows['python'] / rows['compiled']:.1f}x")

    # kernel alone, on pre-encoded arrays
    encoded = [_encode(graph, a) for a in targets]
    raw = {}
    for backend in backends:
        raw[backend] = timed(
            lambda: [
                kernels.tracked_reach(*csr, entry, 0, args.ways, 10**9, n_blocks=len(blocks), backend=backend)
                for _, blocks, csr, entry, _ in encoded
            ],
            args.repeat,
        )
        print(f"  raw kernel x{len(targets)} [{backend:8}] {raw[backend] * 1e3:9.1f} ms")
    if len(raw) == 2:
        print(f"  raw kernel speedup: {raw['python'] / raw['compiled']:.1f}x")

    for backend in backends:
        t = timed(lambda: analyze(graph, config, backend=backend), 1)
        print(f"  full analysis   [{backend:8}] {t * 1e3:9.1f} ms")


if __name__ == "__main__":
    main()
