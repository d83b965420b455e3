"""Command-line front end.

    cachemc analyze prog.cache [--mode full|ai] [--ways N ...] [--out report.json]
    cachemc bench programs/ [--ways 4 --ways 8 --ways 16]
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .checker import DEFAULT_STATE_CEILING, CeilingExceeded, product_to_dot
from .concrete import (
    OracleExplosion,
    OracleKind,
    concrete_reachability_oracle,
    enumerate_paths_oracle,
    saturation_bound,
)
from .driver import analyze, compute_stats, dumps_reports, format_pct
from .model import Kind, ProgramError, graph_to_dot, load_program

EXIT_OK, EXIT_INPUT, EXIT_ANALYSIS = 0, 1, 2
ORACLE_PATH_CEILING = 200_000


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)] if rows else [len(h) for h in header]
    fmt = lambda row: "  ".join(  # noqa: E731
        str(c).ljust(w) if i == 0 else str(c).rjust(w) for i, (c, w) in enumerate(zip(row, widths))
    )
    return "\n".join([fmt(header), fmt(["-" * w for w in widths]), *map(fmt, rows)]) + "\n"


def summary_table(reports) -> str:
    rows = []
    for r in reports:
        s = r.summary
        un, nc = compute_stats(r)
        rows.append([
            r.program, r.memory_blocks(), r.config.ways, r.config.sets, s.live, s.ai_unknown,
            s.refined_hit, s.refined_miss, format_pct(un), format_pct(nc) if r.mode == "full" else "-",
        ])
    header = ["program", "size", "ways", "sets", "accesses", "unknown", "mc_hit", "mc_miss", "Un", "Nc"]
    return _table(header, rows)


def oracle_check(graph, config, report, bound: int | None) -> list[str]:
    """Cross-check final classifications against brute-force simulation."""
    bound = bound or saturation_bound(graph)
    try:
        verdicts = enumerate_paths_oracle(graph, config, bound, ceiling=ORACLE_PATH_CEILING)
    except OracleExplosion:
        verdicts = concrete_reachability_oracle(graph, config, bound)
    problems = []
    for rec in report.records:
        v = verdicts[rec.point]
        kind = rec.final.kind
        if kind is Kind.ALWAYS_HIT and v.misses:
            problems.append(f"{rec.point} ({rec.block}): classified always-hit, oracle saw {v.misses} miss(es)")
        elif kind is Kind.ALWAYS_MISS and v.hits:
            problems.append(f"{rec.point} ({rec.block}): classified always-miss, oracle saw {v.hits} hit(s)")
        elif kind is Kind.DEAD and v.kind is not OracleKind.NEVER_REACHED:
            problems.append(f"{rec.point} ({rec.block}): classified dead but reached by the oracle")
    return problems


def _write_dumps(reports, sliced_path, product_path):
    sliced, product = [], []
    for r in reports:
        for a, (sl, exploration) in sorted(r.artifacts.items()):
            tag = f"{r.program}_w{r.config.ways}_{a.id}"
            sliced.append(graph_to_dot(sl.graph, f"slice_{tag}"))
            if exploration is not None:
                product.append(product_to_dot(sl.graph, exploration, r.config.ways))
    if sliced_path:
        Path(sliced_path).write_text("".join(sliced))
    if product_path:
        Path(product_path).write_text("".join(product))


def cmd_analyze(args) -> int:
    ways_list = args.ways or [None]
    reports = []
    try:
        for ways in ways_list:
            graph, config = load_program(args.program, ways=ways, sets=args.sets)
            report = analyze(
                graph, config, mode=args.mode, ceiling=args.state_ceiling,
                workers=args.jobs, strict=args.strict, program=Path(args.program).stem,
            )
            reports.append(report)
            if args.oracle_check:
                problems = oracle_check(graph, config, report, args.oracle_bound)
                for p in problems:
                    print(f"oracle mismatch: {p}", file=sys.stderr)
                if problems:
                    return EXIT_ANALYSIS
                print(f"oracle check ({config.ways} ways): ok", file=sys.stderr)
    except (ProgramError, OSError) as exc:
        print(f"error: {args.program}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CeilingExceeded as exc:
        print(f"error: state ceiling exceeded: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS

    table = summary_table(reports)
    sys.stdout.write(table)
    if args.out:
        out = Path(args.out)
        out.write_text(dumps_reports(reports))
        out.with_suffix(".txt").write_text(table)
    if args.dump_sliced or args.dump_product:
        _write_dumps(reports, args.dump_sliced, args.dump_product)
    return EXIT_OK


def cmd_bench(args) -> int:
    files = sorted(Path(args.directory).glob("*.cache"))
    ways_list = args.ways or [None]
    rows, failures, runs = [], 0, []
    header = ["program", "size"]
    for w in ways_list:
        tag = f"@{w}" if w else ""
        header += [f"Un{tag}", f"Nc{tag}"]
    for path in files:
        row: list = [path.stem]
        try:
            for ways in ways_list:
                graph, config = load_program(path, ways=ways, sets=args.sets)
                report = analyze(graph, config, ceiling=args.state_ceiling, workers=args.jobs, program=path.stem)
                un, nc = compute_stats(report)
                if len(row) == 1:
                    row.append(report.memory_blocks())
                row += [format_pct(un), format_pct(nc)]
                runs.append(report)
        except (ProgramError, OSError, CeilingExceeded) as exc:
            failures += 1
            print(f"error: {path}: {exc}", file=sys.stderr)
            continue
        rows.append(row)
    table = _table(header, rows)
    sys.stdout.write(table)
    if args.out:
        Path(args.out).write_text(dumps_reports(runs))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cachemc", description="LRU instruction-cache hit/miss classifier")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--ways", type=int, action="append", help="associativity (repeatable)")
        p.add_argument("--sets", type=int, help="override the number of cache sets")
        p.add_argument("--state-ceiling", type=int, default=DEFAULT_STATE_CEILING)
        p.add_argument("--jobs", type=int, default=1, help="parallel refinement workers")
        p.add_argument("--out", help="write the JSON report here")

    a = sub.add_parser("analyze", help="classify every access of one program")
    a.add_argument("program")
    a.add_argument("--mode", choices=("ai", "full"), default="full")
    a.add_argument("--oracle-check", action="store_true", help="cross-validate against path enumeration")
    a.add_argument("--oracle-bound", type=int)
    a.add_argument("--dump-sliced", metavar="PATH", help="write sliced graphs as DOT")
    a.add_argument("--dump-product", metavar="PATH", help="write explored product automata as DOT")
    a.add_argument("--strict", action="store_true", help="fail (exit 2) when the state ceiling is hit")
    common(a)
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("bench", help="Un/Nc table over a directory of programs")
    b.add_argument("directory")
    common(b)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
