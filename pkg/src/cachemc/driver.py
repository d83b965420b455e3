"""End-to-end classification: may/must first, then exact refinement of the
accesses it leaves unknown."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .ai import FixpointResult, classify_ai, fixpoint
from .checker import DEFAULT_STATE_CEILING, CeilingExceeded, CheckKind, Exploration, explore
from .model import (
    AccessGraph,
    AccessPoint,
    CacheConfig,
    Classification,
    Kind,
    MemoryBlock,
    Provenance,
)
from .slicer import Slice, slice_graph

log = logging.getLogger(__name__)

REPORT_VERSION = 1


@dataclass(frozen=True)
class AccessRecord:
    point: AccessPoint
    block: MemoryBlock
    ai: Classification
    final: Classification


@dataclass
class Summary:
    total: int
    dead: int
    ai_unknown: int
    refined_hit: int
    refined_miss: int
    final_unknown: int

    @property
    def live(self) -> int:
        return self.total - self.dead

    @property
    def refined(self) -> int:
        return self.refined_hit + self.refined_miss


@dataclass
class AnalysisReport:
    config: CacheConfig
    records: list[AccessRecord]
    mode: str = "full"
    program: str = ""
    warnings: list[str] = field(default_factory=list)
    # in-memory only: per tracked block slice and exploration
    artifacts: dict = field(default_factory=dict, compare=False, repr=False)

    def by_point(self) -> dict[AccessPoint, AccessRecord]:
        return {r.point: r for r in self.records}

    @property
    def summary(self) -> Summary:
        dead = sum(r.final.kind is Kind.DEAD for r in self.records)
        ai_unknown = [r for r in self.records if r.ai.kind is Kind.UNKNOWN]
        return Summary(
            total=len(self.records),
            dead=dead,
            ai_unknown=len(ai_unknown),
            refined_hit=sum(r.final.kind is Kind.ALWAYS_HIT for r in ai_unknown),
            refined_miss=sum(r.final.kind is Kind.ALWAYS_MISS for r in ai_unknown),
            final_unknown=sum(r.final.kind is Kind.UNKNOWN for r in self.records),
        )

    def memory_blocks(self) -> int:
        return len({r.block for r in self.records})


def precision_stats(live: int, unknown: int, refined: int) -> tuple[float, float]:
    """(Un, Nc) in percent: share of live accesses left unknown by may/must, and
    share of those settled by the checker.  Empty denominators give 0."""
    un = 100.0 * unknown / live if live else 0.0
    nc = 100.0 * refined / unknown if unknown else 0.0
    return un, nc


def compute_stats(report: AnalysisReport) -> tuple[float, float]:
    s = report.summary
    return precision_stats(s.live, s.ai_unknown, s.refined)


def format_pct(value: float) -> str:
    return f"{value:.1f}%"


def _refine_block(graph, config, fix, a, ceiling, backend) -> tuple[Slice, Exploration | None, str | None]:
    sl = slice_graph(graph, a, fix.may_in())
    try:
        return sl, explore(sl.graph, a, config.ways, ceiling, backend=backend), None
    except CeilingExceeded as exc:
        return sl, None, f"block {a.id}: {exc}; its unknown accesses stay unknown"


def analyze(
    graph: AccessGraph,
    config: CacheConfig,
    mode: str = "full",
    ceiling: int = DEFAULT_STATE_CEILING,
    workers: int = 1,
    backend: str | None = None,
    strict: bool = False,
    program: str = "",
) -> AnalysisReport:
    if mode not in ("ai", "full"):
        raise ValueError(f"unknown mode {mode!r}")
    fix: FixpointResult = fixpoint(graph, config)
    ai: dict[AccessPoint, Classification] = {}
    for point, block in graph.access_points():
        if point.node not in graph.reachable:
            ai[point] = Classification(Kind.DEAD, Provenance.AI)
        else:
            may, must = fix.access_in[point]
            ai[point] = classify_ai(may, must, block)
    final = dict(ai)
    report = AnalysisReport(config, [], mode, program)

    if mode == "full":
        unknown: dict[MemoryBlock, list[AccessPoint]] = {}
        for point, block in graph.access_points():
            if ai[point].kind is Kind.UNKNOWN:
                unknown.setdefault(block, []).append(point)
        targets = sorted(unknown)
        jobs = lambda a: _refine_block(graph, config, fix, a, ceiling, backend)  # noqa: E731
        if workers > 1 and len(targets) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(jobs, targets))
        else:
            results = [jobs(a) for a in targets]
        for a, (sl, exploration, warning) in zip(targets, results):
            report.artifacts[a] = (sl, exploration)
            if warning is not None:
                if strict:
                    raise CeilingExceeded(warning)
                log.warning(warning)
                report.warnings.append(warning)
                continue
            back = {orig: p for p, orig in sl.origin.items()}
            for point in unknown[a]:
                kind = exploration.verdict(back[point]).kind
                final[point] = Classification(
                    {
                        CheckKind.ALL_HIT: Kind.ALWAYS_HIT,
                        CheckKind.ALL_MISS: Kind.ALWAYS_MISS,
                        CheckKind.MIXED: Kind.UNKNOWN,
                        CheckKind.UNREACHABLE: Kind.DEAD,
                    }[kind],
                    Provenance.MC,
                )

    report.records = [
        AccessRecord(point, block, ai[point], final[point]) for point, block in graph.access_points()
    ]
    return report


def report_to_dict(report: AnalysisReport) -> dict:
    s = report.summary
    un, nc = compute_stats(report)
    return {
        "version": REPORT_VERSION,
        "program": report.program,
        "mode": report.mode,
        "config": {
            "ways": report.config.ways,
            "sets": report.config.sets,
            "line_size": report.config.line_size,
            "inst_size": report.config.inst_size,
        },
        "accesses": [
            {
                "node": r.point.node,
                "offset": r.point.offset,
                "block": r.block.id,
                "set": r.block.set_index,
                "ai_class": r.ai.kind.value,
                "final_class": r.final.kind.value,
                "provenance": r.final.provenance.value,
            }
            for r in report.records
        ],
        "summary": {
            "total": s.total,
            "dead": s.dead,
            "memory_blocks": report.memory_blocks(),
            "ai_unknown": s.ai_unknown,
            "refined_hit": s.refined_hit,
            "refined_miss": s.refined_miss,
            "final_unknown": s.final_unknown,
            "un_pct": round(un, 1),
            "nc_pct": round(nc, 1),
        },
        "warnings": list(report.warnings),
    }


def report_from_dict(data: dict) -> AnalysisReport:
    if data.get("version") != REPORT_VERSION:
        raise ValueError(f"unsupported report version {data.get('version')!r}")
    records = []
    for row in data["accesses"]:
        ai_kind = Kind(row["ai_class"])
        records.append(
            AccessRecord(
                AccessPoint(row["node"], row["offset"]),
                MemoryBlock(row["block"], row["set"]),
                # AI classifications are always AI-provenance
                Classification(ai_kind, Provenance.AI),
                Classification(Kind(row["final_class"]), Provenance(row["provenance"])),
            )
        )
    return AnalysisReport(
        CacheConfig(**data["config"]),
        records,
        data["mode"],
        data["program"],
        list(data["warnings"]),
    )


def dumps_reports(reports: list[AnalysisReport]) -> str:
    return json.dumps({"runs": [report_to_dict(r) for r in reports]}, indent=2, sort_keys=True) + "\n"


def loads_reports(text: str) -> list[AnalysisReport]:
    return [report_from_dict(run) for run in json.loads(text)["runs"]]
