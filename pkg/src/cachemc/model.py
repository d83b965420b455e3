"""Shared data model: cache geometry, memory blocks, access graphs and the
textual program format."""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence


class ProgramError(ValueError):
    """Raised for malformed or inconsistent program descriptions."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class CacheConfig:
    ways: int
    sets: int = 1
    line_size: int = 16
    inst_size: int = 4

    def __post_init__(self):
        for name in ("ways", "sets", "line_size", "inst_size"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ProgramError(f"{name} must be a positive integer, got {value!r}")
        if self.sets & (self.sets - 1):
            raise ProgramError(f"sets must be a power of two, got {self.sets}")
        if self.line_size % self.inst_size:
            raise ProgramError(
                f"inst size {self.inst_size} does not divide line size {self.line_size}"
            )

    def set_of_address(self, address: int) -> int:
        return (address // self.line_size) % self.sets


@dataclass(frozen=True, order=True)
class MemoryBlock:
    id: str
    set_index: int = 0

    def __str__(self):
        return self.id


@dataclass(frozen=True, order=True)
class AccessPoint:
    node: str
    offset: int

    def __str__(self):
        return f"{self.node}[{self.offset}]"


class Kind(enum.Enum):
    ALWAYS_HIT = "always-hit"
    ALWAYS_MISS = "always-miss"
    UNKNOWN = "unknown"
    DEAD = "dead"


class Provenance(enum.Enum):
    AI = "AI"
    MC = "MC"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    provenance: Provenance = Provenance.AI

    def __str__(self):
        return f"{self.kind.value}({self.provenance.value})"


@dataclass(frozen=True)
class AccessGraph:
    """Directed graph whose nodes carry ordered sequences of block accesses.

    ``nodes`` preserves declaration order and ``edges`` is duplicate-free;
    nodes unreachable from ``entry`` are allowed and reported as dead.
    """

    nodes: Mapping[str, tuple[MemoryBlock, ...]]
    edges: tuple[tuple[str, str], ...]
    entry: str

    def __post_init__(self):
        object.__setattr__(self, "nodes", {n: tuple(seq) for n, seq in self.nodes.items()})
        object.__setattr__(self, "edges", tuple(dict.fromkeys(tuple(e) for e in self.edges)))
        if self.entry not in self.nodes:
            raise ProgramError(f"entry node {self.entry!r} is not declared")
        for src, dst in self.edges:
            for end in (src, dst):
                if end not in self.nodes:
                    raise ProgramError(f"edge {src} -> {dst} names undeclared node {end!r}")

    @cached_property
    def successors(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {n: [] for n in self.nodes}
        for src, dst in self.edges:
            out[src].append(dst)
        return {n: tuple(v) for n, v in out.items()}

    @cached_property
    def predecessors(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {n: [] for n in self.nodes}
        for src, dst in self.edges:
            out[dst].append(src)
        return {n: tuple(v) for n, v in out.items()}

    @cached_property
    def reachable(self) -> frozenset[str]:
        seen = {self.entry}
        todo = deque([self.entry])
        while todo:
            for nxt in self.successors[todo.popleft()]:
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        return frozenset(seen)

    @cached_property
    def skeleton(self):
        """Flat successor arrays and access points, shared by every
        reachability pass over this graph."""
        names = list(self.nodes)
        index = {n: i for i, n in enumerate(names)}
        succ_off, succ, seq_off, points, flat = [0], [], [0], [], []
        for n in names:
            succ.extend(index[s] for s in self.successors[n])
            succ_off.append(len(succ))
            for offset, b in enumerate(self.nodes[n]):
                points.append(AccessPoint(n, offset))
                flat.append(b)
            seq_off.append(len(flat))
        return names, index, succ_off, succ, seq_off, points, flat

    def access_points(self) -> Iterator[tuple[AccessPoint, MemoryBlock]]:
        for node, seq in self.nodes.items():
            for offset, block in enumerate(seq):
                yield AccessPoint(node, offset), block

    def blocks(self) -> list[MemoryBlock]:
        """Distinct accessed blocks, in order of first occurrence."""
        return list(dict.fromkeys(b for seq in self.nodes.values() for b in seq))

    def reverse_postorder(self) -> list[str]:
        order: list[str] = []
        seen = {self.entry}
        stack = [(self.entry, iter(self.successors[self.entry]))]
        while stack:
            node, it = stack[-1]
            for nxt in it:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append((nxt, iter(self.successors[nxt])))
                    break
            else:
                stack.pop()
                order.append(node)
        order.reverse()
        return order

    def size(self) -> tuple[int, int]:
        """(node count, access count)."""
        return len(self.nodes), sum(len(s) for s in self.nodes.values())


def filter_by_set(graph: AccessGraph, set_index: int) -> AccessGraph:
    """Keep only accesses mapping to ``set_index``; the node/edge shape is unchanged."""
    nodes = {
        n: tuple(b for b in seq if b.set_index == set_index) for n, seq in graph.nodes.items()
    }
    return AccessGraph(nodes, graph.edges, graph.entry)


def _chain_name(bb: str, index: int, count: int) -> str:
    return bb if index == 0 else f"{bb}.{index}"


def address_block(address: int, config: CacheConfig) -> MemoryBlock:
    line = address // config.line_size
    return MemoryBlock(f"0x{line * config.line_size:x}", line % config.sets)


def expand_basic_block(start: int, count: int, config: CacheConfig) -> list[MemoryBlock]:
    """Memory blocks covered by ``count`` instructions starting at ``start``."""
    if start % config.inst_size:
        raise ProgramError(f"address 0x{start:x} is not aligned to {config.inst_size}")
    if count < 1:
        raise ProgramError(f"instruction count must be >= 1, got {count}")
    first = start // config.line_size
    last = (start + count * config.inst_size - 1) // config.line_size
    return [address_block(line * config.line_size, config) for line in range(first, last + 1)]


def split_basic_blocks(
    basic_blocks: Sequence[tuple[str, int, int]],
    edges: Iterable[tuple[str, str]],
    config: CacheConfig,
    entry: str | None = None,
) -> AccessGraph:
    """Turn ``(name, start address, instruction count)`` basic blocks into a
    graph holding one memory-block access per node.

    A block spanning several lines becomes a chain ``name``, ``name.1``, ...;
    incoming edges attach to the head and outgoing edges leave from the tail.
    """
    nodes: dict[str, tuple[MemoryBlock, ...]] = {}
    head: dict[str, str] = {}
    tail: dict[str, str] = {}
    chain_edges: list[tuple[str, str]] = []
    for name, start, count in basic_blocks:
        blocks = expand_basic_block(start, count, config)
        names = [_chain_name(name, i, len(blocks)) for i in range(len(blocks))]
        for n, b in zip(names, blocks):
            if n in nodes:
                raise ProgramError(f"duplicate node {n!r}")
            nodes[n] = (b,)
        head[name], tail[name] = names[0], names[-1]
        chain_edges.extend(zip(names, names[1:]))
    out_edges = list(chain_edges)
    for src, dst in edges:
        if src not in tail or dst not in head:
            raise ProgramError(f"edge {src} -> {dst} names an undeclared basic block")
        out_edges.append((tail[src], head[dst]))
    if entry is None:
        entry = basic_blocks[0][0]
    if entry not in head:
        raise ProgramError(f"entry {entry!r} is not a declared basic block")
    return AccessGraph(nodes, tuple(out_edges), head[entry])


_KV = re.compile(r"^([a-z]+)=(\S+)$")


def _parse_int(token: str, lineno: int, col: int) -> int:
    try:
        return int(token, 0)
    except ValueError:
        raise ProgramError(f"expected an integer, got {token!r}", lineno, col) from None


def _parse_address(token: str, lineno: int, col: int) -> int:
    if not token.startswith("@"):
        raise ProgramError(f"expected an address '@<hex>', got {token!r}", lineno, col)
    try:
        return int(token[1:], 16)
    except ValueError:
        raise ProgramError(f"bad hex address {token!r}", lineno, col) from None


def _tokens(line: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def parse_program(
    text: str, ways: int | None = None, sets: int | None = None
) -> tuple[AccessGraph, CacheConfig]:
    """Parse a program description.  ``ways``/``sets`` override the header."""
    header: dict[str, int] = {}
    entry: tuple[str, int] | None = None
    declared: list[tuple[str, str, object, int]] = []  # (kind, name, payload, lineno)
    edges: list[tuple[str, str, int]] = []
    setof: dict[str, int] = {}
    mode: str | None = None

    def need_mode(want: str, lineno: int, col: int):
        nonlocal mode
        if mode is None:
            mode = want
        elif mode != want:
            raise ProgramError("symbolic and address block references are mixed", lineno, col)

    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = _tokens(raw.split("#", 1)[0])
        if not toks:
            continue
        (kw, kcol), args = toks[0], toks[1:]
        if kw == "cache":
            if header:
                raise ProgramError("duplicate cache header", lineno, kcol)
            for tok, col in args:
                m = _KV.match(tok)
                if not m or m.group(1) not in ("ways", "sets", "line", "inst"):
                    raise ProgramError(f"bad cache parameter {tok!r}", lineno, col)
                header[m.group(1)] = _parse_int(m.group(2), lineno, col + len(m.group(1)) + 1)
            if "ways" not in header:
                header["ways"] = 0  # filled by override or rejected below
        elif kw == "entry":
            if len(args) != 1:
                raise ProgramError("'entry' takes exactly one node id", lineno, kcol)
            if entry is not None:
                raise ProgramError("duplicate entry declaration", lineno, kcol)
            entry = (args[0][0], lineno)
        elif kw == "node":
            if not args:
                raise ProgramError("'node' needs a node id", lineno, kcol)
            refs = []
            for tok, col in args[1:]:
                if tok.startswith("@"):
                    need_mode("address", lineno, col)
                    refs.append(_parse_address(tok, lineno, col))
                else:
                    need_mode("symbolic", lineno, col)
                    refs.append(tok)
            declared.append(("node", args[0][0], refs, lineno))
        elif kw == "bb":
            need_mode("address", lineno, kcol)
            if len(args) != 3:
                raise ProgramError("expected 'bb <id> start=@<hex> count=<int>'", lineno, kcol)
            fields = {}
            for tok, col in args[1:]:
                m = _KV.match(tok)
                if not m or m.group(1) not in ("start", "count"):
                    raise ProgramError(f"bad bb parameter {tok!r}", lineno, col)
                vcol = col + len(m.group(1)) + 1
                if m.group(1) == "start":
                    fields["start"] = _parse_address(m.group(2), lineno, vcol)
                else:
                    fields["count"] = _parse_int(m.group(2), lineno, vcol)
            if len(fields) != 2:
                raise ProgramError("bb needs both start= and count=", lineno, kcol)
            declared.append(("bb", args[0][0], (fields["start"], fields["count"]), lineno))
        elif kw == "edge":
            if len(args) != 2:
                raise ProgramError("'edge' takes exactly two node ids", lineno, kcol)
            edges.append((args[0][0], args[1][0], lineno))
        elif kw == "setof":
            if len(args) != 2:
                raise ProgramError("expected 'setof <block> <int>'", lineno, kcol)
            need_mode("symbolic", lineno, kcol)
            value = _parse_int(args[1][0], lineno, args[1][1])
            if setof.get(args[0][0], value) != value:
                raise ProgramError(f"conflicting set for block {args[0][0]!r}", lineno, kcol)
            setof[args[0][0]] = value
        else:
            raise ProgramError(f"unknown directive {kw!r}", lineno, kcol)

    if ways is not None:
        header["ways"] = ways
    if sets is not None:
        header["sets"] = sets
    if not header.get("ways"):
        raise ProgramError("missing cache header (or ways)")
    config = CacheConfig(
        ways=header["ways"],
        sets=header.get("sets", 1),
        line_size=header.get("line", 16),
        inst_size=header.get("inst", 4),
    )
    if entry is None:
        raise ProgramError("missing entry declaration")
    for block, s in setof.items():
        if not 0 <= s < config.sets:
            raise ProgramError(f"set {s} of block {block!r} is outside [0, {config.sets})")

    nodes: dict[str, tuple[MemoryBlock, ...]] = {}
    head: dict[str, str] = {}
    tail: dict[str, str] = {}
    chain: list[tuple[str, str]] = []
    for kind, name, payload, lineno in declared:
        if kind == "node":
            if mode == "address":
                seq = tuple(address_block(addr, config) for addr in payload)
            else:
                seq = tuple(MemoryBlock(b, setof.get(b, 0)) for b in payload)
            names, seqs = [name], [seq]
        else:
            start, count = payload
            try:
                blocks = expand_basic_block(start, count, config)
            except ProgramError as exc:
                raise ProgramError(str(exc), lineno) from None
            names = [_chain_name(name, i, len(blocks)) for i in range(len(blocks))]
            seqs = [(b,) for b in blocks]
        for n, seq in zip(names, seqs):
            if n in nodes:
                raise ProgramError(f"duplicate node {n!r}", lineno)
            nodes[n] = seq
        head[name], tail[name] = names[0], names[-1]
        chain.extend(zip(names, names[1:]))

    all_edges = list(chain)
    for src, dst, lineno in edges:
        for end in (src, dst):
            if end not in head:
                raise ProgramError(f"edge names undeclared node {end!r}", lineno)
        all_edges.append((tail[src], head[dst]))
    name, lineno = entry
    if name not in head:
        raise ProgramError(f"entry node {name!r} is not declared", lineno)
    return AccessGraph(nodes, tuple(all_edges), head[name]), config


def serialize_program(graph: AccessGraph, config: CacheConfig) -> str:
    """Render ``graph`` in symbolic mode; ``parse_program`` inverts this."""
    lines = [
        f"cache ways={config.ways} sets={config.sets} "
        f"line={config.line_size} inst={config.inst_size}"
    ]
    for block in graph.blocks():
        if block.set_index:
            lines.append(f"setof {block.id} {block.set_index}")
    lines.append(f"entry {graph.entry}")
    for node, seq in graph.nodes.items():
        lines.append(" ".join(["node", node, *(b.id for b in seq)]))
    for src, dst in graph.edges:
        lines.append(f"edge {src} {dst}")
    return "\n".join(lines) + "\n"


def load_program(path, ways: int | None = None, sets: int | None = None):
    with open(path) as fh:
        return parse_program(fh.read(), ways=ways, sets=sets)


def graph_to_dot(graph: AccessGraph, name: str = "cfg") -> str:
    out = [f'digraph "{name}" {{']
    for node, seq in graph.nodes.items():
        label = node + ("\\n" + " ".join(b.id for b in seq) if seq else "")
        shape = ', shape=box, peripheries=2' if node == graph.entry else ", shape=box"
        out.append(f'  "{node}" [label="{label}"{shape}];')
    for src, dst in graph.edges:
        out.append(f'  "{src}" -> "{dst}";')
    out.append("}")
    return "\n".join(out) + "\n"
