"""Data-flow graph model for a single basic block.

A :class:`Dfg` is immutable once built.  Node ids are arbitrary non-negative
integers; internally every node also gets a dense index (position in ascending
id order) which the search engines use for list/bitset based bookkeeping.
"""

import heapq
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import (
    CycleDetected,
    DuplicateEdge,
    DuplicateNode,
    MissingLatency,
    UnknownNodeRef,
)

# Opcodes that read a single register operand when they appear as a graph source.
UNARY_OPCODES = frozenset(
    {"not", "neg", "abs", "mov", "copy", "sext", "zext", "trunc", "clz", "ctz",
     "popcnt", "bswap", "sqrt", "load"}
)


def default_arity(opcode: str) -> int:
    return 1 if opcode in UNARY_OPCODES else 2


@dataclass(frozen=True)
class LatencyEntry:
    sw: int
    hw: float
    arity: Optional[int] = None


@dataclass
class LatencyTable:
    """Per-opcode software cycles and MAC-normalized hardware delay."""

    entries: Dict[str, LatencyEntry] = field(default_factory=dict)

    def add(self, opcode: str, sw: int, hw: float, arity: Optional[int] = None):
        if sw < 1:
            raise ValueError(f"sw latency of '{opcode}' must be >= 1")
        if not hw > 0:
            raise ValueError(f"hw latency of '{opcode}' must be > 0")
        if arity is not None and arity < 0:
            raise ValueError(f"arity of '{opcode}' must be >= 0")
        self.entries[opcode] = LatencyEntry(int(sw), float(hw), arity)

    def __contains__(self, opcode):
        return opcode in self.entries

    def sw(self, opcode: str) -> int:
        return self._entry(opcode).sw

    def hw(self, opcode: str) -> float:
        return self._entry(opcode).hw

    def arity(self, opcode: str) -> int:
        ar = self._entry(opcode).arity
        return default_arity(opcode) if ar is None else ar

    def _entry(self, opcode):
        try:
            return self.entries[opcode]
        except KeyError:
            raise MissingLatency(opcode) from None

    @classmethod
    def from_dict(cls, table):
        """Build from ``{opcode: (sw, hw)}`` or ``{opcode: (sw, hw, arity)}``."""
        lat = cls()
        for op, row in table.items():
            lat.add(op, *row)
        return lat


@dataclass(frozen=True)
class OpNode:
    id: int
    opcode: str
    is_memory: bool = False
    is_live_out: bool = False
    # Register operands read when the node has no in-block producer.
    # None means "use the opcode default".
    arity: Optional[int] = None


class Dfg:
    """A validated, immutable basic-block DAG.

    Construction checks endpoint existence, duplicate edges and acyclicity.
    Latency coverage is checked separately by :func:`validate_dfg` since a
    graph can be built without a latency table.
    """

    def __init__(self, name: str, nodes: Iterable[OpNode],
                 edges: Iterable[Tuple[int, int]], exec_freq: int = 1,
                 *, _lines=None):
        lines = _lines or {}
        self.name = name
        if exec_freq < 0:
            raise ValueError("exec_freq must be non-negative")
        self.exec_freq = int(exec_freq)

        by_id: Dict[int, OpNode] = {}
        for node in nodes:
            if node.id in by_id:
                raise DuplicateNode(node.id, lines.get(("node", node.id)))
            if node.arity is None:
                node = replace(node, arity=default_arity(node.opcode))
            by_id[node.id] = node
        self.ids: List[int] = sorted(by_id)
        self.nodes: Tuple[OpNode, ...] = tuple(by_id[i] for i in self.ids)
        self.index: Dict[int, int] = {nid: k for k, nid in enumerate(self.ids)}

        seen = set()
        for edge in edges:
            src, dst = edge
            for end in (src, dst):
                if end not in by_id:
                    raise UnknownNodeRef(end, lines.get(("edge", src, dst)))
            if (src, dst) in seen:
                raise DuplicateEdge((src, dst), lines.get(("dup", src, dst)))
            seen.add((src, dst))
        self.edges: Tuple[Tuple[int, int], ...] = tuple(sorted(seen))

        n = len(self.ids)
        self.preds: List[List[int]] = [[] for _ in range(n)]
        self.succs: List[List[int]] = [[] for _ in range(n)]
        for src, dst in self.edges:
            self.succs[self.index[src]].append(self.index[dst])
            self.preds[self.index[dst]].append(self.index[src])
        for lst in self.preds + self.succs:
            lst.sort()

        self.opcode = [nd.opcode for nd in self.nodes]
        self.memory = [nd.is_memory for nd in self.nodes]
        self.live_out = [nd.is_live_out for nd in self.nodes]
        self.arity = [nd.arity for nd in self.nodes]

        self.topo = self._kahn(lines)
        self._reach = None

    def _kahn(self, lines):
        n = len(self.ids)
        indeg = [len(p) for p in self.preds]
        heap = [k for k in range(n) if indeg[k] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            k = heapq.heappop(heap)
            order.append(k)
            for c in self.succs[k]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(heap, c)
        if len(order) < n:
            edge = self._cycle_edge(set(range(n)) - set(order))
            raise CycleDetected(edge, lines.get(("edge",) + edge))
        return order

    def _cycle_edge(self, remaining):
        # Every remaining node has a remaining predecessor, so walking
        # backwards must revisit a node.
        k = min(remaining)
        visited = {}
        step = 0
        while k not in visited:
            visited[k] = step
            step += 1
            prev = min(p for p in self.preds[k] if p in remaining)
            last = (prev, k)
            k = prev
        src, dst = last
        return (self.ids[src], self.ids[dst])

    # -- id-level accessors -------------------------------------------------

    def __len__(self):
        return len(self.ids)

    def __contains__(self, node_id):
        return node_id in self.index

    def node(self, node_id: int) -> OpNode:
        return self.nodes[self.index[node_id]]

    def parents(self, node_id: int) -> List[int]:
        return [self.ids[p] for p in self.preds[self.index[node_id]]]

    def children(self, node_id: int) -> List[int]:
        return [self.ids[c] for c in self.succs[self.index[node_id]]]

    def __eq__(self, other):
        if not isinstance(other, Dfg):
            return NotImplemented
        return (self.name == other.name and self.exec_freq == other.exec_freq
                and self.nodes == other.nodes and self.edges == other.edges)

    def __hash__(self):
        return hash((self.name, self.exec_freq, self.nodes, self.edges))

    def __repr__(self):
        return f"Dfg({self.name!r}, {len(self)} nodes, {len(self.edges)} edges, freq={self.exec_freq})"

    # -- reachability --------------------------------------------------------

    def reach(self):
        """Ancestor and descendant bitsets per dense index (strict, cached)."""
        if self._reach is None:
            n = len(self.ids)
            anc = [0] * n
            desc = [0] * n
            for k in self.topo:
                for p in self.preds[k]:
                    anc[k] |= anc[p] | (1 << p)
            for k in reversed(self.topo):
                for c in self.succs[k]:
                    desc[k] |= desc[c] | (1 << c)
            self._reach = (anc, desc)
        return self._reach


@dataclass
class RawNode:
    id: int
    opcode: str
    is_memory: bool = False
    is_live_out: bool = False
    line: Optional[int] = None


@dataclass
class RawBlock:
    """An unvalidated block as read from text (or assembled by hand)."""

    name: str
    exec_freq: int = 1
    nodes: List[RawNode] = field(default_factory=list)
    edges: List[Tuple[int, int]] = field(default_factory=list)
    edge_lines: List[Optional[int]] = field(default_factory=list)
    line: Optional[int] = None


def validate_dfg(raw: RawBlock, lat: Optional[LatencyTable] = None) -> Dfg:
    """Validate ``raw`` and return an immutable :class:`Dfg`.

    When ``lat`` is given, every opcode must have an entry and source-node
    arities are taken from it.
    """
    lines = {}
    for node in raw.nodes:
        lines.setdefault(("node", node.id), node.line)
    seen = set()
    edge_lines = raw.edge_lines or [None] * len(raw.edges)
    for (src, dst), ln in zip(raw.edges, edge_lines):
        lines.setdefault(("edge", src, dst), ln)
        if (src, dst) in seen:
            lines.setdefault(("dup", src, dst), ln)
        seen.add((src, dst))

    nodes = []
    for rn in raw.nodes:
        arity = None
        if lat is not None:
            if rn.opcode not in lat:
                raise MissingLatency(rn.opcode, rn.line)
            arity = lat.arity(rn.opcode)
        nodes.append(OpNode(rn.id, rn.opcode, rn.is_memory, rn.is_live_out, arity))
    return Dfg(raw.name, nodes, raw.edges, raw.exec_freq, _lines=lines)


def make_dfg(nodes, edges, *, name="bb", freq=1, lat=None, mem=(), live_out=(),
             arity=None) -> Dfg:
    """Convenience constructor.

    ``nodes`` maps id -> opcode (or is a sequence of ids, all ``add``).
    ``arity`` optionally maps id -> source arity and overrides ``lat``.
    """
    if not isinstance(nodes, dict):
        nodes = {nid: "add" for nid in nodes}
    mem, live_out, arity = set(mem), set(live_out), dict(arity or {})
    raw = []
    for nid, op in nodes.items():
        if lat is not None and op not in lat:
            raise MissingLatency(op)
        ar = arity.get(nid, lat.arity(op) if lat is not None else None)
        raw.append(OpNode(nid, op, nid in mem, nid in live_out, ar))
    return Dfg(name, raw, edges, freq)


def topological_order(dfg: Dfg) -> List[int]:
    """Node ids in topological order, ties broken by ascending id."""
    return [dfg.ids[k] for k in dfg.topo]


@dataclass(frozen=True)
class BarrierDistances:
    """Edge-count distance from each node to the nearest barrier above/below.

    ``up`` and ``down`` are indexed by dense node index; use :meth:`of` for
    id-based lookup.
    """

    ids: Tuple[int, ...]
    up: Tuple[int, ...]
    down: Tuple[int, ...]

    def of(self, node_id: int) -> Tuple[int, int]:
        k = self.ids.index(node_id)
        return self.up[k], self.down[k]

    def as_dict(self) -> Dict[int, Tuple[int, int]]:
        return {nid: (u, d) for nid, u, d in zip(self.ids, self.up, self.down)}


def barrier_distances(dfg: Dfg) -> BarrierDistances:
    """Distances to memory nodes and to the external input/output frontiers.

    A memory node is a barrier at distance 0.  A node with no parents sits one
    edge below the external inputs; a node with no children, or whose value is
    live-out, sits one edge above the external outputs.
    """
    n = len(dfg)
    up = [0] * n
    down = [0] * n
    for k in dfg.topo:
        if dfg.memory[k]:
            continue
        best = 1 if not dfg.preds[k] else None
        for p in dfg.preds[k]:
            cand = up[p] + 1
            if best is None or cand < best:
                best = cand
        up[k] = best
    for k in reversed(dfg.topo):
        if dfg.memory[k]:
            continue
        best = 1 if (not dfg.succs[k] or dfg.live_out[k]) else None
        for c in dfg.succs[k]:
            cand = down[c] + 1
            if best is None or cand < best:
                best = cand
        down[k] = best
    return BarrierDistances(tuple(dfg.ids), tuple(up), tuple(down))


def node_ids_to_mask(dfg: Dfg, ids: Iterable[int]) -> int:
    mask = 0
    for nid in ids:
        mask |= 1 << dfg.index[nid]
    return mask


def mask_to_node_ids(dfg: Dfg, mask: int) -> List[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(dfg.ids[low.bit_length() - 1])
        mask ^= low
    return out


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
