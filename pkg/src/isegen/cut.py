"""Cuts (candidate ISEs) and their direct, non-incremental evaluation.

Input counting works per distinct value: every producer outside the cut that
feeds at least one member counts once, and a member with no in-block producer
reads ``arity`` fresh register operands.  A member is an output when one of its
consumers lies outside the cut or when its value is live-out.
"""

from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Tuple

from .dfg import Dfg, LatencyTable
from .errors import MemoryNodeInCut, UnknownNodeRef


class Cut:
    """A set of non-memory nodes of one :class:`Dfg`."""

    __slots__ = ("dfg", "members")

    def __init__(self, dfg: Dfg, members: Iterable[int] = ()):
        members = frozenset(members)
        for nid in members:
            if nid not in dfg:
                raise UnknownNodeRef(nid)
            if dfg.node(nid).is_memory:
                raise MemoryNodeInCut(f"memory node {nid} cannot join a cut")
        self.dfg = dfg
        self.members: FrozenSet[int] = members

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __contains__(self, nid):
        return nid in self.members

    def __eq__(self, other):
        if not isinstance(other, Cut):
            return NotImplemented
        return self.dfg is other.dfg and self.members == other.members

    def __hash__(self):
        return hash((id(self.dfg), self.members))

    def __repr__(self):
        return f"Cut({self.dfg.name!r}, {sorted(self.members)})"

    def indices(self) -> List[int]:
        idx = self.dfg.index
        return sorted(idx[m] for m in self.members)


@dataclass(frozen=True)
class Constraints:
    n_in: int = 4
    n_out: int = 2
    n_ise: int = 4

    def __post_init__(self):
        for name in ("n_in", "n_out", "n_ise"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    def admits(self, io: Tuple[int, int]) -> bool:
        return io[0] <= self.n_in and io[1] <= self.n_out


def _member_flags(cut: Cut):
    flags = [False] * len(cut.dfg)
    for k in cut.indices():
        flags[k] = True
    return flags


def io_counts(cut: Cut) -> Tuple[int, int]:
    """(inputs, outputs) of the cut."""
    g = cut.dfg
    inside = _member_flags(cut)
    producers = set()
    n_in = 0
    n_out = 0
    for k in cut.indices():
        if not g.preds[k]:
            n_in += g.arity[k]
        for p in g.preds[k]:
            if not inside[p]:
                producers.add(p)
        if g.live_out[k] or any(not inside[c] for c in g.succs[k]):
            n_out += 1
    return n_in + len(producers), n_out


def is_convex(cut: Cut) -> bool:
    """True iff no path leaves the cut and comes back into it."""
    g = cut.dfg
    inside = _member_flags(cut)
    # Walk forward from the cut through non-members only.
    stack = [c for k in cut.indices() for c in g.succs[k] if not inside[c]]
    seen = set(stack)
    while stack:
        k = stack.pop()
        for c in g.succs[k]:
            if inside[c]:
                return False
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return True


def critical_path_hw_latency(cut: Cut, lat: LatencyTable) -> float:
    """Largest sum of hardware delays along a path inside the cut."""
    g = cut.dfg
    inside = _member_flags(cut)
    finish = {}
    best = 0.0
    for k in g.topo:
        if not inside[k]:
            continue
        start = 0.0
        for p in g.preds[k]:
            if inside[p] and finish[p] > start:
                start = finish[p]
        finish[k] = start + lat.hw(g.opcode[k])
        if finish[k] > best:
            best = finish[k]
    return best


def software_latency(cut: Cut, lat: LatencyTable) -> int:
    g = cut.dfg
    return sum(lat.sw(g.opcode[k]) for k in cut.indices())


def merit(cut: Cut, lat: LatencyTable) -> float:
    """Cycles saved per execution: software latency minus hardware critical path."""
    if not cut.members:
        return 0.0
    return software_latency(cut, lat) - critical_path_hw_latency(cut, lat)


def connected_components(cut: Cut) -> List[FrozenSet[int]]:
    """Weakly connected components of the induced subgraph, ordered by min id."""
    g = cut.dfg
    inside = _member_flags(cut)
    parent = {k: k for k in cut.indices()}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in parent:
        for c in g.succs[k]:
            if inside[c]:
                a, b = find(k), find(c)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    groups = {}
    for k in parent:
        groups.setdefault(find(k), []).append(g.ids[k])
    return sorted((frozenset(v) for v in groups.values()), key=min)


def convex_closure(cut: Cut) -> Cut:
    """Smallest convex superset: adds every node lying on a path between members.

    Memory nodes on such paths make a convex superset impossible; they are
    skipped, so the result may still be non-convex in that case.
    """
    g = cut.dfg
    anc, desc = g.reach()
    mask = 0
    for k in cut.indices():
        mask |= 1 << k
    extra = []
    for k in range(len(g)):
        if not (mask >> k) & 1 and (anc[k] & mask) and (desc[k] & mask) and not g.memory[k]:
            extra.append(g.ids[k])
    return Cut(g, cut.members | frozenset(extra))
