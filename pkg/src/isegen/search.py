"""Kernighan-Lin style bi-partitioning of one block into software and hardware.

Each inner step scores every unmarked node with a weighted gain, toggles and
marks the best one, and records the hardware set whenever it is a legal ISE
(convex and within the port limits).  Cuts are allowed to be illegal in
between, which is what lets the search climb over local maxima.  A pass ends
when every node is marked; passes repeat from the best cut found so far until
one fails to improve it or ``max_passes`` is reached.

The per-step bookkeeping is local: port counts come from the toggle engine's
addendums, convexity from its ancestor/descendant counters, and the merit of
every candidate move from arrival/departure times that are refreshed once per
committed toggle.
"""

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple

from .cut import Constraints, Cut, merit
from .dfg import BarrierDistances, Dfg, LatencyTable, barrier_distances
from .errors import MemoryNodeToggle
from .toggle import ToggleState

NEG_INF = -math.inf


@dataclass(frozen=True)
class GainWeights:
    mrt: float = 1.0
    iop: float = 20.0
    cnv: float = 0.5
    cgp: float = 0.25
    idc: float = 0.5

    def __post_init__(self):
        for v in self.as_tuple():
            if v < 0:
                raise ValueError("gain weights must be non-negative")

    def as_tuple(self) -> Tuple[float, ...]:
        return (self.mrt, self.iop, self.cnv, self.cgp, self.idc)

    @classmethod
    def parse(cls, text: str) -> "GainWeights":
        parts = [float(x) for x in text.split(",")]
        if len(parts) != 5:
            raise ValueError("expected five comma-separated weights")
        return cls(*parts)


# Grid-searched against the exhaustive optimum on 200 random 12-node blocks
# (corpus seed 2005); rerun with `isegen calibrate` to reproduce.
CALIBRATED_WEIGHTS = GainWeights(1.0, 10.0, 0.25, 0.1, 1.0)


@dataclass(frozen=True)
class SearchConfig:
    weights: GainWeights = CALIBRATED_WEIGHTS
    constraints: Constraints = field(default_factory=Constraints)
    max_passes: int = 5
    tie_break: str = "lowest-id"
    # score moves by the merit change instead of the merit of the new cut
    mrt_delta: bool = False

    def __post_init__(self):
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")
        if self.tie_break != "lowest-id":
            raise ValueError(f"unknown tie-break rule '{self.tie_break}'")


@dataclass
class PassRecord:
    index: int
    start_merit: float
    best_merit: float
    toggles: int
    seconds: float


class SearchState:
    """A :class:`ToggleState` plus the latency bookkeeping the gain needs."""

    def __init__(self, dfg: Dfg, lat: LatencyTable, members: Iterable[int] = (),
                 frozen: Iterable[int] = (), dists: Optional[BarrierDistances] = None):
        self.dfg = dfg
        self.lat = lat
        self.toggles = ToggleState(dfg, frozen)
        self.sw = [lat.sw(op) for op in dfg.opcode]
        self.hw = [lat.hw(op) for op in dfg.opcode]
        self.dists = dists if dists is not None else barrier_distances(dfg)
        n = len(dfg)
        self.arr = [0.0] * n
        self.dep = [0.0] * n
        self.cp_without = [0.0] * n
        self.comp = [-1] * n
        self.lam_sw = 0
        for nid in sorted(members):
            k = dfg.index[nid]
            self.toggles.toggle_index(k)
            self.lam_sw += self.sw[k]
        self._refresh()

    # -- bookkeeping ---------------------------------------------------------

    def toggle_index(self, k):
        adding = not self.toggles.in_h[k]
        self.toggles.toggle_index(k)
        self.lam_sw += self.sw[k] if adding else -self.sw[k]
        self._refresh()

    def _refresh(self):
        """Recompute arrival/departure times, critical path with each member
        removed, and component critical paths.  O(|V| + |E| log |E|)."""
        g = self.dfg
        in_h = self.toggles.in_h
        hw, arr, dep = self.hw, self.arr, self.dep
        order = [k for k in g.topo if in_h[k]]
        for k in order:
            start = 0.0
            for p in g.preds[k]:
                if in_h[p] and arr[p] > start:
                    start = arr[p]
            arr[k] = start + hw[k]
        for k in reversed(order):
            tail = 0.0
            for c in g.succs[k]:
                if in_h[c] and dep[c] > tail:
                    tail = dep[c]
            dep[k] = hw[k] + tail
        self.cp = max((arr[k] for k in order), default=0.0)

        # Longest path avoiding the member at position i: it lies wholly
        # before i, wholly after i, or uses one edge jumping over i.
        m = len(order)
        pos = {k: i for i, k in enumerate(order)}
        prefix = [0.0] * (m + 1)
        for i, k in enumerate(order):
            prefix[i + 1] = max(prefix[i], arr[k])
        suffix = [0.0] * (m + 1)
        for i in range(m - 1, -1, -1):
            suffix[i] = max(suffix[i + 1], dep[order[i]])
        by_start = [[] for _ in range(m)]
        for k in order:
            for c in g.succs[k]:
                if in_h[c]:
                    by_start[pos[k]].append((-(arr[k] + dep[c]), pos[c]))
        heap = []
        for i, k in enumerate(order):
            if i:
                for item in by_start[i - 1]:
                    heapq.heappush(heap, item)
            while heap and heap[0][1] <= i:
                heapq.heappop(heap)
            jump = -heap[0][0] if heap else 0.0
            self.cp_without[k] = max(prefix[i], suffix[i + 1], jump)

        # connected components of the hardware set
        comp = self.comp
        for k in order:
            comp[k] = -1
        comp_cp = []
        for k in order:
            if comp[k] != -1:
                continue
            cid = len(comp_cp)
            comp[k] = cid
            stack = [k]
            best = 0.0
            while stack:
                x = stack.pop()
                if arr[x] > best:
                    best = arr[x]
                for y in g.preds[x] + g.succs[x]:
                    if in_h[y] and comp[y] == -1:
                        comp[y] = cid
                        stack.append(y)
            comp_cp.append(best)
        ranked = sorted(range(len(comp_cp)), key=lambda c: -comp_cp[c])[:2]
        self.top_components = [(c, comp_cp[c]) for c in ranked]

    def members(self):
        return self.toggles.members()

    def current_merit(self) -> float:
        return self.lam_sw - self.cp if self.toggles.h_mask else 0.0

    def is_legal(self, constraints: Constraints) -> bool:
        t = self.toggles
        return (t.is_convex() and t.i_ise <= constraints.n_in
                and t.o_ise <= constraints.n_out)

    # -- gain components (dense index) ----------------------------------------

    def mrt_index(self, k, convex=None, delta=False) -> float:
        g = self.dfg
        in_h = self.toggles.in_h
        if convex is None:
            convex = self.toggles.preview_convex_index(k)
        if not convex:
            return NEG_INF
        if not in_h[k]:
            head = 0.0
            for p in g.preds[k]:
                if in_h[p] and self.arr[p] > head:
                    head = self.arr[p]
            tail = 0.0
            for c in g.succs[k]:
                if in_h[c] and self.dep[c] > tail:
                    tail = self.dep[c]
            cp = max(self.cp, head + self.hw[k] + tail)
            new = self.lam_sw + self.sw[k] - cp
        else:
            new = self.lam_sw - self.sw[k] - self.cp_without[k]
        if delta:
            new -= self.current_merit()
        return new

    def iop_index(self, k, constraints: Constraints) -> int:
        t = self.toggles
        i_new = t.i_ise + t.i_toggle[k]
        o_new = t.o_ise + t.o_toggle[k]
        return max(0, i_new - constraints.n_in) + max(0, o_new - constraints.n_out)

    def cnv_index(self, k) -> int:
        t = self.toggles
        near = t.h_parents[k] + t.h_children[k]
        return -near if t.in_h[k] else near

    def cgp_index(self, k) -> int:
        d = abs(self.dists.up[k] - self.dists.down[k])
        return -d if self.toggles.in_h[k] else d

    def idc_index(self, k) -> float:
        if not self.toggles.in_h[k]:
            return 0.0
        for cid, cp in self.top_components:
            if cid != self.comp[k]:
                return cp
        return 0.0

    def gain_index(self, k, config: SearchConfig) -> float:
        w = config.weights
        mrt = self.mrt_index(k, delta=config.mrt_delta)
        if mrt == NEG_INF:
            return NEG_INF
        return (w.mrt * mrt - w.iop * self.iop_index(k, config.constraints)
                + w.cnv * self.cnv_index(k) + w.cgp * self.cgp_index(k)
                + w.idc * self.idc_index(k))


def _k(state: SearchState, nid: int) -> int:
    k = state.dfg.index[nid]
    if state.toggles.locked[k]:
        raise MemoryNodeToggle(f"node {nid} is memory or frozen")
    return k


def compute_mrt(state: SearchState, nid: int, delta: bool = False) -> float:
    """Merit of the cut after toggling ``nid``; -inf if that cut is not convex."""
    return state.mrt_index(_k(state, nid), delta=delta)


def compute_iop(state: SearchState, nid: int, constraints: Constraints) -> int:
    return state.iop_index(_k(state, nid), constraints)


def compute_cnv(state: SearchState, nid: int) -> int:
    return state.cnv_index(_k(state, nid))


def compute_cgp(state: SearchState, nid: int) -> int:
    return state.cgp_index(_k(state, nid))


def compute_idc(state: SearchState, nid: int) -> float:
    return state.idc_index(_k(state, nid))


def gain(state: SearchState, nid: int, config: SearchConfig) -> float:
    return state.gain_index(_k(state, nid), config)


def combine_gain(weights: GainWeights, mrt, iop, cnv, cgp, idc) -> float:
    """Weighted sum of the five components; -inf merit dominates everything."""
    if mrt == NEG_INF:
        return NEG_INF
    return (weights.mrt * mrt - weights.iop * iop + weights.cnv * cnv
            + weights.cgp * cgp + weights.idc * idc)


def run_pass(state: SearchState, config: SearchConfig, best: Cut,
             best_merit: float) -> Tuple[Cut, float, int]:
    """One sweep: toggle and mark every unmarked node once.

    Returns the best legal cut seen (or ``best`` if none beat it), its merit
    and the number of toggles performed.
    """
    t = state.toggles
    n = len(state.dfg)
    toggles = 0
    while True:
        choice = -1
        choice_gain = NEG_INF
        first = -1
        for k in range(n):
            if t.marked[k]:
                continue
            if first < 0:
                first = k
            gk = state.gain_index(k, config)
            if gk > choice_gain:
                choice, choice_gain = k, gk
        if first < 0:
            break
        candidate = choice >= 0
        if not candidate:
            choice = first
        state.toggle_index(choice)
        t.marked[choice] = True
        toggles += 1
        if candidate and t.h_mask and state.is_legal(config.constraints):
            cut = Cut(state.dfg, state.members())
            m = merit(cut, state.lat)
            if m > best_merit:
                best, best_merit = cut, m
    return best, best_merit, toggles


def bipartition(dfg: Dfg, config: SearchConfig, lat: LatencyTable,
                initial_cut: Optional[Cut] = None, *, frozen: Iterable[int] = (),
                trace: Optional[List[PassRecord]] = None) -> Cut:
    """Best legal cut found by repeated passes, starting from ``initial_cut``.

    ``frozen`` nodes (e.g. those already committed to another ISE) stay in
    software.  The result is the empty cut when nothing with positive merit
    is found.
    """
    frozen = frozenset(frozen)
    dists = barrier_distances(dfg)
    last_best = initial_cut if initial_cut is not None else Cut(dfg)
    if last_best.members & frozen:
        raise ValueError("initial cut overlaps frozen nodes")
    last_merit = merit(last_best, lat)
    for index in range(config.max_passes):
        started = time.perf_counter()
        state = SearchState(dfg, lat, last_best.members, frozen, dists)
        best, best_merit, toggles = run_pass(state, config, last_best, last_merit)
        if trace is not None:
            trace.append(PassRecord(index, last_merit, best_merit, toggles,
                                    time.perf_counter() - started))
        if best_merit > last_merit:
            last_best, last_merit = best, best_merit
        else:
            break
    if last_merit <= 0:
        return Cut(dfg)
    return last_best
