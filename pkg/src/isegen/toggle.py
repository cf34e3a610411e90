"""Incremental input/output bookkeeping for moving nodes between S and H.

Every node carries a pair of addendums ``(i_toggle, o_toggle)``: the exact
change of the hardware set's input and output counts if that node were
toggled next.  Toggling node ``n`` changes the membership facts that the
addendums of ``n``, its parents, its children and its siblings (other
consumers of a parent of ``n``) are computed from, and nothing else, so only
those are refreshed.

Besides the addendums the state keeps, per node, how many hardware members
are among its ancestors and descendants.  That is enough to answer "would the
cut stay convex?" for any single toggle without walking the graph.
"""

from typing import Iterable, Tuple

from .dfg import Dfg, iter_bits
from .errors import MemoryNodeToggle

S, H = 0, 1


class ToggleState:
    """Mutable S/H partition of one :class:`Dfg` with exact addendums.

    ``frozen`` nodes behave like memory nodes: always in S, always marked.
    All per-node lists are indexed by dense node index.
    """

    def __init__(self, dfg: Dfg, frozen: Iterable[int] = ()):
        self.dfg = dfg
        n = len(dfg)
        frozen_idx = {dfg.index[f] for f in frozen}
        self.locked = [dfg.memory[k] or k in frozen_idx for k in range(n)]
        self.in_h = [False] * n
        self.marked = list(self.locked)
        self.i_ise = 0
        self.o_ise = 0
        self.h_mask = 0
        # hardware members among children / parents
        self.h_children = [0] * n
        self.h_parents = [0] * n
        # hardware members among ancestors / descendants
        self.h_above = [0] * n
        self.h_below = [0] * n
        self.above_mask = 0   # nodes with h_above > 0
        self.below_mask = 0   # nodes with h_below > 0
        self.i_toggle = [0] * n
        self.o_toggle = [0] * n
        for k in range(n):
            self.i_toggle[k], self.o_toggle[k] = self._addendums(k)

    # -- addendum formulas ---------------------------------------------------

    def _addendums(self, k) -> Tuple[int, int]:
        g = self.dfg
        in_h = self.in_h
        hch = self.h_children
        preds = g.preds[k]
        outside_children = len(g.succs[k]) - hch[k]
        is_output = g.live_out[k] or outside_children > 0
        if not in_h[k]:
            di = 0 if preds else g.arity[k]
            do = 1 if is_output else 0
            if hch[k]:
                di -= 1          # k stops being an external producer
            for p in preds:
                if in_h[p]:
                    # p loses its last outside consumer
                    if not g.live_out[p] and len(g.succs[p]) - hch[p] == 1:
                        do -= 1
                elif hch[p] == 0:
                    di += 1      # p becomes a new external producer
        else:
            di = 0 if preds else -g.arity[k]
            do = -1 if is_output else 0
            if hch[k]:
                di += 1
            for p in preds:
                if in_h[p]:
                    if not g.live_out[p] and len(g.succs[p]) == hch[p]:
                        do += 1
                elif hch[p] == 1:
                    di -= 1      # k was p's only hardware consumer
        return di, do

    def affected(self, k):
        """Dense indices whose addendums depend on the membership of ``k``."""
        g = self.dfg
        out = {k}
        out.update(g.succs[k])
        for p in g.preds[k]:
            out.add(p)
            out.update(g.succs[p])
        return out

    # -- public API (node ids) ----------------------------------------------

    def _idx(self, nid):
        k = self.dfg.index[nid]
        if self.locked[k]:
            raise MemoryNodeToggle(f"node {nid} is memory or frozen and cannot be toggled")
        return k

    def toggle(self, nid: int):
        self.toggle_index(self._idx(nid))
        return self

    def preview(self, nid: int) -> Tuple[int, int, bool]:
        return self.preview_index(self._idx(nid))

    def mark(self, nid: int):
        self.marked[self.dfg.index[nid]] = True

    def unmark_all(self):
        self.marked = list(self.locked)

    def members(self):
        g = self.dfg
        return frozenset(g.ids[k] for k in range(len(g)) if self.in_h[k])

    def partition(self, nid: int) -> int:
        return H if self.in_h[self.dfg.index[nid]] else S

    def addendums(self, nid: int) -> Tuple[int, int]:
        k = self.dfg.index[nid]
        return self.i_toggle[k], self.o_toggle[k]

    # -- index-level operations ----------------------------------------------

    def toggle_index(self, k):
        if self.locked[k]:
            raise MemoryNodeToggle(f"node {self.dfg.ids[k]} is memory or frozen")
        g = self.dfg
        self.i_ise += self.i_toggle[k]
        self.o_ise += self.o_toggle[k]
        adding = not self.in_h[k]
        step = 1 if adding else -1
        self.in_h[k] = adding
        self.h_mask ^= 1 << k
        for p in g.preds[k]:
            self.h_children[p] += step
        for c in g.succs[k]:
            self.h_parents[c] += step

        anc, desc = g.reach()
        above = self.h_above
        below = self.h_below
        for w in iter_bits(desc[k]):
            above[w] += step
            if adding and above[w] == 1:
                self.above_mask |= 1 << w
            elif not adding and above[w] == 0:
                self.above_mask &= ~(1 << w)
        for w in iter_bits(anc[k]):
            below[w] += step
            if adding and below[w] == 1:
                self.below_mask |= 1 << w
            elif not adding and below[w] == 0:
                self.below_mask &= ~(1 << w)

        for j in self.affected(k):
            self.i_toggle[j], self.o_toggle[j] = self._addendums(j)

    def violators(self) -> int:
        """Bitset of non-members lying on a path between two members."""
        return self.above_mask & self.below_mask & ~self.h_mask

    def is_convex(self) -> bool:
        return not self.violators()

    def preview_convex_index(self, k) -> bool:
        g = self.dfg
        anc, desc = g.reach()
        bit = 1 << k
        viol = self.violators()
        if not self.in_h[k]:
            if viol & ~bit:
                return False
            outside = ~(self.h_mask | bit)
            if desc[k] & self.below_mask & outside:
                return False
            if anc[k] & self.above_mask & outside:
                return False
            return True
        # removing k: k itself may now sit between members; existing
        # violators survive unless k was their only member above/below
        if self.h_above[k] and self.h_below[k]:
            return False
        for w in iter_bits(viol):
            a = self.h_above[w] - ((desc[k] >> w) & 1)
            b = self.h_below[w] - ((anc[k] >> w) & 1)
            if a and b:
                return False
        return True

    def preview_index(self, k) -> Tuple[int, int, bool]:
        return (self.i_ise + self.i_toggle[k], self.o_ise + self.o_toggle[k],
                self.preview_convex_index(k))

    # -- comparison ----------------------------------------------------------

    _FIELDS = ("in_h", "marked", "locked", "i_toggle", "o_toggle", "i_ise", "o_ise",
               "h_mask", "h_children", "h_parents", "h_above", "h_below",
               "above_mask", "below_mask")

    def __eq__(self, other):
        if not isinstance(other, ToggleState):
            return NotImplemented
        return self.dfg is other.dfg and all(
            getattr(self, f) == getattr(other, f) for f in self._FIELDS)

    def copy(self) -> "ToggleState":
        new = ToggleState.__new__(ToggleState)
        new.dfg = self.dfg
        for f in self._FIELDS:
            v = getattr(self, f)
            setattr(new, f, list(v) if isinstance(v, list) else v)
        return new


def init_state(dfg: Dfg, frozen: Iterable[int] = ()) -> ToggleState:
    return ToggleState(dfg, frozen)


def apply_toggle(state: ToggleState, nid: int) -> ToggleState:
    return state.toggle(nid)


def preview_toggle(state: ToggleState, nid: int) -> Tuple[int, int, bool]:
    return state.preview(nid)


def state_with(dfg: Dfg, members: Iterable[int], frozen: Iterable[int] = ()) -> ToggleState:
    """A fresh state whose hardware set is ``members``."""
    st = ToggleState(dfg, frozen)
    for nid in sorted(members):
        st.toggle(nid)
    return st
