"""Exhaustive single-cut search used as ground truth for the heuristic.

Nodes are decided in topological order.  Because every parent of a node is
decided before the node itself, three quantities only ever grow along a
branch and can be used to prune:

* inputs: a producer that is excluded (or memory/frozen) and feeds an
  included node stays an input whatever happens later;
* outputs: an included node with an excluded, memory, frozen or live-out
  consumer stays an output;
* convexity: an excluded node that is reachable from the cut and reaches a
  newly included node is a permanent violation.

A merit bound (software latency of the cut plus all undecided nodes, minus the
current critical path, which can only grow) prunes the rest.
"""

from dataclasses import dataclass
from typing import Iterable, Tuple

from .cut import Constraints, Cut, io_counts, is_convex, merit
from .dfg import Dfg, LatencyTable, mask_to_node_ids
from .errors import BudgetExceeded

_EPS = 1e-9


@dataclass(frozen=True)
class OracleBudget:
    max_nodes: int = 18
    max_enumerated: int = 10**7

    def __post_init__(self):
        if self.max_nodes < 1 or self.max_enumerated < 1:
            raise ValueError("budget limits must be >= 1")


def _rank(cut_merit: float, members) -> Tuple:
    # larger merit, then fewer members, then lexicographically smaller ids
    return (-cut_merit, len(members), tuple(sorted(members)))


def _eligible(dfg: Dfg, frozen) -> list:
    frozen_idx = {dfg.index[f] for f in frozen}
    return [k for k in dfg.topo if not dfg.memory[k] and k not in frozen_idx]


def enumerate_optimal_cut(dfg: Dfg, constraints: Constraints, lat: LatencyTable,
                          budget: OracleBudget = OracleBudget(),
                          frozen: Iterable[int] = ()) -> Tuple[Cut, float]:
    """Maximum-merit legal cut, by branch and bound."""
    frozen = frozenset(frozen)
    order = _eligible(dfg, frozen)
    if len(order) > budget.max_nodes:
        raise BudgetExceeded(
            f"block {dfg.name} has {len(order)} candidate nodes; "
            f"the exhaustive search is limited to {budget.max_nodes}")
    n_in, n_out = constraints.n_in, constraints.n_out
    g = dfg
    anc, desc = g.reach()
    sw = [lat.sw(op) for op in g.opcode]
    hw = [lat.hw(op) for op in g.opcode]
    eligible = 0
    for k in order:
        eligible |= 1 << k
    locked = ((1 << len(g)) - 1) & ~eligible
    # software latency still available after position i
    rest_sw = [0] * (len(order) + 1)
    for i in range(len(order) - 1, -1, -1):
        rest_sw[i] = rest_sw[i + 1] + sw[order[i]]

    best = {"rank": _rank(0.0, ()), "mask": 0, "merit": 0.0}
    explored = 0

    def visit(i, inc, reach_out, inputs, src_in, outputs, lam, finish, cp):
        # inc: members; reach_out: non-members with a member ancestor;
        # inputs: external producers feeding members; outputs: output members
        nonlocal explored
        explored += 1
        if explored > budget.max_enumerated:
            raise BudgetExceeded(f"more than {budget.max_enumerated} search nodes")
        if lam + rest_sw[i] - cp < best["merit"] - _EPS:
            return
        if i == len(order):
            if not inc:
                return
            cut = Cut(g, mask_to_node_ids(g, inc))
            m = merit(cut, lat)
            rank = _rank(m, cut.members)
            if rank < best["rank"]:
                best.update(rank=rank, mask=inc, merit=m)
            return
        k = order[i]
        bit = 1 << k

        # include k
        if not (anc[k] & reach_out):
            new_inputs = inputs
            for p in g.preds[k]:
                if not (inc >> p) & 1:
                    new_inputs |= 1 << p
            new_src = src_in + (0 if g.preds[k] else g.arity[k])
            new_outputs = outputs
            if g.live_out[k] or any(not (eligible >> c) & 1 for c in g.succs[k]):
                new_outputs |= bit
            if (new_inputs.bit_count() + new_src <= n_in
                    and new_outputs.bit_count() <= n_out):
                start = 0.0
                for p in g.preds[k]:
                    if (inc >> p) & 1 and finish[p] > start:
                        start = finish[p]
                finish[k] = start + hw[k]
                visit(i + 1, inc | bit, reach_out | (desc[k] & locked), new_inputs, new_src, new_outputs,
                      lam + sw[k], finish, max(cp, finish[k]))
                del finish[k]

        # exclude k
        new_outputs = outputs
        for p in g.preds[k]:
            if (inc >> p) & 1:
                new_outputs |= 1 << p
        if new_outputs.bit_count() <= n_out:
            new_reach = reach_out | bit if anc[k] & inc else reach_out
            visit(i + 1, inc, new_reach, inputs, src_in, new_outputs, lam, finish, cp)

    visit(0, 0, 0, 0, 0, 0, 0, {}, 0.0)
    cut = Cut(g, mask_to_node_ids(g, best["mask"]))
    return cut, best["merit"]


def naive_optimal_cut(dfg: Dfg, constraints: Constraints, lat: LatencyTable,
                      frozen: Iterable[int] = ()) -> Tuple[Cut, float]:
    """Unpruned 2^n sweep over all candidate subsets (reference only)."""
    frozen = frozenset(frozen)
    cand = [dfg.ids[k] for k in _eligible(dfg, frozen)]
    best_rank, best_cut, best_merit = _rank(0.0, ()), Cut(dfg), 0.0
    for mask in range(1, 1 << len(cand)):
        members = [cand[j] for j in range(len(cand)) if (mask >> j) & 1]
        cut = Cut(dfg, members)
        if not constraints.admits(io_counts(cut)) or not is_convex(cut):
            continue
        m = merit(cut, lat)
        rank = _rank(m, members)
        if rank < best_rank:
            best_rank, best_cut, best_merit = rank, cut, m
    return best_cut, best_merit


def iterative_exact(app, config, budget: OracleBudget = OracleBudget()):
    """The block-selection loop of :func:`isegen.driver.select_ises` with the
    exhaustive search in place of the heuristic."""
    from .driver import select_ises

    def finder(dfg, cfg, lat, frozen):
        cut, _ = enumerate_optimal_cut(dfg, cfg.constraints, lat, budget, frozen)
        return cut

    for block in app.blocks:
        n = sum(1 for m in block.memory if not m)
        if n > budget.max_nodes:
            raise BudgetExceeded(
                f"block {block.name} has {n} candidate nodes; "
                f"the exhaustive search is limited to {budget.max_nodes}")
    return select_ises(app, config, finder=finder)
