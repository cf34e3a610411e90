import random

import networkx as nx
import pytest

from isegen.dfg import LatencyTable, make_dfg


def unit_lat(hw=0.3):
    """Every ALU opcode costs one software cycle and ``hw`` in hardware."""
    lat = LatencyTable()
    for op in ("add", "sub", "and", "or", "xor", "shl", "shr", "cmp", "mul"):
        lat.add(op, 1, hw)
    for op in ("not", "neg"):
        lat.add(op, 1, hw, arity=1)
    for op in ("load", "store"):
        lat.add(op, 2, 1.0, arity=1)
    return lat


@pytest.fixture
def lat():
    return unit_lat()


@pytest.fixture
def chain3():
    # node 1 reads one external operand, node 3 is live-out
    return make_dfg([1, 2, 3], [(1, 2), (2, 3)], live_out=[3], arity={1: 1})


@pytest.fixture
def diamond():
    return make_dfg([1, 2, 3, 4], [(1, 2), (1, 3), (2, 4), (3, 4)], live_out=[4],
                    arity={1: 1})


@pytest.fixture
def rng():
    return random.Random(1234)


# --- reference implementations built on networkx, independent of isegen ---

def to_nx(dfg):
    g = nx.DiGraph()
    for node in dfg.nodes:
        g.add_node(node.id, op=node.opcode)
    g.add_edges_from(dfg.edges)
    return g


def ref_io(dfg, members):
    members = set(members)
    g = to_nx(dfg)
    producers = set()
    inputs = 0
    for m in members:
        preds = set(g.predecessors(m))
        if not preds:
            inputs += dfg.arity[dfg.index[m]]
        producers |= preds - members
    outputs = sum(1 for m in members
                  if dfg.node(m).is_live_out or set(g.successors(m)) - members)
    return inputs + len(producers), outputs


def ref_convex(dfg, members):
    members = set(members)
    g = to_nx(dfg)
    for w in g.nodes:
        if w in members:
            continue
        if nx.ancestors(g, w) & members and nx.descendants(g, w) & members:
            return False
    return True


def ref_critical_path(dfg, members, lat):
    sub = to_nx(dfg).subgraph(members)
    best = {}
    for v in nx.topological_sort(sub):
        h = lat.hw(dfg.node(v).opcode)
        best[v] = h + max((best[p] for p in sub.predecessors(v)), default=0.0)
    return max(best.values(), default=0.0)
