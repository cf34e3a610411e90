"""Deterministic synthetic blocks for tests, calibration and benchmarking."""

import random
from typing import List, Optional, Sequence, Tuple

from .dfg import Dfg, OpNode

ALU_OPS = ("add", "sub", "and", "or", "xor", "shl", "shr", "cmp", "mul", "not", "neg")
UNARY = frozenset({"not", "neg"})


def _pick_op(rng: random.Random, ops: Sequence[str]) -> str:
    return ops[rng.randrange(len(ops))]


def random_block(rng: random.Random, n_nodes: int, *, name: str = "bb",
                 freq: Optional[int] = None, mem_ratio: float = 0.1,
                 fanin: float = 0.75, window: int = 8, live_ratio: float = 0.1,
                 ops: Sequence[str] = ALU_OPS) -> Dfg:
    """A random basic-block DAG.

    Each operand slot of a node is wired to one of the ``window`` most recent
    value-producing nodes with probability ``fanin``; otherwise it is an
    immediate or block input.  Loads have at most one (address) parent,
    stores consume one or two values and produce nothing.  Nodes without
    consumers and a ``live_ratio`` fraction of the others are live-out.
    """
    if n_nodes < 1:
        raise ValueError("n_nodes must be >= 1")
    opcodes, mem, parents = [], [], []
    producers: List[int] = []
    for v in range(n_nodes):
        if v and rng.random() < mem_ratio:
            op = "load" if rng.random() < 0.6 else "store"
            slots = 1 if op == "load" else 2
            is_mem = True
        else:
            op = _pick_op(rng, ops)
            slots = 1 if op in UNARY else 2
            is_mem = False
        recent = producers[-window:]
        chosen = set()
        for _ in range(slots):
            if recent and rng.random() < fanin:
                chosen.add(recent[rng.randrange(len(recent))])
        if op == "store" and not chosen and recent:
            chosen.add(recent[-1])
        opcodes.append(op)
        mem.append(is_mem)
        parents.append(sorted(chosen))
        if op != "store":
            producers.append(v)
    has_child = [False] * n_nodes
    for ps in parents:
        for p in ps:
            has_child[p] = True
    nodes = []
    for v in range(n_nodes):
        live = (not has_child[v] or rng.random() < live_ratio) and opcodes[v] != "store"
        nodes.append(OpNode(v, opcodes[v], mem[v], live))
    edges = [(p, v) for v in range(n_nodes) for p in parents[v]]
    if freq is None:
        freq = rng.randint(1, 1000)
    return Dfg(name, nodes, edges, freq)


def random_chain(rng: random.Random, n_nodes: int, *, name: str = "chain",
                 freq: int = 100, ops: Sequence[str] = ALU_OPS) -> Dfg:
    nodes = [OpNode(v, _pick_op(rng, ops), False, v == n_nodes - 1)
             for v in range(n_nodes)]
    edges = [(v - 1, v) for v in range(1, n_nodes)]
    return Dfg(name, nodes, edges, freq)


def random_tree(rng: random.Random, n_nodes: int, *, name: str = "tree",
                freq: int = 100, ops: Sequence[str] = ALU_OPS,
                fan_in: bool = True) -> Dfg:
    """A random tree.

    With ``fan_in`` (an expression tree) every node except the root has
    exactly one consumer, and the root is live-out.  Otherwise every node
    except the root has exactly one producer, and the leaves are live-out.
    """
    degree = [0] * n_nodes
    links = []
    for v in range(1, n_nodes):
        open_ = [a for a in range(v) if degree[a] < 2]
        a = open_[rng.randrange(len(open_))]
        degree[a] += 1
        links.append((a, v))
    if fan_in:
        # reverse ids so that edges point from leaves towards the root
        edges = sorted((n_nodes - 1 - b, n_nodes - 1 - a) for a, b in links)
        live = {n_nodes - 1}
    else:
        edges = links
        live = {v for v in range(n_nodes) if degree[v] == 0}
    binary = [o for o in ops if o not in UNARY]
    nodes = []
    for v in range(n_nodes):
        two = sum(1 for _, d in edges if d == v) == 2
        nodes.append(OpNode(v, _pick_op(rng, binary if two else ops), False, v in live))
    return Dfg(name, nodes, edges, freq)


def motif_nodes(size: int) -> Tuple[List[str], List[Tuple[int, int]]]:
    """Opcodes and edges of the repeated unit used by :func:`regular_block`.

    Two multiplies feed an add, followed by a shift/xor chain.  With four
    nodes the unit has four inputs and one output, so under (4, 2) ports no
    legal cut can span two copies profitably.
    """
    ops = ["mul", "mul", "add"][:size]
    edges = []
    if size >= 3:
        edges += [(0, 2), (1, 2)]
    tail = ("shl", "xor")
    for j in range(3, size):
        ops.append(tail[(j - 3) % 2])
        edges.append((j - 1, j))
    return ops, edges


def regular_block(copies: int, motif: int = 4, *, name: str = "regular",
                  freq: int = 100) -> Dfg:
    """``copies`` disjoint instances of the same ``motif``-node unit."""
    ops, edges = motif_nodes(motif)
    consumers = {a for a, _ in edges}
    nodes, all_edges = [], []
    for c in range(copies):
        base = c * motif
        for j, op in enumerate(ops):
            nodes.append(OpNode(base + j, op, False, j not in consumers))
        all_edges += [(base + a, base + b) for a, b in edges]
    return Dfg(name, nodes, all_edges, freq)


def generate_corpus(seed: int, count: int, size_range: Tuple[int, int] = (5, 40),
                    *, mem_ratio: float = 0.1, prefix: str = "r") -> List[Dfg]:
    lo, hi = size_range
    if not 1 <= lo <= hi:
        raise ValueError("size range must satisfy 1 <= lo <= hi")
    rng = random.Random(seed)
    return [random_block(rng, rng.randint(lo, hi), name=f"{prefix}{seed}_{i}",
                         mem_ratio=mem_ratio)
            for i in range(count)]


def bounded_block(rng: random.Random, max_candidates: int, **kw) -> Dfg:
    """A random block with at most ``max_candidates`` non-memory nodes."""
    n = rng.randint(3, max_candidates + 3)
    while True:
        g = random_block(rng, n, **kw)
        if sum(1 for m in g.memory if not m) <= max_candidates:
            return g
        n -= 1
