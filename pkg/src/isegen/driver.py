"""Application-level ISE selection, reuse counting and speedup estimation."""

from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from .cut import Cut, io_counts, is_convex, merit
from .dfg import Dfg, LatencyTable
from .errors import SpeedupDivergence
from .search import SearchConfig, bipartition

# Backtracking steps allowed per occurrence search before giving up.
MATCH_STEP_LIMIT = 200_000


@dataclass
class Application:
    blocks: List[Dfg]
    lat: LatencyTable

    def __post_init__(self):
        names = [b.name for b in self.blocks]
        if len(names) != len(set(names)):
            raise ValueError("block names must be unique")

    def block(self, name: str) -> Dfg:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)


@dataclass
class Ise:
    block: str
    cut: Cut
    merit: float
    io: Tuple[int, int]
    exec_freq: int
    instances: List[FrozenSet[int]] = field(default_factory=list)

    @property
    def instance_count(self) -> int:
        return len(self.instances)

    @property
    def n_c(self) -> int:
        """Dynamic execution count: block frequency times instances."""
        return self.exec_freq * self.instance_count


@dataclass
class IseReport:
    ises: List[Ise]
    lambda_overall: float
    speedup: float
    potentials: List[Dict[str, float]] = field(default_factory=list)
    retired: List[str] = field(default_factory=list)


def block_potential(block: Dfg, lat: LatencyTable, exclude: Iterable[int] = ()) -> float:
    """Frequency times the merit of mapping every remaining node to hardware."""
    exclude = set(exclude)
    rest = [nid for nid in block.ids
            if nid not in exclude and not block.node(nid).is_memory]
    return block.exec_freq * merit(Cut(block, rest), lat)


def _match_order(block: Dfg, members) -> List[int]:
    # BFS over the undirected template, one component at a time by min id,
    # so every node after a component's first has an already-placed neighbor.
    idx = sorted(block.index[m] for m in members)
    inside = set(idx)
    order, seen = [], set()
    for root in idx:
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        while queue:
            k = queue.pop(0)
            order.append(k)
            for y in sorted(block.preds[k] + block.succs[k]):
                if y in inside and y not in seen:
                    seen.add(y)
                    queue.append(y)
    return order


def _find_occurrence(block: Dfg, order: List[int], used: set, limit: Tuple[int, int],
                     edges: set) -> Optional[FrozenSet[int]]:
    n_t = len(order)
    t_pos = {t: i for i, t in enumerate(order)}
    # for each template position, the earlier positions it is adjacent to
    back = []
    for i, t in enumerate(order):
        links = []
        for j in range(i):
            u = order[j]
            links.append((j, (u, t) in edges, (t, u) in edges))
        back.append(links)
    anchor = []
    for i, t in enumerate(order):
        a = None
        for y in block.preds[t] + block.succs[t]:
            if y in t_pos and t_pos[y] < i and (a is None or t_pos[y] < a[0]):
                a = (t_pos[y], y in block.preds[t])
        anchor.append(a)

    image = [0] * n_t
    taken = set()
    steps = 0

    def candidates(i):
        t = order[i]
        a = anchor[i]
        if a is None:
            pool = range(len(block))
        else:
            j, is_pred = a
            pool = block.succs[image[j]] if is_pred else block.preds[image[j]]
        for c in pool:
            if c in used or c in taken or block.memory[c]:
                continue
            if block.opcode[c] != block.opcode[t]:
                continue
            ok = True
            for j, fwd, bwd in back[i]:
                d = image[j]
                if ((d, c) in edges) != fwd or ((c, d) in edges) != bwd:
                    ok = False
                    break
            if ok:
                yield c

    def extend(i):
        nonlocal steps
        if i == n_t:
            cut = Cut(block, (block.ids[k] for k in image))
            io = io_counts(cut)
            if io[0] <= limit[0] and io[1] <= limit[1] and is_convex(cut):
                return cut.members
            return None
        for c in candidates(i):
            steps += 1
            if steps > MATCH_STEP_LIMIT:
                return None
            image[i] = c
            taken.add(c)
            found = extend(i + 1)
            taken.discard(c)
            if found is not None:
                return found
        return None

    return extend(0)


def count_instances(block: Dfg, template: Cut, exclude: Iterable[int] = ()) -> List[FrozenSet[int]]:
    """Greedy set of node-disjoint occurrences of ``template`` in ``block``.

    An occurrence is an opcode-preserving isomorphism onto an induced
    subgraph that is convex and has no more inputs/outputs than the template.
    The template itself always comes first.  ``exclude`` nodes (already
    committed elsewhere) are never matched.
    """
    if not template.members:
        return []
    limit = io_counts(template)
    edges = {(block.index[a], block.index[b]) for a, b in block.edges}
    order = _match_order(block, template.members)
    used = {block.index[m] for m in template.members}
    used |= {block.index[x] for x in exclude}
    found = [template.members]
    while True:
        occ = _find_occurrence(block, order, used, limit, edges)
        if occ is None:
            return found
        found.append(occ)
        used |= {block.index[m] for m in occ}


def lambda_overall(app: Application) -> int:
    """All-software latency of the application, weighted by block frequency."""
    return sum(b.exec_freq * sum(app.lat.sw(op) for op in b.opcode) for b in app.blocks)


def overall_speedup(app: Application, ises: List[Ise]) -> float:
    if not ises:
        return 1.0
    total = lambda_overall(app)
    saved = sum(ise.n_c * ise.merit for ise in ises)
    if saved >= total:
        raise SpeedupDivergence(
            f"saved latency {saved} is not below the application latency {total}")
    return total / (total - saved)


Finder = Callable[[Dfg, SearchConfig, LatencyTable, FrozenSet[int]], Cut]


def _heuristic(block, config, lat, frozen):
    return bipartition(block, config, lat, frozen=frozen)


def select_ises(app: Application, config: SearchConfig,
                finder: Optional[Finder] = None) -> IseReport:
    """Pick up to ``n_ise`` ISEs, always working on the block with the highest
    remaining potential.

    A block whose search yields nothing profitable is retired without using
    up an ISE slot.  Every instance of a committed ISE is frozen so later
    searches and instance matches never reuse its nodes.
    """
    finder = finder or _heuristic
    lat = app.lat
    frozen: Dict[str, set] = {b.name: set() for b in app.blocks}
    active = list(app.blocks)
    ises: List[Ise] = []
    potentials: List[Dict[str, float]] = []
    retired: List[str] = []
    while len(ises) < config.constraints.n_ise and active:
        pots = {b.name: block_potential(b, lat, frozen[b.name]) for b in active}
        potentials.append(pots)
        block = active[0]
        for b in active[1:]:
            if pots[b.name] > pots[block.name]:
                block = b
        cut = finder(block, config, lat, frozenset(frozen[block.name]))
        m = merit(cut, lat)
        if not cut.members or m <= 0:
            active.remove(block)
            retired.append(block.name)
            continue
        instances = count_instances(block, cut, frozen[block.name])
        for inst in instances:
            frozen[block.name] |= inst
        ises.append(Ise(block.name, cut, m, io_counts(cut), block.exec_freq, instances))
    return IseReport(ises, lambda_overall(app), overall_speedup(app, ises),
                     potentials, retired)
