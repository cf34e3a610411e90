"""Grid search of the gain weights against the exhaustive optimum."""

import itertools
import random
import statistics
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

from .cut import Constraints, merit
from .dfg import Dfg, LatencyTable
from .oracle import enumerate_optimal_cut
from .search import GainWeights, SearchConfig, bipartition
from .corpus import random_block

CALIBRATION_SEED = 2005
CALIBRATION_SIZE = 200
CALIBRATION_NODES = 12

GRID = {
    "iop": (10.0, 20.0, 50.0),
    "cnv": (0.0, 0.25, 0.5, 1.0, 2.0),
    "cgp": (0.0, 0.1, 0.25, 0.5),
    "idc": (0.0, 0.25, 0.5, 1.0),
}


@dataclass
class CalibrationResult:
    weights: GainWeights
    mean_ratio: float
    median_ratio: float


def calibration_corpus(seed: int = CALIBRATION_SEED, count: int = CALIBRATION_SIZE,
                       nodes: int = CALIBRATION_NODES) -> List[Dfg]:
    rng = random.Random(seed)
    return [random_block(rng, nodes, name=f"cal{seed}_{i}") for i in range(count)]


def merit_ratio(found: float, optimum: float) -> float:
    # nothing profitable exists: any answer (necessarily the empty cut) is optimal
    if optimum <= 0:
        return 1.0
    return found / optimum


def ratios(blocks: Sequence[Dfg], optima: Sequence[float], config: SearchConfig,
           lat: LatencyTable) -> List[float]:
    return [merit_ratio(merit(bipartition(b, config, lat), lat), o)
            for b, o in zip(blocks, optima)]


def weight_grid() -> Iterable[GainWeights]:
    for iop, cnv, cgp, idc in itertools.product(*GRID.values()):
        # the port penalty must dominate the other terms
        if iop >= 10 * max(1.0, cnv, cgp, idc):
            yield GainWeights(1.0, iop, cnv, cgp, idc)


def calibrate(lat: LatencyTable, constraints: Constraints = Constraints(),
              blocks: Sequence[Dfg] = None, progress=None) -> Tuple[CalibrationResult, list]:
    """Return the grid point with the best mean merit ratio (ties: grid order)."""
    blocks = blocks if blocks is not None else calibration_corpus()
    optima = [enumerate_optimal_cut(b, constraints, lat)[1] for b in blocks]
    table = []
    best = None
    for w in weight_grid():
        rs = ratios(blocks, optima, SearchConfig(weights=w, constraints=constraints), lat)
        res = CalibrationResult(w, statistics.mean(rs), statistics.median(rs))
        table.append(res)
        if progress:
            progress(res)
        if best is None or res.mean_ratio > best.mean_ratio:
            best = res
    return best, table
