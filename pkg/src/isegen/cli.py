"""Command-line front end.

    isegen run app.dfg --lat ops.lat --nin 4 --nout 2 --max-ises 4
    isegen run app.dfg --mode compare
    isegen generate --seed 1 --count 10 --out corpus/
    isegen generate --regular 8 --motif 4 --out corpus/
    isegen calibrate
"""

import argparse
import sys
import time
from pathlib import Path

from . import corpus
from .calibrate import CALIBRATION_SEED, calibrate, calibration_corpus
from .cut import Constraints, merit
from .driver import Application, select_ises
from .errors import BudgetExceeded, IsegenError, ParseError, SpeedupDivergence
from .fileformat import default_latency_table, format_block, read_blocks, read_latency_table
from .oracle import OracleBudget, enumerate_optimal_cut, iterative_exact
from .report import render_dot, render_structured, render_text, report_dict
from .search import CALIBRATED_WEIGHTS, GainWeights, SearchConfig, bipartition

EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_OTHER = 1


def _weights(text):
    try:
        return GainWeights.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isegen", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="identify ISEs in one or more block files")
    run.add_argument("inputs", nargs="+", help="block files (one application)")
    run.add_argument("--lat", help="latency table (default: bundled table)")
    run.add_argument("--nin", type=_positive, default=4)
    run.add_argument("--nout", type=_positive, default=2)
    run.add_argument("--max-ises", type=_positive, default=4)
    run.add_argument("--passes", type=_positive, default=5)
    run.add_argument("--weights", type=_weights, default=CALIBRATED_WEIGHTS,
                     help="a1,a2,a3,a4,a5")
    run.add_argument("--mode", choices=("isegen", "oracle", "compare"), default="isegen")
    run.add_argument("--format", choices=("text", "structured", "graph-export"),
                     default="text")
    run.add_argument("--export", help="write a Graphviz export here")
    run.add_argument("--report", help="write the report here instead of stdout")
    run.add_argument("--max-nodes", type=_positive, default=OracleBudget.max_nodes,
                     help="oracle size limit (candidate nodes per block)")
    run.add_argument("--seed", type=int, default=0, help="accepted for symmetry; unused")

    gen = sub.add_parser("generate", help="write a deterministic synthetic corpus")
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--count", type=_positive, default=10)
    gen.add_argument("--min-nodes", type=_positive, default=5)
    gen.add_argument("--max-nodes", type=_positive, default=40)
    gen.add_argument("--mem-ratio", type=float, default=0.1)
    gen.add_argument("--regular", type=_positive, metavar="K",
                     help="emit one block of K disjoint motif copies instead")
    gen.add_argument("--motif", type=_positive, default=4)
    gen.add_argument("--out", required=True)

    cal = sub.add_parser("calibrate", help="grid-search the gain weights")
    cal.add_argument("--lat")
    cal.add_argument("--seed", type=int, default=CALIBRATION_SEED)
    cal.add_argument("--count", type=_positive, default=200)
    cal.add_argument("--nin", type=_positive, default=4)
    cal.add_argument("--nout", type=_positive, default=2)
    return parser


def _load_lat(path):
    return read_latency_table(path) if path else default_latency_table()


def _compare(app, config, budget):
    rows = []
    for block in app.blocks:
        t0 = time.perf_counter()
        h = merit(bipartition(block, config, app.lat), app.lat)
        t1 = time.perf_counter()
        try:
            _, o = enumerate_optimal_cut(block, config.constraints, app.lat, budget)
        except BudgetExceeded as exc:
            rows.append({"block": block.name, "heuristic_merit": h, "skipped": str(exc)})
            continue
        t2 = time.perf_counter()
        rows.append({"block": block.name, "heuristic_merit": h, "oracle_merit": o,
                     "ratio": h / o if o > 0 else 1.0,
                     "heuristic_seconds": t1 - t0, "oracle_seconds": t2 - t1})
    return rows


def cmd_run(args) -> int:
    lat = _load_lat(args.lat)
    blocks = []
    for path in args.inputs:
        blocks.extend(read_blocks(path, lat))
    app = Application(blocks, lat)
    constraints = Constraints(args.nin, args.nout, args.max_ises)
    config = SearchConfig(weights=args.weights, constraints=constraints,
                          max_passes=args.passes)
    budget = OracleBudget(max_nodes=args.max_nodes)
    comparisons = None
    if args.mode == "oracle":
        report = iterative_exact(app, config, budget)
    else:
        report = select_ises(app, config)
        if args.mode == "compare":
            comparisons = _compare(app, config, budget)

    if args.format == "text":
        text = render_text(report, mode=args.mode, constraints=constraints,
                           comparisons=comparisons)
    elif args.format == "structured":
        text = render_structured(report_dict(report, mode=args.mode, constraints=constraints,
                                             weights=args.weights, comparisons=comparisons))
    else:
        text = render_dot(app, report)
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    if args.export:
        Path(args.export).write_text(render_dot(app, report))
    return 0


def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.regular:
        block = corpus.regular_block(args.regular, args.motif,
                                     name=f"regular{args.regular}x{args.motif}")
        blocks = [block]
    else:
        if args.min_nodes > args.max_nodes:
            raise ValueError("--min-nodes exceeds --max-nodes")
        blocks = corpus.generate_corpus(args.seed, args.count,
                                        (args.min_nodes, args.max_nodes),
                                        mem_ratio=args.mem_ratio)
    for block in blocks:
        (out / f"{block.name}.dfg").write_text(format_block(block))
        print(out / f"{block.name}.dfg")
    return 0


def cmd_calibrate(args) -> int:
    lat = _load_lat(args.lat)
    blocks = calibration_corpus(args.seed, args.count)
    best, _ = calibrate(lat, Constraints(args.nin, args.nout), blocks)
    w = best.weights
    print(f"weights: {w.mrt},{w.iop},{w.cnv},{w.cgp},{w.idc}")
    print(f"mean ratio: {best.mean_ratio:.6f}  median ratio: {best.median_ratio:.6f}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "generate": cmd_generate, "calibrate": cmd_calibrate}
    try:
        return handler[args.command](args)
    except ParseError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (SpeedupDivergence, IsegenError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
