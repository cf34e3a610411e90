"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines are
written straight to the terminal even when output capture is on.
"""

import math
import os
import random
import statistics
import subprocess
import sys
import time

import pytest

from isegen.calibrate import CALIBRATION_SEED, merit_ratio
from isegen.corpus import bounded_block, random_block, random_chain, random_tree, regular_block
from isegen.cut import Constraints, Cut, io_counts, is_convex, merit
from isegen.dfg import barrier_distances, make_dfg
from isegen.driver import Application, Ise, lambda_overall, overall_speedup, select_ises
from isegen.fileformat import default_latency_table, format_blocks
from isegen.oracle import enumerate_optimal_cut, naive_optimal_cut
from isegen.search import SearchConfig, SearchState, bipartition, run_pass
from isegen.toggle import init_state

from conftest import unit_lat

LAT = default_latency_table()
HELD_OUT_SEED = 4242
assert HELD_OUT_SEED != CALIBRATION_SEED


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def candidates(g):
    return [n.id for n in g.nodes if not n.is_memory]


def test_c01_toggle_exactness(verdict):
    rng = random.Random(101)
    started = time.perf_counter()
    toggles = mismatches = 0
    for _ in range(500):
        g = random_block(rng, rng.randint(5, 40))
        cand = candidates(g)
        s = init_state(g)
        for _ in range(200):
            s.toggle(rng.choice(cand))
            toggles += 1
            if (s.i_ise, s.o_ise) != io_counts(Cut(g, s.members())):
                mismatches += 1
    elapsed = time.perf_counter() - started
    verdict(1, mismatches == 0 and toggles == 10**5 and elapsed < 60,
            f"{toggles} toggles, {mismatches} mismatches, {elapsed:.1f}s")


def test_c02_involution(verdict):
    rng = random.Random(102)
    failures = done = 0
    while done < 10**4:
        g = random_block(rng, rng.randint(5, 40))
        cand = candidates(g)
        s = init_state(g)
        for _ in range(rng.randint(0, 20)):
            s.toggle(rng.choice(cand))
        for _ in range(20):
            before = s.copy()
            nid = rng.choice(cand)
            s.toggle(nid).toggle(nid)
            failures += s != before
            done += 1
            s.toggle(rng.choice(cand))
    verdict(2, failures == 0, f"{done} double toggles, {failures} not restored")


def test_c03_legality(verdict):
    rng = random.Random(103)
    violations = ises = 0
    for a in range(1000):
        blocks = [random_block(rng, rng.randint(5, 30), name=f"a{a}b{j}")
                  for j in range(rng.randint(1, 4))]
        c = Constraints(rng.randint(2, 5), rng.randint(1, 3), rng.randint(1, 4))
        app = Application(blocks, LAT)
        report = select_ises(app, SearchConfig(constraints=c))
        used = {b.name: set() for b in blocks}
        for ise in report.ises:
            ises += 1
            block = app.block(ise.block)
            for inst in ise.instances:
                cut = Cut(block, inst)
                i, o = io_counts(cut)
                ok = (is_convex(cut) and i <= c.n_in and o <= c.n_out
                      and not any(block.node(m).is_memory for m in inst)
                      and not used[ise.block] & inst)
                violations += not ok
                used[ise.block] |= inst
    verdict(3, violations == 0, f"1000 applications, {ises} ISEs, {violations} violations")


def _exact(g, cfg):
    found = merit(bipartition(g, cfg, LAT), LAT)
    return abs(found - enumerate_optimal_cut(g, cfg.constraints, LAT)[1]) <= 1e-9


def test_c04_oracle_quality(verdict):
    cfg = SearchConfig(constraints=Constraints(4, 2))
    rng = random.Random(HELD_OUT_SEED)
    ratios = []
    for i in range(200):
        g = bounded_block(rng, 15, name=f"h{i}")
        opt = enumerate_optimal_cut(g, cfg.constraints, LAT)[1]
        ratios.append(merit_ratio(merit(bipartition(g, cfg, LAT), LAT), opt))
    median, mean = statistics.median(ratios), statistics.mean(ratios)

    rng = random.Random(HELD_OUT_SEED + 1)
    chains = [random_chain(rng, rng.randint(1, 15)) for _ in range(100)]
    trees = [random_tree(rng, rng.randint(1, 15), fan_in=bool(i % 2)) for i in range(100)]
    chain_hits = sum(_exact(g, cfg) for g in chains)
    tree_hits = sum(_exact(g, cfg) for g in trees)
    ok = median >= 0.95 and mean >= 0.90 and chain_hits == 100 and tree_hits == 100
    verdict(4, ok, f"median {median:.4f} mean {mean:.4f}; exact on chains {chain_hits}/100, "
                   f"trees {tree_hits}/100")


def test_c05_oracle_soundness(verdict):
    rng = random.Random(105)
    mismatches = non_monotone = 0
    for _ in range(1000):
        g = bounded_block(rng, 12, mem_ratio=0.1)
        c = Constraints(rng.randint(1, 5), rng.randint(1, 3))
        cut, m = enumerate_optimal_cut(g, c, LAT)
        if (cut, m) != naive_optimal_cut(g, c, LAT):
            mismatches += 1
        wider_in = enumerate_optimal_cut(g, Constraints(c.n_in + 1, c.n_out), LAT)[1]
        wider_out = enumerate_optimal_cut(g, Constraints(c.n_in, c.n_out + 1), LAT)[1]
        non_monotone += wider_in < m or wider_out < m
    verdict(5, mismatches == 0 and non_monotone == 0,
            f"1000 instances, {mismatches} pruned/unpruned mismatches, "
            f"{non_monotone} monotonicity violations")


def _pass_seconds(g, repeats=3):
    dists = barrier_distances(g)
    g.reach()
    best = math.inf
    for _ in range(repeats):
        state = SearchState(g, LAT, (), (), dists)
        t0 = time.perf_counter()
        run_pass(state, SearchConfig(), Cut(g), 0.0)
        best = min(best, time.perf_counter() - t0)
    return best


def test_c06_complexity(verdict):
    started = time.perf_counter()
    binary = ("add", "sub", "and", "or", "xor", "shl", "shr", "cmp", "mul")
    rows = []
    for v in (64, 128, 256, 512):
        g = random_block(random.Random(v), v, fanin=1.0, window=16, mem_ratio=0.0, ops=binary)
        rows.append((v, len(g.edges), _pass_seconds(g)))
    xs = [math.log(v * e) for v, e, _ in rows]
    ys = [math.log(t) for _, _, t in rows]
    mx, my = statistics.mean(xs), statistics.mean(ys)
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)
    steps = [(y2 - y1) / (x2 - x1) for x1, x2, y1, y2 in zip(xs, xs[1:], ys, ys[1:])]
    elapsed = time.perf_counter() - started
    table = ", ".join(f"V={v} E={e} {t * 1e3:.1f}ms" for v, e, t in rows)
    verdict(6, slope <= 1.3 and elapsed < 300,
            f"exponent vs V*E {slope:.3f} (per doubling "
            f"{', '.join(f'{s:.2f}' for s in steps)}); {table}; sweep {elapsed:.1f}s")


def test_c07_regularity(verdict):
    g = regular_block(8, 4)
    app = Application([g], LAT)
    report = select_ises(app, SearchConfig(constraints=Constraints(4, 2, 1)))
    ise = report.ises[0]
    lam = lambda_overall(app)
    with_instances = overall_speedup(app, [ise])
    template_only = overall_speedup(
        app, [Ise(ise.block, ise.cut, ise.merit, ise.io, ise.exec_freq, ise.instances[:1])])
    saved = g.exec_freq * ise.merit
    ok = (ise.instance_count == 8
          and math.isclose(with_instances, lam / (lam - 8 * saved), rel_tol=1e-9)
          and math.isclose(template_only, lam / (lam - saved), rel_tol=1e-9)
          and math.isclose(lam - lam / with_instances, 8 * (lam - lam / template_only),
                           rel_tol=1e-9))
    verdict(7, ok, f"{ise.instance_count} instances, speedup {with_instances:.6f} "
                   f"vs template-only {template_only:.6f}")


def _ise(block, members, lat, instances):
    cut = Cut(block, members)
    return Ise(block.name, cut, merit(cut, lat), io_counts(cut), block.exec_freq, instances)


def test_c08_speedup_formula(verdict):
    unit = unit_lat()
    results = []

    # lambda = 1000, N_C = 100, M = 2.1
    g = make_dfg(list(range(1, 11)), [(i, i + 1) for i in range(1, 10)], freq=100)
    app = Application([g], unit)
    results.append((overall_speedup(app, [_ise(g, [1, 2, 3], unit, [{1, 2, 3}])]),
                    1000 / 790))

    # lambda = 200 + 1800; ISEs save 50 * 2.1 and 300 * 3 * 1.4
    a = make_dfg([1, 2, 3, 4], [(1, 2), (2, 3), (3, 4)], name="a", freq=50)
    b = make_dfg([1, 2, 3, 4, 5, 6], [(1, 2), (3, 4), (5, 6)], name="b", freq=300)
    app = Application([a, b], unit)
    ises = [_ise(a, [1, 2, 3], unit, [{1, 2, 3}]),
            _ise(b, [1, 2], unit, [{1, 2}, {3, 4}, {5, 6}])]
    results.append((overall_speedup(app, ises), 2000 / (2000 - 105 - 1260)))

    # default table: mul -> add saves 3 + 1 - (0.85 + 0.30) = 2.85, two copies, freq 10
    c = make_dfg({1: "mul", 2: "add", 3: "mul", 4: "add"}, [(1, 2), (3, 4)], freq=10,
                 lat=LAT)
    app = Application([c], LAT)
    results.append((overall_speedup(app, [_ise(c, [1, 2], LAT, [{1, 2}, {3, 4}])]),
                    80 / (80 - 20 * 2.85)))

    empty = overall_speedup(app, [])
    ok = all(math.isclose(got, want, rel_tol=1e-9) for got, want in results) and empty == 1.0
    verdict(8, ok, "; ".join(f"{got:.9f} vs {want:.9f}" for got, want in results)
                   + f"; no ISE -> {empty!r}")


def _cli(args, env_seed):
    env = dict(os.environ, PYTHONHASHSEED=str(env_seed))
    return subprocess.run([sys.executable, "-m", "isegen.cli", *args], env=env,
                          capture_output=True, check=True).stdout


def test_c09_determinism(verdict, tmp_path):
    rng = random.Random(109)
    app = tmp_path / "app.dfg"
    blocks = [random_block(rng, rng.randint(8, 16), name=f"blk{i}") for i in range(4)]
    blocks.append(regular_block(4, 4, name="regular"))
    app.write_text(format_blocks(blocks))
    differing = []
    runs = [("isegen", "text"), ("isegen", "structured"), ("isegen", "graph-export"),
            ("oracle", "structured"), ("compare", "structured")]
    for mode, fmt in runs:
        outputs = []
        for seed in (1, 2):
            export = tmp_path / f"{mode}-{fmt}-{seed}.dot"
            out = _cli(["run", str(app), "--mode", mode, "--format", fmt,
                        "--export", str(export)], seed)
            outputs.append((out, export.read_bytes()))
        if outputs[0] != outputs[1]:
            differing.append(f"{mode}/{fmt}")
    verdict(9, not differing, f"{len(runs)} configurations run twice under different hash "
                              f"seeds; differing: {differing or 'none'}")


def test_c10_pass_bound(verdict):
    rng = random.Random(110)
    runs = over = decreasing = long_pass = 0
    for _ in range(500):
        g = random_block(rng, rng.randint(5, 60))
        cfg = SearchConfig(constraints=Constraints(rng.randint(2, 5), rng.randint(1, 3)),
                           max_passes=rng.choice([1, 2, 5]))
        trace = []
        bipartition(g, cfg, LAT, trace=trace)
        runs += 1
        over += len(trace) > cfg.max_passes
        merits = [trace[0].start_merit] + [r.best_merit for r in trace]
        decreasing += any(b < a for a, b in zip(merits, merits[1:]))
        long_pass += any(r.toggles > len(g) for r in trace)
    verdict(10, over == 0 and decreasing == 0 and long_pass == 0,
            f"{runs} logged runs, {over} over the pass bound, {decreasing} with decreasing "
            f"merit, {long_pass} with a pass longer than |V| toggles")
