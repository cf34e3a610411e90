"""Text, JSON and Graphviz renderings of an :class:`IseReport`."""

import json
from typing import Dict, List, Optional

from .dfg import Dfg
from .driver import Application, IseReport

PALETTE = ("#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
           "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd")


def _r(x: float) -> float:
    return round(float(x), 6)


def report_dict(report: IseReport, *, mode: str, constraints, weights,
                comparisons: Optional[List[Dict]] = None) -> Dict:
    out = {
        "mode": mode,
        "constraints": {"n_in": constraints.n_in, "n_out": constraints.n_out,
                        "n_ise": constraints.n_ise},
        "weights": [_r(w) for w in weights.as_tuple()],
        "lambda_overall": _r(report.lambda_overall),
        "speedup": _r(report.speedup),
        "ises": [
            {
                "block": ise.block,
                "members": sorted(ise.cut.members),
                "inputs": ise.io[0],
                "outputs": ise.io[1],
                "merit": _r(ise.merit),
                "exec_freq": ise.exec_freq,
                "instance_count": ise.instance_count,
                "n_c": ise.n_c,
                "instances": [sorted(s) for s in ise.instances],
            }
            for ise in report.ises
        ],
        "potentials": [{k: _r(v) for k, v in round_.items()} for round_ in report.potentials],
        "retired": list(report.retired),
    }
    if comparisons is not None:
        out["comparisons"] = [
            {k: (_r(v) if isinstance(v, float) else v) for k, v in row.items()
             if k not in ("heuristic_seconds", "oracle_seconds")}
            for row in comparisons
        ]
    return out


def render_structured(data: Dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def render_text(report: IseReport, *, mode: str, constraints,
                comparisons: Optional[List[Dict]] = None) -> str:
    lines = [f"mode: {mode}",
             f"constraints: n_in={constraints.n_in} n_out={constraints.n_out} "
             f"n_ise={constraints.n_ise}",
             f"lambda_overall: {report.lambda_overall:.6f}"]
    if not report.ises:
        lines.append("no profitable ISE found")
    for k, ise in enumerate(report.ises, start=1):
        nodes = ",".join(str(m) for m in sorted(ise.cut.members))
        lines.append(f"ISE {k}: block={ise.block} nodes=[{nodes}] I={ise.io[0]} "
                     f"O={ise.io[1]} M={ise.merit:.6f} instances={ise.instance_count} "
                     f"N_C={ise.n_c}")
    if report.retired:
        lines.append("retired blocks: " + " ".join(report.retired))
    lines.append(f"speedup: {report.speedup:.6f}")
    if comparisons:
        lines.append("")
        lines.append(f"{'block':<12} {'heuristic':>10} {'oracle':>10} {'ratio':>8} "
                     f"{'t_heur(s)':>10} {'t_oracle(s)':>11}")
        for row in comparisons:
            if row.get("skipped"):
                lines.append(f"{row['block']:<12} skipped: {row['skipped']}")
                continue
            lines.append(f"{row['block']:<12} {row['heuristic_merit']:>10.6f} "
                         f"{row['oracle_merit']:>10.6f} {row['ratio']:>8.4f} "
                         f"{row['heuristic_seconds']:>10.4f} {row['oracle_seconds']:>11.4f}")
    return "\n".join(lines) + "\n"


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_dot(app: Application, report: IseReport) -> str:
    """Graphviz digraph; ISE members carry ``ise`` and ``instance`` attributes."""
    membership: Dict[tuple, tuple] = {}
    for k, ise in enumerate(report.ises, start=1):
        for j, inst in enumerate(ise.instances):
            for nid in inst:
                membership[(ise.block, nid)] = (k, j)
    lines = ["digraph isegen {", "  node [shape=box, fontname=\"monospace\"];"]
    for b in app.blocks:
        lines.extend(_dot_block(b, membership))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_block(b: Dfg, membership) -> List[str]:
    out = [f"  subgraph {_q('cluster_' + b.name)} {{",
           f"    label={_q(f'{b.name} freq={b.exec_freq}')};"]
    for node in b.nodes:
        attrs = [f"label={_q(f'{node.id}: {node.opcode}')}"]
        if node.is_memory:
            attrs.append("shape=ellipse")
        if node.is_live_out:
            attrs.append("peripheries=2")
        hit = membership.get((b.name, node.id))
        if hit:
            ise, inst = hit
            color = PALETTE[(ise - 1) % len(PALETTE)]
            attrs += [f"ise={ise}", f"instance={inst}", "style=filled" if inst == 0
                      else "style=\"filled,dashed\"", f"fillcolor={_q(color)}"]
        out.append(f"    {_q(f'{b.name}.{node.id}')} [{', '.join(attrs)}];")
    for src, dst in b.edges:
        out.append(f"    {_q(f'{b.name}.{src}')} -> {_q(f'{b.name}.{dst}')};")
    out.append("  }")
    return out
