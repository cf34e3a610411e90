"""Reading and writing the line-oriented block and latency files.

Block file::

    block <name> freq=<uint>
    node <id> op=<opcode> [mem] [liveout]
    edge <src-id> <dst-id>

Latency file::

    op <opcode> sw=<uint> hw=<decimal> [ar=<uint>]

``#`` starts a comment anywhere on a line.
"""

from importlib import resources
from pathlib import Path
from typing import List, Optional

from .dfg import Dfg, LatencyTable, RawBlock, RawNode, validate_dfg
from .errors import DfgError, ParseError


def _lines(text):
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split("#", 1)[0].split()
        if fields:
            yield lineno, fields


def _uint(token, path, lineno, what):
    if not token.isdigit():
        raise ParseError(path, lineno, f"expected {what}")
    return int(token)


def _keyval(token, key, path, lineno, what):
    prefix = key + "="
    if not token.startswith(prefix) or len(token) == len(prefix):
        raise ParseError(path, lineno, f"expected {what}")
    return token[len(prefix):]


def parse_blocks(text: str, path: str = "<string>") -> List[RawBlock]:
    """Parse block-file text into unvalidated blocks."""
    blocks: List[RawBlock] = []
    cur: Optional[RawBlock] = None
    for lineno, f in _lines(text):
        kw = f[0]
        if kw == "block":
            if len(f) != 3:
                raise ParseError(path, lineno, "expected 'block <name> freq=<uint>'")
            freq = _keyval(f[2], "freq", path, lineno, "freq=<uint>")
            cur = RawBlock(f[1], _uint(freq, path, lineno, "freq=<uint>"), line=lineno)
            blocks.append(cur)
        elif kw in ("node", "edge") and cur is None:
            raise ParseError(path, lineno, f"'{kw}' outside of a block")
        elif kw == "node":
            if len(f) < 3:
                raise ParseError(path, lineno, "expected 'node <id> op=<opcode>'")
            nid = _uint(f[1], path, lineno, "a node id")
            op = _keyval(f[2], "op", path, lineno, "op=<opcode>")
            flags = f[3:]
            for flag in flags:
                if flag not in ("mem", "liveout"):
                    raise ParseError(path, lineno, f"unknown node flag '{flag}'")
            cur.nodes.append(RawNode(nid, op, "mem" in flags, "liveout" in flags, lineno))
        elif kw == "edge":
            if len(f) != 3 or not (f[1].isdigit() and f[2].isdigit()):
                raise ParseError(path, lineno, "expected two node ids")
            cur.edges.append((int(f[1]), int(f[2])))
            cur.edge_lines.append(lineno)
        else:
            raise ParseError(path, lineno, f"unknown statement '{kw}'")
    return blocks


def parse_latency_table(text: str, path: str = "<string>") -> LatencyTable:
    lat = LatencyTable()
    for lineno, f in _lines(text):
        if f[0] != "op" or len(f) not in (4, 5):
            raise ParseError(path, lineno, "expected 'op <opcode> sw=<uint> hw=<decimal> [ar=<uint>]'")
        sw = _uint(_keyval(f[2], "sw", path, lineno, "sw=<uint>"), path, lineno, "sw=<uint>")
        hw_tok = _keyval(f[3], "hw", path, lineno, "hw=<decimal>")
        try:
            hw = float(hw_tok)
        except ValueError:
            raise ParseError(path, lineno, "expected hw=<decimal>") from None
        ar = None
        if len(f) == 5:
            ar = _uint(_keyval(f[4], "ar", path, lineno, "ar=<uint>"), path, lineno, "ar=<uint>")
        try:
            lat.add(f[1], sw, hw, ar)
        except ValueError as exc:
            raise ParseError(path, lineno, str(exc)) from None
    return lat


def load_blocks(text: str, lat: LatencyTable, path: str = "<string>") -> List[Dfg]:
    """Parse and validate; validation failures become :class:`ParseError`."""
    out = []
    names = set()
    for raw in parse_blocks(text, path):
        if raw.name in names:
            raise ParseError(path, raw.line, f"duplicate block name '{raw.name}'")
        names.add(raw.name)
        try:
            out.append(validate_dfg(raw, lat))
        except DfgError as exc:
            raise ParseError(path, exc.line if exc.line is not None else raw.line,
                             exc.message) from exc
    return out


def read_blocks(path, lat: LatencyTable) -> List[Dfg]:
    return load_blocks(Path(path).read_text(), lat, str(path))


def read_latency_table(path) -> LatencyTable:
    return parse_latency_table(Path(path).read_text(), str(path))


def default_latency_table() -> LatencyTable:
    text = resources.files("isegen").joinpath("data/default.lat").read_text()
    return parse_latency_table(text, "default.lat")


def format_block(dfg: Dfg) -> str:
    lines = [f"block {dfg.name} freq={dfg.exec_freq}"]
    for node in dfg.nodes:
        flags = (" mem" if node.is_memory else "") + (" liveout" if node.is_live_out else "")
        lines.append(f"node {node.id} op={node.opcode}{flags}")
    for src, dst in dfg.edges:
        lines.append(f"edge {src} {dst}")
    return "\n".join(lines) + "\n"


def format_blocks(blocks) -> str:
    return "".join(format_block(b) for b in blocks)


def format_latency_table(lat: LatencyTable) -> str:
    rows = []
    for op in sorted(lat.entries):
        e = lat.entries[op]
        row = f"op {op} sw={e.sw} hw={e.hw!r}"
        if e.arity is not None:
            row += f" ar={e.arity}"
        rows.append(row)
    return "\n".join(rows) + "\n"
