"""Exception types raised by the isegen package."""


class IsegenError(Exception):
    """Base class for every error raised by this package."""


class DfgError(IsegenError):
    """A graph description failed validation.

    ``line`` is the source line of the offending statement when the graph was
    read from a file, otherwise ``None``.
    """

    def __init__(self, message, line=None):
        super().__init__(message)
        self.message = message
        self.line = line


class CycleDetected(DfgError):
    def __init__(self, edge, line=None):
        super().__init__(f"cycle through edge {edge[0]} -> {edge[1]}", line)
        self.edge = edge


class UnknownNodeRef(DfgError):
    def __init__(self, node_id, line=None):
        super().__init__(f"unknown node id {node_id}", line)
        self.node_id = node_id


class DuplicateNode(DfgError):
    def __init__(self, node_id, line=None):
        super().__init__(f"duplicate node id {node_id}", line)
        self.node_id = node_id


class DuplicateEdge(DfgError):
    def __init__(self, edge, line=None):
        super().__init__(f"duplicate edge {edge[0]} -> {edge[1]}", line)
        self.edge = edge


class MissingLatency(DfgError):
    def __init__(self, opcode, line=None):
        super().__init__(f"no latency entry for opcode '{opcode}'", line)
        self.opcode = opcode


class ParseError(IsegenError):
    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line
        self.message = message


class MemoryNodeInCut(IsegenError):
    """A memory operation was placed in a cut."""


class MemoryNodeToggle(IsegenError):
    """A memory (or frozen) node was passed to the toggle engine."""


class BudgetExceeded(IsegenError):
    """The exhaustive search would exceed its node or enumeration budget."""


class SpeedupDivergence(IsegenError):
    """Total saved latency reaches or exceeds the application's latency."""
