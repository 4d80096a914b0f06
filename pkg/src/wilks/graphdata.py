"""Undirected graphs and paired-comparison tables: parsing, writing, simulation.

Files use 1-based node identifiers; everything in memory is 0-based.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import csgraph
from scipy.special import expit

from .errors import NegativeCount, ParseError, SelfLoop

__all__ = [
    "UndirectedGraph",
    "ComparisonData",
    "read_edge_list",
    "write_edge_list",
    "read_comparisons",
    "write_comparisons",
    "is_strongly_connected",
    "simulate_beta_graph",
    "simulate_bt_data",
    "as_generator",
]


def as_generator(seed) -> np.random.Generator:
    """Accept an int, a sequence of ints (spawn key) or a ready Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class UndirectedGraph:
    """Simple undirected graph held as a symmetric 0/1 adjacency matrix."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.array(self.adjacency, dtype=np.int8)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if a.shape[0] < 2:
            raise ValueError("a graph needs at least two nodes")
        if np.any(np.diag(a) != 0):
            raise ValueError("self-loops are not allowed")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        if np.any((a != 0) & (a != 1)):
            raise ValueError("adjacency entries must be 0 or 1")
        object.__setattr__(self, "adjacency", _frozen(a))

    @classmethod
    def from_edges(cls, n: int, edges) -> "UndirectedGraph":
        a = np.zeros((n, n), dtype=np.int8)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            a[i, j] = a[j, i] = 1
        return cls(a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @cached_property
    def degrees(self) -> np.ndarray:
        return _frozen(self.adjacency.sum(axis=1).astype(np.int64))

    @property
    def edges(self) -> frozenset:
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return frozenset(zip(iu.tolist(), ju.tolist()))

    @property
    def n_edges(self) -> int:
        return int(self.degrees.sum()) // 2

    def __eq__(self, other):
        if not isinstance(other, UndirectedGraph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency)

    def __repr__(self):
        return f"UndirectedGraph(n={self.n}, edges={self.n_edges})"


@dataclass(frozen=True, eq=False)
class ComparisonData:
    """Paired-comparison outcomes; ``wins[i, j]`` counts wins of i over j."""

    wins: np.ndarray

    def __post_init__(self):
        w = np.array(self.wins, dtype=np.int64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("wins must be a square matrix")
        if w.shape[0] < 2:
            raise ValueError("need at least two items")
        if np.any(w < 0):
            raise NegativeCount("win counts must be non-negative")
        if np.any(np.diag(w) != 0):
            raise ValueError("an item cannot be compared with itself")
        object.__setattr__(self, "wins", _frozen(w))

    @property
    def n(self) -> int:
        return self.wins.shape[0]

    @cached_property
    def k(self) -> np.ndarray:
        return _frozen(self.wins + self.wins.T)

    @cached_property
    def out_wins(self) -> np.ndarray:
        return _frozen(self.wins.sum(axis=1))

    def is_dense(self) -> bool:
        """True when every pair of distinct items met at least once."""
        off = ~np.eye(self.n, dtype=bool)
        return bool(np.all(self.k[off] >= 1))

    def __eq__(self, other):
        if not isinstance(other, ComparisonData):
            return NotImplemented
        return np.array_equal(self.wins, other.wins)

    def __repr__(self):
        return f"ComparisonData(n={self.n}, comparisons={int(self.wins.sum())})"


def _header_count(line: str, lineno: int):
    """Parse an optional ``#n <count>`` header; return None for plain comments."""
    parts = line[1:].split()
    if len(parts) == 2 and parts[0] == "n":
        try:
            count = int(parts[1])
        except ValueError:
            raise ParseError(f"bad node count {parts[1]!r}", lineno) from None
        if count < 2:
            raise ParseError("node count must be at least 2", lineno)
        return count
    return None


def _parse_id(token: str, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"not an integer node id: {token!r}", lineno) from None
    if value < 1:
        raise ParseError(f"node ids are 1-based, got {value}", lineno)
    return value


def read_edge_list(text: str) -> UndirectedGraph:
    declared = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            count = _header_count(line, lineno)
            if count is not None:
                declared = count
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"expected two node ids, got {len(tokens)} tokens", lineno)
        i, j = (_parse_id(t, lineno) for t in tokens)
        if i == j:
            raise SelfLoop(f"self-loop on node {i}", lineno)
        pairs.append((i - 1, j - 1))

    n = max((max(p) + 1 for p in pairs), default=0)
    if declared is not None:
        if declared < n:
            raise ParseError(f"header declares {declared} nodes but id {n} appears")
        n = declared
    if n < 2:
        raise ParseError("edge list describes fewer than two nodes")
    return UndirectedGraph.from_edges(n, pairs)


def write_edge_list(g: UndirectedGraph) -> str:
    """Canonical text form: node-count header, then sorted ``i j`` lines with i < j."""
    lines = [f"#n {g.n}"]
    lines += [f"{i + 1} {j + 1}" for i, j in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def _is_int(token: str) -> bool:
    return token.lstrip("+-").isdigit()


def read_comparisons(text: str) -> ComparisonData:
    declared = None
    seen_header = False
    rows = []
    reader = csv.reader(io.StringIO(text))
    for lineno, fields in enumerate(reader, start=1):
        fields = [f.strip() for f in fields]
        if not fields or all(f == "" for f in fields):
            continue
        if fields[0].startswith("#"):
            count = _header_count(",".join(fields), lineno)
            if count is not None:
                declared = count
            continue
        if len(fields) != 3:
            raise ParseError(f"expected 3 columns i,j,wins, got {len(fields)}", lineno)
        if not rows and not seen_header and not any(_is_int(f) for f in fields):
            seen_header = True
            continue
        i, j = (_parse_id(t, lineno) for t in fields[:2])
        try:
            w = int(fields[2])
        except ValueError:
            raise ParseError(f"not an integer win count: {fields[2]!r}", lineno) from None
        if w < 0:
            raise NegativeCount(f"negative win count {w}", lineno)
        if i == j:
            raise SelfLoop(f"item {i} compared with itself", lineno)
        rows.append((i - 1, j - 1, w))

    n = max((max(i, j) + 1 for i, j, _ in rows), default=0)
    if declared is not None:
        if declared < n:
            raise ParseError(f"header declares {declared} items but id {n} appears")
        n = declared
    if n < 2:
        raise ParseError("comparison table describes fewer than two items")
    wins = np.zeros((n, n), dtype=np.int64)
    for i, j, w in rows:
        wins[i, j] += w
    return ComparisonData(wins)


def write_comparisons(data: ComparisonData) -> str:
    lines = [f"#n {data.n}", "i,j,wins"]
    iu, ju = np.nonzero(data.wins)
    lines += [f"{i + 1},{j + 1},{data.wins[i, j]}" for i, j in zip(iu, ju)]
    return "\n".join(lines) + "\n"


def is_strongly_connected(data: ComparisonData) -> bool:
    """Ford's condition: every item reaches every other through a chain of wins."""
    n_comp, _ = csgraph.connected_components(
        data.wins > 0, directed=True, connection="strong"
    )
    return n_comp == 1


def _values(beta) -> np.ndarray:
    return np.asarray(getattr(beta, "values", beta), dtype=float)


def simulate_beta_graph(beta, rng_seed) -> UndirectedGraph:
    """Draw a graph with independent edges, P(i ~ j) = sigmoid(beta_i + beta_j)."""
    b = _values(beta)
    n = b.size
    if n < 2:
        raise ValueError("need at least two nodes")
    rng = as_generator(rng_seed)
    iu, ju = np.triu_indices(n, 1)
    hit = rng.random(iu.size) < expit(b[iu] + b[ju])
    a = np.zeros((n, n), dtype=np.int8)
    a[iu[hit], ju[hit]] = 1
    a[ju[hit], iu[hit]] = 1
    return UndirectedGraph(a)


def simulate_bt_data(beta, k_common: int, rng_seed) -> ComparisonData:
    """Each pair meets ``k_common`` times; i beats j w.p. sigmoid(beta_i - beta_j)."""
    b = _values(beta)
    n = b.size
    if n < 2:
        raise ValueError("need at least two items")
    if k_common < 1:
        raise ValueError("k_common must be at least 1")
    rng = as_generator(rng_seed)
    iu, ju = np.triu_indices(n, 1)
    w_upper = rng.binomial(k_common, expit(b[iu] - b[ju]))
    wins = np.zeros((n, n), dtype=np.int64)
    wins[iu, ju] = w_upper
    wins[ju, iu] = k_common - w_upper
    return ComparisonData(wins)
