"""Undirected weighted graphs: parsing, serialization and generators.

Vertices are dense 0-based integers. Edge weights are strictly positive;
the unweighted case is ``w == 1`` for every edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import sparse


class GraphFormatError(ValueError):
    """Raised when graph text cannot be parsed into a simple positive-weight graph."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph with positive edge weights.

    ``u``, ``v`` and ``w`` are parallel arrays with ``u < v`` for every edge,
    sorted lexicographically by ``(u, v)``.
    """

    n: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    _lookup: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.int64)
        v = np.asarray(self.v, dtype=np.int64)
        w = np.asarray(self.w, dtype=float)
        if not (u.shape == v.shape == w.shape) or u.ndim != 1:
            raise ValueError("u, v, w must be 1-d arrays of equal length")
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        if len(u) and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= self.n):
            raise ValueError("edge endpoint out of range")
        if np.any(u == v):
            raise ValueError("self-loops are not allowed")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("edge weights must be finite and strictly positive")

        lo, hi = np.minimum(u, v), np.maximum(u, v)
        order = np.lexsort((hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        if len(lo) > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if np.any(dup):
                k = int(np.flatnonzero(dup)[0])
                raise ValueError(f"duplicate edge ({lo[k]}, {hi[k]})")
        for name, arr in (("u", lo), ("v", hi), ("w", w)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(
            self, "_lookup", {(int(a), int(b)): float(c) for a, b, c in zip(lo, hi, w)}
        )

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build from an iterable of ``(u, v)`` or ``(u, v, w)`` tuples."""
        us, vs, ws = [], [], []
        for e in edges:
            us.append(e[0])
            vs.append(e[1])
            ws.append(e[2] if len(e) > 2 else 1.0)
        return cls(n, np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64),
                   np.array(ws, dtype=float))

    @property
    def num_edges(self) -> int:
        return len(self.u)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(a), int(b), float(c)) for a, b, c in zip(self.u, self.v, self.w)]

    def weight(self, a: int, b: int) -> float:
        """Weight of the pair ``{a, b}``; 0 when absent."""
        if a > b:
            a, b = b, a
        return self._lookup.get((a, b), 0.0)

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric CSR adjacency matrix."""
        rows = np.concatenate([self.u, self.v])
        cols = np.concatenate([self.v, self.u])
        data = np.concatenate([self.w, self.w])
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def weighted_degree(self) -> np.ndarray:
        deg = np.zeros(self.n)
        np.add.at(deg, self.u, self.w)
        np.add.at(deg, self.v, self.w)
        return deg

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor indices and weights of vertex ``i``."""
        adj = self.adjacency
        lo, hi = adj.indptr[i], adj.indptr[i + 1]
        return adj.indices[lo:hi], adj.data[lo:hi]

    def is_bipartite(self) -> bool:
        return _two_colour(self) is not None

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._lookup == other._lookup

    def __hash__(self):
        return hash((self.n, frozenset(self._lookup.items())))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges}, W={total_weight(self):g})"


def total_weight(graph: Graph) -> float:
    return float(graph.w.sum())


def _two_colour(graph: Graph) -> np.ndarray | None:
    colour = np.full(graph.n, -1, dtype=np.int64)
    for start in range(graph.n):
        if colour[start] >= 0:
            continue
        colour[start] = 0
        stack = [start]
        while stack:
            a = stack.pop()
            nbrs, _ = graph.neighbors(a)
            for b in nbrs:
                if colour[b] < 0:
                    colour[b] = 1 - colour[a]
                    stack.append(int(b))
                elif colour[b] == colour[a]:
                    return None
    return colour


def bipartition(graph: Graph) -> np.ndarray | None:
    """A proper 2-colouring as a boolean array, or None if the graph is not bipartite."""
    colour = _two_colour(graph)
    return None if colour is None else colour.astype(bool)


# ---------------------------------------------------------------------------
# text formats


def _parse_weight(token: str, lineno: int) -> float:
    try:
        w = float(token)
    except ValueError:
        raise GraphFormatError(f"line {lineno}: malformed weight {token!r}") from None
    if not math.isfinite(w) or w <= 0:
        raise GraphFormatError(f"line {lineno}: weight must be positive, got {token!r}")
    return w


def _parse_vertex(token: str, lineno: int) -> int:
    try:
        x = int(token)
    except ValueError:
        raise GraphFormatError(f"line {lineno}: malformed vertex id {token!r}") from None
    if x < 0:
        raise GraphFormatError(f"line {lineno}: negative vertex id {x}")
    return x


def _assemble(records: list[tuple[int, int, float, int]], n: int) -> Graph:
    seen: dict[tuple[int, int], int] = {}
    for a, b, _, lineno in records:
        if a == b:
            raise GraphFormatError(f"line {lineno}: self-loop on vertex {a}")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise GraphFormatError(
                f"line {lineno}: duplicate edge {key} (first seen on line {seen[key]})"
            )
        seen[key] = lineno
    return Graph.from_edges(n, [(a, b, w) for a, b, w, _ in records])


def load_edge_list(text: str, n: int | None = None) -> Graph:
    """Parse ``u v [w]`` lines with 0-based ids; ``#`` starts a comment line.

    The vertex count is ``1 + max id`` unless ``n`` is given (which may only
    add trailing isolated vertices).
    """
    records = []
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) not in (2, 3):
            raise GraphFormatError(f"line {lineno}: expected 'u v [w]', got {raw!r}")
        a = _parse_vertex(tokens[0], lineno)
        b = _parse_vertex(tokens[1], lineno)
        w = _parse_weight(tokens[2], lineno) if len(tokens) == 3 else 1.0
        records.append((a, b, w, lineno))
        max_id = max(max_id, a, b)
    count = max_id + 1
    if n is not None:
        if n < count:
            raise GraphFormatError(f"vertex count {n} smaller than max id + 1 = {count}")
        count = n
    return _assemble(records, count)


def load_dimacs(text: str) -> Graph:
    """Parse DIMACS-style ``p <name> n m`` / ``e u v [w]`` lines (1-based ids)."""
    records = []
    n = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0] in ("c", "#"):
            continue
        if tokens[0] == "p":
            if len(tokens) != 4 or n is not None:
                raise GraphFormatError(f"line {lineno}: bad problem line {raw!r}")
            n = _parse_vertex(tokens[2], lineno)
        elif tokens[0] == "e":
            if n is None:
                raise GraphFormatError(f"line {lineno}: edge before 'p' line")
            if len(tokens) not in (3, 4):
                raise GraphFormatError(f"line {lineno}: expected 'e u v [w]', got {raw!r}")
            a = _parse_vertex(tokens[1], lineno) - 1
            b = _parse_vertex(tokens[2], lineno) - 1
            if min(a, b) < 0 or max(a, b) >= n:
                raise GraphFormatError(f"line {lineno}: vertex id outside 1..{n}")
            w = _parse_weight(tokens[3], lineno) if len(tokens) == 4 else 1.0
            records.append((a, b, w, lineno))
        else:
            raise GraphFormatError(f"line {lineno}: unknown record type {tokens[0]!r}")
    if n is None:
        raise GraphFormatError("missing 'p' line")
    return _assemble(records, n)


def _fmt_weight(w: float) -> str:
    return repr(float(w))


def to_edge_list(graph: Graph) -> str:
    """Serialize to the edge-list format; a header comment records ``n``."""
    lines = [f"# n={graph.n} m={graph.num_edges}"]
    for a, b, w in graph.edges:
        lines.append(f"{a} {b}" if w == 1.0 else f"{a} {b} {_fmt_weight(w)}")
    return "\n".join(lines) + "\n"


def _header_n(text: str) -> int | None:
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if tok.startswith("n="):
                    try:
                        return int(tok[2:])
                    except ValueError:
                        return None
            continue
        return None
    return None


def read_graph(path: str | Path) -> Graph:
    """Load a graph file, detecting DIMACS by its ``p`` line.

    For edge lists, a ``# n=<count>`` header written by :func:`to_edge_list`
    preserves trailing isolated vertices.
    """
    text = Path(path).read_text(encoding="utf-8")
    for raw in text.splitlines():
        tokens = raw.split()
        if not tokens or tokens[0].startswith("#") or tokens[0] == "c":
            continue
        if tokens[0] in ("p", "e"):
            return load_dimacs(text)
        break
    return load_edge_list(text, n=_header_n(text))


def write_graph(graph: Graph, path: str | Path) -> None:
    Path(path).write_text(to_edge_list(graph), encoding="utf-8")


# ---------------------------------------------------------------------------
# generators


def generate_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p) with unit weights; every unordered pair kept independently with probability p."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return Graph(n, iu[keep], ju[keep], np.ones(int(keep.sum())))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("n must be >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise ValueError("n must be >= 1")
    iu, ju = np.triu_indices(n, k=1)
    return Graph(n, iu, ju, np.ones(len(iu)))


def complete_bipartite_graph(a: int, b: int) -> Graph:
    if a < 1 or b < 1:
        raise ValueError("both sides need at least one vertex")
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def star_graph(leaves: int) -> Graph:
    """Centre 0 joined to ``leaves`` leaves."""
    return Graph.from_edges(leaves + 1, [(0, j) for j in range(1, leaves + 1)])


def random_bipartite_graph(a: int, b: int, p: float, seed: int) -> Graph:
    """Random subgraph of K_{a,b}; vertices ``0..a-1`` on one side."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    keep = rng.random((a, b)) < p
    ii, jj = np.nonzero(keep)
    return Graph(a + b, ii, jj + a, np.ones(len(ii)))
