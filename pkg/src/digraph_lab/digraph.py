"""Bounded-degree directed graphs with sorted CSR adjacency.

Vertices are named ``1..n``. Both adjacency directions are stored as
compressed arrays so that graphs with a few hundred thousand vertices stay
cheap to build and to query.
"""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import BadVertexIndex, DegreeBoundViolated

__all__ = [
    "BoundedDigraph",
    "build_digraph",
    "disjoint_union",
    "read_edge_list",
    "write_edge_list",
    "format_edge_list",
    "parse_edge_list",
]


class BoundedDigraph:
    """Immutable d-bounded digraph on vertices ``1..n``.

    Neighbor lists are sorted ascending, which fixes the meaning of
    "the i-th neighbor" for the query oracles.
    """

    __slots__ = ("n", "d", "_out_ptr", "_out_idx", "_in_ptr", "_in_idx", "_lists")

    def __init__(self, n, d, out_ptr, out_idx, in_ptr, in_idx):
        self.n = int(n)
        self.d = int(d)
        self._out_ptr = out_ptr
        self._out_idx = out_idx
        self._in_ptr = in_ptr
        self._in_idx = in_idx
        self._lists = None
        for arr in (out_ptr, out_idx, in_ptr, in_idx):
            arr.setflags(write=False)

    # -- basic accessors -------------------------------------------------
    @property
    def num_vertices(self) -> int:
        return self.n

    @property
    def num_edges(self) -> int:
        return int(self._out_idx.shape[0])

    def _check(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise BadVertexIndex(f"vertex {v} outside 1..{self.n}")

    def out_neighbors(self, v: int) -> np.ndarray:
        self._check(v)
        return self._out_idx[self._out_ptr[v] : self._out_ptr[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        self._check(v)
        return self._in_idx[self._in_ptr[v] : self._in_ptr[v + 1]]

    def out_degree(self, v: int) -> int:
        self._check(v)
        return int(self._out_ptr[v + 1] - self._out_ptr[v])

    def in_degree(self, v: int) -> int:
        self._check(v)
        return int(self._in_ptr[v + 1] - self._in_ptr[v])

    def out_neighbor(self, v: int, i: int) -> int | None:
        """The ``i``-th smallest out-neighbor (1-based) or ``None``."""
        self._check(v)
        lo = self._out_ptr[v]
        if i < 1 or lo + i > self._out_ptr[v + 1]:
            return None
        return int(self._out_idx[lo + i - 1])

    def in_neighbor(self, v: int, i: int) -> int | None:
        self._check(v)
        lo = self._in_ptr[v]
        if i < 1 or lo + i > self._in_ptr[v + 1]:
            return None
        return int(self._in_idx[lo + i - 1])

    def out_degrees(self) -> np.ndarray:
        return np.diff(self._out_ptr)[1:]

    def in_degrees(self) -> np.ndarray:
        return np.diff(self._in_ptr)[1:]

    def max_degree(self) -> int:
        if self.n == 0:
            return 0
        return int(max(self.out_degrees().max(), self.in_degrees().max()))

    def edge_array(self) -> np.ndarray:
        """``(m, 2)`` array of edges in ascending lexicographic order."""
        src = np.repeat(np.arange(self.n + 1, dtype=np.int64), np.diff(self._out_ptr))
        return np.column_stack([src, self._out_idx]) if self.num_edges else np.zeros((0, 2), np.int64)

    def edges(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.edge_array()]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.out_neighbors(u)
        j = int(np.searchsorted(nbrs, v))
        return j < nbrs.shape[0] and int(nbrs[j]) == v

    def adjacency_lists(self) -> tuple[list[list[int]], list[list[int]]]:
        """Plain-list adjacency indexed by vertex (index 0 unused); cached."""
        if self._lists is None:
            out_l = [[] for _ in range(self.n + 1)]
            in_l = [[] for _ in range(self.n + 1)]
            for u, v in self.edge_array().tolist():
                out_l[u].append(v)
                in_l[v].append(u)
            for lst in in_l:
                lst.sort()
            self._lists = (out_l, in_l)
        return self._lists

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoundedDigraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.d == other.d
            and np.array_equal(self._out_ptr, other._out_ptr)
            and np.array_equal(self._out_idx, other._out_idx)
        )

    def __hash__(self):
        return hash((self.n, self.d, self._out_idx.tobytes()))

    def __repr__(self) -> str:
        return f"BoundedDigraph(n={self.n}, d={self.d}, m={self.num_edges})"


def _csr(keys: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row pointers for sorted ``keys`` plus the per-row counts."""
    counts = np.bincount(keys, minlength=n + 1)
    ptr = np.zeros(n + 2, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, counts


def build_digraph(n: int, d: int, edges: Iterable[Sequence[int]] | np.ndarray) -> BoundedDigraph:
    """Validate ``edges`` and build a :class:`BoundedDigraph`.

    Duplicate edges are merged. Raises :class:`BadVertexIndex` for endpoints
    outside ``1..n`` or self-loops and :class:`DegreeBoundViolated` when an
    in- or out-degree exceeds ``d``.
    """
    n = int(n)
    d = int(d)
    if n < 0 or d < 0:
        raise BadVertexIndex("vertex count and degree bound must be non-negative")
    e = np.asarray(edges if isinstance(edges, np.ndarray) else list(edges), dtype=np.int64)
    if e.size == 0:
        e = np.zeros((0, 2), dtype=np.int64)
    if e.ndim != 2 or e.shape[1] != 2:
        raise BadVertexIndex("edges must be ordered pairs")
    u, v = e[:, 0], e[:, 1]
    if e.shape[0]:
        if e.min() < 1 or e.max() > n:
            bad = e[(e < 1) | (e > n)][0]
            raise BadVertexIndex(f"vertex {int(bad)} outside 1..{n}")
        loops = u == v
        if loops.any():
            raise BadVertexIndex(f"self-loop at vertex {int(u[loops][0])}")
        key = np.sort(u * (n + 1) + v)
        keep = np.ones(key.shape[0], dtype=bool)
        keep[1:] = key[1:] != key[:-1]
        key = key[keep]
        u, v = key // (n + 1), key % (n + 1)
    out_ptr, out_deg = _csr(u, n)
    order = np.argsort(v * (n + 1) + u, kind="stable")
    in_ptr, in_deg = _csr(v[order], n)
    for deg, direction in ((out_deg, "out"), (in_deg, "in")):
        if deg.shape[0] and deg.max() > d:
            w = int(np.flatnonzero(deg > d)[0])
            raise DegreeBoundViolated(w, int(deg[w]), d, direction)
    return BoundedDigraph(n, d, out_ptr, v, in_ptr, u[order])


def disjoint_union(*graphs: BoundedDigraph) -> BoundedDigraph:
    """Vertex-disjoint union; the i-th graph is shifted past the earlier ones."""
    offset = 0
    parts = []
    for g in graphs:
        parts.append(g.edge_array() + offset)
        offset += g.n
    d = max((g.d for g in graphs), default=0)
    return build_digraph(offset, d, np.concatenate(parts) if parts else [])


# -- edge-list text format ---------------------------------------------------

def format_edge_list(g: BoundedDigraph) -> str:
    lines = [f"{g.n} {g.num_edges} {g.d}"]
    lines += [f"{u} {v}" for u, v in g.edge_array().tolist()]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> BoundedDigraph:
    tokens = text.split()
    if len(tokens) < 3:
        raise ValueError("edge list needs a header line 'n m d'")
    n, m, d = (int(t) for t in tokens[:3])
    body = tokens[3:]
    if len(body) != 2 * m:
        raise ValueError(f"header announces {m} edges, found {len(body) / 2:g}")
    pairs = np.array(body, dtype=np.int64).reshape(m, 2)
    return build_digraph(n, d, pairs)


def write_edge_list(g: BoundedDigraph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g), encoding="utf-8")


def read_edge_list(path: str | Path) -> BoundedDigraph:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"))
