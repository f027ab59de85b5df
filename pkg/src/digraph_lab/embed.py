"""Brute-force subgraph search for constant-size patterns.

Patterns are matched as non-induced subgraphs: an embedding is an
injective vertex map that sends every directed pattern edge onto a host
edge. The search grows the map along pattern edges, so each extension only
looks at neighbors of already-mapped host vertices.
"""
from __future__ import annotations

import functools
import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .digraph import BoundedDigraph
from .errors import PatternTooLarge

__all__ = [
    "MAX_PATTERN_VERTICES",
    "Host",
    "iter_embeddings",
    "find_embedding",
    "count_embeddings",
    "automorphism_count",
    "count_subgraph_copies",
    "greedy_disjoint_copies",
    "disjoint_copy_lower_bound",
    "is_embedding",
    "edge_deletion_distance",
]

MAX_PATTERN_VERTICES = 12


@dataclass
class Host:
    """Adjacency view searched for pattern copies.

    ``out_adj[v]`` / ``in_adj[v]`` must be sequences for every vertex in
    ``vertices``; absent vertices of a dict-backed host read as empty.
    """

    out_adj: Sequence[Sequence[int]] | dict
    in_adj: Sequence[Sequence[int]] | dict
    vertices: Sequence[int]

    @classmethod
    def from_graph(cls, g: BoundedDigraph) -> "Host":
        out_l, in_l = g.adjacency_lists()
        return cls(out_l, in_l, range(1, g.n + 1))

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], vertices: Iterable[int] = ()) -> "Host":
        out_adj: dict[int, list[int]] = defaultdict(list)
        in_adj: dict[int, list[int]] = defaultdict(list)
        seen = set()
        for u, v in edges:
            if (u, v) in seen:
                continue
            seen.add((u, v))
            out_adj[u].append(v)
            in_adj[v].append(u)
        verts = sorted(set(out_adj) | set(in_adj) | set(vertices))
        return cls(out_adj, in_adj, verts)


def _as_host(g) -> Host:
    return g if isinstance(g, Host) else Host.from_graph(g)


@dataclass(frozen=True)
class _Step:
    vertex: int
    anchor: int | None  # position in the order of an already-mapped neighbor
    anchor_out: bool  # True: anchor -> vertex, candidates are out-neighbors
    need_out: int
    need_in: int
    to_mapped: tuple[int, ...]  # positions w with vertex -> w
    from_mapped: tuple[int, ...]  # positions w with w -> vertex


@functools.lru_cache(maxsize=64)
def _plan(pattern: BoundedDigraph) -> tuple[_Step, ...]:
    out_l, in_l = pattern.adjacency_lists()
    remaining = set(range(1, pattern.n + 1))
    order: list[int] = []
    pos: dict[int, int] = {}
    steps = []
    while remaining:
        def links(x):
            return sum(1 for y in out_l[x] if y in pos) + sum(1 for y in in_l[x] if y in pos)

        x = max(remaining, key=lambda x: (links(x), len(out_l[x]) + len(in_l[x]), -x))
        remaining.discard(x)
        anchor, anchor_out = None, False
        for y in in_l[x]:
            if y in pos:
                anchor, anchor_out = pos[y], True
                break
        if anchor is None:
            for y in out_l[x]:
                if y in pos:
                    anchor, anchor_out = pos[y], False
                    break
        steps.append(
            _Step(
                vertex=x,
                anchor=anchor,
                anchor_out=anchor_out,
                need_out=len(out_l[x]),
                need_in=len(in_l[x]),
                to_mapped=tuple(pos[y] for y in out_l[x] if y in pos),
                from_mapped=tuple(pos[y] for y in in_l[x] if y in pos),
            )
        )
        pos[x] = len(order)
        order.append(x)
    return tuple(steps)


def iter_embeddings(
    pattern: BoundedDigraph,
    host,
    roots: Iterable[int] | None = None,
    forbidden: set[int] | frozenset[int] = frozenset(),
) -> Iterator[tuple[int, ...]]:
    """Yield embeddings as tuples ``(phi(1), ..., phi(h))``.

    ``roots`` restricts where the first planned pattern vertex may land;
    host vertices in ``forbidden`` are never used.
    """
    if pattern.n > MAX_PATTERN_VERTICES:
        raise PatternTooLarge(f"pattern has {pattern.n} vertices > {MAX_PATTERN_VERTICES}")
    if pattern.n == 0:
        yield ()
        return
    host = _as_host(host)
    out_adj, in_adj = host.out_adj, host.in_adj
    steps = _plan(pattern)
    h = len(steps)
    image = [0] * h
    used = set(forbidden)

    def fits(step: _Step, c: int) -> bool:
        if c in used:
            return False
        oc = out_adj[c]
        ic = in_adj[c]
        if len(oc) < step.need_out or len(ic) < step.need_in:
            return False
        for w in step.to_mapped:
            if image[w] not in oc:
                return False
        for w in step.from_mapped:
            if image[w] not in ic:
                return False
        return True

    def extend(depth: int, candidates) -> Iterator[None]:
        step = steps[depth]
        for c in candidates:
            if not fits(step, c):
                continue
            image[depth] = c
            if depth + 1 == h:
                yield None
            else:
                used.add(c)
                yield from extend(depth + 1, _candidates(depth + 1))
                used.discard(c)

    def _candidates(depth: int):
        step = steps[depth]
        if step.anchor is None:
            return host.vertices
        a = image[step.anchor]
        return out_adj[a] if step.anchor_out else in_adj[a]

    first = host.vertices if roots is None else roots
    inverse = [s.vertex for s in steps]
    for _ in extend(0, first):
        phi = [0] * (h + 1)
        for depth, x in enumerate(inverse):
            phi[x] = image[depth]
        yield tuple(phi[1:])


def find_embedding(pattern: BoundedDigraph, host, roots=None, forbidden=frozenset()):
    """First embedding found, or ``None``."""
    return next(iter_embeddings(pattern, host, roots, forbidden), None)


def count_embeddings(pattern: BoundedDigraph, host) -> int:
    return sum(1 for _ in iter_embeddings(pattern, host))


@functools.lru_cache(maxsize=64)
def automorphism_count(pattern: BoundedDigraph) -> int:
    return count_embeddings(pattern, pattern)


def count_subgraph_copies(g: BoundedDigraph, h: BoundedDigraph) -> int:
    """Number of copies of ``h`` in ``g`` (embeddings divided by ``|Aut(h)|``)."""
    if h.n > MAX_PATTERN_VERTICES:
        raise PatternTooLarge(f"pattern has {h.n} vertices > {MAX_PATTERN_VERTICES}")
    if h.n > g.n:
        return 0
    emb = count_embeddings(h, g)
    aut = automorphism_count(h)
    assert emb % aut == 0
    return emb // aut


def greedy_disjoint_copies(g, h: BoundedDigraph) -> list[tuple[int, ...]]:
    """A maximal family of pairwise vertex-disjoint copies, found greedily."""
    host = _as_host(g)
    used: set[int] = set()
    copies = []
    for r in list(host.vertices):
        if r in used:
            continue
        emb = find_embedding(h, host, roots=(r,), forbidden=used)
        if emb is not None:
            copies.append(emb)
            used.update(emb)
    return copies


def disjoint_copy_lower_bound(g: BoundedDigraph, h: BoundedDigraph) -> int:
    """Lower bound on the edges that must be deleted to make ``g`` H-free."""
    if h.n > MAX_PATTERN_VERTICES:
        raise PatternTooLarge(f"pattern has {h.n} vertices > {MAX_PATTERN_VERTICES}")
    return len(greedy_disjoint_copies(g, h))


def is_embedding(pattern: BoundedDigraph, phi: Sequence[int], has_edge) -> bool:
    """Check ``phi`` (image of vertex ``x`` at ``phi[x-1]``) against ``has_edge(u, v)``."""
    if len(phi) != pattern.n or len(set(phi)) != len(phi):
        return False
    return all(has_edge(phi[u - 1], phi[v - 1]) for u, v in pattern.edges())


def edge_deletion_distance(g: BoundedDigraph, h: BoundedDigraph, max_edges: int = 12) -> int:
    """Exact minimum number of edge deletions making ``g`` H-free (tiny graphs only)."""
    edges = g.edges()
    if len(edges) > max_edges:
        raise PatternTooLarge(f"exhaustive distance limited to {max_edges} edges")
    for r in range(len(edges) + 1):
        for drop in itertools.combinations(range(len(edges)), r):
            gone = set(drop)
            kept = [e for j, e in enumerate(edges) if j not in gone]
            host = Host.from_edges(kept, range(1, g.n + 1))
            if find_embedding(h, host) is None:
                return r
    return len(edges)
