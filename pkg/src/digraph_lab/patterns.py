"""Source/center decomposition of a pattern and its padded, indexed form H'."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .digraph import BoundedDigraph, build_digraph
from .errors import NotWeaklyConnected, TooFewSources

__all__ = [
    "PatternDecomposition",
    "strongly_connected_components",
    "is_weakly_connected",
    "decompose_pattern",
    "pad_and_index",
    "prepare_pattern",
    "decomposition_report",
    "k_star",
    "three_source_pattern",
]


def strongly_connected_components(g: BoundedDigraph) -> list[tuple[int, ...]]:
    """Tarjan's algorithm, iterative.

    Components come back sorted internally and ordered by smallest member.
    """
    out_l, _ = g.adjacency_lists()
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[tuple[int, ...]] = []
    counter = 0
    for root in range(1, g.n + 1):
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(out_l[root]))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(out_l[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp)))
    comps.sort(key=lambda c: c[0])
    return comps


def is_weakly_connected(g: BoundedDigraph) -> bool:
    if g.n <= 1:
        return True
    out_l, in_l = g.adjacency_lists()
    seen = {1}
    frontier = [1]
    while frontier:
        v = frontier.pop()
        for w in (*out_l[v], *in_l[v]):
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return len(seen) == g.n


@dataclass(frozen=True)
class PatternDecomposition:
    """A pattern split into k source components and the center C_0.

    After :func:`pad_and_index`, ``padded`` is H' on
    ``n_center + k * n_comp`` vertices: C_0 sits at ``1..n_center`` and
    block ``i`` at ``n_center + (i-1)*n_comp + 1 .. n_center + i*n_comp``.
    """

    pattern: BoundedDigraph
    k: int
    sources: tuple[tuple[int, ...], ...]
    center: tuple[int, ...]
    n_comp: int
    n_center: int
    padded: BoundedDigraph | None = None
    index_map: dict[int, int] = field(default_factory=dict)
    crossing_edges: tuple[tuple[int, int], ...] = ()

    @property
    def padded_size(self) -> int:
        return self.n_center + self.k * self.n_comp

    def block_start(self, i: int) -> int:
        """First H' index of source block ``i`` (1-based)."""
        return self.n_center + (i - 1) * self.n_comp + 1

    def block_of(self, x: int) -> int:
        """0 for C_0, otherwise the source block holding H' index ``x``."""
        if x <= self.n_center:
            return 0
        return (x - self.n_center - 1) // self.n_comp + 1

    def is_padding(self, x: int) -> bool:
        i = self.block_of(x)
        return i > 0 and x - self.block_start(i) >= len(self.sources[i - 1])


def decompose_pattern(h: BoundedDigraph) -> PatternDecomposition:
    if not is_weakly_connected(h):
        raise NotWeaklyConnected("pattern must be weakly connected")
    comps = strongly_connected_components(h)
    where = {v: j for j, comp in enumerate(comps) for v in comp}
    has_entry = [False] * len(comps)
    for u, v in h.edges():
        if where[u] != where[v]:
            has_entry[where[v]] = True
    sources = tuple(c for j, c in enumerate(comps) if not has_entry[j])
    if len(sources) < 2:
        raise TooFewSources(f"pattern has {len(sources)} source component(s); need at least 2")
    in_source = {v for c in sources for v in c}
    center = tuple(v for v in range(1, h.n + 1) if v not in in_source)
    return PatternDecomposition(
        pattern=h,
        k=len(sources),
        sources=sources,
        center=center,
        n_comp=max(len(c) for c in sources),
        n_center=len(center),
    )


def pad_and_index(dec: PatternDecomposition) -> PatternDecomposition:
    index_map = {v: j + 1 for j, v in enumerate(dec.center)}
    for i, comp in enumerate(dec.sources, start=1):
        start = dec.block_start(i)
        for j, v in enumerate(comp):
            index_map[v] = start + j
    edges = sorted((index_map[u], index_map[v]) for u, v in dec.pattern.edges())
    padded = build_digraph(dec.padded_size, dec.pattern.d, edges)
    crossing = tuple(
        (u, v) for u, v in edges if u > dec.n_center and v <= dec.n_center
    )
    return dataclasses.replace(
        dec, padded=padded, index_map=index_map, crossing_edges=crossing
    )


def prepare_pattern(h: BoundedDigraph) -> PatternDecomposition:
    """``pad_and_index(decompose_pattern(h))``."""
    return pad_and_index(decompose_pattern(h))


def decomposition_report(dec: PatternDecomposition) -> str:
    lines = [
        f"k {dec.k}",
        f"N_comp {dec.n_comp}",
        f"N_center {dec.n_center}",
        "center " + " ".join(map(str, dec.center)),
    ]
    for i, comp in enumerate(dec.sources, start=1):
        lines.append(f"source {i} " + " ".join(map(str, comp)))
    if dec.padded is not None:
        lines.append(
            "index_map " + " ".join(f"{v}:{x}" for v, x in sorted(dec.index_map.items()))
        )
        lines.append(
            "crossing " + " ".join(f"{u}>{v}" for u, v in dec.crossing_edges)
        )
    return "\n".join(lines) + "\n"


def k_star(k: int) -> BoundedDigraph:
    """k leaves, each with one edge into the center vertex 1."""
    return build_digraph(k + 1, k, [(leaf, 1) for leaf in range(2, k + 2)])


def three_source_pattern() -> BoundedDigraph:
    """The 7-vertex pattern with three source components used as running example."""
    return build_digraph(7, 3, [(1, 2), (4, 3), (3, 2), (6, 7), (7, 2), (3, 5), (5, 4)])
