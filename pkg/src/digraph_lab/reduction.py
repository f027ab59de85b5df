"""Sequence -> H-freeness instance, offline and as a lazy out-neighbor oracle.

Position ``a`` of the sequence owns a block of ``n_comp`` source vertices;
value ``b`` owns the ``b``-th copy of the center C_0. Each position is given
a component type ``t`` drawn without replacement from the types still free
for its value, and its block is wired to the ``b``-th center copy the way
block ``t`` of H' is wired to C_0.

Type draws are order-independent: value ``b`` gets a random permutation of
``1..k`` keyed by ``(seed, b)``, and the position with occurrence rank ``r``
among the positions holding ``b`` takes entry ``r``. Read in rank order
this is exactly sequential uniform sampling without replacement, and the
lazy oracle and :func:`build_offline` always agree.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .digraph import BoundedDigraph, build_digraph
from .errors import BadVertexIndex, OccurrenceCapExceeded, ValueOutOfRange
from .occurrence import IntSequence
from .patterns import PatternDecomposition

__all__ = [
    "SequenceAccess",
    "ReducedIndexing",
    "ReductionOracle",
    "occurrence_ranks",
    "type_permutations",
    "assign_types",
    "build_offline",
    "SweepReport",
    "probe_sweep",
    "consistency_check",
    "distance_transfer",
    "format_types_sidecar",
    "parse_types_sidecar",
]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S27, _S30, _S31 = np.uint64(27), np.uint64(30), np.uint64(31)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    # uint64 array arithmetic wraps silently; callers pass arrays, never scalars
    z = x + _GOLDEN
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


def type_permutations(seed: int, values, k: int) -> np.ndarray:
    """Row ``j`` is the type permutation of ``values[j]``, entries in ``1..k``.

    A pure function of ``(seed, value)``; counter-based so that any subset
    of values can be evaluated without touching the others.
    """
    vals = np.asarray(values, dtype=np.uint64).reshape(-1, 1)
    key = _splitmix64(np.array([seed % 2**64], dtype=np.uint64))
    slots = np.arange(k, dtype=np.uint64).reshape(1, -1)
    keys = _splitmix64(key ^ _splitmix64(vals * np.uint64(k) + slots))
    return np.argsort(keys, axis=1, kind="stable") + 1


def occurrence_ranks(values: np.ndarray) -> np.ndarray:
    """0-based rank of each position among the positions holding the same value."""
    values = np.asarray(values)
    if values.size == 0:
        return np.zeros(0, dtype=np.int64)
    order = np.argsort(values, kind="stable")
    sv = values[order]
    idx = np.arange(sv.shape[0])
    first = np.ones(sv.shape[0], dtype=bool)
    first[1:] = sv[1:] != sv[:-1]
    group_start = np.maximum.accumulate(np.where(first, idx, 0))
    ranks = np.empty(sv.shape[0], dtype=np.int64)
    ranks[order] = idx - group_start
    return ranks


class SequenceAccess:
    """Metered position queries into a sequence.

    A query at position ``a`` returns its value; the occurrence rank of
    ``a`` among equal values becomes readable only after that query.
    """

    def __init__(self, seq: IntSequence | np.ndarray | list):
        values = seq.values if isinstance(seq, IntSequence) else np.asarray(seq, dtype=np.int64)
        self._values = values
        self._ranks = occurrence_ranks(values)
        self._revealed: set[int] = set()
        self.query_count = 0

    @property
    def n(self) -> int:
        return int(self._values.shape[0])

    def query(self, a: int) -> int:
        if not 1 <= a <= self.n:
            raise IndexError(f"position {a} outside 1..{self.n}")
        self.query_count += 1
        self._revealed.add(a)
        return int(self._values[a - 1])

    def rank(self, a: int) -> int:
        if a not in self._revealed:
            raise RuntimeError(f"rank of position {a} requested before querying it")
        return int(self._ranks[a - 1])


@dataclass(frozen=True)
class ReducedIndexing:
    n: int
    n_comp: int
    n_center: int

    @property
    def source_size(self) -> int:
        return self.n * self.n_comp

    @property
    def total(self) -> int:
        return self.n * (self.n_comp + self.n_center)

    def source_block(self, a: int) -> range:
        return range((a - 1) * self.n_comp + 1, a * self.n_comp + 1)

    def center_block(self, j: int) -> range:
        lo = self.source_size + (j - 1) * self.n_center
        return range(lo + 1, lo + self.n_center + 1)

    def locate(self, v: int) -> tuple[str, int, int]:
        """``("source", a, local)`` or ``("center", j, local)``, local 1-based."""
        if not 1 <= v <= self.total:
            raise BadVertexIndex(f"vertex {v} outside 1..{self.total}")
        if v <= self.source_size:
            return "source", (v - 1) // self.n_comp + 1, (v - 1) % self.n_comp + 1
        w = v - self.source_size - 1
        return "center", w // self.n_center + 1, w % self.n_center + 1


class ReductionOracle:
    """Virtual reduced graph answering out-neighbor queries on demand.

    A query in the source part reads at most one sequence position (none if
    the position was read before); the center part never reads the sequence.
    The i-th out-neighbor follows ascending vertex order in the reduced
    graph, matching :func:`build_offline`'s sorted adjacency.
    """

    def __init__(self, seq_access, dec: PatternDecomposition, n: int | None = None, seed: int = 0):
        if dec.padded is None:
            raise ValueError("decomposition must be padded and indexed first")
        if not isinstance(seq_access, SequenceAccess):
            seq_access = SequenceAccess(seq_access)
        self.access = seq_access
        self.n = seq_access.n if n is None else int(n)
        if self.n != seq_access.n:
            raise ValueError(f"sequence has length {seq_access.n}, not {self.n}")
        self.dec = dec
        self.seed = int(seed)
        self.indexing = ReducedIndexing(self.n, dec.n_comp, dec.n_center)
        self.T = np.zeros(self.n, dtype=np.int64)
        self.R: dict[int, set[int]] = {}
        self.s_query_count = 0
        self._value_of: dict[int, int] = {}
        self._perm: dict[int, np.ndarray] = {}
        out_l, _ = dec.padded.adjacency_lists()
        self._h_out = [tuple(x) for x in out_l]

    @property
    def num_vertices(self) -> int:
        return self.indexing.total

    @property
    def d(self) -> int:
        return self.dec.pattern.d

    def _resolve(self, a: int) -> tuple[int, int]:
        t = int(self.T[a - 1])
        if t:
            return self._value_of[a], t
        b = self.access.query(a)
        self.s_query_count += 1
        if b > self.n:
            raise ValueOutOfRange(f"value {b} at position {a} exceeds n={self.n}")
        r = self.access.rank(a)
        k = self.dec.k
        if r >= k:
            raise OccurrenceCapExceeded(b, r + 1, k)
        perm = self._perm.get(b)
        if perm is None:
            perm = self._perm[b] = type_permutations(self.seed, [b], k)[0]
        t = int(perm[r])
        self.R.setdefault(b, set(range(1, k + 1))).discard(t)
        self.T[a - 1] = t
        self._value_of[a] = b
        return b, t

    def _out_list(self, v: int) -> list[int]:
        dec = self.dec
        part, owner, local = self.indexing.locate(v)
        if part == "center":
            return [v - local + x for x in self._h_out[local]]
        b, t = self._resolve(owner)
        start = dec.block_start(t)
        images = []
        for x in self._h_out[start + local - 1]:
            if x <= dec.n_center:
                images.append(self.indexing.source_size + (b - 1) * dec.n_center + x)
            else:
                images.append(v - local + (x - start + 1))
        images.sort()
        return images

    def out_neighbor(self, v: int, i: int) -> int | None:
        nbrs = self._out_list(v)
        return nbrs[i - 1] if 1 <= i <= len(nbrs) else None

    def out_degree(self, v: int) -> int:
        return len(self._out_list(v))


def _check_sequence(values: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Validate ``values``; returns ``(unique values, inverse index)``."""
    n = values.shape[0]
    uniq, inv, counts = np.unique(values, return_inverse=True, return_counts=True)
    if n and uniq[-1] > n:
        raise ValueOutOfRange(f"value {int(uniq[-1])} exceeds n={n}")
    over = np.flatnonzero(counts > k)
    if over.size:
        raise OccurrenceCapExceeded(int(uniq[over[0]]), int(counts[over[0]]), k)
    return uniq, inv


def assign_types(s: IntSequence | np.ndarray, dec: PatternDecomposition, seed: int) -> np.ndarray:
    """The array T: component type of every position (same draws as the lazy oracle)."""
    values = s.values if isinstance(s, IntSequence) else np.asarray(s, dtype=np.int64)
    uniq, inv = _check_sequence(values, dec.k)
    if values.size == 0:
        return np.zeros(0, dtype=np.int64)
    perms = type_permutations(seed, uniq, dec.k)
    return perms[inv, occurrence_ranks(values)]


# Per-pattern edge templates; keyed by id with the decomposition kept alive.
_TEMPLATES: dict[int, tuple] = {}


def _templates(dec: PatternDecomposition):
    hit = _TEMPLATES.get(id(dec))
    if hit is not None and hit[0] is dec:
        return hit[1]
    nz, nc = dec.n_center, dec.n_comp
    h_edges = dec.padded.edge_array()
    center = h_edges[h_edges[:, 0] <= nz]
    blocks = []
    for t in range(1, dec.k + 1):
        start = dec.block_start(t)
        block = h_edges[(h_edges[:, 0] >= start) & (h_edges[:, 0] < start + nc)]
        internal = block[block[:, 1] > nz] - (start - 1)
        crossing = block[block[:, 1] <= nz]
        blocks.append((internal, crossing[:, 0] - (start - 1), crossing[:, 1]))
    data = (center, blocks)
    if len(_TEMPLATES) > 32:
        _TEMPLATES.clear()
    _TEMPLATES[id(dec)] = (dec, data)
    return data


def build_offline(s: IntSequence | np.ndarray, dec: PatternDecomposition, seed: int) -> BoundedDigraph:
    """Materialize the reduced graph on ``n * (n_comp + n_center)`` vertices."""
    if dec.padded is None:
        raise ValueError("decomposition must be padded and indexed first")
    values = s.values if isinstance(s, IntSequence) else np.asarray(s, dtype=np.int64)
    types = assign_types(values, dec, seed)
    n = values.shape[0]
    nc, nz = dec.n_comp, dec.n_center
    src_size = n * nc
    center_edges, blocks = _templates(dec)
    parts = []
    if center_edges.size and n:
        bases = src_size + np.arange(n, dtype=np.int64) * nz
        parts.append((bases[:, None, None] + center_edges[None, :, :]).reshape(-1, 2))
    for t, (internal, tails, heads) in enumerate(blocks, start=1):
        pos = np.flatnonzero(types == t)
        if pos.size == 0:
            continue
        block_base = pos * nc  # block of position pos+1 starts after this offset
        if internal.size:
            parts.append((block_base[:, None, None] + internal[None, :, :]).reshape(-1, 2))
        if tails.size:
            center_base = src_size + (values[pos] - 1) * nz
            tail = block_base[:, None] + tails[None, :]
            head = center_base[:, None] + heads[None, :]
            parts.append(np.stack([tail, head], axis=-1).reshape(-1, 2))
    edges = np.concatenate(parts) if parts else np.zeros((0, 2), dtype=np.int64)
    return build_digraph(n * (nc + nz), dec.pattern.d, edges)


@dataclass
class SweepReport:
    probes: int
    mismatches: list[tuple[int, int, int | None, int | None]]
    s_queries: int
    source_positions_probed: int
    center_probe_s_queries: int

    @property
    def consistent(self) -> bool:
        return not self.mismatches


def probe_sweep(oracle: ReductionOracle, offline: BoundedDigraph, probes) -> SweepReport:
    """Compare oracle answers with ``offline`` over ``probes`` (pairs ``(v, i)``)."""
    mismatches = []
    positions = set()
    center_reads = 0
    count = 0
    src = oracle.indexing.source_size
    for v, i in probes:
        before = oracle.s_query_count
        got = oracle.out_neighbor(v, i)
        want = offline.out_neighbor(v, i)
        if got != want:
            mismatches.append((v, i, got, want))
        if v > src:
            center_reads += oracle.s_query_count - before
        else:
            positions.add((v - 1) // oracle.dec.n_comp + 1)
        count += 1
    return SweepReport(count, mismatches, oracle.s_query_count, len(positions), center_reads)


def consistency_check(
    s: IntSequence,
    dec: PatternDecomposition,
    seed: int,
    probe_budget: int | None = None,
    order_seed: int | None = None,
) -> bool:
    """Full (v, i) sweep of the lazy oracle against :func:`build_offline`.

    ``order_seed`` shuffles the probe order; ``probe_budget`` truncates it.
    """
    offline = build_offline(s, dec, seed)
    oracle = ReductionOracle(SequenceAccess(s), dec, s.n, seed)
    d = max(dec.pattern.d, 1)
    probes = [(v, i) for v in range(1, offline.n + 1) for i in range(1, d + 2)]
    if order_seed is not None:
        np.random.default_rng(order_seed).shuffle(probes)
    if probe_budget is not None:
        probes = probes[:probe_budget]
    return probe_sweep(oracle, offline, probes).consistent


def distance_transfer(eps, d: int, dec: PatternDecomposition) -> Fraction:
    """Farness carried over to the reduced graph: ``eps / (d * (n_center + n_comp))``."""
    return Fraction(eps) / (d * (dec.n_center + dec.n_comp))


def format_types_sidecar(seed: int, types: np.ndarray) -> str:
    return f"seed {seed}\nT " + " ".join(map(str, np.asarray(types).tolist())) + "\n"


def parse_types_sidecar(text: str) -> tuple[int, np.ndarray]:
    seed_line, t_line = text.splitlines()[:2]
    seed = int(seed_line.split()[1])
    types = np.array(t_line.split()[1:], dtype=np.int64)
    return seed, types
