"""Sequences with an occurrence cap, their frequency distributions, and the
moment-matched hard families.

Everything distributional is exact (:class:`fractions.Fraction`); floats
only appear in the sampling experiments of :mod:`digraph_lab.testers`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySequence, OccurrenceCapExceeded, Unrealizable, ZeroMoment

__all__ = [
    "IntSequence",
    "Histogram",
    "FrequencyDistribution",
    "ProportionalityWitness",
    "histogram",
    "frequency_distribution",
    "alternating_binomial_vector",
    "alternating_binomial_identity_check",
    "make_p",
    "make_q",
    "proportionality_factor",
    "check_pq_linear_relation",
    "moment",
    "verify_proportional_moments",
    "realizable_step",
    "nearest_realizable",
    "build_sequence_from_distribution",
    "build_family",
    "occurrence_farness",
    "is_k_occurrence_free",
    "format_sequence",
    "parse_sequence",
    "write_sequence",
    "read_sequence",
    "format_distribution",
    "parse_distribution",
]


class IntSequence:
    """Positive integers at positions ``1..n``, each value occurring at most ``cap`` times."""

    __slots__ = ("values", "cap")

    def __init__(self, values: Iterable[int] | np.ndarray, cap: int):
        arr = np.array(values if isinstance(values, np.ndarray) else list(values), dtype=np.int64)
        arr = arr.reshape(-1)
        if arr.size and arr.min() < 1:
            raise ValueError("sequence values must be positive integers")
        self.cap = int(cap)
        if arr.size:
            uniq, counts = np.unique(arr, return_counts=True)
            over = np.flatnonzero(counts > self.cap)
            if over.size:
                j = over[0]
                raise OccurrenceCapExceeded(int(uniq[j]), int(counts[j]), self.cap)
        arr.setflags(write=False)
        self.values = arr

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.n

    def value_at(self, a: int) -> int:
        """Value at 1-based position ``a``."""
        if not 1 <= a <= self.n:
            raise IndexError(f"position {a} outside 1..{self.n}")
        return int(self.values[a - 1])

    def tolist(self) -> list[int]:
        return self.values.tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntSequence):
            return NotImplemented
        return self.cap == other.cap and np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        head = self.values[:8].tolist()
        more = ", ..." if self.n > 8 else ""
        return f"IntSequence({head}{more}, n={self.n}, cap={self.cap})"


@dataclass(frozen=True)
class Histogram:
    """``counts[i]`` = number of distinct values occurring exactly ``i`` times."""

    counts: dict[int, int]

    def __getitem__(self, i: int) -> int:
        return self.counts.get(i, 0)

    @property
    def distinct(self) -> int:
        return sum(self.counts.values())

    @property
    def length(self) -> int:
        return sum(i * c for i, c in self.counts.items())


@dataclass(frozen=True)
class FrequencyDistribution:
    """Exact distribution over frequencies ``1..k``; ``probs[i-1]`` is the mass at ``i``."""

    k: int
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) != self.k:
            raise ValueError(f"expected {self.k} probabilities, got {len(probs)}")
        if any(p < 0 for p in probs):
            raise ValueError("probabilities must be non-negative")
        if sum(probs) != 1:
            raise ValueError(f"probabilities sum to {sum(probs)}, not 1")

    def __getitem__(self, i: int) -> Fraction:
        """Mass at frequency ``i`` (1-based); zero outside ``1..k``."""
        return self.probs[i - 1] if 1 <= i <= self.k else Fraction(0)

    def mean(self) -> Fraction:
        return sum((i * p for i, p in enumerate(self.probs, start=1)), Fraction(0))


@dataclass(frozen=True)
class ProportionalityWitness:
    k: int
    rho: Fraction
    moment_ratios: tuple[Fraction, ...]

    @property
    def valid(self) -> bool:
        return all(r == self.rho for r in self.moment_ratios)


def histogram(s: IntSequence) -> Histogram:
    if s.n == 0:
        return Histogram({})
    _, counts = np.unique(s.values, return_counts=True)
    freq = np.bincount(counts)
    return Histogram({i: int(c) for i, c in enumerate(freq) if c and i})


def frequency_distribution(s: IntSequence) -> FrequencyDistribution:
    if s.n == 0:
        raise EmptySequence("frequency variable of an empty sequence is undefined")
    hist = histogram(s)
    total = hist.distinct
    return FrequencyDistribution(s.cap, tuple(Fraction(hist[i], total) for i in range(1, s.cap + 1)))


# -- the moment-matched pair p, q --------------------------------------------

def alternating_binomial_vector(k: int) -> list[int]:
    """``((-1)^i * C(k, i))`` for ``i = 1..k``."""
    return [(-1) ** i * math.comb(k, i) for i in range(1, k + 1)]


def alternating_binomial_identity_check(k: int, vector: Sequence[int] | None = None) -> bool:
    """Vandermonde rows ``i^j`` (j < k) against the alternating binomial vector give ``(-1, 0, ..., 0)``.

    Pass ``vector`` to check a perturbed right-hand side instead.
    """
    vec = alternating_binomial_vector(k) if vector is None else list(vector)
    target = [-1] + [0] * (k - 1)
    got = [sum(i**j * x for i, x in zip(range(1, k + 1), vec)) for j in range(k)]
    return got == target


def make_p(k: int) -> FrequencyDistribution:
    """The k-occurrence-free side: mass on odd frequencies for even ``k``, even ones for odd ``k``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if k % 2 == 0:
        probs = [Fraction(math.comb(k, i), 2 ** (k - 1)) if i % 2 else Fraction(0) for i in range(1, k + 1)]
    else:
        probs = [Fraction(math.comb(k, i), 2 ** (k - 1) - 1) if i % 2 == 0 else Fraction(0) for i in range(1, k + 1)]
    return FrequencyDistribution(k, tuple(probs))


def make_q(k: int) -> FrequencyDistribution:
    """The far side: carries mass at frequency ``k`` itself."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if k % 2 == 0:
        probs = [Fraction(math.comb(k, i), 2 ** (k - 1) - 1) if i % 2 == 0 else Fraction(0) for i in range(1, k + 1)]
    else:
        probs = [Fraction(math.comb(k, i), 2 ** (k - 1)) if i % 2 else Fraction(0) for i in range(1, k + 1)]
    return FrequencyDistribution(k, tuple(probs))


def proportionality_factor(k: int) -> Fraction:
    """The common moment ratio rho of ``make_q(k)`` over ``make_p(k)``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if k % 2 == 0:
        return 1 + Fraction(1, 2 ** (k - 1) - 1)
    return 1 - Fraction(1, 2 ** (k - 1))


def check_pq_linear_relation(
    k: int,
    p: FrequencyDistribution | None = None,
    q: FrequencyDistribution | None = None,
) -> bool:
    """``q_i == rho * p_i + (rho - 1) * (-1)^i C(k, i)`` for every ``i``."""
    p = make_p(k) if p is None else p
    q = make_q(k) if q is None else q
    rho = proportionality_factor(k)
    alt = alternating_binomial_vector(k)
    return all(q[i] == rho * p[i] + (rho - 1) * alt[i - 1] for i in range(1, k + 1))


def moment(dist: FrequencyDistribution, j: int) -> Fraction:
    if not 0 <= j <= 64:
        raise ValueError("moment order must lie in 0..64")
    return sum((p * i**j for i, p in enumerate(dist.probs, start=1)), Fraction(0))


def verify_proportional_moments(
    p: FrequencyDistribution, q: FrequencyDistribution, k: int
) -> ProportionalityWitness:
    ratios = []
    for j in range(1, k):
        mp = moment(p, j)
        if mp == 0:
            raise ZeroMoment(f"moment {j} of the reference distribution is zero")
        ratios.append(moment(q, j) / mp)
    rho = ratios[0] if ratios else Fraction(1)
    return ProportionalityWitness(k, rho, tuple(ratios))


# -- realizing a distribution exactly ----------------------------------------

def _lcm_denominator(dist: FrequencyDistribution) -> int:
    return math.lcm(*(p.denominator for p in dist.probs))


def realizable_step(dist: FrequencyDistribution) -> int:
    """Lengths realizing ``dist`` exactly are the positive multiples of this number."""
    step = _lcm_denominator(dist) * dist.mean()
    assert step.denominator == 1
    return int(step)


def nearest_realizable(dist: FrequencyDistribution, n: int) -> tuple[int | None, int]:
    step = realizable_step(dist)
    below = (n // step) * step
    above = below if below == n else below + step
    return (below if below > 0 else None), above


def build_sequence_from_distribution(
    dist: FrequencyDistribution, n: int, seed: int | np.random.Generator | None = None
) -> IntSequence:
    """A length-``n`` sequence whose frequency variable is exactly ``dist``.

    Values are ``1, 2, ...`` grouped by frequency (lowest frequency first);
    positions are then shuffled with the seeded stream.
    """
    step = realizable_step(dist)
    if n <= 0 or n % step:
        below, above = nearest_realizable(dist, max(n, 1))
        raise Unrealizable(n, below, above)
    distinct = Fraction(n) / dist.mean()
    assert distinct.denominator == 1
    distinct = int(distinct)
    freqs = np.repeat(
        np.arange(1, dist.k + 1),
        [int(distinct * p) for p in dist.probs],
    )
    values = np.repeat(np.arange(1, freqs.shape[0] + 1), freqs)
    rng = np.random.default_rng(seed)
    rng.shuffle(values)
    return IntSequence(values, dist.k)


def build_family(cls: str, k: int, n: int, seed=None) -> IntSequence:
    """One member of the yes-family ("A", from p) or the far family ("B", from q)."""
    cls = cls.upper()
    if cls not in ("A", "B"):
        raise ValueError("family must be 'A' or 'B'")
    dist = make_p(k) if cls == "A" else make_q(k)
    return build_sequence_from_distribution(dist, n, seed)


def occurrence_farness(s: IntSequence, k: int) -> Fraction:
    """Exact fraction of positions that must change to reach k-occurrence-freeness."""
    if s.n == 0:
        return Fraction(0)
    return Fraction(histogram(s)[k], s.n)


def is_k_occurrence_free(s: IntSequence, k: int) -> bool:
    return histogram(s)[k] == 0


# -- text formats -------------------------------------------------------------

def format_sequence(s: IntSequence) -> str:
    return f"{s.n} {s.cap}\n" + " ".join(map(str, s.values.tolist())) + "\n"


def parse_sequence(text: str) -> IntSequence:
    lines = text.splitlines()
    if not lines:
        raise ValueError("sequence file is empty")
    n, cap = (int(t) for t in lines[0].split())
    values = np.array(" ".join(lines[1:]).split(), dtype=np.int64)
    if values.shape[0] != n:
        raise ValueError(f"header announces {n} values, found {values.shape[0]}")
    return IntSequence(values, cap)


def write_sequence(s: IntSequence, path: str | Path) -> None:
    Path(path).write_text(format_sequence(s), encoding="utf-8")


def read_sequence(path: str | Path) -> IntSequence:
    return parse_sequence(Path(path).read_text(encoding="utf-8"))


def format_distribution(dist: FrequencyDistribution) -> str:
    lines = [str(dist.k)]
    lines += [f"{i} {p.numerator}/{p.denominator}" for i, p in enumerate(dist.probs, start=1)]
    return "\n".join(lines) + "\n"


def parse_distribution(text: str) -> FrequencyDistribution:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    k = int(lines[0])
    probs = [Fraction(0)] * k
    for ln in lines[1:]:
        i, frac = ln.split()
        probs[int(i) - 1] = Fraction(frac)
    return FrequencyDistribution(k, tuple(probs))
