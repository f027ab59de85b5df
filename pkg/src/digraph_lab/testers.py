"""Reference testers and the Poissonized histogram distinguisher.

All three testers are one-sided: they reject only with a witness that
re-verifies against the input.
"""
from __future__ import annotations

import configparser
import math
from collections import deque
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
from scipy.special import gammaln, logsumexp

from .embed import Host, find_embedding
from .errors import ModelViolation
from .occurrence import FrequencyDistribution, build_sequence_from_distribution
from .oracle import OracleSession, QueryModel
from .patterns import PatternDecomposition
from .reduction import SequenceAccess

__all__ = [
    "TesterConfig",
    "load_config",
    "derive_seed",
    "TesterVerdict",
    "ExperimentStats",
    "bidirectional_hfree_tester",
    "unidirectional_hfree_tester",
    "k_occurrence_tester",
    "sample_fingerprint",
    "expected_fingerprint_log",
    "llr_weights",
    "poisson_histogram_distinguisher",
]


@dataclass(frozen=True)
class TesterConfig:
    """Frozen tester constants; see ``testers.cfg`` for the shipped values."""

    bidir_sample_constant: float = 1.0
    bfs_radius: int = 0  # 0 means |V(H)|
    unidir_budget_constant: float = 12.0
    forward_depth: int = 0  # 0 means |V(H)|
    kocc_budget_constant: float = 4.0
    poisson_statistic: str = "llr"
    poisson_max_multiplicity: int = 0  # 0 means 3k
    calibration_trials: int = 0  # 0 means as many as the evaluation trials


def load_config(path: str | Path | None = None) -> TesterConfig:
    """Read a flat ``key = value`` file; missing keys keep their defaults."""
    if path is None:
        text = resources.files("digraph_lab").joinpath("testers.cfg").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    parser = configparser.ConfigParser()
    parser.read_string("[tester]\n" + text)
    raw = dict(parser["tester"])
    kwargs: dict[str, Any] = {}
    for f in fields(TesterConfig):
        if f.name in raw:
            default = getattr(TesterConfig, f.name)
            kwargs[f.name] = type(default)(raw.pop(f.name))
    if raw:
        raise ValueError(f"unknown config keys: {', '.join(sorted(raw))}")
    return TesterConfig(**kwargs)


def derive_seed(seed: int, *keys: int) -> int:
    """Counter-based child seed for ``(seed, *keys)``."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class TesterVerdict:
    decision: str  # "accept" or "reject"
    queries_used: int
    witness: Any = None

    @property
    def rejected(self) -> bool:
        return self.decision == "reject"


@dataclass(frozen=True)
class ExperimentStats:
    trials: int
    accept_rate_on_yes: float
    reject_rate_on_no: float
    mean_queries: float
    budget: int

    @property
    def advantage(self) -> float:
        """``|Pr[accept | yes] - Pr[accept | no]|``."""
        return abs(self.accept_rate_on_yes - (1.0 - self.reject_rate_on_no))


# -- graph testers --------------------------------------------------------------

def _neighbors(session: OracleSession, v: int, outgoing: bool) -> list[int]:
    if outgoing:
        deg = session.out_degree(v)
        return [session.out_neighbor(v, i) for i in range(1, deg + 1)]
    deg = session.in_degree(v)
    return [session.in_neighbor(v, i) for i in range(1, deg + 1)]


def bidirectional_hfree_tester(
    session: OracleSession,
    dec: PatternDecomposition,
    eps,
    seed: int,
    config: TesterConfig | None = None,
) -> TesterVerdict:
    """Sample ``ceil(c / eps)`` vertices and look for H inside each explored ball.

    Balls follow edges in both directions up to the configured radius.
    Adjacency learned for one ball is reused by later balls.
    """
    if session.model is not QueryModel.BIDIRECTIONAL:
        raise ModelViolation("the bidirectional tester needs in-neighbor queries")
    cfg = config or load_config()
    h = dec.pattern
    radius = cfg.bfs_radius or h.n
    start = session.query_count
    n = session.num_vertices
    if n == 0:
        return TesterVerdict("accept", 0)
    samples = math.ceil(cfg.bidir_sample_constant / float(eps))
    rng = np.random.default_rng(seed)
    out_cache: dict[int, list[int]] = {}
    in_cache: dict[int, list[int]] = {}
    for s in rng.integers(1, n + 1, size=samples).tolist():
        dist = {s: 0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if u not in out_cache:
                out_cache[u] = _neighbors(session, u, True)
                in_cache[u] = _neighbors(session, u, False)
            if dist[u] == radius:
                continue
            for w in (*out_cache[u], *in_cache[u]):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        ball = Host.from_edges(
            ((u, w) for u in dist for w in out_cache[u] if w in dist), dist.keys()
        )
        emb = find_embedding(h, ball)
        if emb is not None:
            return TesterVerdict("reject", session.query_count - start, emb)
    return TesterVerdict("accept", session.query_count - start)


def unidirectional_hfree_tester(
    session: OracleSession,
    dec: PatternDecomposition,
    eps,
    budget: int,
    seed: int,
    config: TesterConfig | None = None,
) -> TesterVerdict:
    """Spend ``budget`` out-queries on uniformly sampled vertices, then search H.

    Each sampled vertex is explored forward (out-edges only) to the
    configured depth; exploration stops mid-vertex when the budget runs out,
    keeping whatever edges were already learned. ``eps`` does not change the
    sampling: the budget alone controls the tester.
    """
    if session.model is not QueryModel.UNIDIRECTIONAL:
        raise ModelViolation("the unidirectional tester must run in the unidirectional model")
    cfg = config or load_config()
    h = dec.pattern
    depth_limit = cfg.forward_depth or h.n
    start = session.query_count
    n = session.num_vertices
    budget = int(budget)
    known: dict[int, list[int]] = {}
    edges: list[tuple[int, int]] = []

    def left() -> int:
        return budget - (session.query_count - start)

    if n and budget > 0:
        rng = np.random.default_rng(seed)
        for s in rng.integers(1, n + 1, size=budget).tolist():
            if left() <= 0:
                break
            frontier = [(s, 0)]
            while frontier and left() > 0:
                u, depth = frontier.pop()
                if u in known:
                    continue
                deg = session.out_degree(u)
                nbrs: list[int] = []
                known[u] = nbrs
                for i in range(1, deg + 1):
                    if left() <= 0:
                        break
                    w = session.out_neighbor(u, i)
                    nbrs.append(w)
                    edges.append((u, w))
                    if depth + 1 < depth_limit and w not in known:
                        frontier.append((w, depth + 1))
    used = session.query_count - start
    emb = find_embedding(h, Host.from_edges(edges)) if edges else None
    if emb is not None:
        return TesterVerdict("reject", used, emb)
    return TesterVerdict("accept", used)


# -- sequence testers -------------------------------------------------------------

def k_occurrence_tester(seq_access, k: int, eps, budget: int, seed: int) -> TesterVerdict:
    """Reject iff some value is seen at ``k`` distinct sampled positions.

    Positions are drawn uniformly with replacement; a budget of at least
    ``n`` reads every position once instead.
    """
    access = seq_access if isinstance(seq_access, SequenceAccess) else SequenceAccess(seq_access)
    n = access.n
    start = access.query_count
    if n == 0 or budget <= 0:
        return TesterVerdict("accept", 0)
    if budget >= n:
        positions = range(1, n + 1)
    else:
        positions = np.random.default_rng(seed).integers(1, n + 1, size=int(budget)).tolist()
    seen: dict[int, set[int]] = {}
    for a in positions:
        b = access.query(a)
        at = seen.setdefault(b, set())
        at.add(a)
        if len(at) >= k:
            return TesterVerdict("reject", access.query_count - start, (b, tuple(sorted(at))))
    return TesterVerdict("accept", access.query_count - start)


# -- Poissonized histogram distinguisher -----------------------------------------

def sample_fingerprint(values: np.ndarray, max_j: int) -> np.ndarray:
    """``F[j-1]`` = number of distinct values seen exactly ``j`` times (``j <= max_j``)."""
    if values.size == 0:
        return np.zeros(max_j, dtype=np.int64)
    _, counts = np.unique(values, return_counts=True)
    f = np.bincount(counts, minlength=max_j + 1)
    return f[1 : max_j + 1]


def expected_fingerprint_log(dist: FrequencyDistribution, n: int, s: float, max_j: int) -> np.ndarray:
    """Log of the expected Poissonized fingerprint for a length-``n`` realization of ``dist``.

    With Poisson(s) uniform samples, a value occurring ``i`` times is seen
    Poisson(s*i/n) times, independently across values.
    """
    distinct = float(n / dist.mean())
    freqs = np.array([i for i, p in enumerate(dist.probs, start=1) if p > 0], dtype=float)
    log_count = np.log([distinct * float(p) for p in dist.probs if p > 0])
    lam = s * freqs / n
    j = np.arange(1, max_j + 1, dtype=float)[:, None]
    terms = log_count[None, :] - lam[None, :] + j * np.log(lam)[None, :] - gammaln(j + 1)
    return logsumexp(terms, axis=1)


def llr_weights(p: FrequencyDistribution, q: FrequencyDistribution, n: int, s: float, max_j: int) -> np.ndarray:
    """Per-fingerprint-entry log-likelihood-ratio weights (far side over free side)."""
    if s <= 0:
        return np.zeros(max_j)
    return expected_fingerprint_log(q, n, s, max_j) - expected_fingerprint_log(p, n, s, max_j)


def _calibrate(stat_a: np.ndarray, stat_b: np.ndarray) -> tuple[float, bool]:
    """Threshold and orientation maximizing Pr[accept | A] - Pr[accept | B].

    ``accept iff stat <= tau`` when the flag is True, ``stat > tau`` otherwise.
    """
    cuts = np.unique(np.concatenate([stat_a, stat_b]))
    best = (-1.0, float(cuts[0]), True)
    for tau in cuts:
        gap = float(np.mean(stat_a <= tau) - np.mean(stat_b <= tau))
        for score, low in ((gap, True), (-gap, False)):
            if score > best[0]:
                best = (score, float(tau), low)
    return best[1], best[2]


def poisson_histogram_distinguisher(
    p: FrequencyDistribution,
    q: FrequencyDistribution,
    k: int,
    n: int,
    s: float,
    trials: int,
    seed: int,
    config: TesterConfig | None = None,
    statistic: str | None = None,
) -> ExperimentStats:
    """Empirical advantage of a fixed histogram statistic on Poisson(s) samples.

    Every trial draws a fresh yes-instance (realizing ``p``) and far instance
    (realizing ``q``), samples Poisson(s) uniform positions from each and
    keeps only the fingerprint of the sampled values. ``statistic`` is
    ``"llr"`` (fingerprint weighted by expected log-likelihood ratios) or
    ``"collision"`` (count of values seen at least ``ceil(k/2)`` times). The
    acceptance threshold is fitted on separate calibration trials.
    """
    if trials < 100:
        raise ValueError(f"at least 100 trials are required, got {trials}")
    cfg = config or load_config()
    statistic = statistic or cfg.poisson_statistic
    max_j = cfg.poisson_max_multiplicity or 3 * k
    if statistic == "llr":
        weights = llr_weights(p, q, n, s, max_j)
    elif statistic == "collision":
        weights = np.zeros(max_j)
        weights[math.ceil(k / 2) - 1 :] = 1.0
    else:
        raise ValueError(f"unknown statistic {statistic!r}")
    # validate realizability once before any sampling
    build_sequence_from_distribution(p, n, 0)
    build_sequence_from_distribution(q, n, 0)

    def run(phase: int, count: int) -> tuple[np.ndarray, np.ndarray, float]:
        stats = np.zeros((2, count))
        sizes = 0
        for t in range(count):
            for fam, dist in enumerate((p, q)):
                seq = build_sequence_from_distribution(dist, n, derive_seed(seed, phase, t, fam, 0))
                rng = np.random.default_rng(derive_seed(seed, phase, t, fam, 1))
                m = int(rng.poisson(s)) if s > 0 else 0
                sizes += m
                picked = seq.values[rng.integers(0, n, size=m)]
                stats[fam, t] = float(sample_fingerprint(picked, max_j) @ weights)
        return stats[0], stats[1], sizes / (2 * count)

    cal_a, cal_b, _ = run(0, cfg.calibration_trials or trials)
    tau, low = _calibrate(cal_a, cal_b)
    test_a, test_b, mean_samples = run(1, trials)
    accept_a = (test_a <= tau) if low else (test_a > tau)
    accept_b = (test_b <= tau) if low else (test_b > tau)
    return ExperimentStats(
        trials=trials,
        accept_rate_on_yes=float(accept_a.mean()),
        reject_rate_on_no=float(1.0 - accept_b.mean()),
        mean_queries=mean_samples,
        budget=int(math.ceil(s)),
    )
