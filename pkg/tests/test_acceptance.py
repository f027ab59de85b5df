"""Acceptance checks; each test records one PASS/FAIL line in the session summary.

Run ``python tests/test_acceptance.py`` to print the lines directly.
"""
from __future__ import annotations

import itertools
import math
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from conftest import record_criterion
from digraph_lab.embed import count_subgraph_copies
from digraph_lab.experiments import cmd_poisson, cmd_separation, replay_manifest
from digraph_lab.occurrence import (
    IntSequence,
    alternating_binomial_identity_check,
    build_family,
    check_pq_linear_relation,
    make_p,
    make_q,
    occurrence_farness,
    proportionality_factor,
    realizable_step,
    verify_proportional_moments,
)
from digraph_lab.patterns import three_source_pattern, k_star, prepare_pattern
from digraph_lab.reduction import ReductionOracle, SequenceAccess, build_offline, probe_sweep
from digraph_lab.testers import load_config

SEPARATION_N = (6000, 60000)
SEPARATION_TRIALS = 200
POISSON_N = 60000
POISSON_TRIALS = 500


def _check(number: int, ok: bool, detail: str) -> None:
    print(record_criterion(number, ok, detail))
    assert ok, detail


def test_criterion_1_exact_identities():
    t0 = time.perf_counter()
    failures = []
    for k in range(2, 13):
        p, q = make_p(k), make_q(k)
        wit = verify_proportional_moments(p, q, k)
        checks = {
            "identity": alternating_binomial_identity_check(k),
            "linear": check_pq_linear_relation(k, p, q),
            "sums": sum(p.probs) == 1 and sum(q.probs) == 1,
            "p_k": p[k] == 0,
            "q_k": q[k] >= Fraction(1, 2**k),
            "ratios": len(wit.moment_ratios) == k - 1
            and all(r == proportionality_factor(k) for r in wit.moment_ratios),
        }
        failures += [f"k={k}:{name}" for name, ok in checks.items() if not ok]
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 1.0
    _check(1, ok, f"k=2..12 exact identities, {len(failures)} failures, {elapsed:.3f}s (limit 1s)")


def _lengths(step: int, limit: int = 100_000) -> list[int]:
    """Every realizable length up to 50 steps, then a geometric spread up to ``limit``."""
    small = set(range(step, 50 * step + 1, step))
    spread = {int(x) // step * step for x in np.geomspace(50 * step, limit, 12)}
    return sorted(small | spread)


def test_criterion_2_family_correctness():
    t0 = time.perf_counter()
    bad = []
    count = 0
    for k in (2, 3, 4, 5):
        bound = make_q(k)[k] / k
        for fam, dist in (("A", make_p(k)), ("B", make_q(k))):
            for n in _lengths(realizable_step(dist)):
                seq = build_family(fam, k, n, seed=n + k)
                far = occurrence_farness(seq, k)
                ok = far == 0 if fam == "A" else far >= bound
                count += 1
                if not ok:
                    bad.append((fam, k, n, far))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 5.0
    _check(2, ok, f"{count} instances, k in 2..5, n up to 1e5, {len(bad)} violations, {elapsed:.2f}s (limit 5s)")


def _capped_sequences(max_n: int, max_value: int, cap: int):
    for n in range(max_n + 1):
        for s in itertools.product(range(1, min(max_value, n) + 1), repeat=n):
            counts = Counter(s)
            if not counts or max(counts.values()) <= cap:
                yield s, counts


def test_criterion_3_reduction_oracle_sweep():
    t0 = time.perf_counter()
    cases = [("2-star", k_star(2)), ("3-star", k_star(3)), ("three-source pattern", three_source_pattern())]
    checked = 0
    mismatches = []
    for name, h in cases:
        dec = prepare_pattern(h)
        for i, (s, counts) in enumerate(_capped_sequences(8, 4, dec.k)):
            g = build_offline(np.array(s, dtype=np.int64), dec, seed=i)
            want = sum(1 for c in counts.values() if c == dec.k)
            got = count_subgraph_copies(g, h)
            checked += 1
            if got != want:
                mismatches.append((name, s, got, want))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 60.0
    _check(
        3,
        ok,
        f"{checked} (sequence, pattern) pairs, n<=8, values<=min(4,n), "
        f"{len(mismatches)} mismatches, {elapsed:.1f}s (limit 60s)",
    )


def _random_instances(count: int, seed: int):
    rng = np.random.default_rng(seed)
    decs = [prepare_pattern(k_star(2)), prepare_pattern(k_star(3)), prepare_pattern(three_source_pattern())]
    for j in range(count):
        dec = decs[j % len(decs)]
        n = int(rng.integers(1, 51))
        values: list[int] = []
        counts: Counter = Counter()
        while len(values) < n:
            x = int(rng.integers(1, n + 1))
            if counts[x] < dec.k:
                counts[x] += 1
                values.append(x)
        yield dec, IntSequence(values, dec.k), int(rng.integers(0, 2**32))


@pytest.fixture(scope="module")
def sweep_reports():
    t0 = time.perf_counter()
    reports = []
    rng = np.random.default_rng(4)
    for dec, seq, seed in _random_instances(100, 2026):
        offline = build_offline(seq, dec, seed)
        probes = [(v, i) for v in range(1, offline.n + 1) for i in range(1, dec.pattern.d + 2)]
        rng.shuffle(probes)
        reports.append(probe_sweep(ReductionOracle(SequenceAccess(seq), dec, seq.n, seed), offline, probes))
    return reports, time.perf_counter() - t0


def test_criterion_4_lazy_offline_consistency(sweep_reports):
    reports, elapsed = sweep_reports
    bad = sum(not r.consistent for r in reports)
    probes = sum(r.probes for r in reports)
    ok = bad == 0 and elapsed < 10.0
    _check(4, ok, f"100 (S, seed) pairs, {probes} shuffled probes, {bad} inconsistent, {elapsed:.2f}s (limit 10s)")


def test_criterion_5_query_thrift(sweep_reports):
    reports, _ = sweep_reports
    over = sum(r.s_queries > r.source_positions_probed for r in reports)
    center = sum(r.center_probe_s_queries for r in reports)
    ok = over == 0 and center == 0
    _check(5, ok, f"sequence queries exceed probed positions in {over} sweeps; center probes read S {center} times")


def _cell(rows, n, fam, tester, budget=None):
    for r in rows:
        if r["n"] == n and r["family"] == fam and r["tester"] == tester and (budget is None or r["budget"] == budget):
            return r
    raise KeyError((n, fam, tester, budget))


def test_criterion_6_empirical_separation(tmp_path):
    cfg = load_config()
    t0 = time.perf_counter()
    rows = cmd_separation(3, SEPARATION_N, SEPARATION_TRIALS, 2026, out=tmp_path / "separation.csv", config=cfg)
    elapsed = time.perf_counter() - t0
    failures = []
    bi_queries = []
    for n in SEPARATION_N:
        small = math.ceil(n ** (1 / 3))
        large = math.ceil(cfg.unidir_budget_constant * n ** (2 / 3))
        bi = _cell(rows, n, "B", "bidirectional")
        bi_queries.append(float(bi["mean_queries"]))
        if float(bi["reject_rate"]) < 2 / 3:
            failures.append(f"bidirectional n={n} reject {bi['reject_rate']}")
        r = _cell(rows, n, "B", "unidirectional", large)
        if float(r["reject_rate"]) < 2 / 3:
            failures.append(f"unidirectional n={n} budget {large} reject {r['reject_rate']}")
        r = _cell(rows, n, "B", "unidirectional", small)
        if float(r["reject_rate"]) > 0.1:
            failures.append(f"unidirectional n={n} budget {small} reject {r['reject_rate']}")
        for r in rows:
            if r["n"] == n and r["family"] == "A" and float(r["accept_rate"]) != 1.0:
                failures.append(f"{r['tester']} n={n} accepts C_A at {r['accept_rate']}")
    ratio = max(bi_queries) / min(bi_queries)
    if ratio >= 2:
        failures.append(f"bidirectional query ratio {ratio:.2f}")
    if elapsed > 600:
        failures.append(f"runtime {elapsed:.0f}s")
    ok = not failures
    detail = (
        f"k=3, 3-star, {SEPARATION_TRIALS} trials at n={SEPARATION_N}; bidirectional query ratio {ratio:.2f}; "
        f"{elapsed:.0f}s (limit 600s)"
    )
    _check(6, ok, detail + ("" if ok else "; " + "; ".join(failures)))


def test_criterion_7_poisson_indistinguishability(tmp_path):
    n = POISSON_N
    low, high = math.ceil(n**0.5), 5 * math.ceil(n ** (2 / 3))
    t0 = time.perf_counter()
    rows = cmd_poisson(3, n, [low, high], POISSON_TRIALS, 2026, out=tmp_path / "poisson.csv")
    elapsed = time.perf_counter() - t0
    adv_low, adv_high = float(rows[0]["advantage"]), float(rows[1]["advantage"])
    ok = adv_low <= 0.1 and adv_high >= 0.5 and elapsed <= 300
    _check(
        7,
        ok,
        f"k=3, n={n}, {POISSON_TRIALS} trials: advantage {adv_low:.3f} at s={low} (<=0.1), "
        f"{adv_high:.3f} at s={high} (>=0.5), {elapsed:.0f}s (limit 300s)",
    )


def test_criterion_8_reproducibility(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    first.mkdir()
    second.mkdir()
    cmd_separation(3, [600, 1200], 200, 11, out=first / "separation.csv", jobs=2)
    cmd_poisson(3, 600, [0, 25, 150], 100, 11, out=first / "poisson.csv")
    same = []
    for name in ("separation.csv", "poisson.csv"):
        replay_manifest(first / f"{name}.manifest", second / name)
        same.append((first / name).read_bytes() == (second / name).read_bytes())
    _check(8, all(same), f"replayed 2 manifests, {sum(same)}/2 byte-identical CSV bodies")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
