"""Reproducible experiment drivers behind the command line.

Every result file gets a plain-text manifest next to it. CSV bodies depend
only on the manifest's inputs, so re-running a manifest reproduces them
byte for byte; only the manifest's timestamps change.
"""
from __future__ import annotations

import csv
import dataclasses
import datetime as _dt
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .digraph import BoundedDigraph, read_edge_list, write_edge_list
from .embed import count_subgraph_copies, disjoint_copy_lower_bound
from .occurrence import (
    FrequencyDistribution,
    IntSequence,
    alternating_binomial_identity_check,
    build_family,
    check_pq_linear_relation,
    histogram,
    make_p,
    make_q,
    occurrence_farness,
    proportionality_factor,
    read_sequence,
    verify_proportional_moments,
    write_sequence,
)
from .oracle import OracleSession, QueryModel
from .patterns import PatternDecomposition, k_star, prepare_pattern
from .reduction import (
    ReductionOracle,
    SequenceAccess,
    assign_types,
    build_offline,
    distance_transfer,
    format_types_sidecar,
)
from .testers import (
    TesterConfig,
    bidirectional_hfree_tester,
    derive_seed,
    load_config,
    poisson_histogram_distinguisher,
    unidirectional_hfree_tester,
)

log = logging.getLogger(__name__)

__all__ = [
    "RunManifest",
    "resolve_jobs",
    "cmd_verify",
    "cmd_gen",
    "cmd_reduce",
    "separation_budgets",
    "cmd_separation",
    "cmd_poisson",
    "write_csv",
    "replay_manifest",
]


# -- manifests and CSV -------------------------------------------------------------

@dataclass
class RunManifest:
    command: str
    seed: int
    config: dict
    version: str = __version__
    started: str = ""
    finished: str = ""
    outputs: list[str] = field(default_factory=list)
    seed_derivation: str = "SeedSequence([seed, n, trial, family, purpose])"

    def start(self) -> "RunManifest":
        self.started = _now()
        return self

    def render(self) -> str:
        lines = [
            f"command: {self.command}",
            f"seed: {self.seed}",
            f"version: {self.version}",
            f"seed_derivation: {self.seed_derivation}",
        ]
        lines += [f"config.{k}: {v}" for k, v in sorted(self.config.items())]
        lines += [f"output: {p}" for p in self.outputs]
        lines += [f"started: {self.started}", f"finished: {self.finished}"]
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        self.finished = _now()
        Path(path).write_text(self.render(), encoding="utf-8")


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _manifest_path(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest")


def write_csv(rows: list[dict], path: str | Path) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def resolve_jobs(jobs: int | None) -> int:
    env = os.environ.get("PROPTEST_JOBS")
    if env:
        return max(1, int(env))
    return max(1, jobs or 1)


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# -- verify ----------------------------------------------------------------------------

def cmd_verify(
    k_max: int,
    overrides: dict[int, tuple[FrequencyDistribution, FrequencyDistribution]] | None = None,
) -> tuple[bool, str]:
    """Exact identity checks for ``k = 2..k_max``; returns (all passed, table).

    ``overrides`` maps ``k`` to a replacement ``(p, q)`` pair (negative controls).
    """
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    overrides = overrides or {}
    header = ["k", "identity", "linear", "moments", "sums", "p_k=0", "q_k>=2^-k", "rho", "result"]
    rows = []
    all_ok = True
    for k in range(2, k_max + 1):
        p, q = overrides.get(k, (make_p(k), make_q(k)))
        rho = proportionality_factor(k)
        wit = verify_proportional_moments(p, q, k)
        checks = [
            alternating_binomial_identity_check(k),
            check_pq_linear_relation(k, p, q),
            wit.valid and wit.rho == rho,
            sum(p.probs) == 1 and sum(q.probs) == 1,
            p[k] == 0,
            q[k] >= Fraction(1, 2**k),
        ]
        ok = all(checks)
        all_ok &= ok
        rows.append([str(k), *("ok" if c else "FAIL" for c in checks), str(rho), "pass" if ok else "FAIL"])
    widths = [max(len(r[j]) for r in [header, *rows]) for j in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header, *rows]]
    return all_ok, "\n".join(lines) + "\n"


# -- gen / reduce -----------------------------------------------------------------------

def cmd_gen(cls: str, k: int, n: int, seed: int, out: str | Path | None = None) -> tuple[IntSequence, str]:
    """Generate a family member; raises :class:`Unrealizable` with nearby lengths."""
    seq = build_family(cls, k, n, seed)
    hist = histogram(seq)
    far = occurrence_farness(seq, k)
    summary = (
        f"class {cls.upper()} k={k} n={n} seed={seed}\n"
        f"histogram " + " ".join(f"{i}:{c}" for i, c in sorted(hist.counts.items())) + "\n"
        f"distinct {hist.distinct}\n"
        f"farness {far.numerator}/{far.denominator}\n"
    )
    if out is not None:
        write_sequence(seq, out)
        m = RunManifest(f"gen --class {cls} --k {k} --n {n} --seed {seed} --out {out}", seed, {}).start()
        m.outputs.append(str(out))
        m.write(_manifest_path(out))
    return seq, summary


def cmd_reduce(pattern_path, sequence_path, seed: int, out: str | Path) -> str:
    """Materialize the reduced graph, its type sidecar and a short report."""
    h = read_edge_list(pattern_path)
    seq = read_sequence(sequence_path)
    dec = prepare_pattern(h)
    g = build_offline(seq, dec, seed)
    types = assign_types(seq, dec, seed)
    out = Path(out)
    write_edge_list(g, out)
    sidecar = out.with_name(out.name + ".types")
    sidecar.write_text(format_types_sidecar(seed, types), encoding="utf-8")
    eps = occurrence_farness(seq, dec.k)
    eps_g = distance_transfer(eps, h.d, dec)
    report = (
        f"vertices {g.n}\nedges {g.num_edges}\nd {g.d}\n"
        f"k {dec.k}\nN_comp {dec.n_comp}\nN_center {dec.n_center}\n"
        f"copies {count_subgraph_copies(g, h)}\n"
        f"disjoint_copies {disjoint_copy_lower_bound(g, h)}\n"
        f"sequence_farness {eps.numerator}/{eps.denominator}\n"
        f"graph_farness_bound {eps_g.numerator}/{eps_g.denominator}\n"
    )
    report_path = out.with_name(out.name + ".report")
    report_path.write_text(report, encoding="utf-8")
    m = RunManifest(
        f"reduce --pattern {pattern_path} --sequence {sequence_path} --seed {seed} --out {out}",
        seed,
        {},
    ).start()
    m.outputs += [str(out), str(sidecar), str(report_path)]
    m.write(_manifest_path(out))
    return report


# -- separation -------------------------------------------------------------------------

def separation_budgets(k: int, n: int, cfg: TesterConfig) -> tuple[int, int]:
    """(small, large) unidirectional query budgets for sequence length ``n``."""
    small = math.ceil(n ** (1 / k))
    large = math.ceil(cfg.unidir_budget_constant * n ** (1 - 1 / k))
    return small, large


def separation_eps(k: int, dec: PatternDecomposition) -> Fraction:
    """Graph farness guaranteed for far-family instances."""
    return distance_transfer(make_q(k)[k] / k, dec.pattern.d, dec)


@dataclass(frozen=True)
class _TrialSpec:
    k: int
    n: int
    trial: int
    seed: int
    pattern_edges: tuple[tuple[int, int], ...]
    pattern_n: int
    pattern_d: int
    budgets: tuple[int, ...]
    config: TesterConfig
    families: tuple[str, ...]


def _separation_trial(spec: _TrialSpec) -> dict:
    from .digraph import build_digraph

    dec = prepare_pattern(build_digraph(spec.pattern_n, spec.pattern_d, spec.pattern_edges))
    eps = separation_eps(spec.k, dec)
    out = {}
    for f_idx, fam in enumerate(("A", "B")):
        if fam not in spec.families:
            continue
        key = (spec.seed, spec.n, spec.trial, f_idx)
        seq = build_family(fam, spec.k, spec.n, derive_seed(*key, 0))
        type_seed = derive_seed(*key, 1)
        g = build_offline(seq, dec, type_seed)
        sess = OracleSession(g, QueryModel.BIDIRECTIONAL)
        v = bidirectional_hfree_tester(sess, dec, eps, derive_seed(*key, 2), spec.config)
        out[(fam, "bidirectional", 0)] = (v.rejected, v.queries_used, 0)
        for b_idx, budget in enumerate(spec.budgets):
            oracle = ReductionOracle(SequenceAccess(seq), dec, spec.n, type_seed)
            sess = OracleSession(oracle, QueryModel.UNIDIRECTIONAL)
            v = unidirectional_hfree_tester(sess, dec, eps, budget, derive_seed(*key, 3 + b_idx), spec.config)
            out[(fam, "unidirectional", budget)] = (v.rejected, v.queries_used, oracle.s_query_count)
    return out


def cmd_separation(
    k: int,
    n_list: Sequence[int],
    trials: int,
    seed: int,
    out: str | Path | None = None,
    pattern: BoundedDigraph | None = None,
    config: TesterConfig | None = None,
    jobs: int | None = 1,
    families: Sequence[str] = ("A", "B"),
    pattern_path: str | Path | None = None,
) -> list[dict]:
    """Reject rates and mean query counts of both graph testers on reduced instances.

    For each ``n`` and trial a fresh yes-instance and far instance are
    generated and reduced. The bidirectional tester runs on the materialized
    graph. The unidirectional tester runs through the lazy reduction oracle
    at the two budgets of :func:`separation_budgets`; its ``budget`` column
    is the query budget, while the bidirectional row reports its number of
    sampled vertices there.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    cfg = config or load_config()
    h = pattern if pattern is not None else k_star(k)
    dec = prepare_pattern(h)
    if dec.k != k:
        raise ValueError(f"pattern has {dec.k} source components, expected {k}")
    jobs = resolve_jobs(jobs)
    manifest_name = _manifest_path(out).name if out is not None else ""
    rows = []
    eps = separation_eps(k, dec)
    samples = math.ceil(cfg.bidir_sample_constant / float(eps))
    for n in n_list:
        budgets = separation_budgets(k, n, cfg)
        limit = n * (dec.n_comp + dec.n_center) * (h.d + 1)
        clamped = []
        for b in budgets:
            if b > limit:
                log.warning("budget %d exceeds oracle size %d at n=%d; clamped", b, limit, n)
                b = limit
            clamped.append(b)
        specs = [
            _TrialSpec(k, n, t, seed, tuple(h.edges()), h.n, h.d, tuple(clamped), cfg, tuple(families))
            for t in range(trials)
        ]
        results = _pmap(_separation_trial, specs, jobs)
        for fam in ("A", "B"):
            if fam not in families:
                continue
            cells = [("bidirectional", 0, samples)] + [("unidirectional", b, b) for b in clamped]
            for tester, key_budget, shown in cells:
                vals = np.array([r[(fam, tester, key_budget)] for r in results], dtype=float)
                rows.append(
                    {
                        "k": k,
                        "n": n,
                        "family": fam,
                        "tester": tester,
                        "budget": shown,
                        "trials": trials,
                        "seed": seed,
                        "eps": f"{eps.numerator}/{eps.denominator}",
                        "reject_rate": _fmt(vals[:, 0].mean()),
                        "accept_rate": _fmt(1 - vals[:, 0].mean()),
                        "mean_queries": _fmt(vals[:, 1].mean()),
                        "mean_sequence_queries": _fmt(vals[:, 2].mean()),
                        "manifest": manifest_name,
                    }
                )
    if out is not None:
        write_csv(rows, out)
        m = RunManifest(
            f"separation --k {k} " + " ".join(f"--n {n}" for n in n_list)
            + (f" --pattern {pattern_path}" if pattern_path else "")
            + f" --trials {trials} --seed {seed} --out {out}",
            seed,
            dataclasses.asdict(cfg),
        ).start()
        m.outputs.append(str(out))
        m.write(_manifest_path(out))
    return rows


# -- poisson ----------------------------------------------------------------------------

def _poisson_cell(args) -> dict:
    k, n, s, trials, seed, cfg = args
    stats = poisson_histogram_distinguisher(make_p(k), make_q(k), k, n, s, trials, seed, cfg)
    return {
        "accept_rate_on_yes": _fmt(stats.accept_rate_on_yes),
        "reject_rate_on_no": _fmt(stats.reject_rate_on_no),
        "advantage": _fmt(stats.advantage),
        "mean_samples": _fmt(stats.mean_queries),
    }


def cmd_poisson(
    k: int,
    n: int,
    s_list: Sequence[float],
    trials: int,
    seed: int,
    out: str | Path | None = None,
    config: TesterConfig | None = None,
    jobs: int | None = 1,
) -> list[dict]:
    """One row per expected sample count ``s`` with the empirical advantage."""
    if trials < 100:
        raise ValueError(f"at least 100 trials are required, got {trials}")
    cfg = config or load_config()
    jobs = resolve_jobs(jobs)
    manifest_name = _manifest_path(out).name if out is not None else ""
    cells = _pmap(_poisson_cell, [(k, n, s, trials, derive_seed(seed, j), cfg) for j, s in enumerate(s_list)], jobs)
    rows = []
    for s, cell in zip(s_list, cells):
        rows.append(
            {
                "k": k,
                "n": n,
                "s": f"{s:g}",
                "budget": math.ceil(s),
                "trials": trials,
                "seed": seed,
                "statistic": cfg.poisson_statistic,
                **cell,
                "manifest": manifest_name,
            }
        )
    if out is not None:
        write_csv(rows, out)
        m = RunManifest(
            f"poisson --k {k} --n {n} " + " ".join(f"--s {s:g}" for s in s_list)
            + f" --trials {trials} --seed {seed} --out {out}",
            seed,
            dataclasses.asdict(cfg),
            seed_derivation="SeedSequence([SeedSequence([seed, row]), phase, trial, family, purpose])",
        ).start()
        m.outputs.append(str(out))
        m.write(_manifest_path(out))
    return rows


# -- replay -----------------------------------------------------------------------------

def replay_manifest(manifest: str | Path, out: str | Path) -> Path:
    """Re-run the command recorded in ``manifest``, writing to ``out`` instead.

    The config snapshot is written next to ``out`` and passed back in, so
    the replay does not depend on the currently shipped constants.
    """
    import shlex

    from .cli import main

    fields_: dict[str, str] = {}
    config: list[str] = []
    for line in Path(manifest).read_text(encoding="utf-8").splitlines():
        key, _, value = line.partition(": ")
        if key.startswith("config."):
            config.append(f"{key[len('config.'):]} = {value}")
        else:
            fields_.setdefault(key, value)
    argv = shlex.split(fields_["command"])
    argv[argv.index("--out") + 1] = str(out)
    out = Path(out)
    if config:
        cfg_path = out.with_name(out.name + ".cfg")
        cfg_path.write_text("\n".join(config) + "\n", encoding="utf-8")
        argv = ["--config", str(cfg_path), *argv]
    status = main(argv)
    if status != 0:
        raise RuntimeError(f"replay of {manifest} exited with status {status}")
    return out
