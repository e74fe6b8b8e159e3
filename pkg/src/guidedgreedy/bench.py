"""Brute-force optimum, experiment configuration, runner, and CSV reports.

Config files are flat TOML (or the same keys as JSON). A config plus its
seeds fully determines every CSV byte except the wall_ms column.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional, Tuple

import numpy as np

from . import oracles
from .constraints import ExtendedMatroid, SizeConstraint, read_partition_file
from .errors import InputError, ResourceError
from .greedy import random_greedy_matroid, random_greedy_size, standard_greedy
from .localsearch import fast_local_search, fastls_quarter
from .oracles import CountedOracle, ElementSet, member_set
from .pipelines import run_determ, run_nearly_linear, run_randomized
from .records import CSV_HEADER, TrialRecord

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "brute_force_opt",
    "load_config",
    "run_experiment",
    "summarize",
    "derive_seed",
    "ALGORITHMS",
]

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def derive_seed(master: int, index: int) -> int:
    """index-th output of the splitmix64 stream seeded at `master`.

    Documented splitting rule so trial seeds are reproducible from the
    master seed in any language: advance the state by the 64-bit golden
    gamma (index + 1) times, then apply the splitmix64 finalizer.
    """
    x = (int(master) + (index + 1) * _GAMMA) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def brute_force_opt(oracle: CountedOracle, constraint, limit: int = 2_000_000
                    ) -> Tuple[ElementSet, float]:
    """Exact maximizer over all feasible sets, ties to lexicographic members.

    Enforces `limit` on the number of feasible sets before enumerating
    (size constraint) or while enumerating (matroid).
    """
    n = oracle.n
    best_val = -math.inf
    best: Optional[tuple] = None

    def consider(members: tuple):
        nonlocal best_val, best
        v = oracle.eval(members)
        if v > best_val or (v == best_val and (best is None or members < best)):
            best_val, best = v, members

    if isinstance(constraint, SizeConstraint):
        k = min(constraint.k, n)
        total = sum(math.comb(n, i) for i in range(k + 1))
        if total > limit:
            raise ResourceError(f"{total} feasible sets exceed the limit {limit}")
        for size in range(k + 1):
            for combo in combinations(range(n), size):
                consider(combo)
    else:
        M: ExtendedMatroid = constraint
        count = 0

        def rec(prefix: list, start: int):
            nonlocal count
            count += 1
            if count > limit:
                raise ResourceError(f"feasible-set enumeration exceeded the limit {limit}")
            consider(tuple(prefix))
            if len(prefix) >= M.k:
                return
            for i in range(start, n):
                if M.base._indep(frozenset(prefix + [i])):
                    rec(prefix + [i], i + 1)

        rec([], 0)
    return ElementSet(frozenset(best), cached_value=best_val), best_val


@dataclass
class ExperimentConfig:
    """Flat description of one experiment grid; see README for the schema."""

    instance: str
    n: int = 0
    p: float = 0.0
    m: int = 1
    degree: int = 2
    instance_seed: int = 0
    path: str = ""
    weights: List[float] = field(default_factory=list)
    gram_p: int = 64
    constraint: str = "size"
    partition_path: str = ""
    k_values: List[int] = field(default_factory=list)
    algorithms: List[str] = field(default_factory=list)
    eps: float = 0.1
    t: Optional[float] = None
    pool_cap: Optional[int] = None
    seeds: List[int] = field(default_factory=list)
    master_seed: Optional[int] = None
    n_seeds: int = 0
    output: str = "results.csv"
    workers: int = 1

    def trial_seeds(self) -> List[int]:
        if self.seeds:
            return [int(s) for s in self.seeds]
        if self.master_seed is None:
            raise InputError("config needs either `seeds` or `master_seed` with `n_seeds`")
        return [derive_seed(self.master_seed, i) for i in range(self.n_seeds)]


def load_config(path) -> ExperimentConfig:
    """Parse a TOML (flat keys) or JSON config file."""
    text = open(path, "rb").read()
    if str(path).endswith(".json"):
        data = json.loads(text.decode())
    else:
        try:
            import tomllib  # Python 3.11+
        except ImportError:
            import tomli as tomllib
        try:
            data = tomllib.loads(text.decode())
        except Exception as exc:
            raise InputError(f"{path}: cannot parse config ({exc})") from exc
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise InputError(f"{path}: unknown config keys {sorted(unknown)}")
    if "instance" not in data:
        raise InputError(f"{path}: config needs an `instance` key")
    return ExperimentConfig(**data)


def build_instance(cfg: ExperimentConfig):
    kind = cfg.instance.lower()
    if kind in ("er", "ba", "ws"):
        params = {"n": cfg.n, "p": cfg.p, "m": cfg.m, "degree": cfg.degree}
        needed = {"er": ("n", "p"), "ba": ("n", "m"), "ws": ("n", "degree", "p")}[kind]
        return oracles.gen_graph(kind, cfg.instance_seed, **{q: params[q] for q in needed})
    if kind == "edgelist":
        return oracles.read_edge_list(cfg.path)
    if kind == "gram":
        return oracles.read_gram_csv(cfg.path)
    if kind == "features":
        return oracles.read_features_csv(cfg.path)
    if kind == "gram_wishart":
        return oracles.gen_gram_wishart(cfg.n, cfg.gram_p, cfg.instance_seed)
    if kind == "gram_video":
        return oracles.gen_gram_video(cfg.n, cfg.gram_p, cfg.instance_seed)
    if kind == "modular":
        return oracles.ModularInstance(cfg.weights)
    raise InputError(f"unknown instance kind {cfg.instance!r}")


def _make_constraint(cfg: ExperimentConfig, instance, k: int):
    if cfg.constraint == "size":
        return SizeConstraint(k)
    if cfg.constraint == "partition":
        base = read_partition_file(cfg.partition_path, instance.n)
        return ExtendedMatroid(base, k=min(k, base.rank))
    raise InputError(f"unknown constraint kind {cfg.constraint!r}")


def _view_of(constraint, oracle):
    return constraint.as_extended(oracle.n) if isinstance(constraint, SizeConstraint) else constraint


def _alg_standard_greedy(oracle, constraint, eps, t, rng, seed):
    view = _view_of(constraint, oracle)
    is_matroid = not isinstance(constraint, SizeConstraint)
    out = standard_greedy(oracle, view.k, matroid=view if is_matroid else None)
    return out, None, None


def _alg_random_greedy(oracle, constraint, eps, t, rng, seed):
    if isinstance(constraint, SizeConstraint):
        return random_greedy_size(oracle, constraint.k, rng), None, None
    return random_greedy_matroid(oracle, constraint, rng), None, None


def _alg_fastls(oracle, constraint, eps, t, rng, seed):
    view = _view_of(constraint, oracle)
    is_matroid = not isinstance(constraint, SizeConstraint)
    warm = standard_greedy(oracle, view.k, matroid=view if is_matroid else None)
    out, _ = fast_local_search(oracle, view, None, warm, eps)
    return out, eps, None


def _alg_fastls_quarter(oracle, constraint, eps, t, rng, seed):
    view = _view_of(constraint, oracle)
    is_matroid = not isinstance(constraint, SizeConstraint)
    warm = standard_greedy(oracle, view.k, matroid=view if is_matroid else None)
    return fastls_quarter(oracle, view, warm, eps), eps, None


def _alg_fastls_guided_rg(oracle, constraint, eps, t, rng, seed):
    out, rec = run_randomized(oracle, constraint, eps, t=t, rng=rng, seed=seed)
    return out, eps, rec.t


def _alg_determ(oracle, constraint, eps, t, rng, seed, pool_cap=None):
    out = run_determ(oracle, constraint, eps, t=t, pool_cap=pool_cap)
    return out, eps, t


def _alg_nearly_linear(oracle, constraint, eps, t, rng, seed):
    if not isinstance(constraint, SizeConstraint):
        raise InputError("nearly_linear supports the size constraint only")
    out = run_nearly_linear(oracle, constraint.k, eps)
    return out, eps, None


ALGORITHMS = {
    "standard_greedy": _alg_standard_greedy,
    "random_greedy": _alg_random_greedy,
    "fastls": _alg_fastls,
    "fastls_quarter": _alg_fastls_quarter,
    "fastls_guided_rg": _alg_fastls_guided_rg,
    "determ": _alg_determ,
    "nearly_linear": _alg_nearly_linear,
}


def _run_trial(args):
    cfg, instance, alg, k, seed = args
    if alg not in ALGORITHMS:
        raise InputError(f"unknown algorithm {alg!r}")
    oracle = CountedOracle(instance, n_dummies=k)
    constraint = _make_constraint(cfg, instance, k)
    view = _view_of(constraint, oracle)
    rng = np.random.Generator(np.random.PCG64(seed))
    t0 = time.perf_counter()
    if alg == "determ":
        out, used_eps, used_t = _alg_determ(oracle, constraint, cfg.eps, cfg.t, rng, seed,
                                            pool_cap=cfg.pool_cap)
        if cfg.pool_cap is not None:
            alg = "determ+poolcap"  # heuristic mode is not certified
    else:
        out, used_eps, used_t = ALGORITHMS[alg](oracle, constraint, cfg.eps, cfg.t, rng, seed)
    wall_ms = (time.perf_counter() - t0) * 1e3
    return TrialRecord(
        algorithm=alg, n=instance.n, k=view.k, eps=used_eps, t=used_t, seed=seed,
        value=float(out.cached_value), value_queries=oracle.value_queries,
        independence_calls=view.independence_calls, wall_ms=wall_ms,
        members=tuple(sorted(out.members)),
    )


def run_experiment(cfg: ExperimentConfig):
    """Execute the (algorithm x k x seed) grid; write the raw and summary CSVs.

    Returns (records, main_csv_path, summary_csv_path).
    """
    if not cfg.algorithms:
        raise InputError("config lists no algorithms")
    if not cfg.k_values:
        raise InputError("config lists no k_values")
    instance = build_instance(cfg)
    seeds = cfg.trial_seeds()
    specs = [(cfg, instance, alg, int(k), int(seed))
             for alg in cfg.algorithms for k in cfg.k_values for seed in seeds]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_run_trial, specs))
    else:
        records = [_run_trial(s) for s in specs]
    records.sort(key=lambda r: (r.algorithm, r.k, r.seed))
    main_path = cfg.output
    summary_path = _summary_path(main_path)
    write_records_csv(records, main_path)
    write_summary_csv(summarize(records), summary_path)
    return records, main_path, summary_path


def _summary_path(main_path: str) -> str:
    return (main_path[:-4] if main_path.endswith(".csv") else main_path) + "_summary.csv"


def write_records_csv(records: List[TrialRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER.split(","))
        for rec in records:
            writer.writerow(rec.csv_row())


def summarize(records: List[TrialRecord]) -> List[dict]:
    """Per-(algorithm, k) mean/std of value and queries, and the per-k value
    and query ratios against standard_greedy when it is present."""
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.algorithm, rec.k), []).append(rec)
    sg_value = {}
    sg_queries = {}
    for (alg, k), recs in groups.items():
        if alg == "standard_greedy":
            sg_value[k] = sum(r.value for r in recs) / len(recs)
            sg_queries[k] = sum(r.value_queries for r in recs) / len(recs)
    rows = []
    for (alg, k) in sorted(groups):
        recs = groups[(alg, k)]
        vals = [r.value for r in recs]
        qrys = [float(r.value_queries) for r in recs]
        row = {
            "algorithm": alg,
            "k": k,
            "trials": len(recs),
            "value_mean": _mean(vals),
            "value_std": _std(vals),
            "queries_mean": _mean(qrys),
            "queries_std": _std(qrys),
            "value_norm_vs_standard_greedy": None,
            "queries_norm_vs_standard_greedy": None,
        }
        if k in sg_value and sg_value[k] not in (0.0,):
            row["value_norm_vs_standard_greedy"] = row["value_mean"] / sg_value[k]
        if k in sg_queries and sg_queries[k] not in (0.0,):
            row["queries_norm_vs_standard_greedy"] = row["queries_mean"] / sg_queries[k]
        rows.append(row)
    return rows


def _mean(xs):
    return sum(xs) / len(xs)


def _std(xs):
    if len(xs) < 2:
        return 0.0
    mu = _mean(xs)
    return math.sqrt(sum((x - mu) ** 2 for x in xs) / (len(xs) - 1))


def write_summary_csv(rows: List[dict], path) -> None:
    header = ["algorithm", "k", "trials", "value_mean", "value_std",
              "queries_mean", "queries_std",
              "value_norm_vs_standard_greedy", "queries_norm_vs_standard_greedy"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if row[h] is None else
                             (repr(row[h]) if isinstance(row[h], float) else str(row[h]))
                             for h in header])
