"""Greedy baselines and the guided random greedy with switch time t.

Random selections draw from numpy's PCG64 generator; candidate sets are
materialized in a deterministic order (descending gain, ties to the
smallest id) before the uniform pick, so a fixed seed reproduces the trace
exactly. The guided variants exclude the guidance set from the candidate
pool during the first floor(t * k) iterations and run unguided afterward;
t = 0 reproduces the unguided algorithm trace-for-trace.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from .constraints import ExtendedMatroid, SizeConstraint, exchange_bijection, max_gain_basis
from .errors import InputError
from .oracles import CountedOracle, ElementSet, cached_value_of, member_set

__all__ = [
    "SwitchSchedule",
    "RunTrace",
    "standard_greedy",
    "random_greedy_size",
    "random_greedy_matroid",
    "guided_rg",
    "replay_trace",
    "trace_to_csv",
    "trace_from_csv",
]

Constraint = Union[SizeConstraint, ExtendedMatroid]


@dataclass(frozen=True)
class SwitchSchedule:
    """Guided iterations are 1..boundary, with boundary = floor(t * k)."""

    t: float
    k: int

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise InputError("switch time t must lie in [0, 1]")

    @property
    def boundary(self) -> int:
        return int(np.floor(self.t * self.k + 1e-12))


@dataclass
class RunTrace:
    """Replayable record of one randomized greedy run."""

    steps: List[Tuple[int, int, int]] = field(default_factory=list)  # (iteration, picked, displaced; -1 if none)
    rng_seed: Optional[int] = None


def standard_greedy(oracle: CountedOracle, k: int, ground=None,
                    matroid: Optional[ExtendedMatroid] = None) -> ElementSet:
    """Classical greedy: k rounds of argmax gain, stopping once the best gain
    is nonpositive. Ties go to the smallest id. At most k * n value queries."""
    if k < 1:
        raise InputError("k must be at least 1")
    n = oracle.n
    pool = sorted(member_set(ground)) if ground is not None else list(range(n))
    S: set = set()
    val = oracle.eval(S)  # f(empty) is 0 for modular and max-cut but not in general
    for _ in range(k):
        cand = [x for x in pool if x not in S]
        if matroid is not None:
            cand = [x for x in cand if matroid.independent(S | {x})]
        if not cand:
            break
        gains = oracle.gains(S, cand, base=val)
        best = int(np.argmax(gains))
        if gains[best] <= 0:
            break
        S.add(cand[best])
        val += float(gains[best])
    return ElementSet(frozenset(S), cached_value=val)


def _rg_size(oracle: CountedOracle, k: int, Z: frozenset, boundary: int,
             rng: np.random.Generator, trace: Optional[RunTrace], ground=None) -> ElementSet:
    """Shared core of RandomGreedy / GuidedRG under a size constraint.

    Iteration i draws uniformly from M_i, the k candidates of largest gain
    among real elements outside A (and outside Z while i <= boundary) plus
    the unused dummies (exact zero gain, no query). Dummy picks leave the
    real part unchanged; dummies are stripped at return.
    """
    n = oracle.n
    reals = sorted(member_set(ground)) if ground is not None else list(range(n))
    A: set = set()
    picked_dummies: set = set()
    val = oracle.eval(A)
    for i in range(1, k + 1):
        excluded = Z if i <= boundary else frozenset()
        cand = [x for x in reals if x not in A and x not in excluded]
        dummies = [d for d in range(n, n + k) if d not in picked_dummies]
        pool = np.asarray(cand + dummies, dtype=np.int64)
        gains = oracle.gains(A, pool, base=val)
        order = np.lexsort((pool, -gains))
        top = order[: min(k, len(pool))]
        pick = int(rng.integers(len(top)))
        x = int(pool[top[pick]])
        g = float(gains[top[pick]])
        if x >= n:
            picked_dummies.add(x)
        else:
            A.add(x)
            val += g
        if trace is not None:
            trace.steps.append((i, x, -1))
    return ElementSet(frozenset(A), cached_value=val)


def random_greedy_size(oracle: CountedOracle, k: int, rng: np.random.Generator,
                       trace: Optional[RunTrace] = None, ground=None) -> ElementSet:
    """RandomGreedy under a size constraint. At most k * (n + k) value queries."""
    if k < 1:
        raise InputError("k must be at least 1")
    return _rg_size(oracle, k, frozenset(), 0, rng, trace, ground=ground)


def _rg_matroid(oracle: CountedOracle, M: ExtendedMatroid, Z: frozenset, boundary: int,
                rng: np.random.Generator, trace: Optional[RunTrace]) -> ElementSet:
    """Shared core of RandomGreedy / GuidedRG under a matroid constraint.

    Starts from the all-dummy basis; each iteration computes the max-gain
    basis M_i disjoint from the current solution, maps it onto the solution
    with an exchange bijection, and swaps a uniformly random element in.
    """
    A = frozenset(M.dummy_ids())
    val = oracle.eval(A)
    k = M.k
    for i in range(1, k + 1):
        excluded = Z if i <= boundary else frozenset()
        Mi = max_gain_basis(oracle, M, A, excluded=excluded, base=val)
        sigma = exchange_bijection(M, Mi, A).pairs
        ordered = sorted(Mi)
        x = ordered[int(rng.integers(len(ordered)))]
        out = sigma[x]
        A = (A - {out}) | {x}
        val = oracle.eval(A)
        if trace is not None:
            trace.steps.append((i, x, out))
    reals = frozenset(a for a in A if a < M.n)
    return ElementSet(reals, cached_value=val)


def random_greedy_matroid(oracle: CountedOracle, M: ExtendedMatroid, rng: np.random.Generator,
                          trace: Optional[RunTrace] = None) -> ElementSet:
    """RandomGreedy for a matroid constraint (basis-exchange form)."""
    return _rg_matroid(oracle, M, frozenset(), 0, rng, trace)


def guided_rg(oracle: CountedOracle, constraint: Constraint, Z, t: float,
              rng: np.random.Generator, trace: Optional[RunTrace] = None) -> ElementSet:
    """Random greedy guided by Z: candidates avoid Z while i <= floor(t*k).

    The stage-1 partial solution never intersects Z; stage 2 may re-select
    elements of Z. At most 2 * k * (n + k) value queries.
    """
    Zm = frozenset(x for x in member_set(Z) if x < oracle.n)
    if isinstance(constraint, SizeConstraint):
        k = constraint.k
        if len(Zm) > k:
            raise InputError("guidance set is infeasible for the size constraint")
        sched = SwitchSchedule(t, k)
        return _rg_size(oracle, k, Zm, sched.boundary, rng, trace)
    M = constraint
    if not M.independent(Zm):
        raise InputError("guidance set is infeasible for the matroid constraint")
    sched = SwitchSchedule(t, M.k)
    return _rg_matroid(oracle, M, Zm, sched.boundary, rng, trace)


def replay_trace(trace: RunTrace, n: int) -> frozenset:
    """Re-apply a recorded trace; returns the final real-element set."""
    A: set = set()
    for _, picked, displaced in trace.steps:
        if picked < n:
            A.add(picked)
        if displaced >= 0 and displaced < n:
            A.discard(displaced)
    return frozenset(A)


def trace_to_csv(trace: RunTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "picked", "displaced", "rng_seed"])
        for i, picked, displaced in trace.steps:
            writer.writerow([i, picked, displaced, trace.rng_seed if trace.rng_seed is not None else ""])


def trace_from_csv(path) -> RunTrace:
    trace = RunTrace()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            trace.steps.append((int(row[0]), int(row[1]), int(row[2])))
            if row[3] != "":
                trace.rng_seed = int(row[3])
    return trace
