"""End-to-end algorithms: randomized local-search-guided greedy, the
enumeration-derandomized variant, and the nearly linear-time deterministic
pipeline.

All pipelines return the best candidate they examined, so the output value
dominates f(Z) and every intermediate candidate by construction. The
deterministic pipelines are pure functions of (instance, parameters).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from .constraints import ExtendedMatroid, SizeConstraint
from .errors import InputError, ResourceError
from .greedy import SwitchSchedule, guided_rg, standard_greedy
from .interlace import guided_ig_matroid, guided_ig_size, thresh_guided_ig
from .localsearch import fast_local_search, prune
from .oracles import CountedOracle, ElementSet, member_set
from .records import TrialRecord

__all__ = [
    "PipelineParams",
    "EnumerationTree",
    "round_budgets",
    "run_randomized",
    "run_determ_random",
    "run_determ",
    "run_nearly_linear",
    "DEFAULT_T_SIZE",
    "DEFAULT_T_MATROID",
]

Constraint = Union[SizeConstraint, ExtendedMatroid]

DEFAULT_T_SIZE = 0.372
DEFAULT_T_MATROID = 0.559
DEFAULT_T_NEARLY_LINEAR = 0.3


@dataclass(frozen=True)
class PipelineParams:
    """Round counts derived from the accuracy parameter."""

    eps: float
    t: float
    ell: int = 0
    ell1: int = 0
    ell2: int = 0

    @staticmethod
    def for_determ(eps: float, t: Optional[float] = None, matroid: bool = False) -> "PipelineParams":
        if eps <= 0:
            raise InputError("eps must be positive")
        tt = (DEFAULT_T_MATROID if matroid else DEFAULT_T_SIZE) if t is None else t
        return PipelineParams(eps=eps, t=tt, ell=math.ceil(10.0 / (9.0 * eps)))

    @staticmethod
    def for_nearly_linear(eps: float, t: Optional[float] = None) -> "PipelineParams":
        if eps <= 0:
            raise InputError("eps must be positive")
        tt = DEFAULT_T_NEARLY_LINEAR if t is None else t
        return PipelineParams(eps=eps, t=tt,
                              ell1=math.ceil(10.0 / (3.0 * eps)),
                              ell2=math.ceil(5.0 / eps))


@dataclass
class EnumerationTree:
    """Level pools of the derandomized enumeration; level 0 is the start set."""

    levels: List[List[ElementSet]]


def round_budgets(k: int, ell: int) -> List[int]:
    """Per-round budgets in {floor(k/ell), ceil(k/ell)} summing to k, larger first."""
    if ell < 1 or k < ell:
        raise InputError("need k >= ell >= 1 for the round budgets")
    q, r = divmod(k, ell)
    return [q + 1] * r + [q] * (ell - r)


def _constraint_parts(oracle: CountedOracle, constraint: Constraint):
    if isinstance(constraint, SizeConstraint):
        return constraint.k, constraint.as_extended(oracle.n), False
    return constraint.k, constraint, True


def _warm_start(oracle: CountedOracle, view: ExtendedMatroid, is_matroid: bool) -> ElementSet:
    return standard_greedy(oracle, view.k, matroid=view if is_matroid else None)


def _guidance_set(oracle: CountedOracle, view: ExtendedMatroid, eps: float,
                  Z0: Optional[ElementSet]) -> ElementSet:
    if Z0 is None:
        Z0 = _warm_start(oracle, view, view.base.kind != "uniform")
    if len(member_set(Z0)) == 0 or (Z0.cached_value is not None and Z0.cached_value <= 0):
        # degenerate instance (f identically 0 on singletons): no local search possible
        return ElementSet(frozenset(), cached_value=0.0)
    Z, _ = fast_local_search(oracle, view, None, Z0, eps)
    return Z


def _best(candidates: List[ElementSet]) -> ElementSet:
    top = candidates[0]
    for c in candidates[1:]:
        if c.cached_value > top.cached_value:
            top = c
    return top


def run_randomized(oracle: CountedOracle, constraint: Constraint, eps: float,
                   t: Optional[float] = None, rng: Optional[np.random.Generator] = None,
                   Z0: Optional[ElementSet] = None, seed: Optional[int] = None,
                   ) -> Tuple[ElementSet, TrialRecord]:
    """Local search for a guidance set, then guided random greedy; returns the
    better of the two with a per-run record of queries and independence calls."""
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(0 if seed is None else seed))
    k, view, is_matroid = _constraint_parts(oracle, constraint)
    tt = (DEFAULT_T_MATROID if is_matroid else DEFAULT_T_SIZE) if t is None else t
    q0, c0 = oracle.value_queries, view.independence_calls

    Z = _guidance_set(oracle, view, eps, Z0)
    A = guided_rg(oracle, constraint if is_matroid else SizeConstraint(k), Z, tt, rng)
    out = _best([Z, A])
    record = TrialRecord(
        algorithm="fastls_guided_rg", n=oracle.n, k=k, eps=eps, t=tt, seed=seed,
        value=float(out.cached_value), value_queries=oracle.value_queries - q0,
        independence_calls=view.independence_calls - c0,
        members=tuple(sorted(out.members)),
    )
    return out, record


def run_determ_random(oracle: CountedOracle, constraint: Constraint, eps: float,
                      t: Optional[float] = None, rng: Optional[np.random.Generator] = None,
                      Z0: Optional[ElementSet] = None) -> ElementSet:
    """Randomized-for-derandomization variant: one uniformly random candidate
    advances at each of the ell interlaced-greedy rounds."""
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(0))
    k, view, is_matroid = _constraint_parts(oracle, constraint)
    params = PipelineParams.for_determ(eps, t, matroid=is_matroid)
    ell = params.ell
    if k < ell:
        raise InputError(f"need k >= ell = {ell}")
    Z = _guidance_set(oracle, view, eps, Z0)
    boundary = SwitchSchedule(params.t, ell).boundary
    budgets = round_budgets(k, ell)
    A = ElementSet(frozenset(), cached_value=oracle.eval(frozenset()))
    for i in range(1, ell + 1):
        Zi = Z.members if i <= boundary else frozenset()
        if is_matroid:
            fam = guided_ig_matroid(oracle, view, Zi - A.members, A, ell, base=A.cached_value)
        else:
            fam = guided_ig_size(oracle, k, Zi, A, ell, budget=budgets[i - 1], base=A.cached_value)
        A = fam.sets[int(rng.integers(len(fam.sets)))]
    return _best([Z, A])


def _expand_level(oracle, view, is_matroid, k, ell, Zi, parents, budget, pool_cap, max_pool):
    children: dict = {}
    for parent in parents:
        if is_matroid:
            fam = guided_ig_matroid(oracle, view, Zi - parent.members, parent, ell,
                                    base=parent.cached_value)
        else:
            fam = guided_ig_size(oracle, k, Zi, parent, ell, budget=budget,
                                 base=parent.cached_value)
        for s in fam.sets:
            key = tuple(sorted(s.members))
            if key not in children:
                children[key] = s
        if pool_cap is None and len(children) > max_pool:
            raise ResourceError(f"enumeration tree exceeded {max_pool} sets; "
                                "set pool_cap for heuristic mode")
    pool = list(children.values())
    if pool_cap is not None and len(pool) > pool_cap:
        order = sorted(range(len(pool)),
                       key=lambda i: (-pool[i].cached_value, tuple(sorted(pool[i].members))))
        pool = [pool[i] for i in order[:pool_cap]]
    return pool


def run_determ(oracle: CountedOracle, constraint: Constraint, eps: float,
               t: Optional[float] = None, Z0: Optional[ElementSet] = None,
               pool_cap: Optional[int] = None, max_pool: int = 200_000,
               info: Optional[dict] = None) -> ElementSet:
    """Fully derandomized pipeline: every candidate of every parent advances.

    Deterministic; with pool_cap set, only the top-pool_cap candidates per
    level survive (heuristic mode, reported as non-certified in `info`).
    """
    k, view, is_matroid = _constraint_parts(oracle, constraint)
    params = PipelineParams.for_determ(eps, t, matroid=is_matroid)
    ell = params.ell
    if k < ell:
        raise InputError(f"need k >= ell = {ell}")
    Z = _guidance_set(oracle, view, eps, Z0)
    boundary = SwitchSchedule(params.t, ell).boundary
    budgets = round_budgets(k, ell)
    levels = [[ElementSet(frozenset(), cached_value=oracle.eval(frozenset()))]]
    for i in range(1, ell + 1):
        Zi = Z.members if i <= boundary else frozenset()
        levels.append(_expand_level(oracle, view, is_matroid, k, ell, Zi, levels[-1],
                                    budgets[i - 1], pool_cap, max_pool))
    if info is not None:
        info["certified"] = pool_cap is None
        info["tree"] = EnumerationTree(levels)
        info["ell"] = ell
    return _best([Z] + levels[-1])


def run_nearly_linear(oracle: CountedOracle, k: int, eps: float,
                      ell1: Optional[int] = None, ell2: Optional[int] = None,
                      t: float = DEFAULT_T_NEARLY_LINEAR, max_pool: int = 200_000,
                      info: Optional[dict] = None) -> ElementSet:
    """Nearly linear-time deterministic pipeline for a size constraint.

    Phase 1 grows unguided threshold-interlaced candidates level by level,
    pruning each output; the union of all pruned levels is the guidance
    pool. Phase 2 reruns the threshold pipeline guided by each pool member
    for the first floor(t * ell2) rounds. Returns the best feasible set seen.
    The accuracy split is eps' = eps / 2 for both the threshold floor and the
    default round counts.
    """
    eps_p = eps / 2.0
    if not 0.0 < eps_p < 1.0:
        raise InputError("eps must lie in (0, 2)")
    params = PipelineParams.for_nearly_linear(eps, t)
    ell1 = params.ell1 if ell1 is None else int(ell1)
    ell2 = params.ell2 if ell2 is None else int(ell2)
    if ell1 < 1 or ell2 < 1 or k < max(ell1, ell2):
        raise InputError("need k >= max(ell1, ell2) >= 1")

    empty = ElementSet(frozenset(), cached_value=oracle.eval(frozenset()))
    budgets1 = round_budgets(k, ell1)
    z_pool: dict = {}
    level = [empty]
    for i in range(1, ell1 + 1):
        nxt: dict = {}
        for parent in level:
            fam = thresh_guided_ig(oracle, k, frozenset(), parent, ell1, eps_p,
                                   budget=budgets1[i - 1], base=parent.cached_value)
            for s in fam.sets:
                pruned = prune(oracle, s, base=s.cached_value)
                key = tuple(sorted(pruned.members))
                if key not in nxt:
                    nxt[key] = pruned
        level = list(nxt.values())
        if len(z_pool) + len(level) > max_pool:
            raise ResourceError(f"guidance pool exceeded {max_pool} sets")
        for s in level:
            z_pool.setdefault(tuple(sorted(s.members)), s)

    guidance = list(z_pool.values())
    boundary = SwitchSchedule(t, ell2).boundary
    budgets2 = round_budgets(k, ell2)
    leaves: dict = {}
    for A in guidance:
        level = [empty]
        for i in range(1, ell2 + 1):
            Zi = A.members if i <= boundary else frozenset()
            nxt = {}
            for parent in level:
                fam = thresh_guided_ig(oracle, k, Zi, parent, ell2, eps_p,
                                       budget=budgets2[i - 1], base=parent.cached_value)
                for s in fam.sets:
                    key = tuple(sorted(s.members))
                    if key not in nxt:
                        nxt[key] = s
            level = list(nxt.values())
            if len(level) > max_pool:
                raise ResourceError(f"phase-2 level exceeded {max_pool} sets")
        for s in level:
            leaves.setdefault(tuple(sorted(s.members)), s)

    candidates = [s for s in guidance + list(leaves.values()) if len(s.members) <= k]
    if info is not None:
        info["guidance_pool"] = guidance
        info["n_leaves"] = len(leaves)
        info["ell1"], info["ell2"] = ell1, ell2
    return _best(candidates) if candidates else empty
