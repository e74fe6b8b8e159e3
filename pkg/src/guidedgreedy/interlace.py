"""Interlaced greedy subroutines, plain and threshold-accelerated.

The size-constraint subroutine grows ell disjoint continuations per anchor
branch and returns all ell*(ell+1) candidates. The matroid subroutine
builds one auxiliary independent set, then exchanges it into the starting
basis part by part. The threshold variant replaces each argmax with a
descending-threshold scan whose floor is eps * M / k for the branch anchor
gain M.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .constraints import ExtendedMatroid, pad_with_dummies
from .errors import InputError, ResourceError
from .oracles import CountedOracle, ElementSet, cached_value_of, member_set

__all__ = [
    "CandidateFamily",
    "ThresholdState",
    "guided_ig_size",
    "guided_ig_matroid",
    "thresh_guided_ig",
    "threshold_add",
]


@dataclass(frozen=True)
class CandidateFamily:
    """Candidate solution sets with their branch labels, in (u, i) order."""

    sets: List[ElementSet]
    labels: List[Tuple[int, ...]]

    def __len__(self):
        return len(self.sets)

    def best(self) -> ElementSet:
        """Highest-value candidate; the first one in family order wins ties."""
        top = self.sets[0]
        for s in self.sets[1:]:
            if s.cached_value > top.cached_value:
                top = s
        return top


@dataclass
class ThresholdState:
    """Per-set descending-threshold bookkeeping."""

    tau: float
    tau_min: float
    anchor_gain: float
    active: bool = True


def _anchor_pool(oracle: CountedOracle, k: int, Gm: frozenset, Zm: frozenset) -> list:
    pool = [x for x in range(oracle.n) if x not in Gm and x not in Zm]
    pool += [d for d in range(oracle.n, oracle.n + k) if d not in Gm]
    return pool


def _top_anchors(oracle: CountedOracle, k: int, Gm: frozenset, Zm: frozenset, ell: int,
                 base: float) -> Tuple[list, list]:
    """Top-ell elements outside G u Z by gain on G; dummies fill shortfalls."""
    pool = np.asarray(_anchor_pool(oracle, k, Gm, Zm), dtype=np.int64)
    if len(pool) < ell:
        raise InputError("not enough candidates (including dummies) for the anchors")
    gains = oracle.gains(Gm, pool, base=base)
    order = np.lexsort((pool, -gains))[:ell]
    return [int(pool[i]) for i in order], [float(gains[i]) for i in order]


def _default_budget(k: int, ell: int, budget: Optional[int]) -> int:
    b = k // ell if budget is None else int(budget)
    if b < 1:
        raise InputError("per-set budget must be at least 1 (need k >= ell)")
    return b


def guided_ig_size(oracle: CountedOracle, k: int, Z, G, ell: int,
                   budget: Optional[int] = None, base: Optional[float] = None) -> CandidateFamily:
    """Interlaced greedy for a size constraint, guided by Z.

    Each of the ell+1 anchor branches grows ell sets; additions come from
    outside Z and outside the branch union, so sibling sets stay disjoint
    beyond their seed. Each set receives `budget` elements beyond G
    (anchor included), dummies filling when nothing eligible remains.
    """
    Gm = frozenset(x for x in member_set(G) if x < oracle.n)
    Zm = frozenset(x for x in member_set(Z) if x < oracle.n)
    budget = _default_budget(k, ell, budget)
    if len(Gm) + budget > k:
        raise InputError("starting set plus per-set budget exceeds the size budget")
    if base is None:
        base = cached_value_of(G)
    if base is None:
        base = oracle.eval(Gm)
    anchors, anchor_gains = _top_anchors(oracle, k, Gm, Zm, ell, base)

    sets: List[ElementSet] = []
    labels: List[Tuple[int, ...]] = []
    for u in range(ell + 1):
        if u == 0:
            branch = [set(Gm) | {anchors[l]} for l in range(ell)]
            values = [base + anchor_gains[l] for l in range(ell)]
        else:
            branch = [set(Gm) | {anchors[u - 1]} for _ in range(ell)]
            values = [base + anchor_gains[u - 1] for _ in range(ell)]
        union = set().union(*branch)
        for _ in range(budget - 1):
            for i in range(ell):
                pool = [x for x in range(oracle.n) if x not in union and x not in Zm]
                pool += [d for d in range(oracle.n, oracle.n + k) if d not in union]
                if not pool:
                    continue
                arr = np.asarray(pool, dtype=np.int64)
                gains = oracle.gains(branch[i], arr, base=values[i])
                bidx = int(np.lexsort((arr, -gains))[0])
                x = int(arr[bidx])
                branch[i].add(x)
                union.add(x)
                values[i] += float(gains[bidx])
        for i in range(ell):
            reals = frozenset(x for x in branch[i] if x < oracle.n)
            sets.append(ElementSet(reals, cached_value=values[i]))
            labels.append((u, i + 1))
    return CandidateFamily(sets, labels)


def _exchange_parts(M: ExtendedMatroid, G_pad: frozenset, parts: List[set]) -> List[frozenset]:
    """Exchange each part into the basis G_pad, removing one G element per
    addition (dummies of G preferred), with removals disjoint across parts."""
    taken: set = set()
    outputs = []
    g_dummies = sorted(x for x in G_pad if x >= M.n)
    g_reals = sorted(x for x in G_pad if x < M.n)
    for part in parts:
        W = set(G_pad)
        for x in sorted(part):
            found = None
            for y in g_dummies + g_reals:
                if y in taken or y not in W:
                    continue
                if M.independent((W - {y}) | {x}):
                    found = y
                    break
            if found is None:
                raise ResourceError("no valid basis exchange for this matroid; "
                                    "only uniform and partition matroids are supported")
            taken.add(found)
            W.remove(found)
            W.add(x)
        outputs.append(frozenset(W))
    return outputs


def guided_ig_matroid(oracle: CountedOracle, M: ExtendedMatroid, Z, G,
                      ell: int, base: Optional[float] = None) -> CandidateFamily:
    """Interlaced greedy for a matroid constraint, guided by Z.

    Builds one auxiliary independent set A of size k by argmax over (set,
    element) pairs, then exchanges each bucket A_j into the starting basis.
    Requires G (after dummy padding) to be a basis and Z to avoid G.
    """
    Gm = frozenset(member_set(G))
    Zm = frozenset(x for x in member_set(Z) if x < M.n)
    if Zm & Gm:
        raise InputError("guidance set must be disjoint from the starting set")
    G_pad = pad_with_dummies(Gm, M.k, M.n)
    if not M.is_basis(G_pad):
        raise InputError("starting set must be a basis after dummy padding")
    if base is None:
        base = cached_value_of(G)
    if base is None:
        base = oracle.eval(Gm)

    A: set = set()
    parts: List[set] = [set() for _ in range(ell)]
    values = [base] * ell
    for _ in range(M.k):
        cand = [x for x in range(M.n) if x not in G_pad and x not in A and x not in Zm]
        cand = [x for x in cand if M.independent(A | {x})]
        cand += [d for d in M.dummy_ids() if d not in G_pad and d not in A]
        if not cand:
            break
        arr = np.asarray(cand, dtype=np.int64)
        best = None  # (gain, j, x)
        for j in range(ell):
            gains = oracle.gains(Gm | parts[j], arr, base=values[j])
            bidx = int(np.lexsort((arr, -gains))[0])
            entry = (float(gains[bidx]), j, int(arr[bidx]))
            if best is None or entry[0] > best[0]:
                best = entry
        g, j, x = best
        A.add(x)
        parts[j].add(x)
        values[j] += g

    outputs = _exchange_parts(M, G_pad, parts)
    sets, labels = [], []
    for j, W in enumerate(outputs):
        reals = frozenset(x for x in W if x < M.n)
        sets.append(ElementSet(reals, cached_value=oracle.eval(reals)))
        labels.append((j + 1,))
    return CandidateFamily(sets, labels)


def _add_scan(oracle: CountedOracle, pool: list, members: set, value: float,
              eps: float, state: ThresholdState):
    """One ADD call: scan at the current threshold, decaying by (1 - eps)
    after each full failed pass, until one adoption or the floor."""
    while state.tau >= state.tau_min:
        x, _, g = oracle.scan_first(members, pool, state.tau, base=value)
        if x is not None:
            return x, g
        state.tau *= (1.0 - eps)
    return None, None


def threshold_add(oracle: CountedOracle, V, A, eps: float, tau: float, tau_min: float,
                  base: Optional[float] = None) -> Tuple[ElementSet, float]:
    """Public ADD: scan V in ascending id order at threshold tau; adopt the
    first element with gain >= tau, else decay tau by (1 - eps) and rescan.
    Returns (possibly grown set, final threshold)."""
    Am = set(member_set(A))
    if base is None:
        base = cached_value_of(A)
    if base is None:
        base = oracle.eval(Am)
    pool = sorted(member_set(V))
    state = ThresholdState(tau=float(tau), tau_min=float(tau_min), anchor_gain=float(tau))
    x, g = _add_scan(oracle, pool, Am, base, eps, state)
    if x is None:
        return ElementSet(frozenset(Am), cached_value=base), state.tau
    return ElementSet(frozenset(Am | {x}), cached_value=base + g), state.tau


def thresh_guided_ig(oracle: CountedOracle, k: int, Z, G, ell: int, eps: float,
                     budget: Optional[int] = None, base: Optional[float] = None) -> CandidateFamily:
    """Threshold-accelerated guided interlaced greedy for a size constraint.

    Same branch structure as guided_ig_size; each set grows through ADD
    scans with per-set thresholds, stopping at the budget or at the floor
    eps * M / k where M is the branch anchor gain.
    """
    if not 0.0 < eps < 1.0:
        raise InputError("eps must lie in (0, 1)")
    Gm = frozenset(x for x in member_set(G) if x < oracle.n)
    Zm = frozenset(x for x in member_set(Z) if x < oracle.n)
    budget = _default_budget(k, ell, budget)
    if len(Gm) + budget > k:
        raise InputError("starting set plus per-set budget exceeds the size budget")
    if base is None:
        base = cached_value_of(G)
    if base is None:
        base = oracle.eval(Gm)
    anchors, anchor_gains = _top_anchors(oracle, k, Gm, Zm, ell, base)

    sets: List[ElementSet] = []
    labels: List[Tuple[int, ...]] = []
    for u in range(ell + 1):
        if u == 0:
            M_val = anchor_gains[ell - 1]
            branch = [set(Gm) | {anchors[l]} for l in range(ell)]
            values = [base + anchor_gains[l] for l in range(ell)]
        else:
            M_val = anchor_gains[u - 1]
            branch = [set(Gm) | {anchors[u - 1]} for _ in range(ell)]
            values = [base + anchor_gains[u - 1] for _ in range(ell)]
        union = set().union(*branch)
        tau_min = eps * M_val / k
        states = [ThresholdState(tau=M_val, tau_min=tau_min, anchor_gain=M_val,
                                 active=M_val > 0 and budget > 1) for _ in range(ell)]
        while any(s.active for s in states):
            for i in range(ell):
                if not states[i].active:
                    continue
                pool = [x for x in range(oracle.n) if x not in union and x not in Zm]
                pool += [d for d in range(oracle.n, oracle.n + k) if d not in union]
                x, g = _add_scan(oracle, pool, branch[i], values[i], eps, states[i])
                if x is not None:
                    branch[i].add(x)
                    union.add(x)
                    values[i] += g
                if len(branch[i]) - len(Gm) >= budget or states[i].tau < states[i].tau_min:
                    states[i].active = False
        for i in range(ell):
            reals = frozenset(x for x in branch[i] if x < oracle.n)
            sets.append(ElementSet(reals, cached_value=values[i]))
            labels.append((u, i + 1))
    return CandidateFamily(sets, labels)
