"""Swap local search producing guidance sets, plus the pruning subroutine.

The local search maintains a dummy-padded basis Z and repeatedly executes
the best available swap (a out, e in) whose improvement
gain(e, Z) - [f(Z) - f(Z - a)] clears the threshold (eps/k) * f(Z).
Swap-in candidates include unused dummies, so pure deletions that improve
the value are available; this is required for the local-optimality
certificate to hold.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .constraints import ExtendedMatroid, PartitionMatroid, UniformMatroid, pad_with_dummies
from .errors import InputError, ResourceError
from .oracles import CountedOracle, ElementSet, cached_value_of, member_set

__all__ = [
    "SwapEvent",
    "GuidanceCertificate",
    "fast_local_search",
    "certify_local_optimum",
    "fastls_quarter",
    "prune",
    "make_guidance_certificate",
    "swap_log_to_csv",
]


@dataclass(frozen=True)
class SwapEvent:
    removed: int
    added: int
    value_before: float
    value_after: float


@dataclass(frozen=True)
class GuidanceCertificate:
    """Evaluated guidance-set inequalities for a candidate Z against a known optimum."""

    alpha: float
    beta: float
    epsilon: float
    f_Z: float
    f_opt: float
    f_intersection: float
    f_union: float

    @property
    def cond_value(self) -> bool:
        return self.f_Z < self.alpha * self.f_opt

    @property
    def cond_intersection(self) -> bool:
        return self.f_intersection <= self.alpha * self.f_opt + 1e-12

    @property
    def cond_union(self) -> bool:
        return self.f_union <= self.beta * self.f_opt + 1e-12

    @property
    def cond_combined(self) -> bool:
        return self.f_intersection + self.f_union <= (self.alpha + self.beta) * self.f_opt + 1e-12

    @property
    def holds(self) -> bool:
        return self.cond_value and self.cond_intersection and (self.cond_union or self.cond_combined)


def make_guidance_certificate(oracle: CountedOracle, Z, O, alpha: float, beta: float,
                              epsilon: float) -> GuidanceCertificate:
    """Evaluate the guidance inequalities for Z against a known optimum O (4 queries)."""
    Zm, Om = member_set(Z), member_set(O)
    return GuidanceCertificate(
        alpha=alpha, beta=beta, epsilon=epsilon,
        f_Z=oracle.eval(Zm), f_opt=oracle.eval(Om),
        f_intersection=oracle.eval(Zm & Om), f_union=oracle.eval(Zm | Om),
    )


def _occupancies(M: ExtendedMatroid, members: Iterable[int]):
    base = M.base
    occ = [0] * len(base.capacities)
    for x in members:
        if x < M.n:
            occ[base.block_of[x]] += 1
    return occ


def _best_swap(oracle: CountedOracle, M: ExtendedMatroid, Z: set, fZ: float,
               ground: frozenset) -> Tuple[float, Optional[int], Optional[int]]:
    """Best (score, a, e) over feasible swaps; ties broken to smallest (a, e).

    score(a, e) = gain(e, Z) - [f(Z) - f(Z - a)]. Costs |Z| real removal
    margins plus one gain per real candidate.
    """
    rem_ids = sorted(Z)
    rems = oracle.removal_margins(Z, members=rem_ids, base=fZ)
    pool = sorted(x for x in ground if x not in Z)
    pool += [d for d in M.dummy_ids() if d not in Z]
    if not pool:
        return -np.inf, None, None
    adds = oracle.gains(Z, pool, base=fZ)

    base = M.base
    if isinstance(base, UniformMatroid):
        ai = int(np.argmin(rems))  # first minimum: smallest id wins ties
        ei = int(np.argmax(adds))
        return float(adds[ei] - rems[ai]), rem_ids[ai], pool[ei]

    if isinstance(base, PartitionMatroid):
        occ = _occupancies(M, Z)
        caps = base.capacities
        rmin_all = float(np.min(rems))
        a_all = rem_ids[int(np.argmin(rems))]
        block_best = {}
        for a, r in zip(rem_ids, rems):
            if a < M.n:
                b = base.block_of[a]
                if b not in block_best or r < block_best[b][0]:
                    block_best[b] = (float(r), a)
        best = (-np.inf, None, None)
        for e, g in zip(pool, adds):
            if e >= M.n:
                allowed = (rmin_all, a_all)
            else:
                b = base.block_of[e]
                if occ[b] < caps[b]:
                    allowed = (rmin_all, a_all)
                elif b in block_best:
                    allowed = block_best[b]
                else:
                    continue
            score = float(g) - allowed[0]
            cand = (score, allowed[1], e)
            if cand[0] > best[0]:
                best = cand
            elif cand[0] == best[0] and best[1] is not None and (cand[1], cand[2]) < (best[1], best[2]):
                best = cand
        return best

    # generic matroid: feasibility through the independence oracle
    best = (-np.inf, None, None)
    for a, r in zip(rem_ids, rems):
        for e, g in zip(pool, adds):
            score = float(g) - float(r)
            if score <= best[0]:
                continue
            if M.independent((Z - {a}) | {e}):
                best = (score, a, e)
    return best


def fast_local_search(oracle: CountedOracle, M: ExtendedMatroid, ground, Z0,
                      eps: float) -> Tuple[ElementSet, List[SwapEvent]]:
    """Best-swap local search; returns the local optimum and its swap log.

    Terminates when no feasible swap improves by at least (eps/k) * f(Z);
    every executed swap multiplies the value by at least 1 + eps/k.
    """
    if eps <= 0:
        raise InputError("eps must be positive")
    k = M.k
    ground = frozenset(x for x in member_set(ground) if x < M.n) if ground is not None \
        else frozenset(range(M.n))
    Z0m = frozenset(x for x in member_set(Z0) if x < M.n)
    if not Z0m:
        raise InputError("Z0 must be nonempty")
    if not M.independent(Z0m):
        raise InputError("Z0 must be feasible")
    f0 = cached_value_of(Z0)
    if f0 is None:
        f0 = oracle.eval(Z0m)
    if f0 <= 0:
        raise InputError("f(Z0) must be positive (swap threshold is degenerate otherwise)")

    Z = set(pad_with_dummies(Z0m, k, M.n))
    fZ = f0
    log: List[SwapEvent] = []
    while True:
        score, a, e = _best_swap(oracle, M, Z, fZ, ground)
        if a is None or score < (eps / k) * fZ:
            break
        new_Z = (Z - {a}) | {e}
        new_f = oracle.eval(new_Z)
        if new_f <= fZ:
            break  # guards non-submodular objectives; cannot occur under diminishing returns
        log.append(SwapEvent(removed=a, added=e, value_before=fZ, value_after=new_f))
        Z, fZ = new_Z, new_f
    reals = frozenset(x for x in Z if x < M.n)
    return ElementSet(reals, cached_value=fZ), log


def _independent_subsets(M: ExtendedMatroid, ground: list, limit: int):
    """Yield every independent subset of ground (reals only), smallest first."""
    count = 0

    def rec(prefix: list, start: int):
        nonlocal count
        count += 1
        if count > limit:
            raise ResourceError(f"independent-set enumeration exceeded limit {limit}")
        yield list(prefix)
        if len(prefix) >= M.k:
            return
        for i in range(start, len(ground)):
            x = ground[i]
            cand = prefix + [x]
            if M.base._indep(frozenset(cand)):
                yield from rec(cand, i + 1)

    yield from rec([], 0)


def certify_local_optimum(oracle: CountedOracle, M: ExtendedMatroid, Z, eps: float,
                          ground=None, limit: int = 500_000) -> bool:
    """Exhaustively check f(S u Z) + f(S n Z) <= (2 + eps) f(Z) + 1e-7.

    Test utility: enumerates every independent S over the real ground, so it
    is only usable at desk scale.
    """
    Zm = frozenset(x for x in member_set(Z) if x < M.n)
    fZ = cached_value_of(Z)
    if fZ is None:
        fZ = oracle.eval(Zm)
    ground_list = sorted(member_set(ground)) if ground is not None else list(range(M.n))
    bound = (2.0 + eps) * fZ + 1e-7
    for S in _independent_subsets(M, ground_list, limit):
        Sm = frozenset(S)
        if oracle.eval(Sm | Zm) + oracle.eval(Sm & Zm) > bound:
            return False
    return True


def fastls_quarter(oracle: CountedOracle, M: ExtendedMatroid, Z0, eps: float) -> ElementSet:
    """Two-pass local search: second pass avoids the first pass's output.

    Returns the better of the two local optima. The second pass warm-starts
    from a greedy solution restricted to the remaining ground (the input Z0
    may intersect the first output, which would invalidate the restricted
    run).
    """
    from .greedy import standard_greedy

    Z1, _ = fast_local_search(oracle, M, None, Z0, eps)
    ground2 = frozenset(range(M.n)) - Z1.members
    if ground2:
        warm = standard_greedy(oracle, M.k, ground=ground2, matroid=M)
        if warm.cached_value is not None and warm.cached_value > 0 and len(warm.members) > 0:
            Z2, _ = fast_local_search(oracle, M, ground2, warm, eps)
            if Z2.cached_value > Z1.cached_value:
                return Z2
    return Z1


def prune(oracle: CountedOracle, A, base: Optional[float] = None) -> ElementSet:
    """Single deletion pass in ascending id order over a snapshot of A.

    An element is removed iff its marginal contribution to the current set
    is negative at its check. Costs one query per element checked (plus one
    for f(A) when no cached value is available).
    """
    current = set(x for x in member_set(A) if x < oracle.n)  # dummies contribute nothing
    if base is None:
        base = cached_value_of(A)
    if base is None:
        base = oracle.eval(current)
    val = base
    for x in sorted(current):
        margin = float(oracle.removal_margins(current, members=[x], base=val)[0])
        if margin < 0:
            current.discard(x)
            val = val - margin
    return ElementSet(frozenset(current), cached_value=val)


def swap_log_to_csv(events: Iterable[SwapEvent], path) -> None:
    """Serialize a swap log as `step,removed,added,value` rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "removed", "added", "value"])
        for i, ev in enumerate(events, start=1):
            writer.writerow([i, ev.removed, ev.added, repr(ev.value_after)])
