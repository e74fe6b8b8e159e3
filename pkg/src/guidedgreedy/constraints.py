"""Feasibility structures: size constraint and matroid independence oracles.

Shipped matroids are uniform and partition; anything else can plug in
through the independence-oracle interface alone. The dummy extension adds k
null elements (ids n..n+k-1) so that every feasible set pads to a basis.
Independence calls are counted separately from value queries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from .errors import InputError, ResourceError
from .oracles import CountedOracle, member_set

__all__ = [
    "SizeConstraint",
    "MatroidView",
    "UniformMatroid",
    "PartitionMatroid",
    "ExtendedMatroid",
    "ExchangeMap",
    "pad_with_dummies",
    "max_gain_basis",
    "exchange_bijection",
    "read_partition_file",
    "write_partition_file",
]


@dataclass(frozen=True)
class SizeConstraint:
    """Feasible sets are those with at most k real elements."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise InputError("size budget k must be positive")

    def feasible(self, S) -> bool:
        members = member_set(S)
        return len(members) <= self.k  # callers strip dummies beforehand

    def as_extended(self, n: int) -> "ExtendedMatroid":
        return ExtendedMatroid(UniformMatroid(n, self.k))


class MatroidView:
    """Independence oracle over real elements 0..n-1, with a call counter."""

    kind = "matroid"

    def __init__(self, n: int, rank: int):
        self.n = int(n)
        self.rank = int(rank)
        self.independence_calls = 0

    def _indep(self, reals: frozenset) -> bool:
        raise NotImplementedError

    def independent(self, S) -> bool:
        members = member_set(S)
        for x in members:
            if not 0 <= x < self.n:
                raise InputError(f"element id {x} out of range for ground set of size {self.n}")
        self.independence_calls += 1
        return self._indep(frozenset(members))

    def is_basis(self, S) -> bool:
        members = member_set(S)
        return len(members) == self.rank and self.independent(members)


class UniformMatroid(MatroidView):
    kind = "uniform"

    def __init__(self, n: int, k: int):
        if not 1 <= k <= n:
            raise InputError("uniform matroid needs 1 <= k <= n")
        super().__init__(n, k)
        self.k = k

    def _indep(self, reals: frozenset) -> bool:
        return len(reals) <= self.k


class PartitionMatroid(MatroidView):
    """Blocks partition the ground set; each block has its own capacity."""

    kind = "partition"

    def __init__(self, n: int, block_of: Sequence[int], capacities: Sequence[int]):
        block_of = [int(b) for b in block_of]
        capacities = [int(c) for c in capacities]
        if len(block_of) != n:
            raise InputError("block_of must assign every element a block")
        if any(c < 0 for c in capacities):
            raise InputError("block capacities must be nonnegative")
        nb = len(capacities)
        if any(not 0 <= b < nb for b in block_of):
            raise InputError("block id out of range")
        counts = [0] * nb
        for b in block_of:
            counts[b] += 1
        rank = sum(min(c, cnt) for c, cnt in zip(capacities, counts))
        if rank < 1:
            raise InputError("partition matroid has rank 0")
        super().__init__(n, rank)
        self.block_of = block_of
        self.capacities = capacities

    def _indep(self, reals: frozenset) -> bool:
        used: Dict[int, int] = {}
        for x in reals:
            b = self.block_of[x]
            used[b] = used.get(b, 0) + 1
            if used[b] > self.capacities[b]:
                return False
        return True


class ExtendedMatroid:
    """Base matroid plus k dummy elements (ids n..n+k-1).

    A set is independent iff its real part is independent in the base and
    its total size is at most k. All-dummy sets of size k are bases, so a
    basis disjoint from any given set always exists.
    """

    kind = "extended"

    def __init__(self, base: MatroidView, k: Optional[int] = None):
        self.base = base
        self.n = base.n
        self.k = int(k) if k is not None else base.rank
        if self.k < 1 or self.k > base.rank:
            raise InputError("extended rank must be in [1, base rank]")
        self.rank = self.k
        self.independence_calls = 0

    def dummy_ids(self):
        return range(self.n, self.n + self.k)

    def independent(self, S) -> bool:
        members = member_set(S)
        limit = self.n + self.k
        for x in members:
            if not 0 <= x < limit:
                raise InputError(f"element id {x} out of range [0, {limit})")
        self.independence_calls += 1
        if len(members) > self.k:
            return False
        reals = frozenset(x for x in members if x < self.n)
        return self.base._indep(reals)

    def is_basis(self, S) -> bool:
        members = member_set(S)
        return len(members) == self.k and self.independent(members)


def pad_with_dummies(S, k: int, n_real: int) -> frozenset:
    """Pad S to exactly k elements with the smallest unused dummy ids."""
    members = set(member_set(S))
    if len(members) > k:
        raise InputError(f"cannot pad a set of size {len(members)} to {k}")
    d = n_real
    while len(members) < k:
        if d >= n_real + k:
            raise InputError("ran out of dummy ids while padding")
        if d not in members:
            members.add(d)
        d += 1
    return frozenset(members)


def max_gain_basis(oracle: CountedOracle, M: ExtendedMatroid, A, excluded=(),
                   base: Optional[float] = None) -> frozenset:
    """Basis of the extended matroid maximizing total marginal gain on A.

    Candidates are all extended-ground elements outside A and outside
    `excluded` (which must contain no dummies). Matroid greedy rule: sort by
    descending gain with ties to the smallest id, add while independent.
    Dummies carry exact zero gain, so they displace negative-gain elements
    and fill any shortfall. Cost: at most n value queries plus O(n)
    independence calls.
    """
    A_m = member_set(A)
    excl = member_set(excluded)
    if any(x >= M.n for x in excl):
        raise InputError("excluded set must not contain dummy elements")
    pool = [x for x in range(M.n) if x not in A_m and x not in excl]
    pool += [d for d in M.dummy_ids() if d not in A_m]
    pool_arr = np.asarray(pool, dtype=np.int64)
    gains = oracle.gains(A_m, pool_arr, base=base)
    order = np.lexsort((pool_arr, -gains))
    chosen: set = set()
    for idx in order:
        x = int(pool_arr[idx])
        if len(chosen) == M.k:
            break
        if M.independent(chosen | {x}):
            chosen.add(x)
    if len(chosen) != M.k:
        raise ResourceError("could not complete a basis; matroid rank inconsistent")
    return frozenset(chosen)


@dataclass(frozen=True)
class ExchangeMap:
    """Bijection between B_from \\ B_to and B_to \\ B_from.

    For every e in the domain, B_to + e - pairs[e] is a basis.
    """

    pairs: Dict[int, int]


def exchange_bijection(M, B_from, B_to) -> ExchangeMap:
    """Basis-exchange bijection via bipartite matching with augmenting paths.

    Edge (e, y) exists iff B_to + e - y is independent. A perfect matching
    exists for any pair of bases; the search scans e and y in ascending id
    order and prefers unmatched targets before augmenting, which makes the
    result deterministic.
    """
    from_m = member_set(B_from)
    to_m = member_set(B_to)
    if not getattr(M, "is_basis", None):
        raise InputError("exchange_bijection requires a matroid view with is_basis")
    if not M.is_basis(from_m) or not M.is_basis(to_m):
        raise InputError("exchange_bijection arguments must both be bases")
    D_from = sorted(from_m - to_m)
    D_to = sorted(to_m - from_m)
    feas_cache: Dict[tuple, bool] = {}

    def feasible(e: int, y: int) -> bool:
        key = (e, y)
        if key not in feas_cache:
            feas_cache[key] = M.independent((to_m - {y}) | {e})
        return feas_cache[key]

    match_to: Dict[int, int] = {}
    match_from: Dict[int, int] = {}

    def augment(e: int, seen: set) -> bool:
        for y in D_to:
            if y in seen or not feasible(e, y):
                continue
            if y not in match_to:
                match_to[y] = e
                match_from[e] = y
                return True
        for y in D_to:
            if y in seen or not feasible(e, y):
                continue
            seen.add(y)
            if augment(match_to[y], seen):
                match_to[y] = e
                match_from[e] = y
                return True
        return False

    for e in D_from:
        if not augment(e, set()):
            raise InputError("no exchange bijection exists; inputs are not bases of the same matroid")
    return ExchangeMap(dict(sorted(match_from.items())))


def read_partition_file(path, n: int) -> PartitionMatroid:
    """Partition matroid file: header 'B M', B lines 'block_id capacity',
    then M membership lines 'element_id block_id'."""
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise InputError(f"{path}: missing 'B M' header")
    try:
        nb, nm = int(tokens[0]), int(tokens[1])
        rest = tokens[2:]
        if len(rest) != 2 * (nb + nm):
            raise InputError(f"{path}: expected {2 * (nb + nm)} body tokens, found {len(rest)}")
        caps: Dict[int, int] = {}
        for i in range(nb):
            caps[int(rest[2 * i])] = int(rest[2 * i + 1])
        block_of = [-1] * n
        for i in range(nb, nb + nm):
            e, b = int(rest[2 * i]), int(rest[2 * i + 1])
            if not 0 <= e < n:
                raise InputError(f"{path}: element id {e} out of range")
            block_of[e] = b
    except ValueError as exc:
        raise InputError(f"{path}: malformed partition file ({exc})") from exc
    if any(b < 0 for b in block_of):
        raise InputError(f"{path}: every element needs a block assignment")
    ordered = sorted(caps)
    remap = {b: i for i, b in enumerate(ordered)}
    return PartitionMatroid(n, [remap[b] for b in block_of], [caps[b] for b in ordered])


def write_partition_file(M: PartitionMatroid, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{len(M.capacities)} {M.n}\n")
        for b, c in enumerate(M.capacities):
            fh.write(f"{b} {c}\n")
        for e, b in enumerate(M.block_of):
            fh.write(f"{e} {b}\n")
