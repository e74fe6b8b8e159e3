"""Objective instances, query-counted oracle access, and seeded generators.

Ground-set convention used across the package: an instance has n real
elements with ids 0..n-1; ids n..n+k-1 are dummy (null) elements that are
stripped before any objective evaluation and contribute zero marginal gain
everywhere. k is fixed by the constraint of the run.

Query accounting: every call to CountedOracle.eval costs exactly one value
query. Derived operations (gain, gains, removal_margins, scan_first) cost
one query per real set they evaluate; dummy elements are known-zero by the
stripping rule and cost nothing. Each method documents its exact cost so
call sites can be tallied independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .errors import InputError

__all__ = [
    "ElementSet",
    "member_set",
    "MaxCutInstance",
    "GramInstance",
    "ModularInstance",
    "CountedOracle",
    "log_det_plus_one",
    "gen_graph",
    "gen_er",
    "gen_ba",
    "gen_ws",
    "gen_gram_video",
    "gen_gram_wishart",
    "read_edge_list",
    "write_edge_list",
    "read_gram_csv",
    "read_features_csv",
]


@dataclass(frozen=True)
class ElementSet:
    """An immutable set of element ids with an optional cached objective value.

    cached_value, when present, equals the oracle value of the members with
    dummies stripped (within 1e-9 relative tolerance).
    """

    members: frozenset
    cached_value: Optional[float] = None

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x):
        return x in self.members

    def sorted_members(self):
        return sorted(self.members)


def member_set(S) -> frozenset:
    """Coerce an ElementSet or iterable of ids to a frozenset."""
    if isinstance(S, ElementSet):
        return S.members
    if isinstance(S, frozenset):
        return S
    return frozenset(int(x) for x in S)


def cached_value_of(S) -> Optional[float]:
    return S.cached_value if isinstance(S, ElementSet) else None


class MaxCutInstance:
    """Weighted max-cut objective: f(S) = sum of edge weights crossing S.

    Evaluation scans the full edge list in input order; there is no mutable
    incremental state, so evaluation stays pure. Bulk gain helpers use the
    per-vertex signed incidence sum, which equals the two-evaluation
    difference exactly for integer weights and within float rounding
    otherwise.
    """

    kind = "maxcut"

    def __init__(self, n: int, edges: Sequence):
        if n <= 0:
            raise InputError("vertex count must be positive")
        self.n = int(n)
        eu, ev, ew = [], [], []
        seen = set()
        for edge in edges:
            if len(edge) == 2:
                u, v = edge
                w = 1.0
            else:
                u, v, w = edge
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise InputError(f"self loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u},{v}) out of range for n={n}")
            if not math.isfinite(w) or w < 0:
                raise InputError(f"edge ({u},{v}) has invalid weight {w}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise InputError(f"duplicate edge ({u},{v})")
            seen.add(key)
            eu.append(u)
            ev.append(v)
            ew.append(w)
        self.edge_u = np.asarray(eu, dtype=np.int64)
        self.edge_v = np.asarray(ev, dtype=np.int64)
        self.edge_w = np.asarray(ew, dtype=np.float64)
        self.m = len(eu)
        self._build_adjacency()

    def _build_adjacency(self):
        n = self.n
        deg = np.zeros(n + 1, dtype=np.int64)
        for u, v in zip(self.edge_u, self.edge_v):
            deg[u + 1] += 1
            deg[v + 1] += 1
        indptr = np.cumsum(deg)
        nbrs = np.empty(2 * self.m, dtype=np.int64)
        nws = np.empty(2 * self.m, dtype=np.float64)
        fill = indptr[:-1].copy()
        for u, v, w in zip(self.edge_u, self.edge_v, self.edge_w):
            nbrs[fill[u]] = v
            nws[fill[u]] = w
            fill[u] += 1
            nbrs[fill[v]] = u
            nws[fill[v]] = w
            fill[v] += 1
        self.adj_indptr = indptr
        self.adj_nbrs = nbrs
        self.adj_nws = nws

    @property
    def edges(self):
        return list(zip(self.edge_u.tolist(), self.edge_v.tolist(), self.edge_w.tolist()))

    def mask_of(self, members: Iterable[int]) -> np.ndarray:
        mask = np.zeros(self.n, dtype=np.uint8)
        idx = list(members)
        if idx:
            mask[idx] = 1
        return mask

    def value(self, members: Sequence[int]) -> float:
        return float(kernels.cut_value(self.edge_u, self.edge_v, self.edge_w, self.mask_of(members)))

    def deltas(self, mask: np.ndarray, xs: np.ndarray) -> np.ndarray:
        out = np.empty(len(xs), dtype=np.float64)
        kernels.cut_deltas(self.adj_indptr, self.adj_nbrs, self.adj_nws, mask, xs, out)
        return out

    def scan_first(self, mask: np.ndarray, xs: np.ndarray, tau: float) -> int:
        return int(kernels.cut_scan_first(self.adj_indptr, self.adj_nbrs, self.adj_nws, mask, xs, tau))


def log_det_plus_one(M) -> float:
    """log(max(det(M), 0) + 1) with det by pivoted LU factorization.

    The 0x0 matrix has determinant 1 by the empty-product convention, so the
    empty set evaluates to log 2. Small negative determinants from PSD
    roundoff clamp to 0.
    """
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError("matrix must be square")
    if A.size == 0:
        return float(np.log(2.0))
    if not np.all(np.isfinite(A)):
        raise InputError("matrix entries must be finite")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.T)) > 1e-9 * scale:
        raise InputError("matrix is not symmetric within tolerance")
    det = float(np.linalg.det(A))
    return float(np.log1p(max(det, 0.0)))


class GramInstance:
    """Log-determinant diversity objective over a PSD similarity matrix.

    f(S) = log(det(X_S) + 1) where X_S is the principal submatrix indexed
    by S in ascending id order.
    """

    kind = "gram"

    def __init__(self, gram):
        X = np.array(gram, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] != X.shape[1]:
            raise InputError("gram matrix must be square")
        if not np.all(np.isfinite(X)):
            raise InputError("gram matrix entries must be finite")
        scale = max(1.0, float(np.max(np.abs(X)))) if X.size else 1.0
        if X.size and np.max(np.abs(X - X.T)) > 1e-9 * scale:
            raise InputError("gram matrix is not symmetric within tolerance")
        self.gram = (X + X.T) / 2.0
        self.n = X.shape[0]

    def value(self, members: Sequence[int]) -> float:
        S = sorted(members)
        if not S:
            return float(np.log(2.0))
        det = float(np.linalg.det(self.gram[np.ix_(S, S)]))
        val = float(np.log1p(max(det, 0.0)))
        if not math.isfinite(val):
            raise InputError("objective value overflowed; rescale the gram matrix")
        return val


class ModularInstance:
    """Modular test objective: f(S) = sum of per-element nonnegative weights."""

    kind = "modular"

    def __init__(self, weights):
        w = np.asarray(list(weights), dtype=np.float64)
        if w.ndim != 1 or len(w) == 0:
            raise InputError("weights must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise InputError("weights must be finite and nonnegative")
        self.weights = w
        self.n = len(w)

    def value(self, members: Sequence[int]) -> float:
        S = sorted(members)
        return float(self.weights[S].sum()) if S else 0.0


class CountedOracle:
    """Wraps an objective instance and counts every value query exactly.

    Ids in [0, n) are real; ids in [n, n + n_dummies) are dummies, stripped
    before evaluation. The wrapper holds no mutable evaluation state besides
    the counter, so evaluation is pure: the same set always returns
    bit-identical values.
    """

    def __init__(self, instance, n_dummies: int = 0):
        self.instance = instance
        self.n = instance.n
        self.n_dummies = int(n_dummies)
        self.value_queries = 0

    def extended_size(self) -> int:
        return self.n + self.n_dummies

    def is_dummy(self, x: int) -> bool:
        return x >= self.n

    def _strip(self, S) -> list:
        members = member_set(S)
        limit = self.extended_size()
        reals = []
        for x in members:
            if not 0 <= x < limit:
                raise InputError(f"element id {x} out of range [0, {limit})")
            if x < self.n:
                reals.append(x)
        return reals

    def eval(self, S) -> float:
        """f(S with dummies stripped). Cost: exactly 1 value query."""
        reals = self._strip(S)
        self.value_queries += 1
        val = self.instance.value(reals)
        if not math.isfinite(val) or val < 0:
            raise InputError("objective returned a non-finite or negative value")
        return val

    def gain(self, x: int, S, base: Optional[float] = None) -> float:
        """f(S + x) - f(S). Cost: 1 query when base is supplied, else 2."""
        members = member_set(S)
        if base is None:
            base = self.eval(members)
        return self.eval(members | {int(x)}) - base

    def _real_sorted(self, S) -> np.ndarray:
        return np.asarray(sorted(self._strip(S)), dtype=np.int64)

    def gains(self, S, candidates, base: Optional[float] = None) -> np.ndarray:
        """Marginal gains f(S+x) - f(S) for each candidate x, aligned to input.

        Cost: one query per real candidate (dummies are known-zero), plus one
        query to establish f(S) when the objective needs it and no base value
        was supplied (gram path only).
        """
        cand = np.asarray(list(candidates), dtype=np.int64)
        if len(cand) == 0:
            return np.empty(0, dtype=np.float64)
        limit = self.extended_size()
        if cand.min() < 0 or cand.max() >= limit:
            raise InputError("candidate id out of range")
        real_mask = cand < self.n
        reals = cand[real_mask]
        out = np.zeros(len(cand), dtype=np.float64)
        if len(reals) == 0:
            return out
        inst = self.instance
        if inst.kind == "maxcut":
            mask = inst.mask_of(self._strip(S))
            out[real_mask] = inst.deltas(mask, reals)
            self.value_queries += int(len(reals))
        elif inst.kind == "modular":
            members = set(self._strip(S))
            vals = inst.weights[reals].copy()
            for i, x in enumerate(reals):
                if x in members:
                    vals[i] = 0.0
            out[real_mask] = vals
            self.value_queries += int(len(reals))
        else:
            members = frozenset(self._strip(S))
            if base is None:
                base = self.eval(members)
            gvals = np.empty(len(reals), dtype=np.float64)
            for i, x in enumerate(reals):
                gvals[i] = self.eval(members | {int(x)}) - base
            out[real_mask] = gvals
        return out

    def removal_margins(self, S, members=None, base: Optional[float] = None) -> np.ndarray:
        """f(S) - f(S - a) for each a (default: all of S), aligned to input.

        Cost mirrors gains: one query per real a, dummies free.
        """
        base_members = frozenset(member_set(S))
        targets = np.asarray(list(members if members is not None else sorted(base_members)), dtype=np.int64)
        out = np.zeros(len(targets), dtype=np.float64)
        if len(targets) == 0:
            return out
        real_mask = targets < self.n
        reals = targets[real_mask]
        if len(reals) == 0:
            return out
        inst = self.instance
        if inst.kind == "maxcut":
            mask = inst.mask_of(self._strip(base_members))
            out[real_mask] = inst.deltas(mask, reals)
            self.value_queries += int(len(reals))
        elif inst.kind == "modular":
            out[real_mask] = inst.weights[reals]
            self.value_queries += int(len(reals))
        else:
            if base is None:
                base = self.eval(base_members)
            vals = np.empty(len(reals), dtype=np.float64)
            for i, a in enumerate(reals):
                vals[i] = base - self.eval(base_members - {int(a)})
            out[real_mask] = vals
        return out

    def scan_first(self, S, candidates, tau: float, base: Optional[float] = None):
        """First candidate (in the given order) whose gain on S is >= tau.

        Returns (element or None, real candidates checked, gain of the hit or
        None). Cost: one query per real candidate checked; dummy checks are
        free.
        """
        cand = [int(x) for x in candidates]
        checked = 0
        inst = self.instance
        if inst.kind == "maxcut":
            mask = inst.mask_of(self._strip(S))
            i, total = 0, len(cand)
            while i < total:
                if cand[i] >= self.n:
                    if 0.0 >= tau:
                        return cand[i], checked, 0.0
                    i += 1
                    continue
                j = i
                while j < total and cand[j] < self.n:
                    j += 1
                run = np.asarray(cand[i:j], dtype=np.int64)
                hit = inst.scan_first(mask, run, tau)
                if hit >= 0:
                    checked += hit + 1
                    self.value_queries += hit + 1
                    g = float(inst.deltas(mask, run[hit:hit + 1])[0])  # recompute, no extra query
                    return int(run[hit]), checked, g
                checked += len(run)
                self.value_queries += len(run)
                i = j
            return None, checked, None
        members = frozenset(member_set(S))
        if inst.kind == "gram" and base is None and any(x < self.n for x in cand):
            base = self.eval(members)
        for x in cand:
            if x >= self.n:
                if 0.0 >= tau:
                    return x, checked, 0.0
                continue
            checked += 1
            if inst.kind == "modular":
                self.value_queries += 1
                g = float(inst.weights[x]) if x not in members else 0.0
            else:
                g = self.eval(members | {x}) - base
            if g >= tau:
                return x, checked, g
        return None, checked, None


# ---------------------------------------------------------------------------
# Seeded random-graph generators. Each documents its exact sampling order so
# a fixed (model, params, seed) reproduces the instance bit-exactly.
# ---------------------------------------------------------------------------


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def gen_er(n: int, p: float, seed: int) -> MaxCutInstance:
    """Erdos-Renyi G(n, p) with unit weights.

    Sampling order: for u = 0..n-2, one uniform draw per v in u+1..n-1
    (vectorized row draw); edge (u, v) kept when draw < p.
    """
    if not 0.0 <= p <= 1.0:
        raise InputError("ER probability must be in [0, 1]")
    rng = _rng(seed)
    edges = []
    for u in range(n - 1):
        hits = np.nonzero(rng.random(n - 1 - u) < p)[0]
        for off in hits:
            edges.append((u, u + 1 + int(off), 1.0))
    return MaxCutInstance(n, edges)


def gen_ba(n: int, m: int, seed: int) -> MaxCutInstance:
    """Barabasi-Albert preferential attachment with unit weights.

    Variant: the seed core is m isolated vertices (no edges). Each new
    vertex u = m..n-1 attaches to m distinct targets drawn uniformly from
    the degree-repeated endpoint list (rejection until distinct), in draw
    order. Total edge count is exactly m * (n - m).
    """
    if m < 1 or m >= n:
        raise InputError("BA parameter m must satisfy 1 <= m < n")
    rng = _rng(seed)
    edges = []
    repeated: list = list(range(m))  # uniform among seed vertices at the first step
    for u in range(m, n):
        targets: list = []
        while len(targets) < m:
            t = repeated[int(rng.integers(len(repeated)))]
            if t not in targets:
                targets.append(t)
        for t in targets:
            edges.append((u, t, 1.0))
        repeated.extend(targets)
        repeated.extend([u] * m)
    return MaxCutInstance(n, edges)


def gen_ws(n: int, degree: int, p: float, seed: int) -> MaxCutInstance:
    """Watts-Strogatz ring rewiring with unit weights.

    The ring connects u to u+j (mod n) for j = 1..degree/2, iterating j in
    the outer loop and u in the inner loop. Each ring edge is rewired with
    one uniform draw (< p); the replacement endpoint is drawn uniformly and
    redrawn while it would create a self-loop or duplicate edge.
    """
    if degree % 2 != 0 or degree < 2 or degree >= n:
        raise InputError("WS ring degree must be even, >= 2, and < n")
    if not 0.0 <= p <= 1.0:
        raise InputError("WS rewiring probability must be in [0, 1]")
    rng = _rng(seed)
    edge_keys = set()
    edges = []
    for j in range(1, degree // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            key = (min(u, v), max(u, v))
            if key in edge_keys:
                continue
            edge_keys.add(key)
            edges.append([u, v])
    for j in range(1, degree // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            key = (min(u, v), max(u, v))
            if key not in edge_keys:
                continue  # already rewired away
            if rng.random() >= p:
                continue
            w = int(rng.integers(n))
            tries = 0
            while w == u or (min(u, w), max(u, w)) in edge_keys:
                w = int(rng.integers(n))
                tries += 1
                if tries > 100 * n:
                    break
            else:
                edge_keys.discard(key)
                edge_keys.add((min(u, w), max(u, w)))
                for e in edges:
                    if (min(e[0], e[1]), max(e[0], e[1])) == key:
                        e[0], e[1] = u, w
                        break
    return MaxCutInstance(n, [(u, v, 1.0) for u, v in edges])


_GRAPH_MODELS = {"er", "ba", "ws"}


def gen_graph(model: str, seed: int, **params) -> MaxCutInstance:
    """Dispatch to the named generator ('er', 'ba', or 'ws')."""
    model = model.lower()
    if model == "er":
        return gen_er(int(params["n"]), float(params["p"]), seed)
    if model == "ba":
        return gen_ba(int(params["n"]), int(params["m"]), seed)
    if model == "ws":
        return gen_ws(int(params["n"]), int(params["degree"]), float(params["p"]), seed)
    raise InputError(f"unknown graph model {model!r}; expected one of {sorted(_GRAPH_MODELS)}")


def gen_gram_video(n: int, p: int, seed: int, scale: float = 1e8,
                   noise: float = 0.25, ridge: float = 0.05) -> GramInstance:
    """Similarity matrix of mutually similar frames (one scene, small jitter).

    Features are a shared unit direction plus small isotropic noise; the
    Gram gets a ridge and a large scale. In this regime log(det+1) inherits
    diminishing returns from log-det to within ~1e-8, so property suites can
    assert submodularity at tight tolerance. Determinants grow with set
    size; at the default scale keep n <= 32 to stay inside float64 range.
    """
    rng = _rng(seed)
    base = rng.normal(size=p)
    base /= np.linalg.norm(base)
    feats = base[None, :] + rng.normal(size=(n, p)) * (noise / math.sqrt(p))
    B = feats @ feats.T
    X = scale * (B + ridge * np.eye(n))
    return GramInstance((X + X.T) / 2.0)


def gen_gram_wishart(n: int, p: int, seed: int, scale: float = 1.0) -> GramInstance:
    """Generic Wishart-style Gram matrix: X = scale * V V^T / p.

    Moderate determinant scale, so the log(det+1) objective is nonnegative
    and non-monotone like the benchmark instances; diminishing returns holds
    only approximately for this kind.
    """
    rng = _rng(seed)
    V = rng.normal(size=(n, p))
    X = scale * (V @ V.T) / p
    return GramInstance((X + X.T) / 2.0)


# ---------------------------------------------------------------------------
# File formats.
# ---------------------------------------------------------------------------


def read_edge_list(path) -> MaxCutInstance:
    """Edge-list file: first line 'n m', then m lines 'u v w' (0-based ids)."""
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise InputError(f"{path}: missing 'n m' header")
    try:
        n, m = int(tokens[0]), int(tokens[1])
        rest = tokens[2:]
        if len(rest) != 3 * m:
            raise InputError(f"{path}: expected {3 * m} edge tokens, found {len(rest)}")
        edges = [(int(rest[3 * i]), int(rest[3 * i + 1]), float(rest[3 * i + 2])) for i in range(m)]
    except ValueError as exc:
        raise InputError(f"{path}: malformed edge list ({exc})") from exc
    return MaxCutInstance(n, edges)


def write_edge_list(inst: MaxCutInstance, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{inst.n} {inst.m}\n")
        for u, v, w in zip(inst.edge_u, inst.edge_v, inst.edge_w):
            fh.write(f"{u} {v} {w:g}\n")


def read_gram_csv(path) -> GramInstance:
    """CSV of n rows x n columns of decimals."""
    try:
        X = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise InputError(f"{path}: malformed gram CSV ({exc})") from exc
    return GramInstance(X)


def read_features_csv(path) -> GramInstance:
    """Feature CSV (n rows x p columns); the Gram matrix is the inner products."""
    try:
        V = np.loadtxt(path, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise InputError(f"{path}: malformed feature CSV ({exc})") from exc
    X = V @ V.T
    return GramInstance((X + X.T) / 2.0)
