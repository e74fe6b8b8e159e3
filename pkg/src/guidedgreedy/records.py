"""Per-run result record shared by the pipelines and the benchmark runner."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

CSV_HEADER = "algorithm,n,k,eps,t,seed,value,value_queries,independence_calls,wall_ms"


@dataclass
class TrialRecord:
    """One algorithm run: identity, parameters, and the two reported metrics."""

    algorithm: str
    n: int
    k: int
    eps: Optional[float]
    t: Optional[float]
    seed: Optional[int]
    value: float
    value_queries: int
    independence_calls: int
    wall_ms: float = 0.0
    members: Tuple[int, ...] = field(default_factory=tuple)

    def csv_row(self) -> list:
        fmt = lambda x: "" if x is None else (repr(x) if isinstance(x, float) else str(x))
        return [
            self.algorithm, str(self.n), str(self.k), fmt(self.eps), fmt(self.t),
            fmt(self.seed), repr(float(self.value)), str(self.value_queries),
            str(self.independence_calls), f"{self.wall_ms:.3f}",
        ]
