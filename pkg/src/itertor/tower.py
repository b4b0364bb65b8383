"""Iterated Tor towers B^1 = start, B^(k+1) = Tor^(B^k)(k, k)."""
from __future__ import annotations

import re
from dataclasses import dataclass

from .algebra import GradedAlgebra, PoincareSeries, check_invariants, exterior, polynomial
from .bar import Limits, ResourceLimitError
from .gfp import check_prime
from .tor import TorAlgebra, tor

__all__ = ["TowerSpec", "TowerResult", "run_tower", "run_tower_full", "tower_series", "parse_start"]


@dataclass(frozen=True)
class TowerSpec:
    """``iterations`` Tor steps applied to the start algebra, all truncated at ``cap``.

    The start is ``("poly", d)`` with d >= 2 even, or ``("ext", d)`` with
    d >= 1 (odd unless p = 2).  An exterior start on a degree-1 class is
    how the tower of a degree-0 polynomial generator is entered at its
    second stage.
    """

    p: int
    start_kind: str
    start_degree: int
    iterations: int
    cap: int

    def __post_init__(self):
        check_prime(self.p)
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")
        if self.cap < 0:
            raise ValueError("cap must be nonnegative")
        if self.start_kind == "poly":
            if self.start_degree < 2 or self.start_degree % 2:
                raise ValueError(f"polynomial start needs an even degree >= 2, got {self.start_degree}")
        elif self.start_kind == "ext":
            if self.start_degree < 1:
                raise ValueError("exterior start needs a positive degree")
            if self.p != 2 and self.start_degree % 2 == 0:
                raise ValueError(f"exterior start needs an odd degree for p={self.p}, got {self.start_degree}")
        else:
            raise ValueError(f"start must be 'poly' or 'ext', got {self.start_kind!r}")

    @property
    def start(self) -> str:
        return f"{self.start_kind}:{self.start_degree}"

    def start_algebra(self) -> GradedAlgebra:
        if self.start_kind == "poly":
            return polynomial(self.p, self.start_degree, self.cap)
        return exterior(self.p, self.start_degree, self.cap)

    def with_cap(self, cap: int) -> "TowerSpec":
        return TowerSpec(self.p, self.start_kind, self.start_degree, self.iterations, cap)

    def to_json(self) -> dict:
        return {"p": self.p, "start": self.start, "iterations": self.iterations, "cap": self.cap}


_START = re.compile(r"^(poly|ext):(\d+)$")


def parse_start(text: str) -> tuple[str, int]:
    m = _START.match(text.strip())
    if not m:
        raise ValueError(f"start must look like 'poly:<d>' or 'ext:<d>', got {text!r}")
    return m.group(1), int(m.group(2))


@dataclass(frozen=True)
class TowerResult:
    spec: TowerSpec
    stages: tuple[GradedAlgebra, ...]
    tors: tuple[TorAlgebra, ...]

    def series(self) -> list[PoincareSeries]:
        return [a.series() for a in self.stages]


def run_tower_full(
    spec: TowerSpec,
    *,
    limits: Limits | None = None,
    order_seed: int | None = None,
    check: bool = False,
    full_columns: bool = False,
) -> TowerResult:
    """Run the tower keeping every intermediate :class:`TorAlgebra`."""
    stages = [spec.start_algebra()]
    tors = []
    if check:
        check_invariants(stages[0])
    for k in range(spec.iterations):
        try:
            t = tor(stages[-1], spec.cap, limits=limits, order_seed=order_seed, full_columns=full_columns)
        except ResourceLimitError as exc:
            exc.stage = k + 2
            raise
        tors.append(t)
        stages.append(t.total)
        if check:
            check_invariants(t.total)
    return TowerResult(spec, tuple(stages), tuple(tors))


def run_tower(spec: TowerSpec, *, limits: Limits | None = None, order_seed: int | None = None, check: bool = False) -> list[GradedAlgebra]:
    """Stages B^1 ... B^(iterations + 1) truncated at ``spec.cap``."""
    return list(run_tower_full(spec, limits=limits, order_seed=order_seed, check=check).stages)


def tower_series(spec: TowerSpec, *, limits: Limits | None = None) -> list[PoincareSeries]:
    return [a.series() for a in run_tower(spec, limits=limits)]
