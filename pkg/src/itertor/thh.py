"""Higher THH with residue-field coefficients as products of two Tor towers.

For the integers, THH^[n]_*(Z; F_p) is B^n(x) (x) B^(n+1)(y) with
|x| = 2p and |y| = 2p - 2.  For a number ring completed at a prime P over p
the same shape holds with |x| = 2, |y| = 0 when P is ramified and with the
integer degrees when it is not.  A degree-0 polynomial generator makes the
bar complex infinite, so its tower is entered at the second stage: the
exterior algebra on a degree-1 class.

All towers run over F_p; dimensions over F_q = A/P coincide because every
structure constant lies in the prime field.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .algebra import PoincareSeries, convolve
from .bar import Limits
from .fpx import derivative, factor, format_polynomial, poly_divmod, poly_gcd, reduce_mod
from .gfp import check_prime
from .oracle import predict_series
from .tower import TowerSpec, tower_series

__all__ = [
    "ThhResult",
    "TowerCache",
    "RamificationReport",
    "PrimeFactor",
    "thh_z",
    "thh_local",
    "z_towers",
    "local_towers",
    "ramification",
    "hh1_dimension",
    "residue_field_size",
]

CITE_Z = "THH^[n]_*(Z; F_p) = B^n(x) (x) B^(n+1)(y), |x| = 2p, |y| = 2p-2"
CITE_RAMIFIED = "THH^[n]_*(A_P; A/P) = B^n(x_P) (x) B^(n+1)(y_P) over F_q, |x_P| = 2, |y_P| = 0 (P ramified)"
CITE_UNRAMIFIED = "THH^[n]_*(A_P; A/P) = B^n(x_P) (x) B^(n+1)(y_P) over F_q, |x_P| = 2p, |y_P| = 2p-2 (P unramified)"

P_MAXIMAL_CAVEAT = (
    "verdicts assume Z[x]/(f) is p-maximal (equal to the ring of integers locally at p); "
    "supply a p-maximal defining polynomial"
)


class TowerCache:
    """Memoized tower series: lock-free reads, one writer per key, idempotent fill."""

    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()
        self._key_locks: dict = {}

    def get(self, key, compute: Callable[[], list[PoincareSeries]]) -> list[PoincareSeries]:
        try:
            return self._data[key]
        except KeyError:
            pass
        with self._lock:
            key_lock = self._key_locks.setdefault(key, threading.Lock())
        with key_lock:
            if key not in self._data:
                self._data[key] = compute()
            return self._data[key]

    def clear(self) -> None:
        with self._lock:
            self._data.clear()
            self._key_locks.clear()

    def __len__(self) -> int:
        return len(self._data)


DEFAULT_CACHE = TowerCache()


@dataclass(frozen=True)
class ThhResult:
    query: dict
    citation: str
    series: PoincareSeries
    x_stage: PoincareSeries
    y_stage: PoincareSeries
    x_tower: TowerSpec = field(repr=False)
    y_tower: TowerSpec = field(repr=False)

    def to_json(self) -> dict:
        return {
            "query": self.query,
            "citation": self.citation,
            "series": [list(self.series.dims)],
            "x_stage": list(self.x_stage.dims),
            "y_stage": list(self.y_stage.dims),
        }


def z_towers(n: int, p: int, cap: int) -> tuple[TowerSpec, TowerSpec]:
    """Tower specs whose last stages are B^n(x_2p) and B^(n+1)(y_(2p-2))."""
    if n < 1:
        raise ValueError("order n must be at least 1")
    return TowerSpec(p, "poly", 2 * p, n - 1, cap), TowerSpec(p, "poly", 2 * p - 2, n, cap)


def local_towers(n: int, p: int, cap: int, ramified: bool) -> tuple[TowerSpec, TowerSpec]:
    if not ramified:
        return z_towers(n, p, cap)
    if n < 1:
        raise ValueError("order n must be at least 1")
    # B^(n+1)(y_0) is reached from B^2(y_0) = exterior on degree 1 in n - 1 steps
    return TowerSpec(p, "poly", 2, n - 1, cap), TowerSpec(p, "ext", 1, n - 1, cap)


def _stage(spec: TowerSpec, method: str, limits: Limits | None, cache: TowerCache | None) -> PoincareSeries:
    if method == "oracle":
        return predict_series(spec)[-1]
    if method != "engine":
        raise ValueError(f"method must be 'engine' or 'oracle', got {method!r}")
    if cache is None:
        return tower_series(spec, limits=limits)[-1]
    return cache.get((spec, limits), lambda: tower_series(spec, limits=limits))[-1]


def _combine(query, citation, xs, ys, method, limits, cache) -> ThhResult:
    x = _stage(xs, method, limits, cache)
    y = _stage(ys, method, limits, cache)
    dims = convolve(x.dims, y.dims, xs.cap)
    return ThhResult(query, citation, PoincareSeries(x.p, xs.cap, dims), x, y, xs, ys)


def thh_z(
    n: int,
    p: int,
    cap: int,
    *,
    method: str = "engine",
    limits: Limits | None = None,
    cache: TowerCache | None = DEFAULT_CACHE,
) -> ThhResult:
    """Poincare series of THH^[n]_*(Z; F_p) through degree ``cap``."""
    p = check_prime(p)
    xs, ys = z_towers(n, p, cap)
    query = {"ring": "Z", "n": n, "p": p, "cap": cap}
    return _combine(query, CITE_Z, xs, ys, method, limits, cache)


def residue_field_size(p: int, q: int) -> int:
    """Return the residue degree f with q = p^f, rejecting q that are not powers of p."""
    if q < p:
        raise ValueError(f"q={q} is not a power of p={p}")
    f, r = 0, q
    while r % p == 0:
        r //= p
        f += 1
    if r != 1:
        raise ValueError(f"q={q} is not a power of p={p}")
    return f


def thh_local(
    n: int,
    ramified: bool,
    p: int,
    q: int,
    cap: int,
    *,
    method: str = "engine",
    limits: Limits | None = None,
    cache: TowerCache | None = DEFAULT_CACHE,
) -> ThhResult:
    """Series of THH^[n]_*(A_P; A/P) as F_q-dimensions, A/P = F_q."""
    p = check_prime(p)
    residue_field_size(p, q)
    xs, ys = local_towers(n, p, cap, ramified)
    query = {"ring": "local", "ramified": bool(ramified), "n": n, "p": p, "q": q, "cap": cap}
    return _combine(query, CITE_RAMIFIED if ramified else CITE_UNRAMIFIED, xs, ys, method, limits, cache)


# -- ramification -------------------------------------------------------------


@dataclass(frozen=True)
class PrimeFactor:
    factor: tuple[int, ...]
    multiplicity: int
    ramified: bool

    @property
    def residue_degree(self) -> int:
        return len(self.factor) - 1

    def to_json(self, p: int) -> dict:
        return {
            "factor": format_polynomial(list(self.factor)),
            "multiplicity": self.multiplicity,
            "ramified": self.ramified,
            "q": p**self.residue_degree,
        }


@dataclass(frozen=True)
class RamificationReport:
    f: tuple[int, ...]
    p: int
    factors: tuple[PrimeFactor, ...]
    caveat: str = P_MAXIMAL_CAVEAT

    def to_json(self) -> dict:
        return {
            "f": format_polynomial(list(self.f)),
            "p": self.p,
            "factors": [pf.to_json(self.p) for pf in self.factors],
            "caveat": self.caveat,
        }


def ramification(f: Sequence[int], p: int) -> RamificationReport:
    """Factor ``f mod p`` and mark each prime above p ramified or not.

    A factor is ramified iff its multiplicity is at least 2, which for an
    irreducible factor is the same as dividing gcd(f mod p, f' mod p).  Both
    views are computed and must agree.
    """
    p = check_prime(p)
    f = [int(c) for c in f]
    while f and f[-1] == 0:
        f.pop()
    if len(f) < 2:
        raise ValueError("f must be nonconstant")
    if f[-1] != 1:
        raise ValueError(f"f must be monic, leading coefficient is {f[-1]}")
    fb = reduce_mod(f, p)
    g = poly_gcd(fb, derivative(fb, p), p)
    factors = []
    for h, e in factor(fb, p):
        divides_gcd = not poly_divmod(g, h, p)[1]
        if divides_gcd != (e >= 2):
            raise AssertionError(f"multiplicity and derivative tests disagree on {format_polynomial(h)}")
        factors.append(PrimeFactor(tuple(h), e, e >= 2))
    return RamificationReport(tuple(f), p, tuple(factors))


def hh1_dimension(f: Sequence[int], p: int, index: int) -> int:
    """F_q-dimension of HH_1 of the completion at the selected prime, with B/P coefficients."""
    report = ramification(f, p)
    if not 0 <= index < len(report.factors):
        raise IndexError(f"prime index {index} out of range (0..{len(report.factors) - 1})")
    return 1 if report.factors[index].ramified else 0
