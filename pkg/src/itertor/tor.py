"""Tor^A(k, k) as the homology of the reduced bar complex, with shuffle product.

Homology is computed per internal degree ``t`` as the column
``... -> C_{s+1,t} -> C_{s,t} -> C_{s-1,t} -> ...``.  Ranks decide the
dimensions; cycle representatives are only extracted where homology is
nonzero.  The induced product is obtained by shuffling representatives and
reducing the result modulo boundaries onto the chosen representatives.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import GradedAlgebra, InvariantError, PoincareSeries, series_inverse
from .bar import BarComplex, Chain, Limits, ResourceLimitError, build_bar
from .gfp import Echelon, NotInSpanError, sparse_kernel

__all__ = ["TorAlgebra", "tor", "tor_as_algebra"]


@dataclass(frozen=True)
class TorAlgebra:
    """Bigraded Tor with its total-degree algebra.

    ``bidims`` holds every computed bidegree (zeros included).  Homology in
    total degree above ``cap`` is only present when the computation was run
    with ``full_columns``; ``complete_through`` is the largest internal
    degree whose whole column was computed.
    """

    base: GradedAlgebra
    cap: int
    bidims: dict[tuple[int, int], int]
    reps: dict[tuple[int, int], tuple[Chain, ...]]
    total: GradedAlgebra
    complete_through: int
    bar: BarComplex = field(repr=False, compare=False)

    def series(self) -> PoincareSeries:
        return self.total.series()

    def dim(self, s: int, t: int) -> int:
        return self.bidims.get((s, t), 0)

    def euler_characteristic(self, t: int) -> int:
        return sum((-1) ** s * d for (s, u), d in self.bidims.items() if u == t)

    def euler_defects(self) -> list[int]:
        """Internal degrees ``t`` (with complete columns) where the Euler identity fails."""
        expected = series_inverse(self.base.series())
        return [t for t in range(self.complete_through + 1) if self.euler_characteristic(t) != expected[t]]

    def bidims_json(self) -> list[list[int]]:
        return [[s, t, d] for (s, t), d in sorted(self.bidims.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0])) if d]

    def to_json(self) -> dict:
        return {"bidims": self.bidims_json(), "series": list(self.series().dims)}


def _complete_through(cap: int, min_degree: int | None) -> int:
    if min_degree is None:
        return cap
    t = cap
    while t > 0 and t + t // min_degree > cap:
        t -= 1
    return t


def tor(
    a: GradedAlgebra,
    cap: int | None = None,
    *,
    limits: Limits | None = None,
    order_seed: int | None = None,
    full_columns: bool = False,
) -> TorAlgebra:
    """Compute Tor^a(k, k) through total degree ``cap`` with its algebra structure.

    With ``full_columns`` the bidimensions of every internal degree
    ``t <= cap`` are computed for all homological degrees (ranks only
    above the cap), which makes the Euler identity checkable for every
    ``t <= cap``.
    """
    if cap is None:
        cap = a.cap
    if cap < 0:
        raise ValueError("cap must be nonnegative")
    if cap > a.cap:
        raise ValueError(f"cap {cap} exceeds the algebra's cap {a.cap}")
    limits = limits or Limits()
    p = a.p
    md = min((a.degrees[i] for i in a.positive), default=None)
    extra = cap // md if (full_columns and md) else 0
    bar = build_bar(a, cap + 1 + extra, limits=limits, order_seed=order_seed)

    bidims: dict[tuple[int, int], int] = {(0, 0): 1}
    reps: dict[tuple[int, int], tuple[Chain, ...]] = {(0, 0): ({(): 1},)}
    solvers: dict[tuple[int, int], Echelon] = {}

    for t in range(1, cap + 1 if md else 1):
        s_top = t // md if full_columns else min(cap - t, t // md)
        if s_top < 1:
            continue
        ranks = {}
        images: dict[int, Echelon] = {}
        for s in range(1, s_top + 2):
            ech = Echelon(p)
            for col in bar.differential(s, t).columns:
                ech.add(col)
            ranks[s] = len(ech)
            images[s - 1] = ech
        for s in range(1, s_top + 1):
            n = len(bar.words(s, t))
            h = n - ranks[s] - ranks[s + 1]
            if h < 0:
                raise InvariantError(f"negative homology dimension at ({s}, {t})")
            bidims[(s, t)] = h
            if h and s + t <= cap:
                solver = images[s]
                found: list[Chain] = []
                words = bar.words(s, t)
                for z in sparse_kernel(bar.differential(s, t).columns, p):
                    if solver.add(z, {len(found): 1}):
                        found.append({words[k]: c for k, c in sorted(z.items())})
                        if len(found) == h:
                            break
                if len(found) != h:
                    raise InvariantError(f"found {len(found)} of {h} cycle representatives at ({s}, {t})")
                reps[(s, t)] = tuple(found)
                solvers[(s, t)] = solver
            images.pop(s, None)

    total = _total_algebra(a, cap, bar, bidims, reps, solvers, limits)
    return TorAlgebra(
        base=a,
        cap=cap,
        bidims=bidims,
        reps=reps,
        total=total,
        complete_through=cap if full_columns else _complete_through(cap, md),
        bar=bar,
    )


def _total_algebra(a, cap, bar, bidims, reps, solvers, limits) -> GradedAlgebra:
    p = a.p
    order: list[tuple[int, int, int]] = []
    for u in range(cap + 1):
        for s in range(u + 1):
            for k in range(len(reps.get((s, u - s), ()))):
                order.append((s, u - s, k))
    if len(order) > limits.max_basis:
        raise ResourceLimitError(f"Tor basis of size {len(order)} exceeds max_basis={limits.max_basis}")
    index = {key: n for n, key in enumerate(order)}
    names = []
    for s, t, k in order:
        many = len(reps[(s, t)]) > 1
        names.append("1" if s == 0 else (f"[{s},{t}]#{k}" if many else f"[{s},{t}]"))
    degrees = [s + t for s, t, _ in order]

    products: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for m, (s1, t1, k1) in enumerate(order):
        if m == 0:
            continue
        u1 = s1 + t1
        for n, (s2, t2, k2) in enumerate(order):
            if n == 0:
                continue
            if u1 + s2 + t2 > cap:
                break
            target = (s1 + s2, t1 + t2)
            if not bidims.get(target):
                continue
            chain = bar.shuffle_chains(reps[(s1, t1)][k1], reps[(s2, t2)][k2])
            if not chain:
                continue
            word_index = bar.index(*target)
            vec = {word_index[w]: c for w, c in chain.items()}
            try:
                coeffs = solvers[target].solve(vec)
            except NotInSpanError as exc:
                raise InvariantError(f"shuffle product at {target} is not a cycle") from exc
            combo = [(index[(target[0], target[1], k)], c) for k, c in sorted(coeffs.items())]
            if combo:
                products[(m, n)] = combo
    return GradedAlgebra(p, cap, names, degrees, products)


def tor_as_algebra(t: TorAlgebra) -> GradedAlgebra:
    return t.total
