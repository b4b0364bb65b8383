"""Closed-form predictor of tower Poincare series.

Algebras are modelled as formal tensor products of elementary pieces and
Tor is applied piecewise:

* Tor(polynomial(d))   = exterior(d + 1)
* Tor(exterior(d))     = divided(d + 1)
* Tor(truncated(d, h)) = exterior(d + 1) (x) divided(h*d + 2)

Before Tor is taken, divided(d) is rewritten in characteristic p as
truncated(d, p) (x) truncated(d p, p) (x) truncated(d p^2, p) (x) ...,
so only the three rules above are ever applied.  Nothing here touches the
bar complex; it exists to cross-check it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .algebra import PoincareSeries, convolve
from .gfp import check_prime

__all__ = [
    "Piece",
    "PieceExpression",
    "TOR_RULES",
    "expand_divided",
    "tor_step",
    "predict_series",
    "piece_series",
]

KINDS = ("poly", "ext", "div", "trunc")


@dataclass(frozen=True, order=True)
class Piece:
    kind: str
    degree: int
    height: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown piece kind {self.kind!r}")
        if self.degree <= 0:
            raise ValueError("piece degree must be positive")
        if self.kind == "trunc" and self.height < 2:
            raise ValueError("truncated piece needs height >= 2")
        if self.kind != "trunc" and self.height:
            raise ValueError("only truncated pieces carry a height")

    def __str__(self) -> str:
        if self.kind == "trunc":
            return f"trunc({self.degree},{self.height})"
        return f"{self.kind}({self.degree})"


def piece_series(piece: Piece, cap: int) -> tuple[int, ...]:
    out = [0] * (cap + 1)
    d = piece.degree
    if piece.kind == "ext":
        top = 1
    elif piece.kind == "trunc":
        top = piece.height - 1
    else:
        top = cap // d
    for k in range(top + 1):
        if k * d <= cap:
            out[k * d] = 1
    return tuple(out)


@dataclass(frozen=True)
class PieceExpression:
    p: int
    pieces: tuple[Piece, ...]

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "pieces", tuple(sorted(self.pieces)))
        for pc in self.pieces:
            if self.p != 2 and pc.kind in ("poly", "div", "trunc") and pc.degree % 2:
                raise ValueError(f"{pc} needs even degree for p={self.p}")
            if self.p != 2 and pc.kind == "ext" and pc.degree % 2 == 0:
                raise ValueError(f"{pc} needs odd degree for p={self.p}")

    def series(self, cap: int) -> PoincareSeries:
        dims: tuple[int, ...] = (1,) + (0,) * cap
        for pc in self.pieces:
            if pc.degree <= cap:
                dims = convolve(dims, piece_series(pc, cap), cap)
        return PoincareSeries(self.p, cap, dims)

    def __str__(self) -> str:
        return " (x) ".join(str(pc) for pc in self.pieces) or "k"


Rule = Callable[[Piece, int], list[Piece]]

TOR_RULES: Mapping[str, Rule] = {
    "poly": lambda pc, p: [Piece("ext", pc.degree + 1)],
    "ext": lambda pc, p: [Piece("div", pc.degree + 1)],
    "trunc": lambda pc, p: [Piece("ext", pc.degree + 1), Piece("div", pc.height * pc.degree + 2)],
}


def expand_divided(e: PieceExpression, cap: int) -> PieceExpression:
    """Rewrite every divided piece as its height-p truncated factors up to ``cap``."""
    out = []
    for pc in e.pieces:
        if pc.kind != "div":
            out.append(pc)
            continue
        d = pc.degree
        while d <= cap:
            out.append(Piece("trunc", d, e.p))
            d *= e.p
    return PieceExpression(e.p, tuple(out))


def tor_step(e: PieceExpression, cap: int, rules: Mapping[str, Rule] = TOR_RULES) -> PieceExpression:
    """Piece expression of Tor^e(k, k); pieces above ``cap`` are dropped."""
    out = []
    for pc in expand_divided(e, cap).pieces:
        if pc.degree > cap:
            continue
        out.extend(q for q in rules[pc.kind](pc, e.p) if q.degree <= cap)
    return PieceExpression(e.p, tuple(out))


def start_expression(p: int, kind: str, degree: int) -> PieceExpression:
    if kind not in ("poly", "ext"):
        raise ValueError(f"tower start must be 'poly' or 'ext', got {kind!r}")
    return PieceExpression(p, (Piece(kind, degree),))


def predict_expressions(spec, rules: Mapping[str, Rule] = TOR_RULES) -> list[PieceExpression]:
    e = start_expression(spec.p, spec.start_kind, spec.start_degree)
    stages = [e]
    for _ in range(spec.iterations):
        e = tor_step(e, spec.cap, rules)
        stages.append(e)
    return stages


def predict_series(spec, rules: Mapping[str, Rule] = TOR_RULES) -> list[PoincareSeries]:
    """Stage-by-stage series for a :class:`~itertor.tower.TowerSpec`."""
    return [e.series(spec.cap) for e in predict_expressions(spec, rules)]
