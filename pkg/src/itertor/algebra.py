"""Connected graded-commutative algebras over F_p, truncated at a degree cap.

A :class:`GradedAlgebra` is stored as a degree-sorted basis (index 0 is the
unit) and a sparse structure-constant table.  Products whose degree exceeds
the cap are *untracked*: asking for one raises :class:`UntrackedProductError`
instead of silently returning zero.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from math import comb
from typing import Iterable, Mapping, Sequence

from .gfp import Echelon, check_prime

__all__ = [
    "GradedAlgebra",
    "PoincareSeries",
    "AlgebraError",
    "UntrackedProductError",
    "InvariantError",
    "unit_algebra",
    "polynomial",
    "exterior",
    "divided_power",
    "truncated_polynomial",
    "tensor",
    "poincare",
    "series_inverse",
    "convolve",
    "check_invariants",
    "decomposables_dims",
]

Combination = tuple[tuple[int, int], ...]


class AlgebraError(ValueError):
    """Invalid algebra construction (bad parity, mismatched p or cap, ...)."""


class UntrackedProductError(ArithmeticError):
    """A product landed above the degree cap."""


class InvariantError(AssertionError):
    """A structural invariant (unitality, commutativity, ...) failed."""


@dataclass(frozen=True)
class PoincareSeries:
    p: int
    cap: int
    dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.dims) != self.cap + 1:
            raise ValueError(f"series needs {self.cap + 1} entries, got {len(self.dims)}")
        if any(d < 0 for d in self.dims):
            raise ValueError("dimensions must be nonnegative")

    def truncate(self, cap: int) -> "PoincareSeries":
        if cap > self.cap:
            raise ValueError("cannot extend a series beyond its cap")
        return PoincareSeries(self.p, cap, self.dims[: cap + 1])

    def nonzero(self) -> dict[int, int]:
        return {t: d for t, d in enumerate(self.dims) if d}

    def to_json(self) -> dict:
        return {"p": self.p, "cap": self.cap, "dims": list(self.dims)}

    @classmethod
    def from_json(cls, data: Mapping) -> "PoincareSeries":
        return cls(int(data["p"]), int(data["cap"]), tuple(int(d) for d in data["dims"]))


def convolve(a: Sequence[int], b: Sequence[int], cap: int) -> tuple[int, ...]:
    out = [0] * (cap + 1)
    for i, x in enumerate(a[: cap + 1]):
        if x:
            for j, y in enumerate(b[: cap + 1 - i]):
                out[i + j] += x * y
    return tuple(out)


class GradedAlgebra:
    """Connected graded-commutative algebra over F_p truncated at ``cap``.

    ``products`` maps ``(i, j)`` to a tuple of ``(k, coefficient)`` pairs;
    missing tracked pairs are zero.  Equality of basis elements is by index;
    names only carry a construction trace.
    """

    __slots__ = ("p", "cap", "names", "degrees", "_products", "_by_degree")

    def __init__(
        self,
        p: int,
        cap: int,
        names: Sequence[str],
        degrees: Sequence[int],
        products: Mapping[tuple[int, int], Iterable[tuple[int, int]]],
    ):
        self.p = check_prime(p)
        if cap < 0:
            raise AlgebraError("cap must be nonnegative")
        self.cap = cap
        self.names = tuple(names)
        self.degrees = tuple(int(d) for d in degrees)
        if len(self.names) != len(self.degrees):
            raise AlgebraError("names and degrees differ in length")
        if not self.degrees or self.degrees[0] != 0 or 0 in self.degrees[1:]:
            raise AlgebraError("algebra must be connected with the unit at index 0")
        if list(self.degrees) != sorted(self.degrees) or self.degrees[-1] > cap:
            raise AlgebraError("basis must be sorted by degree and lie within the cap")
        by_degree: list[list[int]] = [[] for _ in range(cap + 1)]
        for i, d in enumerate(self.degrees):
            by_degree[d].append(i)
        self._by_degree = tuple(tuple(b) for b in by_degree)
        n = len(self.degrees)
        table: dict[tuple[int, int], Combination] = {}
        for (i, j), combo in products.items():
            if not (0 <= i < n and 0 <= j < n):
                raise AlgebraError(f"product index ({i}, {j}) out of range")
            d = self.degrees[i] + self.degrees[j]
            if d > cap:
                raise AlgebraError(f"product ({i}, {j}) lies above the cap")
            clean: dict[int, int] = {}
            for k, c in combo:
                if self.degrees[k] != d:
                    raise AlgebraError(f"product ({i}, {j}) is not homogeneous")
                c %= self.p
                if c:
                    clean[k] = (clean.get(k, 0) + c) % self.p
            clean = {k: c for k, c in clean.items() if c}
            if clean:
                table[(i, j)] = tuple(sorted(clean.items()))
        # the unit is part of the structure, not of the table
        for i in range(n):
            table[(0, i)] = ((i, 1),)
            table[(i, 0)] = ((i, 1),)
        self._products = table

    # -- basic queries ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.degrees)

    def __repr__(self) -> str:
        return f"GradedAlgebra(p={self.p}, cap={self.cap}, dims={self.series().nonzero()})"

    def basis(self, degree: int) -> tuple[int, ...]:
        if degree < 0 or degree > self.cap:
            return ()
        return self._by_degree[degree]

    @property
    def positive(self) -> tuple[int, ...]:
        return tuple(range(1, len(self.degrees)))

    def mul(self, i: int, j: int) -> Combination:
        if self.degrees[i] + self.degrees[j] > self.cap:
            raise UntrackedProductError(
                f"product of {self.names[i]} and {self.names[j]} has degree "
                f"{self.degrees[i] + self.degrees[j]} > cap {self.cap}"
            )
        return self._products.get((i, j), ())

    def multiply(self, u: Mapping[int, int], v: Mapping[int, int]) -> dict[int, int]:
        out: dict[int, int] = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.mul(i, j):
                    out[k] = (out.get(k, 0) + a * b * c) % self.p
        return {k: c for k, c in out.items() if c}

    def series(self) -> PoincareSeries:
        return PoincareSeries(self.p, self.cap, tuple(len(b) for b in self._by_degree))

    def product_table(self) -> dict[tuple[int, int], Combination]:
        """Nonzero products between positive-degree elements."""
        return {k: v for k, v in self._products.items() if k[0] and k[1]}

    def structurally_equal(self, other: "GradedAlgebra") -> bool:
        return (
            self.p == other.p
            and self.cap == other.cap
            and self.degrees == other.degrees
            and self.product_table() == other.product_table()
        )

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        basis = [[self.names[i] for i in b] for b in self._by_degree]
        mul = [[i, j, [list(kc) for kc in combo]] for (i, j), combo in sorted(self.product_table().items())]
        return {"p": self.p, "cap": self.cap, "dims": list(self.series().dims), "basis": basis, "mul": mul}

    @classmethod
    def from_json(cls, data: Mapping) -> "GradedAlgebra":
        names, degrees = [], []
        for d, group in enumerate(data["basis"]):
            for name in group:
                names.append(name)
                degrees.append(d)
        products = {(int(i), int(j)): [(int(k), int(c)) for k, c in combo] for i, j, combo in data["mul"]}
        alg = cls(int(data["p"]), int(data["cap"]), names, degrees, products)
        if "dims" in data and list(alg.series().dims) != list(data["dims"]):
            raise AlgebraError("dims do not match the basis")
        return alg

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# -- constructors --------------------------------------------------------------


def unit_algebra(p: int, cap: int) -> GradedAlgebra:
    return GradedAlgebra(p, cap, ["1"], [0], {})


def _check_degree(p: int, d: int, *, even: bool, what: str) -> None:
    if d <= 0:
        raise AlgebraError(f"{what} generator needs positive degree, got {d}")
    if even and d % 2:
        raise AlgebraError(f"{what} generator must have even degree, got {d}")


def _monogenic(p: int, d: int, cap: int, height: int | None, coeff, stem: str) -> GradedAlgebra:
    """Algebra with basis g_0 = 1, g_1, ... in degrees k*d and g_i g_j = coeff(i, j) g_{i+j}."""
    top = cap // d
    if height is not None:
        top = min(top, height - 1)
    names = ["1"] + [f"{stem}{k}" for k in range(1, top + 1)]
    products = {}
    for i in range(1, top + 1):
        for j in range(1, top + 1 - i):
            c = coeff(i, j) % p
            if c:
                products[(i, j)] = [(i + j, c)]
    return GradedAlgebra(p, cap, names, [k * d for k in range(top + 1)], products)


def polynomial(p: int, d: int, cap: int) -> GradedAlgebra:
    """Polynomial algebra on one generator of even degree ``d``."""
    p = check_prime(p)
    _check_degree(p, d, even=True, what="polynomial")
    return _monogenic(p, d, cap, None, lambda i, j: 1, "x^")


def exterior(p: int, d: int, cap: int) -> GradedAlgebra:
    """Exterior algebra on one generator; odd degree unless ``p == 2``."""
    p = check_prime(p)
    _check_degree(p, d, even=False, what="exterior")
    if p != 2 and d % 2 == 0:
        raise AlgebraError(f"exterior generator must have odd degree for p={p}, got {d}")
    return _monogenic(p, d, cap, 2, lambda i, j: 1, "e")


def divided_power(p: int, d: int, cap: int) -> GradedAlgebra:
    """Divided power algebra: gamma_i * gamma_j = C(i+j, i) gamma_{i+j}."""
    p = check_prime(p)
    _check_degree(p, d, even=True, what="divided power")
    return _monogenic(p, d, cap, None, lambda i, j: comb(i + j, i), "g")


def truncated_polynomial(p: int, d: int, height: int, cap: int) -> GradedAlgebra:
    """k[x]/(x^height)."""
    p = check_prime(p)
    if height < 2:
        raise AlgebraError("truncation height must be at least 2")
    _check_degree(p, d, even=p != 2, what="truncated polynomial")
    return _monogenic(p, d, cap, height, lambda i, j: 1, "x^")


# -- operations ----------------------------------------------------------------


def tensor(a: GradedAlgebra, b: GradedAlgebra) -> GradedAlgebra:
    """Graded tensor product with the Koszul interchange sign."""
    if a.p != b.p or a.cap != b.cap:
        raise AlgebraError("tensor factors must share p and cap")
    p, cap = a.p, a.cap
    pairs: list[tuple[int, int]] = []
    for total in range(cap + 1):
        for da in range(total + 1):
            for i in a.basis(da):
                for j in b.basis(total - da):
                    pairs.append((i, j))
    index = {pr: n for n, pr in enumerate(pairs)}
    names = [f"({a.names[i]})({b.names[j]})" for i, j in pairs]
    degrees = [a.degrees[i] + b.degrees[j] for i, j in pairs]
    products = {}
    for m, (i, j) in enumerate(pairs):
        if m == 0:
            continue
        for n, (k, l) in enumerate(pairs[1:], start=1):
            if degrees[m] + degrees[n] > cap:
                continue
            ac = a.mul(i, k)
            bc = b.mul(j, l)
            if not ac or not bc:
                continue
            sign = -1 if (b.degrees[j] * a.degrees[k]) % 2 else 1
            combo = [(index[(x, y)], sign * cx * cy) for x, cx in ac for y, cy in bc]
            products[(m, n)] = combo
    return GradedAlgebra(p, cap, names, degrees, products)


def poincare(a: GradedAlgebra) -> PoincareSeries:
    return a.series()


def series_inverse(s: PoincareSeries) -> tuple[int, ...]:
    """Power-series inverse truncated at the cap; entries are signed integers."""
    if s.dims[0] != 1:
        raise ValueError("series must start with 1 to be invertible")
    c = [1] + [0] * s.cap
    for t in range(1, s.cap + 1):
        c[t] = -sum(s.dims[k] * c[t - k] for k in range(1, t + 1))
    return tuple(c)


def decomposables_dims(a: GradedAlgebra) -> tuple[int, ...]:
    """Per degree, the dimension of the span of products of two positive-degree elements."""
    spans = [Echelon(a.p) for _ in range(a.cap + 1)]
    for i in a.positive:
        for j in a.positive:
            d = a.degrees[i] + a.degrees[j]
            if d > a.cap:
                continue
            combo = a.mul(i, j)
            if combo:
                spans[d].add(dict(combo))
    return tuple(len(s) for s in spans)


def _sign(a: GradedAlgebra, i: int, j: int) -> int:
    return -1 if (a.degrees[i] * a.degrees[j]) % 2 else 1


def check_invariants(
    a: GradedAlgebra, *, exhaustive_limit: int = 200, samples: int = 2000, seed: int = 0
) -> None:
    """Raise :class:`InvariantError` unless ``a`` is unital, graded commutative and associative.

    Exhaustive over all tracked pairs and triples when the basis has at
    most ``exhaustive_limit`` elements, otherwise on ``samples`` random
    triples.
    """
    p = a.p
    n = len(a)
    if len(a.basis(0)) != 1:
        raise InvariantError("degree 0 must be spanned by the unit")
    for i in range(n):
        if a.mul(0, i) != ((i, 1),) or a.mul(i, 0) != ((i, 1),):
            raise InvariantError(f"unit fails on {a.names[i]}")
    pos = a.positive
    for i in pos:
        for j in pos:
            if a.degrees[i] + a.degrees[j] > a.cap:
                continue
            lhs = dict(a.mul(i, j))
            rhs = {k: c * _sign(a, i, j) % p for k, c in a.mul(j, i)}
            if lhs != {k: c for k, c in rhs.items() if c}:
                raise InvariantError(f"graded commutativity fails on ({a.names[i]}, {a.names[j]})")

    def assoc(i, j, k):
        left = a.multiply(a.multiply({i: 1}, {j: 1}), {k: 1})
        right = a.multiply({i: 1}, a.multiply({j: 1}, {k: 1}))
        if left != right:
            raise InvariantError(f"associativity fails on ({a.names[i]}, {a.names[j]}, {a.names[k]})")

    if n <= exhaustive_limit:
        for i, j in itertools.product(pos, repeat=2):
            dij = a.degrees[i] + a.degrees[j]
            if dij > a.cap:
                continue
            for k in pos:
                if dij + a.degrees[k] <= a.cap:
                    assoc(i, j, k)
    else:
        rng = random.Random(seed)
        triples = 0
        attempts = 0
        while triples < samples and attempts < 50 * samples:
            attempts += 1
            i, j, k = (rng.choice(pos) for _ in range(3))
            if a.degrees[i] + a.degrees[j] + a.degrees[k] <= a.cap:
                assoc(i, j, k)
                triples += 1
