"""Reduced bar complex B(k, A, k) of a connected graded-commutative algebra.

A word ``[a_1|...|a_s]`` is a tuple of positive-degree basis indices of
``A``.  It sits in bidegree ``(s, t)`` with ``t = sum |a_i|``; its total
degree is ``s + t``.

Sign convention: letter ``a`` carries shifted degree ``|a| + 1``.

* differential: ``d[a_1|...|a_s] = sum_i (-1)^(e_1 + ... + e_i) [..|a_i a_{i+1}|..]``
  where ``e_j = |a_j| + 1``;
* shuffle product: signed sum over shuffles, each transposition of letters
  ``a``, ``b`` contributing ``(-1)^(e_a * e_b)``.

With these, ``d^2 = 0`` and ``d`` is a derivation of the shuffle product
with respect to total degree.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Mapping

from .algebra import GradedAlgebra, UntrackedProductError
from .gfp import SparseFpMatrix

__all__ = ["BarComplex", "ResourceLimitError", "Limits", "build_bar", "shuffle"]

Word = tuple[int, ...]
Chain = dict[Word, int]


class ResourceLimitError(RuntimeError):
    """A configured size limit was exceeded.  ``stage`` is filled in by the tower."""

    def __init__(self, message: str, *, bidegree: tuple[int, int] | None = None, stage: int | None = None):
        super().__init__(message)
        self.bidegree = bidegree
        self.stage = stage

    def __str__(self) -> str:
        parts = [super().__str__()]
        if self.stage is not None:
            parts.append(f"stage {self.stage}")
        if self.bidegree is not None:
            parts.append(f"bidegree {self.bidegree}")
        return "; ".join(parts)


@dataclass(frozen=True)
class Limits:
    max_words: int = 200_000
    max_basis: int = 20_000


class BarComplex:
    """Lazily built reduced bar complex of ``base`` up to total degree ``cap``.

    Word lists and differential matrices are computed per bidegree on first
    request and cached.  ``order_seed`` permutes the word order inside each
    bidegree (used to check that homology does not depend on it).
    """

    def __init__(self, base: GradedAlgebra, cap: int, *, limits: Limits | None = None, order_seed: int | None = None):
        if cap < 0:
            raise ValueError("cap must be nonnegative")
        self.base = base
        self.p = base.p
        self.cap = cap
        self.limits = limits or Limits()
        self.order_seed = order_seed
        pos = base.positive
        self._letters = pos
        self._min_degree = min((base.degrees[i] for i in pos), default=None)
        self._parity = tuple((d + 1) % 2 for d in base.degrees)
        self._raw_cache: dict[tuple[int, int], tuple[Word, ...]] = {}
        self._words: dict[tuple[int, int], tuple[Word, ...]] = {}
        self._index: dict[tuple[int, int], dict[Word, int]] = {}
        self._diff: dict[tuple[int, int], SparseFpMatrix] = {}

    # -- words -------------------------------------------------------------------

    def bidegrees(self):
        """All ``(s, t)`` with ``s + t <= cap`` that carry words and a defined differential.

        The cap may exceed the base algebra's cap, but a word of internal
        degree ``t`` can only be differentiated when ``t <= base.cap``.
        """
        for total in range(self.cap + 1):
            for s in range(total + 1):
                t = total - s
                if t <= self.base.cap and self.words(s, t):
                    yield (s, t)

    def _enumerate(self, s: int, t: int) -> list[Word]:
        if s == 0:
            return [()] if t == 0 else []
        md = self._min_degree
        if md is None or t < s * md:
            return []
        deg = self.base.degrees
        out: list[Word] = []
        for a in self._letters:
            d = deg[a]
            if d > t - (s - 1) * md:
                break
            for w in self._raw(s - 1, t - d):
                out.append((a,) + w)
        return out

    def _raw(self, s: int, t: int) -> tuple[Word, ...]:
        cached = self._raw_cache.get((s, t))
        if cached is not None:
            return cached
        words = self._enumerate(s, t)
        if len(words) > self.limits.max_words:
            raise ResourceLimitError(
                f"{len(words)} bar words exceed max_words={self.limits.max_words}", bidegree=(s, t)
            )
        self._raw_cache[(s, t)] = words = tuple(words)
        return words

    def words(self, s: int, t: int) -> tuple[Word, ...]:
        key = (s, t)
        if key not in self._words:
            if s < 0 or t < 0 or s + t > self.cap:
                return ()
            words = self._raw(s, t)
            if self.order_seed is not None:
                words = list(words)
                random.Random(f"{self.order_seed}:{s}:{t}").shuffle(words)
                words = tuple(words)
            self._words[key] = words
            self._index[key] = {w: i for i, w in enumerate(words)}
        return self._words[key]

    def index(self, s: int, t: int) -> dict[Word, int]:
        self.words(s, t)
        return self._index.get((s, t), {})

    def total_degree(self, word: Word) -> int:
        return len(word) + sum(self.base.degrees[a] for a in word)

    def bidegree(self, word: Word) -> tuple[int, int]:
        return len(word), sum(self.base.degrees[a] for a in word)

    # -- differential --------------------------------------------------------------

    def d_word(self, word: Word) -> Chain:
        p = self.p
        base = self.base
        deg = base.degrees
        out: Chain = {}
        shifted = 0
        for i in range(len(word) - 1):
            shifted += deg[word[i]] + 1
            combo = base.mul(word[i], word[i + 1])
            if not combo:
                continue
            sign = -1 if shifted % 2 else 1
            head, tail = word[:i], word[i + 2 :]
            for k, c in combo:
                w = head + (k,) + tail
                out[w] = (out.get(w, 0) + sign * c) % p
        return {w: c for w, c in out.items() if c}

    def d_chain(self, chain: Mapping[Word, int]) -> Chain:
        p = self.p
        out: Chain = {}
        for w, c in chain.items():
            for v, x in self.d_word(w).items():
                out[v] = (out.get(v, 0) + c * x) % p
        return {w: c for w, c in out.items() if c}

    def differential(self, s: int, t: int) -> SparseFpMatrix:
        """Matrix of ``d: (s, t) -> (s - 1, t)`` in the word bases."""
        key = (s, t)
        if key not in self._diff:
            if t > self.base.cap:
                raise UntrackedProductError(f"internal degree {t} exceeds the base cap {self.base.cap}")
            src = self.words(s, t)
            if s >= 1:
                tgt_index = self.index(s - 1, t)
                rows = len(self.words(s - 1, t))
            else:
                tgt_index, rows = {}, 0
            cols = []
            for w in src:
                cols.append({tgt_index[v]: c for v, c in self.d_word(w).items()})
            self._diff[key] = SparseFpMatrix(rows, cols, self.p)
        return self._diff[key]

    # -- shuffle -------------------------------------------------------------------

    def shuffle(self, w1: Word, w2: Word) -> Chain:
        if self.total_degree(w1) + self.total_degree(w2) > self.cap:
            raise UntrackedProductError("shuffle product lands above the bar complex cap")
        return _shuffle(w1, w2, self._parity, self.p)

    def shuffle_chains(self, u: Mapping[Word, int], v: Mapping[Word, int]) -> Chain:
        p = self.p
        out: Chain = {}
        for w1, a in u.items():
            for w2, b in v.items():
                for w, c in self.shuffle(w1, w2).items():
                    out[w] = (out.get(w, 0) + a * b * c) % p
        return {w: c for w, c in out.items() if c}

    # -- debug dump ------------------------------------------------------------------

    def dump_bidegree(self, s: int, t: int) -> dict:
        names = self.base.names
        m = self.differential(s, t)
        return {
            "bidegree": [s, t],
            "words": [[names[a] for a in w] for w in self.words(s, t)],
            "target_words": [[names[a] for a in w] for w in self.words(s - 1, t)] if s >= 1 else [],
            "differential": [[i, j, x] for j, col in enumerate(m.columns) for i, x in sorted(col.items())],
        }


def _shuffle(w1: Word, w2: Word, parity: tuple[int, ...], p: int) -> Chain:
    s1, s2 = len(w1), len(w2)
    if s1 == 0:
        return {w2: 1}
    if s2 == 0:
        return {w1: 1}
    n = s1 + s2
    odd1 = [parity[a] for a in w1]
    odd2 = [parity[b] for b in w2]
    out: Chain = {}
    total_odd1 = sum(odd1)
    for positions in itertools.combinations(range(n), s1):
        word = [0] * n
        # an odd letter of w2 moved in front of an odd letter of w1 flips the sign
        exponent = 0
        i = j = 0
        remaining_odd1 = total_odd1
        for slot in range(n):
            if i < s1 and positions[i] == slot:
                word[slot] = w1[i]
                remaining_odd1 -= odd1[i]
                i += 1
            else:
                word[slot] = w2[j]
                if odd2[j]:
                    exponent += remaining_odd1
                j += 1
        w = tuple(word)
        c = p - 1 if exponent % 2 else 1
        out[w] = (out.get(w, 0) + c) % p
    return {w: c for w, c in out.items() if c}


def shuffle(bar: BarComplex, w1: Word, w2: Word) -> Chain:
    return bar.shuffle(w1, w2)


def build_bar(a: GradedAlgebra, cap: int, *, limits: Limits | None = None, order_seed: int | None = None) -> BarComplex:
    """Reduced bar complex of ``a`` through total degree ``cap``.

    ``cap`` may exceed ``a.cap`` by one: every word of total degree
    ``a.cap + 1`` has internal degree at most ``a.cap``, so all products
    it needs are tracked.  Larger caps are allowed but a differential that
    needs an untracked product raises.
    """
    if len(a.basis(0)) != 1:
        raise ValueError("bar construction needs a connected algebra")
    return BarComplex(a, cap, limits=limits, order_seed=order_seed)
