"""Univariate polynomials over Z and F_p: parsing, gcd, factorization.

Polynomials are lists of coefficients, lowest degree first, without
trailing zeros (the zero polynomial is ``[]``).
"""
from __future__ import annotations

import random
import re

__all__ = [
    "PolynomialSyntaxError",
    "parse_polynomial",
    "format_polynomial",
    "reduce_mod",
    "derivative",
    "poly_divmod",
    "poly_gcd",
    "factor",
]

Poly = list[int]


class PolynomialSyntaxError(ValueError):
    def __init__(self, text: str, pos: int, reason: str):
        self.text = text
        self.pos = pos
        self.reason = reason
        super().__init__(f"{reason} at position {pos}: {text!r}\n{' ' * (pos + 1)}^")


_TERM = re.compile(r"(?P<coef>\d+)?\s*(?P<star>\*)?\s*(?P<var>x(?:\s*\^\s*(?P<exp>\d+))?)?")


def parse_polynomial(text: str) -> Poly:
    """Parse integer polynomials such as ``x^2-2``, ``3x^3 + x + 1``, ``2*x``."""
    coeffs: dict[int, int] = {}
    pos = 0
    n = len(text)

    def skip(i):
        while i < n and text[i].isspace():
            i += 1
        return i

    pos = skip(pos)
    if pos == n:
        raise PolynomialSyntaxError(text, pos, "empty polynomial")
    first = True
    while pos < n:
        sign = 1
        if text[pos] in "+-":
            sign = -1 if text[pos] == "-" else 1
            pos = skip(pos + 1)
        elif not first:
            raise PolynomialSyntaxError(text, pos, "expected '+' or '-'")
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (m.group("coef") is None and m.group("var") is None):
            raise PolynomialSyntaxError(text, pos, "expected a term")
        if m.group("star") and not m.group("var"):
            raise PolynomialSyntaxError(text, m.end(), "expected 'x' after '*'")
        coef = int(m.group("coef")) if m.group("coef") else 1
        if m.group("var"):
            exp = int(m.group("exp")) if m.group("exp") else 1
        else:
            exp = 0
        coeffs[exp] = coeffs.get(exp, 0) + sign * coef
        pos = skip(m.end())
        first = False
    top = max(coeffs)
    out = [coeffs.get(k, 0) for k in range(top + 1)]
    return _trim(out)


def format_polynomial(f: Poly) -> str:
    if not f:
        return "0"
    terms = []
    for k in range(len(f) - 1, -1, -1):
        c = f[k]
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = str(a)
        else:
            mono = "x" if k == 1 else f"x^{k}"
            body = mono if a == 1 else f"{a}{mono}"
        terms.append((sign, body))
    head_sign, head = terms[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in terms[1:]:
        out += f"{sign}{body}"
    return out


def _trim(f: Poly) -> Poly:
    while f and f[-1] == 0:
        f.pop()
    return f


def reduce_mod(f: Poly, p: int) -> Poly:
    return _trim([c % p for c in f])


def derivative(f: Poly, p: int) -> Poly:
    return _trim([(k * f[k]) % p for k in range(1, len(f))])


def _add(f: Poly, g: Poly, p: int) -> Poly:
    n = max(len(f), len(g))
    return _trim([((f[k] if k < len(f) else 0) + (g[k] if k < len(g) else 0)) % p for k in range(n)])


def _sub(f: Poly, g: Poly, p: int) -> Poly:
    n = max(len(f), len(g))
    return _trim([((f[k] if k < len(f) else 0) - (g[k] if k < len(g) else 0)) % p for k in range(n)])


def _mul(f: Poly, g: Poly, p: int) -> Poly:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _trim(out)


def _monic(f: Poly, p: int) -> Poly:
    if not f:
        return f
    inv = pow(f[-1], -1, p)
    return [c * inv % p for c in f]


def poly_divmod(f: Poly, g: Poly, p: int) -> tuple[Poly, Poly]:
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    r = [c % p for c in f]
    _trim(r)
    dg = len(g) - 1
    inv = pow(g[-1], -1, p)
    q = [0] * max(len(r) - dg, 0)
    while len(r) - 1 >= dg and r:
        shift = len(r) - 1 - dg
        c = r[-1] * inv % p
        q[shift] = c
        for k, b in enumerate(g):
            r[shift + k] = (r[shift + k] - c * b) % p
        _trim(r)
    return _trim(q), r


def poly_gcd(f: Poly, g: Poly, p: int) -> Poly:
    """Monic gcd over F_p."""
    a, b = reduce_mod(f, p), reduce_mod(g, p)
    while b:
        a, b = b, poly_divmod(a, b, p)[1]
    return _monic(a, p)


def _powmod(f: Poly, e: int, m: Poly, p: int) -> Poly:
    result: Poly = [1]
    base = poly_divmod(f, m, p)[1]
    while e:
        if e & 1:
            result = poly_divmod(_mul(result, base, p), m, p)[1]
        base = poly_divmod(_mul(base, base, p), m, p)[1]
        e >>= 1
    return result


def _pth_root(f: Poly, p: int) -> Poly:
    # over F_p the Frobenius is the identity on coefficients
    return _trim([f[k] for k in range(0, len(f), p)])


def _distinct_degree(f: Poly, p: int) -> list[tuple[Poly, int]]:
    out = []
    h: Poly = [0, 1]
    d = 0
    rest = f
    while len(rest) - 1 >= 2 * (d + 1):
        d += 1
        h = _powmod(h, p, rest, p)
        g = poly_gcd(rest, _sub(h, [0, 1], p), p)
        if len(g) > 1:
            out.append((g, d))
            rest = poly_divmod(rest, g, p)[0]
            h = poly_divmod(h, rest, p)[1]
    if len(rest) > 1:
        out.append((rest, len(rest) - 1))
    return out


def _equal_degree(g: Poly, d: int, p: int, rng: random.Random) -> list[Poly]:
    n = len(g) - 1
    if n == d:
        return [g]
    while True:
        a = _trim([rng.randrange(p) for _ in range(n)])
        if len(a) < 2:
            continue
        if p == 2:
            # trace map a + a^2 + ... + a^(2^(d-1))
            b, cur = list(a), list(a)
            for _ in range(d - 1):
                cur = _powmod(cur, 2, g, p)
                b = _add(b, cur, p)
        else:
            b = _sub(_powmod(a, (p**d - 1) // 2, g, p), [1], p)
        h = poly_gcd(g, b, p)
        if 1 < len(h) < len(g):
            return _equal_degree(h, d, p, rng) + _equal_degree(poly_divmod(g, h, p)[0], d, p, rng)


def _squarefree_part(f: Poly, p: int) -> Poly:
    """Product of the distinct irreducible factors of monic ``f``."""
    rad: Poly = [1]
    rest = f
    while len(rest) > 1:
        df = derivative(rest, p)
        if not df:
            rest = _pth_root(rest, p)
            continue
        s = poly_divmod(rest, poly_gcd(rest, df, p), p)[0]
        # s collects the irreducibles whose multiplicity in rest is prime to p
        new = poly_divmod(s, poly_gcd(s, rad, p), p)[0]
        rad = _mul(rad, new, p)
        while True:
            g = poly_gcd(rest, s, p)
            if len(g) == 1:
                break
            rest = poly_divmod(rest, g, p)[0]
    return rad


def factor(f: Poly, p: int, *, seed: int = 0) -> list[tuple[Poly, int]]:
    """Monic irreducible factors of ``f mod p`` with multiplicities, sorted."""
    fb = reduce_mod(f, p)
    if len(fb) < 2:
        raise ValueError("cannot factor a constant polynomial")
    fb = _monic(fb, p)
    rng = random.Random(seed)
    irreducibles: list[Poly] = []
    for g, d in _distinct_degree(_squarefree_part(fb, p), p):
        irreducibles.extend(_equal_degree(g, d, p, rng))
    out = []
    for g in irreducibles:
        e, rest = 0, fb
        while True:
            q, r = poly_divmod(rest, g, p)
            if r:
                break
            e, rest = e + 1, q
        out.append((g, e))
    out.sort(key=lambda ge: (len(ge[0]), ge[0][::-1]))
    return out
