import json

import pytest
from hypothesis import given, strategies as st

from itertor.algebra import (
    AlgebraError,
    GradedAlgebra,
    InvariantError,
    PoincareSeries,
    UntrackedProductError,
    check_invariants,
    convolve,
    decomposables_dims,
    divided_power,
    exterior,
    poincare,
    polynomial,
    series_inverse,
    tensor,
    truncated_polynomial,
    unit_algebra,
)


def dims_at(a, cap=None):
    return a.series().nonzero()


def test_polynomial_examples():
    assert dims_at(polynomial(3, 6, 20)) == {0: 1, 6: 1, 12: 1, 18: 1}
    assert dims_at(polynomial(2, 4, 4)) == {0: 1, 4: 1}
    assert dims_at(polynomial(5, 10, 9)) == {0: 1}


def test_exterior_examples():
    assert dims_at(exterior(3, 3, 10)) == {0: 1, 3: 1}
    assert dims_at(exterior(2, 1, 5)) == {0: 1, 1: 1}
    assert dims_at(exterior(5, 7, 6)) == {0: 1}


def test_divided_power_examples():
    assert dims_at(divided_power(2, 4, 12)) == {0: 1, 4: 1, 8: 1, 12: 1}
    a = divided_power(3, 4, 8)
    (g1,), (g2,) = a.basis(4), a.basis(8)
    assert a.mul(g1, g1) == ((g2, 2),)
    b = divided_power(2, 2, 4)
    (h1,) = b.basis(2)
    assert b.mul(h1, h1) == ()


def test_truncated_examples():
    assert dims_at(truncated_polynomial(3, 4, 3, 20)) == {0: 1, 4: 1, 8: 1}
    assert truncated_polynomial(2, 2, 2, 6).series() == exterior(2, 2, 6).series()
    assert dims_at(truncated_polynomial(5, 2, 5, 8)) == {0: 1, 2: 1, 4: 1, 6: 1, 8: 1}


def test_parity_rules():
    with pytest.raises(AlgebraError):
        polynomial(3, 3, 10)
    with pytest.raises(AlgebraError):
        exterior(3, 2, 10)
    with pytest.raises(AlgebraError):
        divided_power(5, 3, 10)
    with pytest.raises(AlgebraError):
        truncated_polynomial(3, 2, 1, 10)
    # exterior classes may sit in even degree in characteristic 2
    exterior(2, 2, 10)
    with pytest.raises(ValueError):
        polynomial(4, 2, 10)


def test_tensor_examples():
    a = polynomial(3, 4, 12)
    assert tensor(a, unit_algebra(3, 12)).series() == a.series()
    t = tensor(polynomial(2, 4, 8), exterior(2, 3, 8))
    assert dims_at(t) == {0: 1, 3: 1, 4: 1, 7: 1, 8: 1}
    check_invariants(t)


def test_tensor_koszul_sign():
    t = tensor(exterior(3, 3, 10), exterior(3, 5, 10))
    check_invariants(t)
    (x,), (y,) = t.basis(3), t.basis(5)
    ((k, c),) = t.mul(x, y)
    ((k2, c2),) = t.mul(y, x)
    assert k == k2 and (c + c2) % 3 == 0


def test_poincare_examples():
    assert poincare(unit_algebra(5, 0)).dims == (1,)
    assert poincare(exterior(3, 3, 5)).nonzero() == {0: 1, 3: 1}
    assert poincare(divided_power(2, 4, 9)).nonzero() == {0: 1, 4: 1, 8: 1}


def test_series_inverse_examples():
    assert series_inverse(PoincareSeries(2, 5, (1, 0, 0, 0, 0, 0))) == (1, 0, 0, 0, 0, 0)
    assert series_inverse(exterior(3, 3, 9).series()) == (1, 0, 0, -1, 0, 0, 1, 0, 0, -1)
    # 1/(1 - z^4) inverts to 1 - z^4
    assert series_inverse(polynomial(3, 4, 12).series()) == (1, 0, 0, 0, -1) + (0,) * 8
    with pytest.raises(ValueError):
        series_inverse(PoincareSeries(2, 2, (0, 1, 0)))


@given(st.lists(st.integers(0, 4), min_size=1, max_size=12))
def test_series_inverse_is_inverse(tail):
    s = PoincareSeries(2, len(tail), (1, *tail))
    inv = series_inverse(s)
    prod = [sum(s.dims[k] * inv[t - k] for k in range(t + 1)) for t in range(s.cap + 1)]
    assert prod == [1] + [0] * s.cap


def test_untracked_product_raises():
    a = polynomial(2, 4, 8)
    (x,) = a.basis(8)
    with pytest.raises(UntrackedProductError):
        a.mul(x, x)


def test_json_roundtrip_is_structural():
    a = tensor(divided_power(3, 4, 16), exterior(3, 3, 16))
    text = a.dumps()
    b = GradedAlgebra.from_json(json.loads(text))
    assert a.structurally_equal(b)
    assert b.dumps() == text


def test_check_invariants_detects_bad_table():
    names = ["1", "x", "y"]
    bad = GradedAlgebra(3, 6, names, [0, 2, 4], {(1, 1): [(2, 1)]})
    check_invariants(bad)
    noncomm = GradedAlgebra(3, 6, ["1", "x", "y", "z"], [0, 2, 2, 4], {(1, 2): [(3, 1)], (2, 1): [(3, 2)]})
    with pytest.raises(InvariantError):
        check_invariants(noncomm)


def test_constructor_validation():
    with pytest.raises(AlgebraError):
        GradedAlgebra(2, 4, ["1", "x"], [0, 5], {})
    with pytest.raises(AlgebraError):
        tensor(polynomial(2, 2, 4), polynomial(2, 2, 6))
    with pytest.raises(AlgebraError):
        GradedAlgebra(2, 4, ["x"], [1], {})


def test_decomposables():
    assert decomposables_dims(polynomial(3, 2, 6)) == (0, 0, 0, 0, 1, 0, 1)
    assert decomposables_dims(divided_power(2, 2, 6)) == (0, 0, 0, 0, 0, 0, 1)


@st.composite
def small_algebras(draw, p=None, cap=None):
    p = p or draw(st.sampled_from([2, 3, 5]))
    cap = draw(st.integers(0, 14)) if cap is None else cap
    kind = draw(st.sampled_from(["poly", "ext", "div", "trunc"]))
    d = draw(st.integers(1, 6))
    if kind in ("poly", "div") or (p != 2 and kind == "trunc"):
        d = 2 * d
    elif kind == "ext" and p != 2:
        d = 2 * d - 1
    if kind == "poly":
        return polynomial(p, d, cap)
    if kind == "ext":
        return exterior(p, d, cap)
    if kind == "div":
        return divided_power(p, d, cap)
    return truncated_polynomial(p, d, draw(st.integers(2, 4)), cap)


@given(st.sampled_from([2, 3, 5]), st.integers(0, 14), st.data())
def test_tensor_series_is_convolution(p, cap, data):
    a = data.draw(small_algebras(p, cap))
    b = data.draw(small_algebras(p, cap))
    t = tensor(a, b)
    assert t.series().dims == convolve(a.series().dims, b.series().dims, cap)
    assert t.series() == tensor(b, a).series()
    check_invariants(t, exhaustive_limit=60, samples=200)


@given(small_algebras())
def test_constructors_satisfy_invariants(a):
    assert a.series().dims[0] == 1
    check_invariants(a)
