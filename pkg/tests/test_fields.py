"""Field arithmetic: exactness, axioms, errors, serialization."""

import itertools
from fractions import Fraction

import pytest

from llcent.errors import DivisionByZero, FieldMismatch
from llcent.fields import PrimeField, QQ, Scalar, field_arith, field_from_name, is_prime


def s(field, v):
    return Scalar.of(field, v)


def test_contract_examples():
    F2, F5 = PrimeField(2), PrimeField(5)
    assert field_arith(s(F2, 1), s(F2, 1), "add").value == 0
    # 2/3 = 4 in GF(5): verified below against the exhaustive multiplication table
    assert field_arith(s(F5, 2), s(F5, 3), "div").value == 4
    assert field_arith(s(QQ, "1/2"), s(QQ, "1/3"), "add").value == Fraction(5, 6)


def test_gf5_division_against_multiplication_table():
    F5 = PrimeField(5)
    table = {(a, b): (a * b) % 5 for a in range(5) for b in range(5)}
    for a in range(5):
        for b in range(1, 5):
            q = F5.div(a, b)
            assert table[(q, b)] == a


@pytest.mark.parametrize("p", [2, 3, 5])
def test_field_axioms_exhaustive(p):
    F = PrimeField(p)
    els = range(p)
    for a, b, c in itertools.product(els, repeat=3):
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        assert F.add(a, 0) == a
        assert F.mul(a, 1) == a


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 17])
def test_inverses_exhaustive(p):
    F = PrimeField(p)
    for a in range(1, p):
        assert F.mul(a, F.inv(a)) == 1


def test_rationals_stay_reduced():
    x = field_arith(s(QQ, "2/4"), s(QQ, "1/6"), "add").value
    assert x == Fraction(2, 3)
    assert x.denominator == 3
    assert field_arith(s(QQ, 3), s(QQ, "3/7"), "div").value == Fraction(7, 1)


def test_division_by_zero():
    F3 = PrimeField(3)
    with pytest.raises(DivisionByZero):
        field_arith(s(F3, 1), s(F3, 0), "div")
    with pytest.raises(DivisionByZero):
        field_arith(s(QQ, 1), s(QQ, 0), "div")


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        field_arith(s(PrimeField(2), 1), s(PrimeField(3), 1), "add")
    with pytest.raises(FieldMismatch):
        field_arith(s(PrimeField(2), 1), s(QQ, 1), "mul")


def test_primality_checked_at_construction():
    for bad in (0, 1, 4, 9, 15, 2**31 + 11):
        with pytest.raises(ValueError):
            PrimeField(bad)
    assert is_prime(2**31 - 1)  # a Mersenne prime at the cap
    PrimeField(2**31 - 1)


def test_name_round_trip():
    for field in (PrimeField(2), PrimeField(97), QQ):
        assert field_from_name(field.name) == field
    with pytest.raises(ValueError):
        field_from_name("GF(6)")
    with pytest.raises(ValueError):
        field_from_name("R")


def test_no_floats_allowed():
    with pytest.raises(TypeError):
        PrimeField(5).coerce(1.5)
    with pytest.raises(TypeError):
        QQ.coerce(0.25)


def test_wide_products_stay_exact():
    p = 2**31 - 1
    F = PrimeField(p)
    a = p - 2
    assert F.mul(a, a) == pow(a, 2, p)
    assert F.mul(a, F.inv(a)) == 1
