"""Test the finite field models."""

import pytest

from geonil import fields
from geonil.exceptions import (
    BudgetExceeded,
    DivisionByZero,
    InvalidDegree,
    NotPrime,
    SpecMismatch,
    ZeroElement,
)


def test_field_for__prime():
    """Prime fields are modelled with the modulus t."""

    spec = fields.field_for(5)
    assert spec.modulus == (0, 1)
    assert spec.q == 5
    assert str(spec) == "GF(5)"


def test_field_for__first_irreducible_modulus():
    """Extensions use the first irreducible monic modulus in code order."""

    assert fields.field_for(2, 2).modulus == (1, 1, 1)
    assert fields.field_for(3, 2).modulus == (1, 0, 1)
    # t^2 + 1 splits over F_5 because -1 is a square there.
    assert fields.field_for(5, 2).modulus == (2, 0, 1)
    # c_0 is the least significant digit: t^3 + t + 1 comes before t^3 + t^2 + 1.
    assert fields.field_for(2, 3).modulus == (1, 1, 0, 1)


def test_field_for__deterministic():
    """Asking twice gives equal models."""

    assert fields.field_for(3, 3) == fields.field_for(3, 3)


def test_field_for__not_prime():
    """The characteristic must be prime."""

    with pytest.raises(NotPrime):
        fields.field_for(4)


def test_field_spec__composite_characteristic():
    """A model with a composite p is refused even when built by hand."""

    with pytest.raises(NotPrime):
        fields.FieldSpec(4, 1, (0, 1))


def test_field_spec__reducible_modulus():
    """t^2 over F_5 has zero divisors, so it can't model a field."""

    with pytest.raises(InvalidDegree):
        fields.FieldSpec(5, 2, (0, 0, 1))
    with pytest.raises(InvalidDegree):
        fields.FieldSpec(2, 2, (1, 0, 1))
    assert fields.FieldSpec(2, 2, (1, 1, 1)) == fields.field_for(2, 2)


def test_field_for__bad_degree():
    """Extension degrees start at 1."""

    with pytest.raises(InvalidDegree):
        fields.field_for(3, 0)


def test_field_for__size_cap():
    """Fields past the size cap are refused."""

    with pytest.raises(BudgetExceeded):
        fields.field_for(2, 40)


def test_is_irreducible():
    """Rabin's test agrees with small hand checks."""

    assert fields.is_irreducible((1, 1, 1), 2)
    assert not fields.is_irreducible((1, 0, 1), 2)
    assert fields.is_irreducible((1, 1, 0, 1), 2)
    # (t^2 + t + 1)^2 has no roots but isn't irreducible.
    assert not fields.is_irreducible((1, 0, 1, 0, 1), 2)


def test_codes_round_trip():
    """Codes are the base-p digits of the coefficients, lowest first."""

    spec = fields.field_for(3, 2)
    assert spec.coeffs(7) == (1, 2)
    assert spec.code_of([1, 2]) == 7


def test_arithmetic__gf9():
    """Arithmetic in F_3[t]/(t^2 + 1)."""

    spec = fields.field_for(3, 2)
    t = spec.element([0, 1])
    assert t * t == spec.element(2)
    assert (t + 1) * (t + 1) == spec.element([0, 2])
    assert t - t == spec.element(0)
    assert -t == spec.element([0, 2])
    assert t.inverse() * t == spec.element(1)
    assert (t + 1) ** 8 == spec.element(1)
    assert (t + 1) ** 4 == spec.element(2)


def test_arithmetic__matches_slow_path():
    """Log table arithmetic agrees with polynomial arithmetic."""

    spec = fields.field_for(2, 4)
    for left in spec.codes():
        for right in spec.codes():
            assert spec.mul(left, right) == (
                0 if not (left and right) else spec._poly_mul(left, right)
            )
            assert spec.add(left, right) == spec._digit_add(left, right)


SMALL_FIELDS = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1), (2, 4)]


@pytest.mark.parametrize("p, m", SMALL_FIELDS)
def test_arithmetic__field_axioms(p, m):
    """Every triple of elements satisfies the ring laws, and nonzero elements are units."""

    spec = fields.field_for(p, m)
    codes = list(spec.codes())
    for a in codes:
        assert spec.add(a, 0) == a
        assert spec.mul(a, 1) == a
        assert spec.add(a, spec.neg(a)) == 0
        assert spec.sub(a, a) == 0
        for b in codes:
            assert spec.add(a, b) == spec.add(b, a)
            assert spec.mul(a, b) == spec.mul(b, a)
            for c in codes:
                assert spec.add(spec.add(a, b), c) == spec.add(a, spec.add(b, c))
                assert spec.mul(spec.mul(a, b), c) == spec.mul(a, spec.mul(b, c))
                assert spec.mul(a, spec.add(b, c)) == spec.add(spec.mul(a, b), spec.mul(a, c))


@pytest.mark.parametrize("p, m", SMALL_FIELDS + [(3, 3), (5, 2), (7, 2), (2, 5), (2, 6)])
def test_arithmetic__frobenius_and_inverses(p, m):
    """x^q = x for every element, and x * x^-1 = 1 for every nonzero one."""

    spec = fields.field_for(p, m)
    for value in spec.codes():
        assert spec.power(value, spec.q) == value
        if value:
            assert spec.mul(value, spec.inv(value)) == 1
            assert spec.power(value, spec.q - 1) == 1


def test_arithmetic__integers_map_into_prime_field():
    """Integers combine with elements through their image in F_p."""

    spec = fields.field_for(5)
    assert spec.element(3) + 4 == spec.element(2)
    assert 7 * spec.element(1) == spec.element(2)


def test_arithmetic__mixed_fields():
    """Elements of different fields don't combine."""

    with pytest.raises(SpecMismatch):
        fields.field_for(5).element(1) + fields.field_for(7).element(1)


def test_arith__named_operations():
    """arith applies the named operation."""

    spec = fields.field_for(7)
    assert fields.arith("mul", spec.element(3), spec.element(5)) == spec.element(1)
    assert fields.arith("pow", spec.element(3), 6) == spec.element(1)
    with pytest.raises(ValueError):
        fields.arith("frobnicate", spec.element(3))


def test_inverse__zero():
    """Zero has no inverse."""

    with pytest.raises(DivisionByZero):
        fields.field_for(3, 2).element(0).inverse()


def test_element_order():
    """Orders divide q - 1."""

    spec = fields.field_for(3, 2)
    assert fields.element_order(spec.element([0, 1])) == 4
    assert fields.element_order(spec.element(2)) == 2
    with pytest.raises(ZeroElement):
        fields.element_order(spec.element(0))


def test_find_generator():
    """The first generator in code order."""

    assert fields.find_generator(fields.field_for(5)) == fields.field_for(5).element(2)
    assert fields.find_generator(fields.field_for(2)) == fields.field_for(2).element(1)
    spec = fields.field_for(3, 2)
    assert fields.find_generator(spec) == spec.element([1, 1])


def test_enumerate_elements():
    """Elements come out in code order."""

    spec = fields.field_for(2, 2)
    assert [str(elem) for elem in fields.enumerate_elements(spec)] == [
        "[0,0]",
        "[1,0]",
        "[0,1]",
        "[1,1]",
    ]
    assert [elem.code for elem in fields.enumerate_elements(spec, 1, 3)] == [1, 2]
