"""Exact arithmetic in prime fields F_p and extension fields F_{p^m}.

Elements are handled in two forms. `FieldElem` is the public value type with Python operators.
Inside the iteration kernels every element is an integer *code*: the coefficients
c_0, ..., c_{m-1} of the element in the power basis of the modulus, read as the base-p number
c_0 + c_1 p + ... + c_{m-1} p^{m-1}. Code order is the enumeration order, so F_4 enumerates as
0, 1, α, α+1.
"""

import operator
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import sympy.polys.galoistools as gf
from sympy import divisors, isprime, primefactors
from sympy.polys.domains import ZZ

from geonil.constants import FIELD_SIZE_CAP, TABLE_FIELD_LIMIT
from geonil.exceptions import (
    BudgetExceeded,
    DivisionByZero,
    InvalidDegree,
    NotPrime,
    SpecMismatch,
    ZeroElement,
)

# Dense univariate polynomials over F_p in sympy's galoistools layout: highest degree first.
DensePoly = List[int]

_T = [1, 0]


class _LogTables(NamedTuple):
    """Exponent, logarithm and Zech logarithm tables for a small extension field."""

    exp: List[int]
    log: List[int]
    zech: List[int]


@dataclass(frozen=True)
class FieldSpec:
    """A finite field GF(p^m), modelled as F_p[t] / (modulus)."""

    p: int
    m: int
    # Coefficients of the monic modulus, lowest degree first. Prime fields use t.
    modulus: Tuple[int, ...]

    zero = 0
    one = 1

    def __post_init__(self):
        """Check that p is prime and the modulus is a reduced, monic irreducible of degree m."""

        check_prime(self.p)
        if self.m < 1:
            raise InvalidDegree(f"extension degree must be at least 1, not {self.m}")
        if len(self.modulus) != self.m + 1 or self.modulus[-1] != 1:
            raise InvalidDegree(f"modulus {self.modulus} is not monic of degree {self.m}")
        if any(not 0 <= coeff < self.p for coeff in self.modulus):
            raise InvalidDegree(f"modulus {self.modulus} is not reduced modulo {self.p}")
        if not is_irreducible(self.modulus, self.p):
            raise InvalidDegree(f"{format_dense(self.modulus)} is reducible over F_{self.p}")

    def __str__(self) -> str:
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m}) = F_{self.p}[t]/({format_dense(self.modulus)})"

    @property
    def q(self) -> int:
        """Return the number of elements in the field."""

        return self.p**self.m

    # Conversions between codes, coefficient tuples and elements

    def coeffs(self, code: int) -> Tuple[int, ...]:
        """Return the power-basis coefficients of the element with this code."""

        digits = []
        for _ in range(self.m):
            code, digit = divmod(code, self.p)
            digits.append(digit)
        return tuple(digits)

    def code_of(self, coeffs: Sequence[int]) -> int:
        """Return the code of the element with these power-basis coefficients."""

        if len(coeffs) > self.m:
            raise InvalidDegree(f"{list(coeffs)} has more than {self.m} coefficients")
        code = 0
        for coeff in reversed(coeffs):
            code = code * self.p + coeff % self.p
        return code

    def from_int(self, value: int) -> int:
        """Return the code of an integer's image in the prime subfield."""

        return value % self.p

    def element(self, value: Union[int, Sequence[int], "FieldElem"]) -> "FieldElem":
        """Build a FieldElem from an integer (mapped into F_p) or a coefficient sequence."""

        if isinstance(value, FieldElem):
            if value.spec != self:
                raise SpecMismatch(f"{value} doesn't belong to {self}")
            return value
        if isinstance(value, int):
            return self.wrap(self.from_int(value))
        return self.wrap(self.code_of(value))

    def wrap(self, code: int) -> "FieldElem":
        """Return the FieldElem with this code."""

        return FieldElem(self, self.coeffs(code))

    def codes(self, start: int = 0, stop: Optional[int] = None) -> range:
        """Return the element codes in enumeration order, optionally restricted to a range."""

        stop = self.q if stop is None else min(stop, self.q)
        return range(max(start, 0), stop)

    # Arithmetic on codes

    @cached_property
    def _tables(self) -> Optional[_LogTables]:
        """Build log tables for small extension fields; prime fields use integer arithmetic."""

        if self.m == 1 or self.q > TABLE_FIELD_LIMIT:
            return None

        order = self.q - 1
        generator = next(code for code in self.codes(1) if self._is_primitive_slow(code))

        exp = [1] * order
        log = [-1] * self.q
        value = 1
        for power in range(order):
            exp[power] = value
            log[value] = power
            value = self._poly_mul(value, generator)

        # zech[n] is the log of 1 + g^n, or -1 where 1 + g^n = 0.
        zech = [log[self._digit_add(exp[power], 1)] for power in range(order)]

        return _LogTables(exp, log, zech)

    def add(self, left: int, right: int) -> int:
        """Return left + right."""

        if self.m == 1:
            return (left + right) % self.p
        tables = self._tables
        if tables is None:
            return self._digit_add(left, right)
        if left == 0:
            return right
        if right == 0:
            return left
        order = self.q - 1
        log_left = tables.log[left]
        zech = tables.zech[(tables.log[right] - log_left) % order]
        if zech < 0:
            return 0
        return tables.exp[(log_left + zech) % order]

    def neg(self, value: int) -> int:
        """Return -value."""

        if self.m == 1:
            return -value % self.p
        if self.p == 2 or value == 0:
            return value
        return self.code_of([-coeff for coeff in self.coeffs(value)])

    def sub(self, left: int, right: int) -> int:
        """Return left - right."""

        if self.m == 1:
            return (left - right) % self.p
        return self.add(left, self.neg(right))

    def mul(self, left: int, right: int) -> int:
        """Return left * right."""

        if self.m == 1:
            return left * right % self.p
        if left == 0 or right == 0:
            return 0
        tables = self._tables
        if tables is None:
            return self._poly_mul(left, right)
        return tables.exp[(tables.log[left] + tables.log[right]) % (self.q - 1)]

    def inv(self, value: int) -> int:
        """Return the multiplicative inverse of value."""

        if value == 0:
            raise DivisionByZero(f"0 has no inverse in {self}")
        if self.m == 1:
            return pow(value, -1, self.p)
        tables = self._tables
        if tables is None:
            return self._slow_power(value, self.q - 2)
        return tables.exp[-tables.log[value] % (self.q - 1)]

    def power(self, value: int, exponent: int) -> int:
        """Return value ** exponent; negative exponents need a nonzero base."""

        if exponent < 0:
            value = self.inv(value)
            exponent = -exponent
        if exponent == 0:
            return 1
        if value == 0:
            return 0
        if self.m == 1:
            return pow(value, exponent, self.p)
        tables = self._tables
        if tables is None:
            return self._slow_power(value, exponent % (self.q - 1) or self.q - 1)
        return tables.exp[tables.log[value] * exponent % (self.q - 1)]

    def order_of(self, value: int) -> int:
        """Return the multiplicative order of a nonzero element."""

        if value == 0:
            raise ZeroElement(f"0 has no multiplicative order in {self}")
        for candidate in divisors(self.q - 1):
            if self.power(value, int(candidate)) == 1:
                return int(candidate)
        raise AssertionError("Lagrange's theorem failed")  # pragma: no cover

    def is_primitive(self, value: int) -> bool:
        """Return True if the element generates the multiplicative group."""

        if value == 0:
            return False
        order = self.q - 1
        return all(self.power(value, order // int(prime)) != 1 for prime in primefactors(order))

    # Slow paths, used when tables are unavailable and to build them

    def _dense(self, code: int) -> DensePoly:
        return gf.gf_strip(list(reversed(self.coeffs(code))))

    def _from_dense(self, poly: DensePoly) -> int:
        code = 0
        for coeff in poly:
            code = code * self.p + int(coeff)
        return code

    @cached_property
    def _dense_modulus(self) -> DensePoly:
        return list(reversed(self.modulus))

    def _digit_add(self, left: int, right: int) -> int:
        result = 0
        scale = 1
        while left or right:
            left, left_digit = divmod(left, self.p)
            right, right_digit = divmod(right, self.p)
            result += (left_digit + right_digit) % self.p * scale
            scale *= self.p
        return result

    def _poly_mul(self, left: int, right: int) -> int:
        product = gf.gf_mul(self._dense(left), self._dense(right), self.p, ZZ)
        return self._from_dense(gf.gf_rem(product, self._dense_modulus, self.p, ZZ))

    def _slow_power(self, value: int, exponent: int) -> int:
        result = gf.gf_pow_mod(self._dense(value), exponent, self._dense_modulus, self.p, ZZ)
        return self._from_dense(result)

    def _is_primitive_slow(self, value: int) -> bool:
        order = self.q - 1
        return all(
            self._slow_power(value, order // int(prime)) != 1 for prime in primefactors(order)
        )


@dataclass(frozen=True)
class FieldElem:
    """An element of a finite field, in the power basis of its field's modulus."""

    spec: FieldSpec
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        """Check that the coefficients are canonical."""

        if len(self.coeffs) != self.spec.m or any(
            not 0 <= coeff < self.spec.p for coeff in self.coeffs
        ):
            raise SpecMismatch(f"{self.coeffs} isn't a canonical element of {self.spec}")

    def __str__(self) -> str:
        if self.spec.m == 1:
            return str(self.coeffs[0])
        return "[" + ",".join(str(coeff) for coeff in self.coeffs) + "]"

    def __int__(self) -> int:
        return self.code

    def __bool__(self) -> bool:
        return any(self.coeffs)

    @cached_property
    def code(self) -> int:
        """Return the element's integer code."""

        return self.spec.code_of(self.coeffs)

    def _other(self, other) -> int:
        if isinstance(other, int):
            return self.spec.from_int(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        if other.spec != self.spec:
            raise SpecMismatch(f"can't combine elements of {self.spec} and {other.spec}")
        return other.code

    def _binary(self, other, func: Callable[[int, int], int], swap: bool = False):
        other_code = self._other(other)
        if other_code is NotImplemented:
            return NotImplemented
        if swap:
            return self.spec.wrap(func(other_code, self.code))
        return self.spec.wrap(func(self.code, other_code))

    def __add__(self, other):
        return self._binary(other, self.spec.add)

    def __radd__(self, other):
        return self._binary(other, self.spec.add, swap=True)

    def __sub__(self, other):
        return self._binary(other, self.spec.sub)

    def __rsub__(self, other):
        return self._binary(other, self.spec.sub, swap=True)

    def __mul__(self, other):
        return self._binary(other, self.spec.mul)

    def __rmul__(self, other):
        return self._binary(other, self.spec.mul, swap=True)

    def __truediv__(self, other):
        return self._binary(other, lambda left, right: self.spec.mul(left, self.spec.inv(right)))

    def __neg__(self):
        return self.spec.wrap(self.spec.neg(self.code))

    def __pow__(self, exponent: int):
        return self.spec.wrap(self.spec.power(self.code, exponent))

    def inverse(self) -> "FieldElem":
        """Return the multiplicative inverse."""

        return self.spec.wrap(self.spec.inv(self.code))


_OPERATIONS: Dict[str, Callable] = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "neg": operator.neg,
    "inv": FieldElem.inverse,
    "pow": operator.pow,
}


def arith(op: str, *operands) -> FieldElem:
    """Apply a named field operation: add, sub, mul, neg, inv or pow (element, exponent)."""

    try:
        func = _OPERATIONS[op]
    except KeyError:
        raise ValueError(f"unknown field operation {op!r}") from None

    elements = [operand for operand in operands if isinstance(operand, FieldElem)]
    if not elements:
        raise SpecMismatch(f"{op} needs at least one field element")
    if any(element.spec != elements[0].spec for element in elements):
        raise SpecMismatch(f"{op} operands belong to different fields")

    return func(*operands)


def format_dense(coeffs: Sequence[int], var: str = "t") -> str:
    """Format a univariate polynomial given lowest degree first."""

    terms = []
    for degree in range(len(coeffs) - 1, -1, -1):
        coeff = coeffs[degree]
        if not coeff:
            continue
        if degree == 0:
            monomial = ""
        elif degree == 1:
            monomial = var
        else:
            monomial = f"{var}^{degree}"
        if not monomial:
            terms.append(str(coeff))
        elif coeff == 1:
            terms.append(monomial)
        else:
            terms.append(f"{coeff}*{monomial}")
    return " + ".join(terms) or "0"


def check_prime(p: int) -> int:
    """Return p if it's prime, else raise NotPrime."""

    if not isinstance(p, int) or not isprime(p):
        raise NotPrime(p)
    return p


def _check_size(p: int, m: int):
    if p**m > FIELD_SIZE_CAP:
        raise BudgetExceeded("field size", FIELD_SIZE_CAP, p**m)


def make_prime_field(p: int) -> FieldSpec:
    """Return the prime field F_p."""

    check_prime(p)
    _check_size(p, 1)
    return FieldSpec(p, 1, (0, 1))


def has_root(modulus: Sequence[int], p: int) -> bool:
    """Return True if the polynomial (lowest degree first) has a root in F_p."""

    dense = gf.gf_strip([int(coeff) % p for coeff in reversed(modulus)])
    frobenius = gf.gf_pow_mod(_T, p, dense, p, ZZ)
    common = gf.gf_gcd(dense, gf.gf_sub(frobenius, _T, p, ZZ), p, ZZ)
    return gf.gf_degree(common) >= 1


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial given lowest degree first.

    f of degree m is irreducible iff f divides t^(p^m) - t and gcd(f, t^(p^(m/d)) - t) = 1 for
    every prime d dividing m.
    """

    degree = len(modulus) - 1
    if degree < 1 or modulus[-1] != 1:
        return False
    if degree == 1:
        return True
    if has_root(modulus, p):
        return False

    dense = [int(coeff) % p for coeff in reversed(modulus)]

    if gf.gf_pow_mod(_T, p**degree, dense, p, ZZ) != _T:
        return False

    for prime in primefactors(degree):
        frobenius = gf.gf_pow_mod(_T, p ** (degree // int(prime)), dense, p, ZZ)
        if gf.gf_gcd(dense, gf.gf_sub(frobenius, _T, p, ZZ), p, ZZ) != [1]:
            return False

    return True


def make_extension(p: int, m: int, search_start: int = 0) -> FieldSpec:
    """Return F_{p^m} modelled with the first irreducible monic modulus at or after search_start.

    Candidate moduli t^m + c_{m-1} t^{m-1} + ... + c_0 are visited in the code order of their
    low coefficients, c_0 + c_1 p + ... + c_{m-1} p^{m-1}, wrapping around. c_0 is the least
    significant digit, so this is not lexicographic order on (c_0, ..., c_{m-1}): over F_2 the
    cubic chosen is t^3 + t + 1, where lexicographic order would give t^3 + t^2 + 1.
    """

    if m < 1:
        raise InvalidDegree(f"extension degree must be at least 1, not {m}")
    if m == 1:
        return make_prime_field(p)

    check_prime(p)
    _check_size(p, m)

    count = p**m
    for offset in range(count):
        code = (search_start + offset) % count
        low = []
        for _ in range(m):
            code, digit = divmod(code, p)
            low.append(digit)
        modulus = tuple(low) + (1,)
        if is_irreducible(modulus, p):
            return FieldSpec(p, m, modulus)

    raise AssertionError(f"no irreducible polynomial of degree {m} over F_{p}")  # pragma: no cover


def field_for(p: int, m: int = 1) -> FieldSpec:
    """Return the canonical model of F_{p^m} used throughout Geonil."""

    return make_extension(p, m)


def enumerate_elements(
    spec: FieldSpec, start: int = 0, stop: Optional[int] = None
) -> Iterator[FieldElem]:
    """Yield the field's elements in code order, optionally restricted to [start, stop)."""

    for code in spec.codes(start, stop):
        yield spec.wrap(code)


def element_order(value: FieldElem) -> int:
    """Return the least d >= 1 with value^d = 1."""

    return value.spec.order_of(value.code)


def find_generator(spec: FieldSpec) -> FieldElem:
    """Return the first element, in enumeration order, that generates the multiplicative group."""

    return spec.wrap(generator_code(spec))


def generator_code(spec: FieldSpec) -> int:
    """Return the code of the first generator of the multiplicative group."""

    if spec.q == 2:
        return 1
    return next(code for code in spec.codes(1) if spec.is_primitive(code))
