"""Sparse multivariate polynomials over the integers or a finite field."""

import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from geonil.constants import DEFAULT_TERM_BUDGET
from geonil.exceptions import ArityMismatch, BudgetExceeded, DomainMismatch, PolySyntaxError
from geonil.fields import FieldElem, FieldSpec

Exponents = Tuple[int, ...]
Term = Tuple[Exponents, int]


@dataclass(frozen=True)
class IntegerRing:
    """The ring of arbitrary-precision integers, with the same interface as FieldSpec."""

    zero = 0
    one = 1

    def __str__(self) -> str:
        return "ZZ"

    def add(self, left: int, right: int) -> int:
        return left + right

    def sub(self, left: int, right: int) -> int:
        return left - right

    def neg(self, value: int) -> int:
        return -value

    def mul(self, left: int, right: int) -> int:
        return left * right

    def power(self, value: int, exponent: int) -> int:
        if exponent < 0:
            raise DomainMismatch("negative powers don't exist in the integers")
        return value**exponent

    def from_int(self, value: int) -> int:
        return value


INTEGERS = IntegerRing()

CoefficientDomain = Union[IntegerRing, FieldSpec]


@total_ordering
class _NegInfinity:
    """The degree of the zero polynomial, which compares below every integer."""

    def __repr__(self) -> str:
        return "NegInfinity"

    def __eq__(self, other) -> bool:
        return isinstance(other, _NegInfinity)

    def __lt__(self, other) -> bool:
        return not isinstance(other, _NegInfinity)

    def __hash__(self) -> int:
        return hash("NegInfinity")


NEG_INFINITY = _NegInfinity()


def _term_order(term: Term) -> Tuple[int, Exponents]:
    """Sort key putting higher total degree first, then lexicographically larger exponents."""

    exponents = term[0]
    return (-sum(exponents), tuple(-exponent for exponent in exponents))


@dataclass(frozen=True)
class MultiPoly:
    """A polynomial in `nvars` variables, stored as canonically ordered nonzero terms."""

    nvars: int
    terms: Tuple[Term, ...]
    domain: CoefficientDomain = INTEGERS

    @classmethod
    def from_dict(
        cls, nvars: int, mapping: Mapping[Exponents, int], domain: CoefficientDomain = INTEGERS
    ) -> "MultiPoly":
        """Create a canonical polynomial from a map of exponent tuples to coefficients."""

        terms = []
        for exponents, coeff in mapping.items():
            if len(exponents) != nvars:
                raise ArityMismatch(f"exponents {exponents} don't have {nvars} entries")
            if coeff:
                terms.append((tuple(exponents), coeff))
        return cls(nvars, tuple(sorted(terms, key=_term_order)), domain)

    @classmethod
    def zero(cls, nvars: int, domain: CoefficientDomain = INTEGERS) -> "MultiPoly":
        """Return the zero polynomial."""

        return cls(nvars, (), domain)

    @classmethod
    def constant(cls, nvars: int, value: int, domain: CoefficientDomain = INTEGERS) -> "MultiPoly":
        """Return a constant polynomial; integers are mapped into the domain."""

        return cls.from_dict(nvars, {(0,) * nvars: domain.from_int(value)}, domain)

    @classmethod
    def variable(cls, nvars: int, index: int, domain: CoefficientDomain = INTEGERS) -> "MultiPoly":
        """Return the polynomial consisting of the index-th variable."""

        exponents = tuple(int(var == index) for var in range(nvars))
        return cls(nvars, ((exponents, domain.one),), domain)

    def as_dict(self) -> Dict[Exponents, int]:
        """Return the terms as a dict."""

        return dict(self.terms)

    def __str__(self) -> str:
        return self.format()

    def __bool__(self) -> bool:
        return bool(self.terms)

    # Arithmetic

    def _check(self, other: "MultiPoly"):
        if not isinstance(other, MultiPoly):
            raise DomainMismatch(f"{other!r} is not a polynomial")
        if other.nvars != self.nvars or other.domain != self.domain:
            raise DomainMismatch(
                f"can't combine polynomials over {self.domain} in {self.nvars} variables with "
                f"polynomials over {other.domain} in {other.nvars} variables"
            )

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, int):
            return MultiPoly.constant(self.nvars, other, self.domain)
        self._check(other)
        return other

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        domain = self.domain
        result = self.as_dict()
        for exponents, coeff in other.terms:
            result[exponents] = domain.add(result.get(exponents, domain.zero), coeff)
        return MultiPoly.from_dict(self.nvars, result, domain)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(
            self.nvars,
            tuple((exponents, self.domain.neg(coeff)) for exponents, coeff in self.terms),
            self.domain,
        )

    def __sub__(self, other) -> "MultiPoly":
        return self + -self._coerce(other)

    def __rsub__(self, other) -> "MultiPoly":
        return -self + other

    def __mul__(self, other) -> "MultiPoly":
        return self.multiply(self._coerce(other))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "MultiPoly":
        return self.power(exponent)

    def multiply(self, other: "MultiPoly", term_budget: Optional[int] = None) -> "MultiPoly":
        """Return self * other, refusing to build more than term_budget terms."""

        self._check(other)
        domain = self.domain
        result: Dict[Exponents, int] = {}
        for left_exponents, left_coeff in self.terms:
            for right_exponents, right_coeff in other.terms:
                exponents = tuple(
                    left + right for left, right in zip(left_exponents, right_exponents)
                )
                product = domain.mul(left_coeff, right_coeff)
                result[exponents] = domain.add(result.get(exponents, domain.zero), product)
            if term_budget is not None and len(result) > term_budget:
                raise BudgetExceeded("polynomial term count", term_budget, len(result))
        return MultiPoly.from_dict(self.nvars, result, domain)

    def power(self, exponent: int, term_budget: Optional[int] = None) -> "MultiPoly":
        """Return self ** exponent by repeated squaring."""

        if exponent < 0:
            raise DomainMismatch("polynomials have no negative powers")
        result = MultiPoly.constant(self.nvars, 1, self.domain)
        base = self
        while exponent:
            if exponent & 1:
                result = result.multiply(base, term_budget)
            exponent >>= 1
            if exponent:
                base = base.multiply(base, term_budget)
        return result

    def scale(self, factor: int) -> "MultiPoly":
        """Multiply every coefficient by a domain element."""

        domain = self.domain
        return MultiPoly.from_dict(
            self.nvars,
            {exponents: domain.mul(coeff, factor) for exponents, coeff in self.terms},
            domain,
        )

    # Structure

    def total_degree(self) -> Union[int, _NegInfinity]:
        """Return the largest exponent sum, or NEG_INFINITY for the zero polynomial."""

        if not self.terms:
            return NEG_INFINITY
        return max(sum(exponents) for exponents, _ in self.terms)

    def is_homogeneous(self) -> bool:
        """Return True if every term has the same total degree."""

        return len({sum(exponents) for exponents, _ in self.terms}) <= 1

    def is_constant(self) -> bool:
        """Return True if the polynomial has no terms of positive degree."""

        return all(not any(exponents) for exponents, _ in self.terms)

    def constant_term(self) -> int:
        """Return the coefficient of the empty monomial."""

        return self.as_dict().get((0,) * self.nvars, self.domain.zero)

    # Changing coefficient domains

    def over(self, spec: FieldSpec) -> "MultiPoly":
        """Return this polynomial with coefficients in spec.

        Integer coefficients are reduced modulo p. Coefficients in F_p carry over unchanged into
        any F_{p^m}, because prime subfield elements have the same codes in every extension.
        """

        if self.domain == spec:
            return self
        if isinstance(self.domain, IntegerRing):
            return reduce_mod_p(self, spec)
        if self.domain.m == 1 and self.domain.p == spec.p:
            return MultiPoly(self.nvars, self.terms, spec)
        raise DomainMismatch(f"can't move a polynomial over {self.domain} into {spec}")

    # Evaluation

    def evaluate_codes(self, point: Sequence[int], spec: FieldSpec) -> int:
        """Evaluate at a point given as element codes; the polynomial must already be over spec."""

        if len(point) != self.nvars:
            raise ArityMismatch(f"expected {self.nvars} coordinates, got {len(point)}")
        add = spec.add
        mul = spec.mul
        power = spec.power
        total = 0
        for exponents, coeff in self.terms:
            value = coeff
            for var, exponent in enumerate(exponents):
                if exponent == 1:
                    value = mul(value, point[var])
                elif exponent:
                    value = mul(value, power(point[var], exponent))
            total = add(total, value)
        return total

    # Printing

    def format(self, var_names: Optional[Sequence[str]] = None) -> str:
        """Return the canonical text form, which parse_poly reads back to an equal polynomial."""

        names = default_names(self.nvars) if var_names is None else tuple(var_names)
        if len(names) != self.nvars:
            raise ArityMismatch(f"need {self.nvars} variable names, got {len(names)}")
        if not self.terms:
            return "0"

        pieces: List[str] = []
        for exponents, coeff in self.terms:
            negative, magnitude = self._split_sign(coeff)
            monomial = "*".join(
                name if exponent == 1 else f"{name}^{exponent}"
                for name, exponent in zip(names, exponents)
                if exponent
            )
            if not monomial:
                body = magnitude
            elif magnitude == "1":
                body = monomial
            else:
                body = f"{magnitude}*{monomial}"

            if not pieces:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" - {body}" if negative else f" + {body}")
        return "".join(pieces)

    def _split_sign(self, coeff: int) -> Tuple[bool, str]:
        if isinstance(self.domain, IntegerRing):
            return coeff < 0, str(abs(coeff))
        if coeff < self.domain.p:
            return False, str(coeff)
        return False, str(self.domain.wrap(coeff))


def default_names(nvars: int) -> Tuple[str, ...]:
    """Return the conventional variable names for a given number of variables."""

    if nvars == 1:
        return ("t",)
    if nvars <= 3:
        return ("x", "y", "z")[:nvars]
    return tuple(f"x{index}" for index in range(nvars))


def poly_arith(op: str, left: MultiPoly, right) -> MultiPoly:
    """Apply add, sub, mul, or scale (right is then a domain element) to polynomials."""

    if op == "add":
        return left + right
    if op == "sub":
        return left - right
    if op == "mul":
        return left * right
    if op == "scale":
        return left.scale(right)
    raise ValueError(f"unknown polynomial operation {op!r}")


def evaluate(poly: MultiPoly, point: Sequence[FieldElem]) -> FieldElem:
    """Evaluate a polynomial at a point of field elements."""

    if len(point) != poly.nvars:
        raise ArityMismatch(f"expected {poly.nvars} coordinates, got {len(point)}")
    if not point:
        raise ArityMismatch("can't infer the field from an empty point")
    spec = point[0].spec
    codes = [spec.element(coord).code for coord in point]
    return spec.wrap(poly.over(spec).evaluate_codes(codes, spec))


def reduce_mod_p(poly: MultiPoly, spec: FieldSpec) -> MultiPoly:
    """Reduce an integer polynomial's coefficients into the prime subfield of spec."""

    if not isinstance(poly.domain, IntegerRing):
        raise DomainMismatch(f"reduce_mod_p needs integer coefficients, not {poly.domain}")
    return MultiPoly.from_dict(
        poly.nvars,
        {exponents: spec.from_int(coeff) for exponents, coeff in poly.terms},
        spec,
    )


def substitute(
    poly: MultiPoly,
    replacements: Sequence[MultiPoly],
    term_budget: int = DEFAULT_TERM_BUDGET,
) -> MultiPoly:
    """Return poly(g_1, ..., g_n), expanded, raising BudgetExceeded past term_budget terms."""

    if len(replacements) != poly.nvars:
        raise ArityMismatch(f"expected {poly.nvars} replacements, got {len(replacements)}")
    if not replacements:
        return poly

    first = replacements[0]
    for replacement in replacements:
        first._check(replacement)

    nvars = first.nvars
    domain = first.domain
    if poly.domain != domain:
        if not isinstance(domain, FieldSpec):
            raise DomainMismatch(f"can't substitute integer polynomials into {poly.domain}")
        poly = poly.over(domain)

    # powers[var][e] caches g_var ** e as it's needed.
    powers: List[Dict[int, MultiPoly]] = [
        {0: MultiPoly.constant(nvars, 1, domain), 1: replacement} for replacement in replacements
    ]

    def power_of(var: int, exponent: int) -> MultiPoly:
        cache = powers[var]
        if exponent not in cache:
            best = max(known for known in cache if known <= exponent)
            value = cache[best]
            for step in range(best + 1, exponent + 1):
                value = value.multiply(replacements[var], term_budget)
                cache[step] = value
        return cache[exponent]

    total = MultiPoly.zero(nvars, domain)
    for exponents, coeff in poly.terms:
        product = MultiPoly.constant(nvars, 1, domain).scale(coeff)
        for var, exponent in enumerate(exponents):
            if exponent:
                product = product.multiply(power_of(var, exponent), term_budget)
        total = total + product
        if len(total.terms) > term_budget:
            raise BudgetExceeded("polynomial term count", term_budget, len(total.terms))
    return total


def total_degree(poly: MultiPoly) -> Union[int, _NegInfinity]:
    """Return the total degree of a polynomial."""

    return poly.total_degree()


def is_homogeneous(poly: MultiPoly) -> bool:
    """Return True if the polynomial is homogeneous."""

    return poly.is_homogeneous()


_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<element>\[[^\]]*\])"
    r"|(?P<op>\*\*|[-+*^()]))"
)


class _Parser:
    """A recursive descent parser for polynomial expressions."""

    def __init__(
        self,
        text: str,
        var_names: Sequence[str],
        params: Mapping[str, int],
        domain: CoefficientDomain,
        term_budget: int = DEFAULT_TERM_BUDGET,
    ):
        self.text = text
        self.term_budget = term_budget
        self.names = {name: index for index, name in enumerate(var_names)}
        self.nvars = len(var_names)
        self.params = params
        self.domain = domain
        self.tokens = list(self._tokenize())
        self.index = 0

    def _tokenize(self) -> Iterable[Tuple[str, str, int]]:
        position = 0
        while position < len(self.text):
            if self.text[position:].strip() == "":
                break
            match = _TOKEN.match(self.text, position)
            if not match:
                offset = len(self.text[position:]) - len(self.text[position:].lstrip())
                raise PolySyntaxError("unexpected character", self.text, position + offset)
            kind = match.lastgroup
            assert kind is not None
            yield kind, match.group(kind), match.start(kind)
            position = match.end()

    def _peek(self) -> Optional[Tuple[str, str, int]]:
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return None

    def _position(self) -> int:
        token = self._peek()
        return len(self.text) if token is None else token[2]

    def _take(self) -> Tuple[str, str, int]:
        token = self._peek()
        if token is None:
            raise PolySyntaxError("unexpected end of input", self.text, len(self.text))
        self.index += 1
        return token

    def _accept(self, *ops: str) -> Optional[str]:
        token = self._peek()
        if token is not None and token[0] == "op" and token[1] in ops:
            self.index += 1
            return token[1]
        return None

    def parse(self) -> MultiPoly:
        if not self.tokens:
            raise PolySyntaxError("empty expression", self.text, 0)
        result = self._expression()
        if self._peek() is not None:
            raise PolySyntaxError("unexpected token", self.text, self._position())
        return result

    def _expression(self) -> MultiPoly:
        result = self._term()
        while True:
            op = self._accept("+", "-")
            if op is None:
                return result
            right = self._term()
            result = result + right if op == "+" else result - right

    def _term(self) -> MultiPoly:
        result = self._factor()
        while self._accept("*"):
            result = result.multiply(self._factor(), self.term_budget)
        return result

    def _factor(self) -> MultiPoly:
        sign = self._accept("-", "+")
        if sign is not None:
            inner = self._factor()
            return -inner if sign == "-" else inner

        base = self._base()
        if self._accept("^", "**"):
            position = self._position()
            kind, value, _ = self._take()
            if kind != "number":
                raise PolySyntaxError(
                    "exponent must be a non-negative integer", self.text, position
                )
            return base.power(int(value), self.term_budget)
        return base

    def _base(self) -> MultiPoly:
        position = self._position()
        kind, value, _ = self._take()

        if kind == "number":
            return MultiPoly.constant(self.nvars, int(value), self.domain)

        if kind == "name":
            if value in self.names:
                return MultiPoly.variable(self.nvars, self.names[value], self.domain)
            if value in self.params:
                return MultiPoly.constant(self.nvars, self.params[value], self.domain)
            raise PolySyntaxError(f"unknown name {value!r}", self.text, position)

        if kind == "element":
            if not isinstance(self.domain, FieldSpec):
                raise PolySyntaxError("field element literal outside a field", self.text, position)
            try:
                coeffs = [int(piece) for piece in value[1:-1].split(",")]
            except ValueError:
                raise PolySyntaxError("malformed field element", self.text, position) from None
            code = self.domain.code_of(coeffs)
            return MultiPoly.from_dict(self.nvars, {(0,) * self.nvars: code}, self.domain)

        if value == "(":
            inner = self._expression()
            if not self._accept(")"):
                raise PolySyntaxError("expected ')'", self.text, self._position())
            return inner

        raise PolySyntaxError(f"unexpected {value!r}", self.text, position)


def parse_poly(
    text: str,
    var_names: Sequence[str],
    params: Optional[Mapping[str, int]] = None,
    domain: CoefficientDomain = INTEGERS,
    term_budget: int = DEFAULT_TERM_BUDGET,
) -> MultiPoly:
    """Parse text built from +, -, *, ^, integers, parentheses, variables and parameters.

    Parameters are named integer constants, substituted when the text is parsed. Products and
    powers raise BudgetExceeded once they pass term_budget terms.
    """

    return _Parser(text, var_names, params or {}, domain, term_budget).parse()
