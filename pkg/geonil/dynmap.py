"""Polynomial self-maps of affine space, subvarieties, and the named examples."""

from dataclasses import dataclass, field
from itertools import islice, product
from typing import Dict, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from geonil.constants import DEFAULT_SCAN_CAP, DEFAULT_TERM_BUDGET
from geonil.exceptions import (
    ArityMismatch,
    DomainMismatch,
    NotAFixedPoint,
    PreconditionUnmet,
    ScanCapExceeded,
    UnknownName,
)
from geonil.fields import FieldElem, FieldSpec
from geonil.mpoly import (
    INTEGERS,
    CoefficientDomain,
    IntegerRing,
    MultiPoly,
    parse_poly,
    substitute,
)

# Points are tuples of element codes; see geonil.fields.
Point = Tuple[int, ...]

VARIABLES = ("x", "y", "z")


@dataclass(frozen=True)
class PolyMap:
    """A map of affine n-space given by n polynomials in n variables."""

    coords: Tuple[MultiPoly, ...]

    def __post_init__(self):
        """Make sure the coordinates agree with each other."""

        if not self.coords:
            raise ArityMismatch("a map needs at least one coordinate")
        first = self.coords[0]
        for coord in self.coords:
            if coord.nvars != len(self.coords):
                raise ArityMismatch(
                    f"a map of {len(self.coords)}-space needs polynomials in "
                    f"{len(self.coords)} variables, not {coord.nvars}"
                )
            if coord.domain != first.domain:
                raise DomainMismatch("map coordinates have different coefficient domains")

    @property
    def nvars(self) -> int:
        return len(self.coords)

    @property
    def domain(self) -> CoefficientDomain:
        return self.coords[0].domain

    def compile(self, spec: FieldSpec) -> "PolyMap":
        """Return the map with coefficients reduced into spec."""

        if self.domain == spec:
            return self
        return PolyMap(tuple(coord.over(spec) for coord in self.coords))

    def apply(self, point: Point, spec: FieldSpec) -> Point:
        """Apply a compiled map to a point of codes."""

        return tuple(coord.evaluate_codes(point, spec) for coord in self.coords)

    def is_constant(self) -> bool:
        """Return True if every coordinate is a constant polynomial."""

        return all(coord.is_constant() for coord in self.coords)

    def format(self, var_names: Optional[Sequence[str]] = None) -> List[str]:
        """Return the printed form of each coordinate."""

        return [coord.format(var_names) for coord in self.coords]


@dataclass(frozen=True)
class Subvariety:
    """The common zeros of a nonempty list of polynomials."""

    defining: Tuple[MultiPoly, ...]

    def __post_init__(self):
        """Make sure the equations live in the same space."""

        if not self.defining:
            raise ArityMismatch("a subvariety needs at least one defining polynomial")
        if len({poly.nvars for poly in self.defining}) != 1:
            raise ArityMismatch("defining polynomials have different numbers of variables")

    @property
    def nvars(self) -> int:
        return self.defining[0].nvars

    def compile(self, spec: FieldSpec) -> "Subvariety":
        """Return the variety with coefficients reduced into spec."""

        return Subvariety(tuple(poly.over(spec) for poly in self.defining))

    def contains(self, point: Point, spec: FieldSpec) -> bool:
        """Return True if a compiled variety contains a point of codes."""

        return all(poly.evaluate_codes(point, spec) == 0 for poly in self.defining)

    def format(self, var_names: Optional[Sequence[str]] = None) -> List[str]:
        """Return the printed form of each equation."""

        return [poly.format(var_names) for poly in self.defining]


@dataclass(frozen=True)
class ExampleInstance:
    """A map, a subvariety, and the fixed point that the subvariety is supposed to fall into."""

    name: str
    map: PolyMap
    variety: Subvariety
    fixed_point: Point
    params: Dict[str, int] = field(default_factory=dict)
    variables: Tuple[str, ...] = VARIABLES

    def __post_init__(self):
        """Check arities and that the fixed point really is fixed."""

        if self.variety.nvars != self.map.nvars or len(self.fixed_point) != self.map.nvars:
            raise ArityMismatch(f"{self.name}: map, variety and fixed point disagree on arity")
        if len(self.variables) != self.map.nvars:
            raise ArityMismatch(f"{self.name}: need {self.map.nvars} variable names")
        domain = self.map.domain
        if isinstance(domain, IntegerRing):
            image = tuple(
                _evaluate_integer(coord, self.fixed_point) for coord in self.map.coords
            )
        else:
            image = self.map.apply(self.fixed_point, domain)
        if image != tuple(self.fixed_point):
            raise NotAFixedPoint(f"{self.name}: {self.fixed_point} maps to {image}")

    def target(self, spec: FieldSpec) -> Point:
        """Return the fixed point as codes over spec. Its coordinates lie in the prime subfield."""

        return tuple(spec.from_int(coordinate) for coordinate in self.fixed_point)


def _evaluate_integer(poly: MultiPoly, point: Sequence[int]) -> int:
    total = 0
    for exponents, coeff in poly.terms:
        value = coeff
        for coordinate, exponent in zip(point, exponents):
            value *= coordinate**exponent
        total += value
    return total


class _Template(NamedTuple):
    coords: Tuple[str, str, str]
    variety: str
    params: Tuple[str, ...] = ()


_TEMPLATES: Mapping[str, _Template] = {
    "example1": _Template(
        (
            "(x^2 + a*z^2)*(x - y)*z^3",
            "((y^2 + a*z^2)^2 + a*z^4)*(x - y)*z",
            "(x - y)*z^5",
        ),
        "x^2 + a*z^2 - y*z",
        ("a",),
    ),
    "example2_literal": _Template(
        ("(x + z)*(x - y)*z", "(y + 2*z)*(x - y)*z", "(x - y)*z^3"),
        "x + z - y",
    ),
    "example2_corrected": _Template(
        ("(x + z)*(x - y)*z", "(y + 2*z)*(x - y)*z", "(x - y)*z^2"),
        "x + z - y",
    ),
    "example3_literal": _Template(
        ("y*(x - 1)*z^2", "x*y*(x - 1)*z", "(x - 1)*z^3"),
        "x - y",
    ),
    "example3_corrected": _Template(
        ("y*(x - z)*z^2", "x*y*(x - z)*z", "(x - z)*z^3"),
        "x - y",
    ),
}


def build_example(
    name: str,
    params: Optional[Mapping[str, int]] = None,
    domain: CoefficientDomain = INTEGERS,
) -> ExampleInstance:
    """Build one of the named examples over the integers or a finite field.

    The literal variants transcribe the printed maps. example2_corrected uses (x-y)z^2 as its
    third coordinate and example3_corrected replaces every (x-1) by (x-z); both restore the
    u = x/z, v = y/z recursions that the proofs rely on.
    """

    try:
        template = _TEMPLATES[name]
    except KeyError:
        raise UnknownName(name) from None

    given = dict(params or {})
    missing = [param for param in template.params if given.get(param) is None]
    if missing:
        raise PreconditionUnmet(f"{name} needs parameter(s) {', '.join(missing)}")
    values = {param: int(given[param]) for param in template.params}

    coords = tuple(parse_poly(text, VARIABLES, values, domain) for text in template.coords)
    variety = Subvariety((parse_poly(template.variety, VARIABLES, values, domain),))

    return ExampleInstance(
        name=name,
        map=PolyMap(coords),
        variety=variety,
        fixed_point=(0, 0, 0),
        params=values,
    )


def eval_map(poly_map: PolyMap, point: Sequence[FieldElem]) -> Tuple[FieldElem, ...]:
    """Apply a map to a point of field elements."""

    if len(point) != poly_map.nvars:
        raise ArityMismatch(f"expected {poly_map.nvars} coordinates, got {len(point)}")
    spec = point[0].spec
    codes = tuple(spec.element(coord).code for coord in point)
    return tuple(spec.wrap(code) for code in poly_map.compile(spec).apply(codes, spec))


def compose(outer: PolyMap, inner: PolyMap, term_budget: int = DEFAULT_TERM_BUDGET) -> PolyMap:
    """Return outer ∘ inner."""

    if outer.nvars != inner.nvars:
        raise ArityMismatch(f"can't compose maps of {outer.nvars}- and {inner.nvars}-space")
    return PolyMap(
        tuple(substitute(coord, inner.coords, term_budget) for coord in outer.coords)
    )


def iterate_symbolic(
    poly_map: PolyMap, times: int, term_budget: int = DEFAULT_TERM_BUDGET
) -> PolyMap:
    """Return the times-fold composition of a map with itself."""

    if times < 1:
        raise ValueError(f"iteration count must be at least 1, not {times}")
    result = poly_map
    for _ in range(times - 1):
        result = compose(poly_map, result, term_budget)
    return result


def membership(variety: Subvariety, point: Sequence[FieldElem]) -> bool:
    """Return True if every defining polynomial vanishes at the point."""

    if len(point) != variety.nvars:
        raise ArityMismatch(f"expected {variety.nvars} coordinates, got {len(point)}")
    spec = point[0].spec
    codes = tuple(spec.element(coord).code for coord in point)
    return variety.compile(spec).contains(codes, spec)


def scan_size(spec: FieldSpec, nvars: int) -> int:
    """Return the number of points of affine nvars-space over spec."""

    return spec.q**nvars


def check_scan(spec: FieldSpec, nvars: int, scan_cap: int = DEFAULT_SCAN_CAP) -> int:
    """Return the scan size, raising ScanCapExceeded if it's larger than the cap."""

    size = scan_size(spec, nvars)
    if size > scan_cap:
        raise ScanCapExceeded(f"scan of {spec} in {nvars} variables", scan_cap, size)
    return size


def all_points(
    spec: FieldSpec, nvars: int, start: int = 0, stop: Optional[int] = None
) -> Iterator[Point]:
    """Yield the points of affine space in scan order, optionally within [start, stop)."""

    return islice(product(range(spec.q), repeat=nvars), start, stop)


def enumerate_points(
    variety: Subvariety,
    spec: FieldSpec,
    start: int = 0,
    stop: Optional[int] = None,
    scan_cap: int = DEFAULT_SCAN_CAP,
) -> Iterator[Point]:
    """Yield the points of the variety over spec whose scan index lies in [start, stop)."""

    check_scan(spec, variety.nvars, scan_cap)
    compiled = variety.compile(spec)
    for point in all_points(spec, variety.nvars, start, stop):
        if compiled.contains(point, spec):
            yield point


def point_index(point: Point, spec: FieldSpec) -> int:
    """Return a point's position in scan order."""

    index = 0
    for code in point:
        index = index * spec.q + code
    return index


def point_elements(point: Point, spec: FieldSpec) -> Tuple[FieldElem, ...]:
    """Convert a point of codes into field elements."""

    return tuple(spec.wrap(code) for code in point)


def point_codes(point: Sequence[FieldElem], spec: FieldSpec) -> Point:
    """Convert a point of field elements into codes."""

    return tuple(spec.element(coord).code for coord in point)


def projection(point: Point, spec: FieldSpec) -> Optional[Tuple[int, int]]:
    """Return (u, v) = (x/z, y/z) for a point of 3-space, or None where z = 0."""

    x, y, z = point
    if z == 0:
        return None
    z_inverse = spec.inv(z)
    return spec.mul(x, z_inverse), spec.mul(y, z_inverse)
