"""Search two-variable maps for a geometrically nilpotent but not nilpotent subvariety.

The fixed point is pinned at the origin: maps have no constant terms and varieties pass through
the origin. Every other fixed point is a translate of this case.
"""

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

from geonil.constants import (
    DEFAULT_ORBIT_BUDGET,
    DEFAULT_SCAN_CAP,
    DEFAULT_TERM_BUDGET,
    Classification,
)
from geonil.dynmap import Point, PolyMap, Subvariety, compose, enumerate_points, scan_size
from geonil.exceptions import BudgetExceeded, PreconditionUnmet
from geonil.fields import FieldSpec, check_prime, field_for, make_prime_field
from geonil.models import CandidateRecord, FieldRecord, SearchSummary, point_record
from geonil.mpoly import MultiPoly
from geonil.orbits import (
    BudgetExhausted,
    DepthTable,
    EnteredCycle,
    depth_profile,
    orbit_status,
    shard_ranges,
)

logger = logging.getLogger(__name__)

ORIGIN: Point = (0, 0)
VARIABLES = ("x", "y")


@dataclass(frozen=True)
class SearchSpace:
    """Which maps and varieties to enumerate, and how hard to screen each one."""

    q: int
    max_degree: int
    variety_degree: int
    m_max: int
    budget: int = DEFAULT_ORBIT_BUDGET
    shard_index: int = 0
    shard_count: int = 1
    seed: Optional[int] = None
    # Random mode screens this many indices drawn with the seed; None screens everything.
    samples: Optional[int] = None
    scan_cap: int = DEFAULT_SCAN_CAP
    term_budget: int = DEFAULT_TERM_BUDGET

    def __post_init__(self):
        """Check the caps and the shard descriptor."""

        check_prime(self.q)
        if self.max_degree < 0 or self.variety_degree < 1 or self.m_max < 1 or self.budget < 1:
            raise PreconditionUnmet("search caps must be positive")
        if not 0 <= self.shard_index < self.shard_count:
            raise PreconditionUnmet(
                f"shard {self.shard_index} doesn't exist among {self.shard_count}"
            )
        if self.samples is not None and self.samples < 1:
            raise PreconditionUnmet("random mode needs at least one sample")

    @property
    def base_field(self) -> FieldSpec:
        return make_prime_field(self.q)

    @property
    def map_monomials(self) -> List[Tuple[int, int]]:
        return monomials(self.max_degree)

    @property
    def variety_monomials(self) -> List[Tuple[int, int]]:
        return monomials(self.variety_degree)

    @property
    def variety_count(self) -> int:
        """Return the number of nonzero varieties; the zero polynomial defines the whole plane."""

        return self.q ** len(self.variety_monomials) - 1

    @property
    def total(self) -> int:
        """Return the number of (map, variety) pairs in the whole space."""

        return self.q ** (2 * len(self.map_monomials)) * self.variety_count

    def shard(self) -> range:
        """Return the indices this shard is responsible for."""

        start, stop = shard_ranges(self.total, self.shard_count)[self.shard_index]
        return range(start, stop)

    def indices(self) -> List[int]:
        """Return the indices to screen, in increasing order."""

        shard = self.shard()
        if self.samples is None:
            return list(shard)
        # Draw from the whole space so shards of one seed partition one sample.
        rng = random.Random(self.seed)
        drawn = rng.sample(range(self.total), min(self.samples, self.total))
        return sorted(index for index in drawn if index in shard)


def monomials(degree: int) -> List[Tuple[int, int]]:
    """Return the non-constant monomials x^i y^j up to a total degree, lowest degree first."""

    return [(i, total - i) for total in range(1, degree + 1) for i in range(total, -1, -1)]


def _digits(index: int, base: int, length: int) -> List[int]:
    """Return index in base `base` with `length` digits, most significant first."""

    digits = []
    for _ in range(length):
        index, digit = divmod(index, base)
        digits.append(digit)
    return digits[::-1]


def _poly(spec: FieldSpec, terms: Sequence[Tuple[int, int]], coeffs: Sequence[int]) -> MultiPoly:
    return MultiPoly.from_dict(2, dict(zip(terms, coeffs)), spec)


def decode(space: SearchSpace, index: int) -> Tuple[PolyMap, Subvariety]:
    """Return the (map, variety) pair at a position of the enumeration order."""

    if not 0 <= index < space.total:
        raise IndexError(f"index {index} is outside a space of {space.total}")
    spec = space.base_field
    map_terms = space.map_monomials
    variety_terms = space.variety_monomials

    map_index, variety_index = divmod(index, space.variety_count)
    map_coeffs = _digits(map_index, space.q, 2 * len(map_terms))
    poly_map = PolyMap(
        (
            _poly(spec, map_terms, map_coeffs[: len(map_terms)]),
            _poly(spec, map_terms, map_coeffs[len(map_terms) :]),
        )
    )
    variety = Subvariety(
        (_poly(spec, variety_terms, _digits(variety_index + 1, space.q, len(variety_terms))),)
    )
    return poly_map, variety


def enumerate_space(space: SearchSpace) -> Iterator[Tuple[int, PolyMap, Subvariety]]:
    """Yield (index, map, variety) for every index the space's shard is responsible for."""

    for index in space.indices():
        poly_map, variety = decode(space, index)
        yield index, poly_map, variety


@dataclass
class Candidate:
    """A screened pair and what the screen concluded."""

    index: int
    map: PolyMap
    variety: Subvariety
    classification: Classification
    reason: str = ""
    witness: Optional[Point] = None
    witness_field: Optional[FieldSpec] = None
    tables: List[DepthTable] = field(default_factory=list)

    @property
    def max_depths(self) -> List[Optional[int]]:
        return [table.max_depth for table in self.tables]

    def to_record(self, seed: Optional[int] = None) -> CandidateRecord:
        """Describe the candidate for serialization, with the seed of a random-mode run."""

        return CandidateRecord(
            index=self.index,
            map=self.map.format(VARIABLES),
            variety=self.variety.format(VARIABLES),
            classification=self.classification,
            reason=self.reason,
            witness=(
                None
                if self.witness is None or self.witness_field is None
                else point_record(self.witness, self.witness_field)
            ),
            witness_field=(
                None if self.witness_field is None else FieldRecord.from_spec(self.witness_field)
            ),
            max_depths=self.max_depths,
            seed=seed,
        )


def _is_zero_map(poly_map: PolyMap) -> bool:
    return not any(poly_map.coords)


def _iterate_numeric(poly_map: PolyMap, spec: FieldSpec, point: Point, times: int) -> Point:
    compiled = poly_map.compile(spec)
    for _ in range(times):
        point = compiled.apply(point, spec)
    return point


def _check_next_extension(
    poly_map: PolyMap,
    variety: Subvariety,
    space: SearchSpace,
    power: int,
    iterate: Optional[PolyMap],
) -> Tuple[Optional[Classification], str, Optional[Point], Optional[FieldSpec]]:
    """Apply T^(power) to Y over the next extension past m_max."""

    spec = field_for(space.q, space.m_max + 1)
    if scan_size(spec, 2) > space.scan_cap:
        return None, f"skipped {spec}: past the scan cap", None, None

    compiled = None if iterate is None else iterate.compile(spec)
    for point in enumerate_points(variety, spec, scan_cap=space.scan_cap):
        if compiled is None:
            image = _iterate_numeric(poly_map, spec, point, power)
        else:
            image = compiled.apply(point, spec)
        if image == ORIGIN:
            continue
        outcome = orbit_status(poly_map, spec, point, ORIGIN, space.budget)
        if isinstance(outcome, EnteredCycle):
            reason = f"cycle of length {outcome.cycle_len}"
            return Classification.REJECTED_CYCLE, reason, point, spec
        if isinstance(outcome, BudgetExhausted):
            return Classification.INCONCLUSIVE, "orbit budget exhausted", point, spec
        return None, f"T^({power}) leaves a point of Y over {spec} alive", point, spec

    return Classification.REJECTED_UNIFORM, f"T^({power}) contracts Y over {spec}", None, None


def screen(
    poly_map: PolyMap, variety: Subvariety, space: SearchSpace, index: int = -1
) -> Candidate:
    """Classify one pair.

    First every point of Y over F_{q^m}, m <= m_max, must reach the origin; a cycle rejects
    the pair for good. Then the pair is rejected as uniform if some symbolic iterate vanishes,
    if its maximum depth never grows, or if T^(K) for the largest observed depth K still
    contracts Y over the next extension. Whatever survives is only a lead.
    """

    if poly_map.nvars != 2 or variety.nvars != 2:
        raise PreconditionUnmet("the search screens maps of the plane")
    candidate = Candidate(index, poly_map, variety, Classification.SURVIVING)

    for m in range(1, space.m_max + 1):
        spec = field_for(space.q, m)
        table = depth_profile(
            poly_map, variety, spec, ORIGIN, space.budget, scan_cap=space.scan_cap
        )
        candidate.tables.append(table)
        if table.cycle_count:
            candidate.classification = Classification.REJECTED_CYCLE
            candidate.reason = f"a point of Y over {spec} never reaches the origin"
            candidate.witness, candidate.witness_field = table.witnesses[0], spec
            return candidate
        if table.exhausted_count:
            candidate.classification = Classification.INCONCLUSIVE
            candidate.reason = "orbit budget exhausted"
            candidate.witness, candidate.witness_field = table.exhausted_witnesses[0], spec
            return candidate

    depths = [table.max_depth or 0 for table in candidate.tables]
    deepest = max(depths)

    iterate: Optional[PolyMap] = poly_map
    for k in range(1, max(deepest, 1) + 1):
        if k > 1:
            try:
                iterate = compose(poly_map, iterate, space.term_budget)  # type: ignore
            except BudgetExceeded:
                iterate = None
                break
        if _is_zero_map(iterate):  # type: ignore
            candidate.classification = Classification.REJECTED_UNIFORM
            candidate.reason = f"T^({k}) is the zero map"
            return candidate

    if not any(later > earlier for earlier, later in zip(depths, depths[1:])):
        candidate.classification = Classification.REJECTED_UNIFORM
        candidate.reason = f"maximum depth stays at {deepest}"
        return candidate

    verdict, reason, witness, spec = _check_next_extension(
        poly_map, variety, space, deepest, iterate
    )
    candidate.reason = reason
    candidate.witness, candidate.witness_field = witness, spec
    if verdict is not None:
        candidate.classification = verdict
    return candidate


@dataclass
class SearchResult:
    """Every screened candidate, in index order, with the class counts."""

    candidates: List[Candidate]
    summary: SearchSummary

    @property
    def survivors(self) -> List[Candidate]:
        return [
            candidate
            for candidate in self.candidates
            if candidate.classification == Classification.SURVIVING
        ]


def summarize(candidates: Sequence[Candidate]) -> SearchSummary:
    """Count candidates per class."""

    counts = {name.value: 0 for name in Classification}
    for candidate in candidates:
        counts[Classification(candidate.classification).value] += 1
    return SearchSummary(total=len(candidates), **counts)


def _screen_indices(space: SearchSpace, indices: Sequence[int]) -> List[Candidate]:
    candidates = []
    for index in indices:
        poly_map, variety = decode(space, index)
        candidates.append(screen(poly_map, variety, space, index))
    return candidates


def run_search(space: SearchSpace, jobs: int = 1) -> SearchResult:
    """Screen the space's shard, optionally on a pool of worker processes."""

    indices = space.indices()
    logger.info("Screening %d of %d pairs over GF(%d)", len(indices), space.total, space.q)

    if jobs <= 1 or len(indices) < 2:
        candidates = _screen_indices(space, indices)
    else:
        chunks = [
            indices[start:stop]
            for start, stop in shard_ranges(len(indices), jobs * 4)
            if stop > start
        ]
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            candidates = [
                candidate
                for chunk in executor.map(_screen_indices, [space] * len(chunks), chunks)
                for candidate in chunk
            ]

    candidates.sort(key=lambda candidate: candidate.index)
    summary = summarize(candidates)
    logger.info(
        "Search finished: %d surviving, %d rejected by cycles, %d uniform, %d inconclusive",
        summary.surviving,
        summary.rejected_cycle,
        summary.rejected_uniform,
        summary.inconclusive,
    )
    return SearchResult(candidates, summary)


def merge_results(results: Sequence[SearchResult]) -> SearchResult:
    """Combine the results of disjoint shards."""

    candidates = sorted(
        (candidate for result in results for candidate in result.candidates),
        key=lambda candidate: candidate.index,
    )
    return SearchResult(candidates, summarize(candidates))
