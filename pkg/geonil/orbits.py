"""Iterate maps on finite sets: cycle detection, nilpotency depths, periodic points."""

import logging
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    List,
    Mapping,
    Optional,
    Set,
    Tuple,
    TypeVar,
    Union,
)

from toposort import CircularDependencyError, toposort  # type: ignore

from geonil.constants import DEFAULT_ORBIT_BUDGET, DEFAULT_SCAN_CAP, WITNESS_SAMPLES, CycleMethod
from geonil.dynmap import Point, PolyMap, Subvariety, all_points, check_scan, enumerate_points
from geonil.exceptions import ArityMismatch, SpecMismatch
from geonil.fields import FieldSpec
from geonil.mpoly import MultiPoly

logger = logging.getLogger(__name__)

State = TypeVar("State", bound=Hashable)


@dataclass(frozen=True)
class ReachedTarget:
    """The orbit hit the target after exactly `depth` steps, and no sooner."""

    depth: int


@dataclass(frozen=True)
class EnteredCycle:
    """The orbit fell into a cycle that avoids the target."""

    tail: int
    cycle_len: int
    witness: Hashable


@dataclass(frozen=True)
class BudgetExhausted:
    """Neither the target nor a cycle turned up within the step budget."""

    steps: int


OrbitOutcome = Union[ReachedTarget, EnteredCycle, BudgetExhausted]


def _tail_and_entry(step: Callable, start, cycle_len: int) -> Tuple[int, Hashable]:
    """Given the cycle length, return the tail length and the first point on the cycle."""

    tortoise = hare = start
    for _ in range(cycle_len):
        hare = step(hare)
    tail = 0
    while tortoise != hare:
        tortoise = step(tortoise)
        hare = step(hare)
        tail += 1
    return tail, tortoise


def _brent(step: Callable, start, target, budget: int) -> OrbitOutcome:
    power = cycle_len = 1
    tortoise = start
    hare = step(start)
    steps = 1
    if hare == target:
        return ReachedTarget(steps)

    while tortoise != hare:
        if steps >= budget:
            return BudgetExhausted(steps)
        if power == cycle_len:
            tortoise = hare
            power *= 2
            cycle_len = 0
        hare = step(hare)
        cycle_len += 1
        steps += 1
        if hare == target:
            return ReachedTarget(steps)

    tail, witness = _tail_and_entry(step, start, cycle_len)
    return EnteredCycle(tail, cycle_len, witness)


def _floyd(step: Callable, start, target, budget: int) -> OrbitOutcome:
    tortoise = hare = start
    steps = 0
    while True:
        # The hare visits every orbit index in order, so it checks the target.
        for _ in range(2):
            hare = step(hare)
            steps += 1
            if hare == target:
                return ReachedTarget(steps)
        tortoise = step(tortoise)
        if tortoise == hare:
            break
        if steps >= budget:
            return BudgetExhausted(steps)

    tortoise = start
    tail = 0
    while tortoise != hare:
        tortoise = step(tortoise)
        hare = step(hare)
        tail += 1

    cycle_len = 1
    runner = step(tortoise)
    while runner != tortoise:
        runner = step(runner)
        cycle_len += 1

    return EnteredCycle(tail, cycle_len, tortoise)


def detect_cycle(
    step: Callable[[State], State],
    start: State,
    target: Optional[State],
    budget: int = DEFAULT_ORBIT_BUDGET,
    method: CycleMethod = CycleMethod.BRENT,
) -> OrbitOutcome:
    """Follow start under step until it reaches target or a cycle, in constant memory.

    The target is checked at every step before the cycle test, so a fixed-point target reports
    ReachedTarget rather than EnteredCycle. Tail and cycle lengths are exact.
    """

    if budget < 1:
        raise ValueError(f"orbit budget must be at least 1, not {budget}")
    if start == target:
        return ReachedTarget(0)
    if CycleMethod(method) is CycleMethod.FLOYD:
        return _floyd(step, start, target, budget)
    return _brent(step, start, target, budget)


def _stepper(poly_map: PolyMap, spec: FieldSpec) -> Callable[[Point], Point]:
    compiled = poly_map.compile(spec)
    coords = compiled.coords

    def step(point: Point) -> Point:
        return tuple(coord.evaluate_codes(point, spec) for coord in coords)

    return step


def _origin(poly_map: PolyMap) -> Point:
    return (0,) * poly_map.nvars


def orbit_status(
    poly_map: PolyMap,
    spec: FieldSpec,
    point: Point,
    target: Optional[Point] = None,
    budget: int = DEFAULT_ORBIT_BUDGET,
    method: CycleMethod = CycleMethod.BRENT,
) -> OrbitOutcome:
    """Return how the orbit of a point (given as codes) ends. The target defaults to the origin."""

    if len(point) != poly_map.nvars:
        raise ArityMismatch(f"expected {poly_map.nvars} coordinates, got {len(point)}")
    target = _origin(poly_map) if target is None else tuple(target)
    return detect_cycle(_stepper(poly_map, spec), tuple(point), target, budget, method)


def trajectory(
    poly_map: PolyMap,
    spec: FieldSpec,
    point: Point,
    target: Optional[Point] = None,
    budget: int = DEFAULT_ORBIT_BUDGET,
) -> List[Point]:
    """Return the orbit from point up to the target or the first repeated point."""

    target = _origin(poly_map) if target is None else tuple(target)
    step = _stepper(poly_map, spec)
    current = tuple(point)
    path = [current]
    seen = {current}
    while current != target and len(path) <= budget:
        current = step(current)
        path.append(current)
        if current in seen:
            break
        seen.add(current)
    return path


def pollard_meeting_index(
    step: Callable[[int], int], start: int, budget: int = DEFAULT_ORBIT_BUDGET
) -> Optional[int]:
    """Return the least k with h^k(start) = h^(2k+1)(start), or None past the budget.

    This is the tortoise-and-hare meeting behind Example 1: u_k = h^k(u_0) while
    v_k = h^(2k)(v_0) = h^(2k+1)(u_0) runs twice as fast.
    """

    slow = start
    fast = step(start)
    index = 0
    while slow != fast:
        if index >= budget:
            return None
        slow = step(slow)
        fast = step(step(fast))
        index += 1
    return index


@dataclass
class DepthTable:
    """Per-field statistics of how the points of a variety reach the target."""

    spec: FieldSpec
    point_count: int = 0
    histogram: Dict[int, int] = field(default_factory=dict)
    non_terminating_count: int = 0
    exhausted_count: int = 0
    max_depth_witness: Optional[Point] = None
    witnesses: List[Point] = field(default_factory=list)
    exhausted_witnesses: List[Point] = field(default_factory=list)

    @property
    def max_depth(self) -> Optional[int]:
        return max(self.histogram) if self.histogram else None

    @property
    def min_depth(self) -> Optional[int]:
        return min(self.histogram) if self.histogram else None

    @property
    def mean_depth(self) -> Optional[float]:
        terminating = sum(self.histogram.values())
        if not terminating:
            return None
        return sum(depth * count for depth, count in self.histogram.items()) / terminating

    @property
    def cycle_count(self) -> int:
        """Return how many points were certified to miss the target."""

        return self.non_terminating_count - self.exhausted_count

    def record(self, point: Point, outcome: OrbitOutcome):
        """Add one point's outcome to the table. Points must arrive in scan order."""

        self.point_count += 1
        if isinstance(outcome, ReachedTarget):
            depth = outcome.depth
            if self.max_depth is None or depth > self.max_depth:
                self.max_depth_witness = point
            self.histogram[depth] = self.histogram.get(depth, 0) + 1
            return

        self.non_terminating_count += 1
        if isinstance(outcome, BudgetExhausted):
            self.exhausted_count += 1
            if len(self.exhausted_witnesses) < WITNESS_SAMPLES:
                self.exhausted_witnesses.append(point)
        elif len(self.witnesses) < WITNESS_SAMPLES:
            self.witnesses.append(point)

    def merge(self, other: "DepthTable") -> "DepthTable":
        """Combine two tables over disjoint point sets; the result doesn't depend on the order."""

        if other.spec != self.spec:
            raise SpecMismatch(f"can't merge depth tables over {self.spec} and {other.spec}")

        histogram = dict(self.histogram)
        for depth, count in other.histogram.items():
            histogram[depth] = histogram.get(depth, 0) + count

        max_depth_witness = None
        if histogram:
            top = max(histogram)
            candidates = [
                table.max_depth_witness
                for table in (self, other)
                if table.max_depth == top and table.max_depth_witness is not None
            ]
            max_depth_witness = min(candidates) if candidates else None

        return DepthTable(
            spec=self.spec,
            point_count=self.point_count + other.point_count,
            histogram=dict(sorted(histogram.items())),
            non_terminating_count=self.non_terminating_count + other.non_terminating_count,
            exhausted_count=self.exhausted_count + other.exhausted_count,
            max_depth_witness=max_depth_witness,
            witnesses=sorted(self.witnesses + other.witnesses)[:WITNESS_SAMPLES],
            exhausted_witnesses=sorted(self.exhausted_witnesses + other.exhausted_witnesses)[
                :WITNESS_SAMPLES
            ],
        )


def _profile_range(
    poly_map: PolyMap,
    variety: Subvariety,
    spec: FieldSpec,
    target: Point,
    budget: int,
    start: int,
    stop: int,
    scan_cap: int,
) -> DepthTable:
    """Build the depth table of the variety's points with scan index in [start, stop)."""

    step = _stepper(poly_map, spec)
    table = DepthTable(spec)
    for point in enumerate_points(variety, spec, start, stop, scan_cap):
        table.record(point, detect_cycle(step, point, target, budget))
    table.histogram = dict(sorted(table.histogram.items()))
    return table


def shard_ranges(total: int, count: int) -> List[Tuple[int, int]]:
    """Split [0, total) into count contiguous ranges that cover it exactly."""

    return [(total * index // count, total * (index + 1) // count) for index in range(count)]


def depth_profile(
    poly_map: PolyMap,
    variety: Subvariety,
    spec: FieldSpec,
    target: Optional[Point] = None,
    budget: int = DEFAULT_ORBIT_BUDGET,
    jobs: int = 1,
    scan_cap: int = DEFAULT_SCAN_CAP,
) -> DepthTable:
    """Run every point of the variety over spec to the target and tabulate the depths."""

    if variety.nvars != poly_map.nvars:
        raise ArityMismatch("the map and the variety live in different spaces")
    total = check_scan(spec, variety.nvars, scan_cap)
    target = _origin(poly_map) if target is None else tuple(target)

    if jobs <= 1:
        table = _profile_range(poly_map, variety, spec, target, budget, 0, total, scan_cap)
    else:
        ranges = shard_ranges(total, jobs * 4)
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = [
                executor.submit(
                    _profile_range, poly_map, variety, spec, target, budget, start, stop, scan_cap
                )
                for start, stop in ranges
            ]
            table = DepthTable(spec)
            for future in futures:
                table = table.merge(future.result())

    logger.info(
        "Profiled %d points over %s: max depth %s, %d non-terminating",
        table.point_count,
        spec,
        table.max_depth,
        table.non_terminating_count,
    )
    return table


class _SelfLoop:
    """Stands in for a fixed point's own preimage, which toposort would discard."""

    __slots__ = ("node",)

    def __init__(self, node):
        self.node = node

    def __eq__(self, other) -> bool:
        return isinstance(other, _SelfLoop) and other.node == self.node

    def __hash__(self) -> int:
        return hash(("self-loop", self.node))


def cyclic_nodes(successors: Mapping[State, State]) -> Set[State]:
    """Return the nodes on cycles of a functional graph by peeling nodes without preimages."""

    preimages: Dict[Hashable, Set[Hashable]] = {node: set() for node in successors}
    for node, image in successors.items():
        if image == node:
            loop = _SelfLoop(node)
            preimages[node].add(loop)
            preimages[loop] = {node}
        else:
            preimages[image].add(node)

    try:
        for _ in toposort(preimages):
            pass
    except CircularDependencyError as exc:
        return {node for node in exc.data if not isinstance(node, _SelfLoop)}
    return set()


def functional_graph(
    poly_map: PolyMap, spec: FieldSpec, scan_cap: int = DEFAULT_SCAN_CAP
) -> Dict[Point, Point]:
    """Return the map's action on every point of affine space over spec."""

    check_scan(spec, poly_map.nvars, scan_cap)
    step = _stepper(poly_map, spec)
    return {point: step(point) for point in all_points(spec, poly_map.nvars)}


def periodic_points(
    poly_map: PolyMap, spec: FieldSpec, scan_cap: int = DEFAULT_SCAN_CAP
) -> FrozenSet[Point]:
    """Return the points that lie on cycles of the map over spec."""

    return frozenset(cyclic_nodes(functional_graph(poly_map, spec, scan_cap)))


def _depths_to(successors: Mapping[State, State], roots: Iterable[State]) -> Dict[State, int]:
    """Return every node's distance to the root set, walking preimages breadth first."""

    preimages: Dict[State, List[State]] = {}
    for node, image in successors.items():
        if node != image:
            preimages.setdefault(image, []).append(node)

    depths = {root: 0 for root in roots}
    queue = deque(depths)
    while queue:
        node = queue.popleft()
        for parent in preimages.get(node, ()):
            if parent not in depths:
                depths[parent] = depths[node] + 1
                queue.append(parent)
    return depths


@dataclass(frozen=True)
class NilpotencyVerdict:
    """Whether some iterate of a map sends all of K^n to one point."""

    nilpotent: bool
    exponent: Optional[int] = None
    fixed_point: Optional[Point] = None
    # Two distinct periodic points certify that the map is not nilpotent.
    witnesses: Tuple[Point, ...] = ()

    @property
    def witness(self) -> Optional[Point]:
        return self.witnesses[-1] if self.witnesses else None


def is_nilpotent_on_K(  # pylint: disable=invalid-name
    poly_map: PolyMap, spec: FieldSpec, scan_cap: int = DEFAULT_SCAN_CAP
) -> NilpotencyVerdict:
    """Scan all of K^n to decide whether the map is nilpotent on it."""

    successors = functional_graph(poly_map, spec, scan_cap)
    periodic = cyclic_nodes(successors)

    if len(periodic) == 1:
        (fixed,) = periodic
        depths = _depths_to(successors, [fixed])
        return NilpotencyVerdict(True, exponent=max(depths.values()), fixed_point=fixed)

    fixed_points = sorted(point for point in periodic if successors[point] == point)
    others = sorted(point for point in periodic if successors[point] != point)
    return NilpotencyVerdict(False, witnesses=tuple((fixed_points + others)[:2]))


@dataclass(frozen=True)
class ComponentStats:
    """One connected component of a functional graph: a cycle with trees hanging off it."""

    # The cycle in iteration order, starting from its smallest code.
    cycle: Tuple[int, ...]
    tail_nodes: int
    max_tail: int

    @property
    def cycle_length(self) -> int:
        return len(self.cycle)


@dataclass(frozen=True)
class RhoStats:
    """The functional graph decomposition of t -> h(t) on a finite field."""

    spec: FieldSpec
    components: Tuple[ComponentStats, ...]
    # Distance of every element to its component's cycle.
    depths: Dict[int, int]

    @property
    def node_count(self) -> int:
        return sum(len(comp.cycle) + comp.tail_nodes for comp in self.components)


def rho_stats(poly: MultiPoly, spec: FieldSpec) -> RhoStats:
    """Decompose the dynamics of a univariate polynomial on the elements of spec."""

    if poly.nvars != 1:
        raise ArityMismatch(f"rho statistics need a univariate polynomial, not {poly.nvars}")
    compiled = poly.over(spec)
    successors = {code: compiled.evaluate_codes((code,), spec) for code in spec.codes()}
    on_cycle = cyclic_nodes(successors)

    component_of: Dict[int, int] = {}
    cycles: List[Tuple[int, ...]] = []
    for node in sorted(on_cycle):
        if node in component_of:
            continue
        cycle = [node]
        component_of[node] = len(cycles)
        runner = successors[node]
        while runner != node:
            cycle.append(runner)
            component_of[runner] = len(cycles)
            runner = successors[runner]
        cycles.append(tuple(cycle))

    depths = _depths_to(successors, sorted(on_cycle))

    # Nodes closer to their cycle are settled first, so each node's image already has a component.
    for node in sorted(depths, key=lambda node: depths[node]):
        if node not in component_of:
            component_of[node] = component_of[successors[node]]

    tails: Dict[int, List[int]] = {index: [] for index in range(len(cycles))}
    for node, depth in depths.items():
        if depth:
            tails[component_of[node]].append(depth)

    components = tuple(
        ComponentStats(cycle, len(tails[index]), max(tails[index], default=0))
        for index, cycle in enumerate(cycles)
    )
    return RhoStats(spec, components, dict(sorted(depths.items())))
