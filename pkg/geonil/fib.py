"""Fibonacci-type recursions a_{k+2} = a_{k+1} a_k in finite cyclic groups."""

import logging
from dataclasses import dataclass
from itertools import product
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

from sympy import fibonacci

from geonil.constants import ClaimId, Verdict
from geonil.exceptions import BudgetExhaustedError, PreconditionUnmet
from geonil.fields import FieldSpec, find_generator
from geonil.models import FieldRecord, VerificationReport, WitnessRecord

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True)
class AdditiveCyclic:
    """The additive group Z/n."""

    n: int

    identity = 0

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionUnmet(f"Z/{self.n} isn't a group")

    def __str__(self) -> str:
        return f"Z/{self.n}"

    @property
    def order(self) -> int:
        return self.n

    def contains(self, element: int) -> bool:
        return 0 <= element < self.n

    def combine(self, left: int, right: int) -> int:
        return (left + right) % self.n

    def difference(self, left: int, right: int) -> int:
        """Return left - right."""

        return (left - right) % self.n

    def elements(self) -> Iterator[int]:
        return iter(range(self.n))

    def describe(self, element: int) -> Any:
        return element

    def field_record(self) -> Optional[FieldRecord]:
        return None


@dataclass(frozen=True)
class MultiplicativeGroup:
    """The multiplicative group K* of a finite field, on element codes."""

    spec: FieldSpec

    identity = 1

    def __str__(self) -> str:
        return f"{self.spec}*"

    @property
    def order(self) -> int:
        return self.spec.q - 1

    def contains(self, element: int) -> bool:
        return 0 < element < self.spec.q

    def combine(self, left: int, right: int) -> int:
        return self.spec.mul(left, right)

    def difference(self, left: int, right: int) -> int:
        """Return left / right."""

        return self.spec.mul(left, self.spec.inv(right))

    def elements(self) -> Iterator[int]:
        return iter(self.spec.codes(1))

    def describe(self, element: int) -> Any:
        return list(self.spec.coeffs(element))

    def field_record(self) -> Optional[FieldRecord]:
        return FieldRecord.from_spec(self.spec)


FibGroup = Union[AdditiveCyclic, MultiplicativeGroup]


def pisano_bound(group: FibGroup) -> int:
    """Return a step count that any Fibonacci-type sequence in a cyclic group hits the identity in.

    The Pisano period of n never exceeds 6n, and the hit time is less than the period.
    """

    return 6 * group.order


@dataclass(frozen=True)
class FibTrace:
    """The sequence a_0 = a_1 = seed, a_{k+2} = a_{k+1} a_k, up to its first identity."""

    group: FibGroup
    seed: int
    # None when the caller's budget ran out first.
    hit_index: Optional[int]
    prefix: Tuple[int, ...]


def fib_hit_time(group: FibGroup, a0: int, budget: Optional[int] = None) -> FibTrace:
    """Return the least m with a_m equal to the identity.

    Without an explicit budget the Pisano bound applies, and running past it raises
    BudgetExhaustedError: in a finite cyclic group the identity always turns up. An explicit
    budget that runs out returns a trace with hit_index None.
    """

    strict = budget is None
    budget = pisano_bound(group) if budget is None else budget
    if budget < 1:
        raise ValueError(f"step budget must be at least 1, not {budget}")
    if not group.contains(a0):
        raise PreconditionUnmet(f"{a0} isn't an element of {group}")

    if a0 == group.identity:
        return FibTrace(group, a0, 0, (a0,))

    prefix = [a0, a0]
    previous, current = a0, a0
    while current != group.identity:
        if len(prefix) - 1 >= budget:
            if strict:
                raise BudgetExhaustedError(budget)
            return FibTrace(group, a0, None, tuple(prefix))
        previous, current = current, group.combine(current, previous)
        prefix.append(current)

    return FibTrace(group, a0, len(prefix) - 1, tuple(prefix))


def pair_map(group: FibGroup, state: Pair) -> Pair:
    """H(a, b) = (b, a + b)."""

    first, second = state
    return second, group.combine(first, second)


def pair_map_inverse(group: FibGroup, state: Pair) -> Pair:
    """H^-1(a, b) = (b - a, a)."""

    first, second = state
    return group.difference(second, first), first


def pair_map_cycle(group: FibGroup, state: Pair) -> int:
    """Return the length of the H-cycle through state."""

    start = tuple(state)
    limit = group.order**2
    current = pair_map(group, start)
    length = 1
    while current != start:
        if length > limit:
            raise BudgetExhaustedError(limit)
        current = pair_map(group, current)
        length += 1
    return length


def is_pair_map_bijective(group: FibGroup) -> bool:
    """Check exhaustively that H has the two-sided inverse (a, b) -> (b - a, a)."""

    for state in product(list(group.elements()), repeat=2):
        if pair_map_inverse(group, pair_map(group, state)) != state:
            return False
        if pair_map(group, pair_map_inverse(group, state)) != state:
            return False
    return True


def _report(
    claim: ClaimId,
    aspect: str,
    group: FibGroup,
    verdict: Verdict,
    params: Dict[str, Any],
    witnesses: List[WitnessRecord],
    stats: Dict[str, Any],
    budgets: Dict[str, int],
) -> VerificationReport:
    record = group.field_record()
    return VerificationReport(
        claim=claim,
        aspect=aspect,
        params={"group": str(group), **params},
        verdict=verdict,
        witnesses=witnesses,
        stats=stats,
        moduli=[] if record is None else [record],
        budgets=budgets,
    )


def verify_lemma5(group: FibGroup, a0: int) -> VerificationReport:
    """Check that the sequence seeded (a0, a0) returns to the identity within one H-cycle."""

    identity = group.identity
    cycle_length = pair_map_cycle(group, (identity, a0))

    state = (a0, a0)
    for _ in range(cycle_length - 1):
        state = pair_map(group, state)

    trace = fib_hit_time(group, a0)
    failures = []
    if state != (identity, a0):
        failures.append("H^(L-1)(a0, a0) != (identity, a0)")
    if trace.hit_index is None or trace.hit_index > cycle_length - 1:
        failures.append("first hit comes after L-1")

    stats = {
        "cycle_length": cycle_length,
        "hit_index": trace.hit_index,
        "final_state": [group.describe(element) for element in state],
    }
    witnesses = []
    if failures:
        witnesses.append(
            WitnessRecord(
                kind="sequence",
                field=group.field_record(),
                details={**stats, "seed": group.describe(a0), "failures": failures},
            )
        )
    logger.debug(
        "Lemma check in %s for %s: cycle %d, hit %s", group, a0, cycle_length, trace.hit_index
    )
    return _report(
        ClaimId.LEMMA5,
        "pair_map_cycle",
        group,
        Verdict.FALSIFIED if failures else Verdict.VERIFIED,
        {"a0": group.describe(a0)},
        witnesses,
        stats,
        {"steps": pisano_bound(group)},
    )


def fibonacci_number(index: int) -> int:
    """Return F_index with F_1 = F_2 = 1."""

    return int(fibonacci(index))


def fib_sequence(group: FibGroup, a0: int, length: int) -> List[int]:
    """Return a_0, ..., a_{length-1} without stopping at the identity."""

    sequence = [a0, a0][:length]
    while len(sequence) < length:
        sequence.append(group.combine(sequence[-1], sequence[-2]))
    return sequence


def exponent_identity_check(spec: FieldSpec, u0: int, k_max: int) -> VerificationReport:
    """Check that the multiplicative sequence seeded with u0 satisfies a_i = u0^(F_{i+1})."""

    if u0 == 0:
        raise PreconditionUnmet("the multiplicative recursion needs a nonzero seed")
    group = MultiplicativeGroup(spec)
    sequence = fib_sequence(group, u0, k_max + 1)

    witnesses = []
    for index, value in enumerate(sequence):
        expected = spec.power(u0, fibonacci_number(index + 1))
        if value != expected:
            witnesses.append(
                WitnessRecord(
                    kind="exponent_mismatch",
                    field=FieldRecord.from_spec(spec),
                    details={
                        "index": index,
                        "observed": group.describe(value),
                        "expected": group.describe(expected),
                    },
                )
            )
            break

    # The identity first appears at the least m with ord(u0) | F_{m+1}.
    order = spec.order_of(u0)
    predicted = next(
        index
        for index in range(pisano_bound(group) + 1)
        if fibonacci_number(index + 1) % order == 0
    )
    observed = fib_hit_time(group, u0).hit_index
    if observed != predicted:
        witnesses.append(
            WitnessRecord(
                kind="hit_time_mismatch",
                field=FieldRecord.from_spec(spec),
                details={"observed": observed, "predicted": predicted, "order": order},
            )
        )

    return _report(
        ClaimId.THM4,
        "exponent_identity",
        group,
        Verdict.FALSIFIED if witnesses else Verdict.VERIFIED,
        {"u0": group.describe(u0), "k_max": k_max},
        witnesses,
        {"sequence": [group.describe(value) for value in sequence], "hit_index": observed},
        {"k_max": k_max},
    )


def fibonacci_exponent_bound(q: int) -> Optional[int]:
    """Return the largest k with F_{k+1} < q - 1, or None if there's none.

    For every i up to that k, the exponent F_{i+1} lies strictly between 0 and q - 1, so a
    generator's sequence avoids 1 up to index k.
    """

    if q - 1 <= fibonacci_number(1):
        return None
    k = 0
    while fibonacci_number(k + 2) < q - 1:
        k += 1
    return k


def generator_bound_check(spec: FieldSpec, k: int) -> VerificationReport:
    """Check that a generator's sequence avoids 1 at every index up to k, given q - 1 > F_k."""

    if spec.q - 1 <= fibonacci_number(k):
        raise PreconditionUnmet(f"q - 1 = {spec.q - 1} is not greater than F_{k}")

    group = MultiplicativeGroup(spec)
    generator = find_generator(spec).code
    sequence = fib_sequence(group, generator, k + 1)
    hits = [index for index, value in enumerate(sequence) if value == group.identity]

    witnesses = []
    if hits:
        witnesses.append(
            WitnessRecord(
                kind="identity_hit",
                field=FieldRecord.from_spec(spec),
                details={
                    "index": hits[0],
                    "generator": group.describe(generator),
                    "exponent": fibonacci_number(hits[0] + 1),
                },
            )
        )
    return _report(
        ClaimId.THM4,
        "generator_bound",
        group,
        Verdict.FALSIFIED if witnesses else Verdict.VERIFIED,
        {"k": k, "generator": group.describe(generator)},
        witnesses,
        {"sequence": [group.describe(value) for value in sequence]},
        {"k": k},
    )
