"""Test the claim verifiers."""

import pytest

from geonil import theorems
from geonil.constants import ClaimId, Variant, Verdict
from geonil.dynmap import PolyMap, build_example
from geonil.fields import field_for
from geonil.mpoly import parse_poly

XY = ("x", "y")


def plane_map(*coords):
    return PolyMap(tuple(parse_poly(coord, XY) for coord in coords))


@pytest.fixture(scope="module")
def example1_reports():
    """Example 1 with a = 1 over F_5 and F_25."""

    return theorems.verify_thm2(build_example("example1", {"a": 1}), 5, 2)


def test_verify_thm2__geometric_nilpotence(example1_reports):
    """Every point of Y reaches the origin."""

    report = example1_reports[0]
    assert report.claim == ClaimId.THM2
    assert report.aspect == "geometric_nilpotence"
    assert report.verdict == Verdict.VERIFIED
    assert report.stats["max_depths"] == [3, 6]
    assert [table.field.m for table in report.tables] == [1, 2]
    assert report.params["a"] == 1


def test_verify_thm2__non_uniformity(example1_reports):
    """The deepest point over F_25 is deeper than any over F_5."""

    report = example1_reports[1]
    assert report.aspect == "non_uniformity"
    assert report.verdict == Verdict.VERIFIED
    (witness,) = report.witnesses
    assert witness.kind == "max_depth"
    assert witness.details["depth"] == 6


def test_verify_thm2__pollard_cross_check(example1_reports):
    """Depths are one more than the rho meeting index of t^2 + 1."""

    report = example1_reports[2]
    assert report.aspect == "pollard_cross_check"
    assert report.verdict == Verdict.VERIFIED
    assert report.stats["points_checked"] > 0


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("a", [0, 1, 2])
def test_verify_thm2__example1_grid(p, a):
    """Y reaches the origin over F_p and F_(p^2), in one more step than the rho meeting index."""

    nilpotence, _, pollard = theorems.verify_thm2(build_example("example1", {"a": a}), p, 2)
    assert nilpotence.verdict == Verdict.VERIFIED
    assert [table.nonterminating for table in nilpotence.tables] == [0, 0]
    assert [table.exhausted for table in nilpotence.tables] == [0, 0]
    assert pollard.verdict == Verdict.VERIFIED
    assert not pollard.witnesses


def test_verify_non_uniformity__single_field():
    """One field can't show growth."""

    instance = build_example("example1", {"a": 1})
    report = theorems.verify_non_uniformity(instance, 5, 1)
    assert report.verdict == Verdict.INCONCLUSIVE
    assert "a single field can't show growth" in report.notes


def test_verify_geometric_nilpotence__budget():
    """A budget too small to finish leaves the question open."""

    instance = build_example("example1", {"a": 1})
    report = theorems.verify_geometric_nilpotence(instance, 5, 1, budget=1)
    assert report.verdict == Verdict.INCONCLUSIVE
    assert report.budgets["orbit_steps"] == 1
    assert {witness.kind for witness in report.witnesses} >= {"budget_exhausted"}


def test_verify_thm3__literal_falsified():
    """Example 2 as printed has cycles on Y over F_3."""

    report = theorems.verify_thm3(Variant.LITERAL, 3, 1)
    assert report.claim == ClaimId.THM3
    assert report.verdict == Verdict.FALSIFIED
    cycles = [witness for witness in report.witnesses if witness.kind == "cycle"]
    assert cycles[0].point == [[0], [2], [2]]
    assert cycles[0].details == {"tail": 0, "cycle_len": 2}


def test_verify_thm3__corrected():
    """The corrected map contracts Y in exactly p steps off z = 0."""

    report = theorems.verify_thm3(Variant.CORRECTED, 3, 2)
    assert report.verdict == Verdict.VERIFIED
    assert report.stats["bound"] == 4
    assert report.stats["observed_max_depth"] == 3
    assert report.stats["exact_law_holds"] is True
    assert report.tables[1].hist == {0: 1, 1: 8, 3: 72}


@pytest.mark.parametrize("p", [2, 3, 5])
def test_verify_thm3__corrected_exact_law(p):
    """Depth is p off z = 0, 1 on it and 0 at the origin, over F_p and F_(p^2)."""

    report = theorems.verify_thm3(Variant.CORRECTED, p, 2)
    assert report.verdict == Verdict.VERIFIED
    assert report.stats["exact_law_holds"] is True
    assert report.stats["max_depth"] == p
    assert not [witness for witness in report.witnesses if witness.kind == "depth_law"]


def test_verify_thm3__depth_stats():
    """Reports carry one histogram per field and the largest depth seen."""

    report = theorems.verify_thm3(Variant.CORRECTED, 3, 2)
    assert report.stats["depth_hist"] == [{0: 1, 1: 2, 3: 6}, {0: 1, 1: 8, 3: 72}]
    assert report.stats["max_depth"] == 3
    assert report.stats["max_depths"] == [3, 3]
    assert report.stats["points_scanned"] == 90
    assert [modulus.m for modulus in report.moduli] == [1, 2]


def test_verify_thm4__literal():
    """Points (0,0,z) get stuck, so Example 3 as printed isn't geometrically nilpotent."""

    report = theorems.verify_thm4(Variant.LITERAL, 3, 1)
    assert report.verdict == Verdict.FALSIFIED
    assert report.stats["nilpotent_on_base_field"] is False
    cycle_points = [witness.point for witness in report.witnesses if witness.kind == "cycle"]
    assert cycle_points == [[[0], [0], [1]], [[0], [0], [2]], [[2], [2], [2]]]


def test_verify_thm4__corrected():
    """The corrected map still fixes (0,0,2), but its other depths follow the recursion."""

    report = theorems.verify_thm4(Variant.CORRECTED, 3, 1)
    assert report.verdict == Verdict.FALSIFIED
    assert report.stats["fib_points_checked"] == 4
    kinds = {witness.kind for witness in report.witnesses}
    assert "cycle" in kinds
    assert "depth_mismatch" not in kinds


@pytest.mark.parametrize("p", [3, 5, 7])
def test_verify_thm4__corrected_follows_fibonacci(p):
    """Every z != 0, u != 0 point of Y over F_p dies one step after its Fibonacci hit."""

    report = theorems.verify_thm4(Variant.CORRECTED, p, 1)
    assert report.stats["fib_points_checked"] == (p - 1) ** 2
    assert "depth_mismatch" not in {witness.kind for witness in report.witnesses}


def test_verify_thm1__forward():
    """(y, 0) is nilpotent on every field."""

    specs = [field_for(2), field_for(2, 2)]
    report = theorems.verify_thm1(plane_map("y", "0"), specs)
    assert report.claim == ClaimId.THM1_FORWARD
    assert report.verdict == Verdict.VERIFIED
    assert report.stats["symbolic_exponent"] == 2
    assert report.stats["exponents"] == [2, 2]


@pytest.mark.parametrize("coords", [("x", "y"), ("x^2", "y^2")])
def test_verify_thm1__converse(coords):
    """Maps with no constant iterate have two periodic points somewhere."""

    report = theorems.verify_thm1(plane_map(*coords), [field_for(2)], k_max=3)
    assert report.claim == ClaimId.THM1_CONVERSE
    assert report.verdict == Verdict.VERIFIED
    assert report.witnesses[0].kind == "periodic_points"


def test_verify_thm1__inconclusive():
    """Nilpotent on the listed fields without a constant iterate up to k_max."""

    # x -> x^2 - x sends F_2 to 0 but isn't constant.
    poly_map = PolyMap((parse_poly("x^2 - x", ("x",)),))
    report = theorems.verify_thm1(poly_map, [field_for(2)], k_max=2)
    assert report.claim == ClaimId.THM1_CONVERSE
    assert report.verdict == Verdict.INCONCLUSIVE


def test_verify_lemma5_suite():
    """Every seed in Z/n for n <= 12 passes."""

    report = theorems.verify_lemma5_suite(12)
    assert report.verdict == Verdict.VERIFIED
    assert report.stats["checks"] == sum(range(1, 13))
    assert report.stats["longest_cycle"] == 60


def test_verify_lemma5_suite__up_to_50():
    """Every seed in Z/n for n <= 50 passes."""

    report = theorems.verify_lemma5_suite(50)
    assert report.verdict == Verdict.VERIFIED
    assert report.stats["checks"] == sum(range(1, 51))
    assert report.stats["failures"] == 0


def test_prime_power_fields():
    """Every field order up to 9."""

    assert [spec.q for spec in theorems.prime_power_fields(9)] == [2, 3, 4, 5, 7, 8, 9]


def test_verify_generator_bound_suite():
    """The stated bound fails where q - 1 is a Fibonacci number; the sound one holds."""

    identity, stated, sound = theorems.verify_generator_bound_suite(9)
    assert identity.aspect == "exponent_identity"
    assert identity.verdict == Verdict.VERIFIED
    assert stated.aspect == "generator_bound"
    assert stated.verdict == Verdict.FALSIFIED
    assert sorted(witness.field.p ** witness.field.m for witness in stated.witnesses) == [3, 4, 9]
    assert sound.aspect == "generator_bound_sound"
    assert sound.verdict == Verdict.VERIFIED


def test_verify_generator_bound_suite__up_to_64():
    """Same verdicts on every field of order at most 64."""

    reports = theorems.verify_generator_bound_suite(64)
    assert [(report.aspect, report.verdict) for report in reports] == [
        ("exponent_identity", Verdict.VERIFIED),
        ("generator_bound", Verdict.FALSIFIED),
        ("generator_bound_sound", Verdict.VERIFIED),
    ]
    assert len(reports[0].moduli) == len(theorems.prime_power_fields(64))
