"""Test the two-variable search."""

import io

import pytest

from geonil import reports, search
from geonil.constants import Classification
from geonil.dynmap import PolyMap, Subvariety
from geonil.exceptions import NotPrime, PreconditionUnmet
from geonil.fields import field_for
from geonil.orbits import EnteredCycle, orbit_status
from geonil.mpoly import parse_poly

XY = ("x", "y")


@pytest.fixture
def small_space():
    """Linear maps and lines over F_2."""

    return search.SearchSpace(q=2, max_degree=1, variety_degree=1, m_max=2)


def pair(map_coords, variety):
    spec = field_for(2)
    return (
        PolyMap(tuple(parse_poly(coord, XY, None, spec) for coord in map_coords)),
        Subvariety((parse_poly(variety, XY, None, spec),)),
    )


def test_monomials():
    """Non-constant monomials, lowest degree first."""

    assert search.monomials(2) == [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_space_size(small_space):
    """q^(2 M_D) maps times q^(M_d) - 1 nonzero varieties."""

    assert small_space.variety_count == 3
    assert small_space.total == 48
    assert search.SearchSpace(q=2, max_degree=2, variety_degree=1, m_max=1).total == 3072


def test_space__validation():
    """The base field is prime and the shard exists."""

    with pytest.raises(NotPrime):
        search.SearchSpace(q=4, max_degree=1, variety_degree=1, m_max=1)
    with pytest.raises(PreconditionUnmet):
        search.SearchSpace(q=2, max_degree=1, variety_degree=1, m_max=1, shard_index=2)


def test_decode(small_space):
    """Map coefficients are the most significant digits; varieties skip the zero polynomial."""

    poly_map, variety = search.decode(small_space, 0)
    assert poly_map.format(XY) == ["0", "0"]
    assert variety.format(XY) == ["y"]

    poly_map, variety = search.decode(small_space, 13)
    assert poly_map.format(XY) == ["y", "0"]
    assert variety.format(XY) == ["x"]

    poly_map, variety = search.decode(small_space, 47)
    assert poly_map.format(XY) == ["x + y", "x + y"]
    assert variety.format(XY) == ["x + y"]

    with pytest.raises(IndexError):
        search.decode(small_space, 48)


def test_enumerate_space__covers_every_pair(small_space):
    """Every index decodes to a distinct pair."""

    pairs = {
        (tuple(poly_map.format(XY)), tuple(variety.format(XY)))
        for _, poly_map, variety in search.enumerate_space(small_space)
    }
    assert len(pairs) == 48


def test_screen__cycle(small_space):
    """(x^2, y^2) fixes (0,1) on x = 0."""

    candidate = search.screen(*pair(("x^2", "y^2"), "x"), small_space)
    assert candidate.classification == Classification.REJECTED_CYCLE
    assert candidate.witness == (0, 1)
    assert candidate.witness_field == field_for(2)


def test_screen__nilpotent_shift(small_space):
    """(y, 0) vanishes after two steps."""

    candidate = search.screen(*pair(("y", "0"), "x"), small_space)
    assert candidate.classification == Classification.REJECTED_UNIFORM
    assert candidate.reason == "T^(2) is the zero map"
    assert candidate.max_depths == [2, 2]


def test_screen__zero_map(small_space):
    """The zero map is as uniform as it gets."""

    candidate = search.screen(*pair(("0", "0"), "x"), small_space)
    assert candidate.classification == Classification.REJECTED_UNIFORM
    assert candidate.reason == "T^(1) is the zero map"


def test_screen__budget(small_space):
    """Budget exhaustion is inconclusive, not a rejection."""

    space = search.SearchSpace(q=2, max_degree=1, variety_degree=1, m_max=1, budget=1)
    candidate = search.screen(*pair(("y", "0"), "x"), space)
    assert candidate.classification == Classification.INCONCLUSIVE
    assert candidate.witness == (0, 1)


def test_candidate_to_record(small_space):
    """Records carry the printed map and the witness coordinates."""

    record = search.screen(*pair(("x^2", "y^2"), "x"), small_space, index=7).to_record()
    assert record.index == 7
    assert record.map == ["x^2", "y^2"]
    assert record.classification == "rejected_cycle"
    assert record.witness == [[0], [1]]
    assert record.witness_field.p == 2


def test_candidate_to_record__seed():
    """Random-mode records name the seed that drew them."""

    space = search.SearchSpace(q=2, max_degree=1, variety_degree=1, m_max=1, seed=11, samples=5)
    candidate = search.screen(*pair(("y", "0"), "x"), space, index=13)
    assert candidate.to_record(space.seed).seed == 11
    assert candidate.to_record().seed is None


def test_run_search__conserves_counts(small_space):
    """Every pair lands in exactly one class."""

    result = search.run_search(small_space)
    summary = result.summary
    assert summary.total == 48
    assert [candidate.index for candidate in result.candidates] == list(range(48))
    assert result.candidates[13].classification == Classification.REJECTED_UNIFORM
    assert len(result.survivors) == summary.surviving


def test_run_search__shards_partition_the_space():
    """Merged shards give the unsharded result."""

    def space(index, count):
        return search.SearchSpace(
            q=2, max_degree=1, variety_degree=1, m_max=1, shard_index=index, shard_count=count
        )

    whole = search.run_search(space(0, 1))
    merged = search.merge_results([search.run_search(space(index, 3)) for index in range(3)])
    assert merged.summary == whole.summary
    assert [candidate.index for candidate in merged.candidates] == list(range(48))
    assert [candidate.classification for candidate in merged.candidates] == [
        candidate.classification for candidate in whole.candidates
    ]


def test_run_search__cycle_rejections_hold_up(small_space):
    """Every pair rejected for a cycle has a witness whose orbit really does cycle."""

    rejected = [
        candidate
        for candidate in search.run_search(small_space).candidates
        if candidate.classification == Classification.REJECTED_CYCLE
    ]
    assert rejected
    for candidate in rejected:
        spec = candidate.witness_field
        assert candidate.variety.compile(spec).contains(candidate.witness, spec)
        outcome = orbit_status(candidate.map, spec, candidate.witness, (0, 0), small_space.budget)
        assert isinstance(outcome, EnteredCycle)


def serialized(result, seed=None):
    stream = io.StringIO()
    records = [candidate.to_record(seed) for candidate in result.candidates]
    reports.write_json_lines(records, stream)
    return stream.getvalue()


@pytest.fixture(scope="module")
def quadratic_space_result():
    """Every quadratic map of the plane over F_2 against every line, up to F_8."""

    return search.run_search(search.SearchSpace(q=2, max_degree=2, variety_degree=1, m_max=3))


def test_run_search__quadratic_shards_match_whole_run(quadratic_space_result):
    """Four shards classify all 3072 pairs exactly as one run does, byte for byte."""

    whole = quadratic_space_result
    assert whole.summary.total == 3072
    assert [candidate.index for candidate in whole.candidates] == list(range(3072))
    assert (
        whole.summary.surviving
        + whole.summary.rejected_cycle
        + whole.summary.rejected_uniform
        + whole.summary.inconclusive
        == 3072
    )

    shards = [
        search.run_search(
            search.SearchSpace(
                q=2, max_degree=2, variety_degree=1, m_max=3, shard_index=index, shard_count=4
            )
        )
        for index in range(4)
    ]
    assert [len(shard.candidates) for shard in shards] == [768] * 4
    merged = search.merge_results(shards)
    assert merged.summary == whole.summary
    assert serialized(merged) == serialized(whole)


def test_run_search__same_seed_same_bytes():
    """Two random-mode runs with one seed write identical records."""

    def run():
        space = search.SearchSpace(
            q=2, max_degree=2, variety_degree=1, m_max=2, seed=7, samples=40
        )
        return serialized(search.run_search(space), space.seed)

    assert run() == run()


def test_run_search__parallel():
    """Worker processes classify the same way."""

    space = search.SearchSpace(q=2, max_degree=1, variety_degree=1, m_max=1)
    serial = search.run_search(space)
    parallel = search.run_search(space, jobs=2)
    assert parallel.summary == serial.summary


def test_random_mode__reproducible():
    """A seed fixes the sample, and shards of one seed split it."""

    def space(index=0, count=1):
        return search.SearchSpace(
            q=2,
            max_degree=2,
            variety_degree=1,
            m_max=1,
            seed=11,
            samples=20,
            shard_index=index,
            shard_count=count,
        )

    drawn = space().indices()
    assert len(drawn) == 20
    assert drawn == sorted(drawn)
    assert drawn == space().indices()
    assert sorted(space(0, 2).indices() + space(1, 2).indices()) == drawn
