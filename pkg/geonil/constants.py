"""Common Geonil constants."""

from enum import Enum, IntEnum
from typing import Tuple


class Verdict(str, Enum):
    """Outcomes of checking a claim at desk scale."""

    VERIFIED = "verified"
    FALSIFIED = "falsified"
    INCONCLUSIVE = "inconclusive"


class ClaimId(str, Enum):
    """Claims that the verification harness knows how to check."""

    THM1_FORWARD = "thm1_forward"
    THM1_CONVERSE = "thm1_converse"
    THM2 = "thm2"
    THM3 = "thm3"
    THM4 = "thm4"
    LEMMA5 = "lemma5"


class Variant(str, Enum):
    """Which transcription of a printed example to build."""

    LITERAL = "literal"
    CORRECTED = "corrected"


class CycleMethod(str, Enum):
    """Cycle detection algorithms offered by the orbit iterator."""

    BRENT = "brent"
    FLOYD = "floyd"


class Classification(str, Enum):
    """How the two-variable search classified a candidate."""

    REJECTED_CYCLE = "rejected_cycle"
    REJECTED_UNIFORM = "rejected_uniform"
    INCONCLUSIVE = "inconclusive"
    SURVIVING = "surviving"


class ExitCode(IntEnum):
    """Process exit codes of the command line tool."""

    VERIFIED = 0
    ERROR = 1
    FALSIFIED = 2
    INCONCLUSIVE = 3


EXAMPLE_NAMES: Tuple[str, ...] = (
    "example1",
    "example2_literal",
    "example2_corrected",
    "example3_literal",
    "example3_corrected",
)

# Desk-scale limits. Anything larger than these raises instead of running for days.
FIELD_SIZE_CAP = 2**31
TABLE_FIELD_LIMIT = 2**16
DEFAULT_ORBIT_BUDGET = 1_000_000
DEFAULT_TERM_BUDGET = 1_000_000
DEFAULT_SCAN_CAP = 2_000_000
DEFAULT_SYMBOLIC_DEPTH = 8

# Depth tables keep this many non-terminating points as witnesses.
WITNESS_SAMPLES = 8

JOBS_ENVIRONMENT_VARIABLE = "GEONIL_JOBS"

DEPTH_TABLE_HEADER: Tuple[str, ...] = (
    "p",
    "m",
    "q",
    "points",
    "depth_min",
    "depth_max",
    "depth_mean",
    "nonterminating",
    "hist",
)
