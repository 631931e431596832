"""Geonil report models.

Every report or candidate is a pydantic model, serialized as compact JSON with sorted keys so
that identical runs produce identical bytes.
"""

import json
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, root_validator, validator
from sympy import isprime

from geonil import __version__
from geonil.constants import Classification, ClaimId, Verdict
from geonil.fields import FieldSpec, is_irreducible
from geonil.orbits import DepthTable

# A point is written as one coefficient array per coordinate.
PointRecord = List[List[int]]


def smallest_json(data: dict) -> str:
    """Return the smallest possible JSON representation of the dict."""

    return json.dumps(data, sort_keys=True, separators=(",", ":"))


class FieldRecord(BaseModel):
    """The field a computation ran over, with the modulus that fixes its coordinates."""

    p: int
    m: int
    modulus: List[int]

    @validator("p")
    def p_is_prime(cls, value):  # pylint: disable=no-self-argument
        """The characteristic must be prime."""

        if not isprime(value):
            raise ValueError(f"{value} is not prime")
        return value

    @root_validator(skip_on_failure=True)
    def modulus_matches_degree(cls, values):  # pylint: disable=no-self-argument
        """The modulus is monic of degree m and irreducible."""

        modulus, m = values["modulus"], values["m"]
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise ValueError(f"modulus {modulus} is not monic of degree {m}")
        if not is_irreducible(modulus, values["p"]):
            raise ValueError(f"modulus {modulus} is reducible over F_{values['p']}")
        return values

    @classmethod
    def from_spec(cls, spec: FieldSpec) -> "FieldRecord":
        """Describe a FieldSpec."""

        return cls(p=spec.p, m=spec.m, modulus=list(spec.modulus))

    def to_spec(self) -> FieldSpec:
        """Rebuild the FieldSpec this record describes."""

        return FieldSpec(self.p, self.m, tuple(self.modulus))


def point_record(point: Sequence[int], spec: FieldSpec) -> PointRecord:
    """Write a point of codes as coefficient arrays."""

    return [list(spec.coeffs(code)) for code in point]


class WitnessRecord(BaseModel):
    """A concrete piece of evidence for a verdict."""

    kind: str
    field: Optional[FieldRecord] = None
    point: Optional[PointRecord] = None
    details: Dict[str, Any] = {}


class DepthTableRecord(BaseModel):
    """The serialized form of a depth table."""

    field: FieldRecord
    points: int
    depth_min: Optional[int] = None
    depth_max: Optional[int] = None
    depth_mean: Optional[float] = None
    nonterminating: int = 0
    exhausted: int = 0
    hist: Dict[int, int] = {}
    witnesses: List[PointRecord] = []
    max_depth_witness: Optional[PointRecord] = None

    @root_validator(skip_on_failure=True)
    def counts_add_up(cls, values):  # pylint: disable=no-self-argument
        """Every scanned point is either in the histogram or non-terminating."""

        counted = sum(values["hist"].values()) + values["nonterminating"]
        if counted != values["points"]:
            raise ValueError(f"histogram and non-terminating counts sum to {counted}")
        if values["exhausted"] > values["nonterminating"]:
            raise ValueError("more budget exhaustions than non-terminating points")
        return values

    @classmethod
    def from_table(cls, table: DepthTable) -> "DepthTableRecord":
        """Describe a depth table."""

        spec = table.spec
        mean = table.mean_depth
        return cls(
            field=FieldRecord.from_spec(spec),
            points=table.point_count,
            depth_min=table.min_depth,
            depth_max=table.max_depth,
            depth_mean=None if mean is None else round(mean, 6),
            nonterminating=table.non_terminating_count,
            exhausted=table.exhausted_count,
            hist=table.histogram,
            witnesses=[point_record(point, spec) for point in table.witnesses],
            max_depth_witness=(
                None
                if table.max_depth_witness is None
                else point_record(table.max_depth_witness, spec)
            ),
        )

    @property
    def hist_text(self) -> str:
        """Return the histogram as d0:c0;d1:c1;..."""

        return ";".join(f"{depth}:{count}" for depth, count in sorted(self.hist.items()))

    def to_json(self) -> str:
        """Return the table as one compact line of JSON."""

        return smallest_json(json.loads(self.json()))


class VerificationReport(BaseModel):
    """The outcome of checking one claim."""

    claim: ClaimId
    aspect: Optional[str] = None
    params: Dict[str, Any] = {}
    verdict: Verdict
    witnesses: List[WitnessRecord] = []
    stats: Dict[str, Any] = {}
    tables: List[DepthTableRecord] = []
    moduli: List[FieldRecord] = []
    budgets: Dict[str, int] = {}
    notes: List[str] = []
    tool_version: str = __version__
    elapsed_seconds: Optional[float] = None

    class Config:
        """Configure the model."""

        use_enum_values = True

    @root_validator(skip_on_failure=True)
    def evidence_present(cls, values):  # pylint: disable=no-self-argument
        """Falsified reports carry a witness and inconclusive ones carry their budgets."""

        verdict = values["verdict"]
        if verdict == Verdict.FALSIFIED and not values["witnesses"]:
            raise ValueError("a falsified report needs at least one witness")
        if verdict == Verdict.INCONCLUSIVE and not values["budgets"]:
            raise ValueError("an inconclusive report must name the budgets it ran under")
        return values

    def to_json(self, timing: bool = True) -> str:
        """Return the report as one compact line of JSON."""

        exclude = None if timing else {"elapsed_seconds"}
        return smallest_json(json.loads(self.json(exclude=exclude)))


class CandidateRecord(BaseModel):
    """A screened two-variable map and subvariety."""

    index: int
    map: List[str]
    variety: List[str]
    classification: Classification
    reason: str = ""
    witness: Optional[PointRecord] = None
    witness_field: Optional[FieldRecord] = None
    max_depths: List[Optional[int]] = []
    # Set in random mode, where it fixes which indices were drawn.
    seed: Optional[int] = None

    class Config:
        """Configure the model."""

        use_enum_values = True

    def to_json(self) -> str:
        """Return the candidate as one compact line of JSON."""

        return smallest_json(json.loads(self.json()))


class SearchSummary(BaseModel):
    """How many candidates landed in each class."""

    total: int = 0
    rejected_cycle: int = 0
    rejected_uniform: int = 0
    inconclusive: int = 0
    surviving: int = 0

    @root_validator(skip_on_failure=True)
    def conserved(cls, values):  # pylint: disable=no-self-argument
        """Classification counts sum to the total."""

        classified = sum(values[name.value] for name in Classification)
        if classified != values["total"]:
            raise ValueError(f"{classified} classified candidates out of {values['total']}")
        return values


def worst_verdict(verdicts: Sequence[str]) -> Verdict:
    """Combine verdicts: any falsification wins, then any inconclusive result."""

    found = {Verdict(verdict) for verdict in verdicts}
    if Verdict.FALSIFIED in found:
        return Verdict.FALSIFIED
    if Verdict.INCONCLUSIVE in found:
        return Verdict.INCONCLUSIVE
    return Verdict.VERIFIED
