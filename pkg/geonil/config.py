"""Manage Geonil's configuration: validated run flags and user-defined systems."""

import pathlib
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, ValidationError, root_validator, validator
from sympy import isprime

from geonil.constants import (
    DEFAULT_ORBIT_BUDGET,
    DEFAULT_SCAN_CAP,
    DEFAULT_TERM_BUDGET,
    EXAMPLE_NAMES,
    CycleMethod,
    Variant,
)
from geonil.dynmap import ExampleInstance, PolyMap, Subvariety
from geonil.exceptions import InvalidSystemError
from geonil.mpoly import INTEGERS, CoefficientDomain, MultiPoly, parse_poly


class SystemDefinition(BaseModel):
    """Describes a system file."""

    name: str
    variables: List[str]
    map: List[str]
    variety: List[str]
    fixed_point: Optional[List[int]] = None
    params: Dict[str, int] = {}

    @validator("variables")
    def variables_are_names(cls, value):  # pylint: disable=no-self-argument
        """Variables are distinct identifiers."""

        if not value:
            raise ValueError("at least one variable is required")
        if len(set(value)) != len(value):
            raise ValueError(f"variables {value} repeat")
        for name in value:
            if not name.isidentifier():
                raise ValueError(f"{name!r} is not a variable name")
        return value

    @validator("variety")
    def variety_is_nonempty(cls, value):  # pylint: disable=no-self-argument
        """A subvariety needs at least one equation."""

        if not value:
            raise ValueError("at least one defining polynomial is required")
        return value

    @root_validator(skip_on_failure=True)
    def arities_match(cls, values):  # pylint: disable=no-self-argument
        """The map has one coordinate per variable, and so does the fixed point."""

        count = len(values["variables"])
        if len(values["map"]) != count:
            raise ValueError(f"the map needs {count} coordinates, not {len(values['map'])}")
        if values["fixed_point"] is None:
            values["fixed_point"] = [0] * count
        elif len(values["fixed_point"]) != count:
            raise ValueError(f"the fixed point needs {count} coordinates")
        return values

    def build(
        self, domain: CoefficientDomain = INTEGERS, term_budget: int = DEFAULT_TERM_BUDGET
    ) -> ExampleInstance:
        """Parse the polynomials and return the system as an ExampleInstance."""

        variables = tuple(self.variables)

        def parse(text: str) -> MultiPoly:
            return parse_poly(text, variables, self.params, domain, term_budget)

        return ExampleInstance(
            name=self.name,
            map=PolyMap(tuple(parse(text) for text in self.map)),
            variety=Subvariety(tuple(parse(text) for text in self.variety)),
            fixed_point=tuple(self.fixed_point or ()),
            params=dict(self.params),
            variables=variables,
        )


def load_system(system_path: pathlib.Path) -> SystemDefinition:
    """Load a system file and return its parsed contents."""

    data = yaml.load(system_path.read_text(), Loader=yaml.SafeLoader)
    return parse_system(data)


def parse_system(block_system: Any) -> SystemDefinition:
    """Parse the dictionary in a system file into a SystemDefinition."""

    if not isinstance(block_system, dict):
        raise InvalidSystemError("a system file must contain a mapping")

    block_system = {**block_system}
    block_system.setdefault("name", "custom")

    try:
        return SystemDefinition(**block_system)
    except ValidationError as exc:
        raise InvalidSystemError(str(exc)) from exc


class RunConfig(BaseModel):
    """Describes one invocation of the command line tool."""

    command: str
    claim: Optional[str] = None
    variant: Variant = Variant.CORRECTED
    example: Optional[str] = None
    system: Optional[pathlib.Path] = None
    a: Optional[int] = None
    p: Optional[int] = None
    m: int = 1
    m_max: int = 1
    point: Optional[str] = None
    method: CycleMethod = CycleMethod.BRENT
    times: int = 2
    poly: Optional[str] = None
    fib_action: Optional[str] = None
    n: Optional[int] = None
    n_max: Optional[int] = None
    a0: Optional[str] = None
    k: Optional[int] = None
    q_max: Optional[int] = None
    q: Optional[int] = None
    max_degree: int = 2
    variety_degree: int = 1
    shard_index: int = 0
    shard_count: int = 1
    seed: Optional[int] = None
    samples: Optional[int] = None
    all_candidates: bool = False
    budget: int = DEFAULT_ORBIT_BUDGET
    term_budget: int = DEFAULT_TERM_BUDGET
    scan_cap: int = DEFAULT_SCAN_CAP
    output_format: str = "json"
    out: Optional[pathlib.Path] = None
    timing: bool = True
    jobs: int = 1
    verbose: int = 0

    @validator("budget", "term_budget", "scan_cap", "jobs", "m", "m_max", "times", "shard_count")
    def positive(cls, value, field):  # pylint: disable=no-self-argument
        """Budgets and counts are positive."""

        if value < 1:
            raise ValueError(f"--{field.name.replace('_', '-')} must be positive, not {value}")
        return value

    @validator("p", "q")
    def prime(cls, value, field):  # pylint: disable=no-self-argument
        """Field characteristics are prime."""

        if value is not None and not isprime(value):
            raise ValueError(f"--{field.name} {value} is not prime")
        return value

    @validator("output_format")
    def known_format(cls, value):  # pylint: disable=no-self-argument
        """Output is JSON lines or CSV."""

        if value not in ("json", "csv"):
            raise ValueError(f"unknown output format {value!r}")
        return value

    @validator("example")
    def known_example(cls, value):  # pylint: disable=no-self-argument
        """Examples are named."""

        if value is not None and value not in EXAMPLE_NAMES:
            raise ValueError(f"unknown example {value!r}; choose from {', '.join(EXAMPLE_NAMES)}")
        return value
