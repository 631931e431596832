#!/usr/bin/env python

"""Geonil checks nilpotence claims for polynomial maps over finite fields."""

import argparse
import logging
import os
import pathlib
import re
import sys
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError

from geonil.config import RunConfig, load_system
from geonil.constants import (
    DEFAULT_ORBIT_BUDGET,
    DEFAULT_SCAN_CAP,
    DEFAULT_TERM_BUDGET,
    EXAMPLE_NAMES,
    JOBS_ENVIRONMENT_VARIABLE,
    CycleMethod,
    ExitCode,
    Variant,
    Verdict,
)
from geonil.dynmap import ExampleInstance, Point, build_example, iterate_symbolic
from geonil.exceptions import GeonilException, PreconditionUnmet
from geonil.fib import (
    AdditiveCyclic,
    MultiplicativeGroup,
    fib_hit_time,
    fibonacci_exponent_bound,
    generator_bound_check,
    verify_lemma5,
)
from geonil.fields import FieldSpec, field_for, find_generator
from geonil.models import DepthTableRecord, PointRecord, VerificationReport, worst_verdict
from geonil.mpoly import parse_poly
from geonil.orbits import (
    EnteredCycle,
    ReachedTarget,
    depth_profile,
    orbit_status,
    rho_stats,
    trajectory,
)
from geonil.reports import write_depth_tables, write_output
from geonil.search import SearchSpace, run_search
from geonil.theorems import (
    verify_generator_bound_suite,
    verify_lemma5_suite,
    verify_thm1,
    verify_thm2,
    verify_thm3,
    verify_thm4,
)

logger = logging.getLogger(__name__)

_COORDINATE = re.compile(r"\[[^\]]*\]|[^,\s]+")

ALL_CLAIMS = ("thm1", "thm2", "thm3", "thm4", "lemma5")
DEFAULT_LEMMA_N_MAX = 50

VERDICT_EXIT_CODES = {
    Verdict.VERIFIED: ExitCode.VERIFIED,
    Verdict.FALSIFIED: ExitCode.FALSIFIED,
    Verdict.INCONCLUSIVE: ExitCode.INCONCLUSIVE,
}


class ArgumentParser(argparse.ArgumentParser):
    """An argument parser whose usage errors exit with the tool's error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ExitCode.ERROR, f"{self.prog}: error: {message}\n")


def parse_element(text: str, spec: FieldSpec) -> int:
    """Return the code of an element written as an integer or as [c0,c1,...]."""

    text = text.strip()
    if text.startswith("["):
        return spec.code_of([int(coeff) for coeff in text.strip("[]").split(",") if coeff.strip()])
    return spec.from_int(int(text))


def parse_point(text: str, spec: FieldSpec) -> Point:
    """Parse coordinates like 2,0,1 or [1,2],0,1 into codes."""

    return tuple(parse_element(token, spec) for token in _COORDINATE.findall(text))


def format_coordinates(coords: PointRecord) -> str:
    """Write a point given as coefficient arrays, with prime field coordinates as plain numbers."""

    parts = [
        str(coeffs[0]) if len(coeffs) == 1 else "[" + ",".join(map(str, coeffs)) + "]"
        for coeffs in coords
    ]
    return "(" + ",".join(parts) + ")"


def format_point(point: Point, spec: FieldSpec) -> str:
    """Write a point of codes."""

    return format_coordinates([list(spec.coeffs(code)) for code in point])


def _instance(config: RunConfig, default: Optional[str] = None) -> ExampleInstance:
    """Return the system named by --system or --example, falling back to a default example."""

    if config.system is not None:
        return load_system(config.system).build(term_budget=config.term_budget)
    name = config.example or default
    if name is None:
        raise PreconditionUnmet("name a system with --example or --system")
    params = {} if config.a is None else {"a": config.a}
    return build_example(name, params)


def _require_p(config: RunConfig) -> int:
    if config.p is None:
        raise PreconditionUnmet(f"{config.command} needs --p")
    return config.p


def _print_reports(reports: Sequence[VerificationReport]):
    for report in reports:
        label = report.claim if report.aspect is None else f"{report.claim}/{report.aspect}"
        print(f"{label}: {report.verdict}")
        for note in report.notes:
            print(f"  note: {note}")
        if report.verdict == Verdict.VERIFIED:
            continue
        for witness in report.witnesses:
            where = f" {format_coordinates(witness.point)}" if witness.point is not None else ""
            details = f" {witness.details}" if witness.details else ""
            print(f"  witness {witness.kind}{where}{details}")


def _finish_reports(config: RunConfig, reports: List[VerificationReport]) -> ExitCode:
    _print_reports(reports)
    write_output(
        config.out,
        reports,
        [table for report in reports for table in report.tables],
        config.output_format == "csv",
        config.timing,
    )
    return VERDICT_EXIT_CODES[worst_verdict([report.verdict for report in reports])]


def command_line_field_info(config: RunConfig) -> ExitCode:
    """Describe the canonical model of a finite field."""

    spec = field_for(_require_p(config), config.m)
    print(spec)
    print(f"q = {spec.q}")
    print(f"modulus coefficients (lowest first): {list(spec.modulus)}")
    print(f"generator: {find_generator(spec)}")
    return ExitCode.VERIFIED


def command_line_orbit(config: RunConfig) -> ExitCode:
    """Follow one point until it reaches the fixed point or a cycle."""

    instance = _instance(config)
    spec = field_for(_require_p(config), config.m)
    if config.point is None:
        raise PreconditionUnmet("orbit needs --point")
    point = parse_point(config.point, spec)
    target = instance.target(spec)

    outcome = orbit_status(instance.map, spec, point, target, config.budget, config.method)
    for step in trajectory(instance.map, spec, point, target, config.budget):
        print(format_point(step, spec))

    if isinstance(outcome, ReachedTarget):
        print(f"depth {outcome.depth}")
        return ExitCode.VERIFIED
    if isinstance(outcome, EnteredCycle):
        print(f"cycle of length {outcome.cycle_len} after a tail of {outcome.tail}")
        return ExitCode.FALSIFIED
    print(f"no verdict within {outcome.steps} steps")
    return ExitCode.INCONCLUSIVE


def command_line_depth_table(config: RunConfig) -> ExitCode:
    """Tabulate how deep the points of a subvariety go, field by field."""

    instance = _instance(config)
    p = _require_p(config)
    records = []
    for m in range(1, config.m_max + 1):
        spec = field_for(p, m)
        table = depth_profile(
            instance.map,
            instance.variety,
            spec,
            instance.target(spec),
            config.budget,
            jobs=config.jobs,
            scan_cap=config.scan_cap,
        )
        records.append(DepthTableRecord.from_table(table))

    write_depth_tables(records, sys.stdout)
    write_output(config.out, records, records, config.output_format == "csv")

    if any(record.nonterminating > record.exhausted for record in records):
        return ExitCode.FALSIFIED
    if any(record.exhausted for record in records):
        return ExitCode.INCONCLUSIVE
    return ExitCode.VERIFIED


def _claim_reports(config: RunConfig, claim: str) -> List[VerificationReport]:
    if claim == "lemma5":
        return [verify_lemma5_suite(config.n_max or DEFAULT_LEMMA_N_MAX)]

    p = _require_p(config)
    options = dict(budget=config.budget, jobs=config.jobs, scan_cap=config.scan_cap)
    if claim == "thm1":
        instance = _instance(config, f"example3_{config.variant.value}")
        specs = [field_for(p, m) for m in range(1, config.m_max + 1)]
        return [
            verify_thm1(
                instance.map, specs, scan_cap=config.scan_cap, term_budget=config.term_budget
            )
        ]
    if claim == "thm2":
        return verify_thm2(_instance(config, "example1"), p, config.m_max, **options)
    if claim == "thm3":
        return [verify_thm3(config.variant, p, config.m_max, **options)]
    if claim == "thm4":
        return [verify_thm4(config.variant, p, config.m_max, **options)]
    raise PreconditionUnmet(f"unknown claim {claim!r}")


def command_line_verify(config: RunConfig) -> ExitCode:
    """Check one claim, or all of them, and report the verdicts."""

    claims = ALL_CLAIMS if config.claim == "all" else (str(config.claim),)
    reports = []
    for claim in claims:
        reports.extend(_claim_reports(config, claim))
    return _finish_reports(config, reports)


def command_line_rho_stats(config: RunConfig) -> ExitCode:
    """Decompose the dynamics of a univariate polynomial into cycles and trees."""

    spec = field_for(_require_p(config), config.m)
    text = config.poly or f"t^2 + {config.a or 0}"
    stats = rho_stats(parse_poly(text, ("t",), None, spec, config.term_budget), spec)

    print(f"{text} over {spec}: {len(stats.components)} component(s)")
    for component in stats.components:
        cycle = ", ".join(str(spec.wrap(code)) for code in component.cycle)
        print(
            f"  cycle of length {component.cycle_length} [{cycle}], "
            f"{component.tail_nodes} tail node(s), longest tail {component.max_tail}"
        )
    return ExitCode.VERIFIED


def _fib_group(config: RunConfig):
    if config.n is not None:
        return AdditiveCyclic(config.n)
    return MultiplicativeGroup(field_for(_require_p(config), config.m))


def _fib_seed(config: RunConfig, group) -> int:
    if config.a0 is None:
        raise PreconditionUnmet("name a seed with --a0")
    if isinstance(group, AdditiveCyclic):
        return int(config.a0) % group.n
    return parse_element(config.a0, group.spec)


def command_line_fib(config: RunConfig) -> ExitCode:
    """Run Fibonacci-type recursions in cyclic groups."""

    if config.fib_action == "hit-time":
        group = _fib_group(config)
        trace = fib_hit_time(group, _fib_seed(config, group), config.budget)
        print(" ".join(str(group.describe(element)) for element in trace.prefix))
        if trace.hit_index is None:
            print(f"no identity within {config.budget} steps")
            return ExitCode.INCONCLUSIVE
        print(f"hit index {trace.hit_index}")
        return ExitCode.VERIFIED

    if config.fib_action == "lemma-check":
        if config.n_max is not None:
            reports = [verify_lemma5_suite(config.n_max)]
        else:
            group = _fib_group(config)
            reports = [verify_lemma5(group, _fib_seed(config, group))]
        return _finish_reports(config, reports)

    if config.fib_action == "generator-bound":
        if config.q_max is not None:
            reports = verify_generator_bound_suite(config.q_max)
        else:
            spec = field_for(_require_p(config), config.m)
            k = config.k if config.k is not None else fibonacci_exponent_bound(spec.q)
            if k is None:
                raise PreconditionUnmet(f"no index satisfies the bound in {spec}")
            reports = [generator_bound_check(spec, k)]
        return _finish_reports(config, reports)

    raise PreconditionUnmet(f"unknown fib action {config.fib_action!r}")


def command_line_compose(config: RunConfig) -> ExitCode:
    """Print a symbolic iterate of a map."""

    instance = _instance(config)
    poly_map = instance.map
    if config.p is not None:
        poly_map = poly_map.compile(field_for(config.p, config.m))
    iterate = iterate_symbolic(poly_map, config.times, config.term_budget)
    for name, text in zip(instance.variables, iterate.format(instance.variables)):
        print(f"{name}' = {text}")
    return ExitCode.VERIFIED


def command_line_search2d(config: RunConfig) -> ExitCode:
    """Search two-variable maps for geometrically nilpotent, non-uniform subvarieties."""

    if config.q is None:
        raise PreconditionUnmet("search2d needs --q")
    space = SearchSpace(
        q=config.q,
        max_degree=config.max_degree,
        variety_degree=config.variety_degree,
        m_max=config.m_max,
        budget=config.budget,
        shard_index=config.shard_index,
        shard_count=config.shard_count,
        seed=config.seed,
        samples=config.samples,
        scan_cap=config.scan_cap,
        term_budget=config.term_budget,
    )
    result = run_search(space, config.jobs)
    summary = result.summary
    print(
        f"total {summary.total}: {summary.rejected_cycle} rejected by cycles, "
        f"{summary.rejected_uniform} uniform, {summary.inconclusive} inconclusive, "
        f"{summary.surviving} surviving"
    )
    chosen = result.candidates if config.all_candidates else result.survivors
    records = [candidate.to_record(space.seed) for candidate in chosen]
    for record in records:
        if record.classification == "surviving":
            print(f"  #{record.index}: {record.map} on {record.variety}: {record.reason}")
    write_output(config.out, records)
    return ExitCode.VERIFIED


COMMANDS: Dict[str, Callable[[RunConfig], ExitCode]] = {
    "field-info": command_line_field_info,
    "orbit": command_line_orbit,
    "depth-table": command_line_depth_table,
    "verify": command_line_verify,
    "rho-stats": command_line_rho_stats,
    "fib": command_line_fib,
    "compose": command_line_compose,
    "search2d": command_line_search2d,
}


def dispatch(config: RunConfig) -> int:
    """Run the configured command and return the process exit code."""

    try:
        return int(COMMANDS[config.command](config))
    except GeonilException as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(ExitCode.ERROR)


def _add_system_arguments(parser: argparse.ArgumentParser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--example", choices=EXAMPLE_NAMES, help="Name of a built-in example")
    group.add_argument("--system", type=pathlib.Path, help="YAML file defining a custom system")
    parser.add_argument("--a", type=int, help="Parameter a of example1")


def _add_field_arguments(parser: argparse.ArgumentParser, m_max: bool = False):
    parser.add_argument("--p", type=int, help="Characteristic of the field")
    if m_max:
        parser.add_argument(
            "--m-max", type=int, default=1, help="Largest extension degree. Default: %(default)s"
        )
    else:
        parser.add_argument(
            "--m", type=int, default=1, help="Extension degree. Default: %(default)s"
        )


def _add_run_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--budget",
        type=int,
        default=DEFAULT_ORBIT_BUDGET,
        help="Steps allowed per orbit. Default: %(default)s",
    )
    parser.add_argument(
        "--term-budget",
        type=int,
        default=DEFAULT_TERM_BUDGET,
        help="Terms allowed in a symbolic composition. Default: %(default)s",
    )
    parser.add_argument(
        "--scan-cap",
        type=int,
        default=DEFAULT_SCAN_CAP,
        help="Points allowed in an exhaustive scan. Default: %(default)s",
    )
    parser.add_argument(
        "--jobs",
        default=os.environ.get(JOBS_ENVIRONMENT_VARIABLE, "1"),
        help=f"Worker processes. Default: ${JOBS_ENVIRONMENT_VARIABLE} or 1",
    )
    parser.add_argument("--out", type=pathlib.Path, help="File to write reports to")
    parser.add_argument(
        "--format",
        dest="output_format",
        choices=("json", "csv"),
        default="json",
        help="Format of --out. Default: %(default)s",
    )
    parser.add_argument(
        "--no-timing",
        dest="timing",
        action="store_false",
        help="Leave timing out of reports so that identical runs write identical bytes",
    )


def build_parser() -> argparse.ArgumentParser:
    """Return the command line parser."""

    parser = ArgumentParser(prog="geonil", description=__doc__)
    parser.add_argument(
        "--verbose", "-v", action="count", default=0, help="Log more; repeat for debug output"
    )

    subparsers = parser.add_subparsers(dest="command")

    # Create the `geonil field-info` parser
    field_info = subparsers.add_parser("field-info", help=command_line_field_info.__doc__)
    _add_field_arguments(field_info)

    # Create the `geonil orbit` parser
    orbit = subparsers.add_parser("orbit", help=command_line_orbit.__doc__)
    _add_system_arguments(orbit)
    _add_field_arguments(orbit)
    orbit.add_argument("--point", required=True, help="Coordinates such as 2,0,1 or [1,2],0,1")
    orbit.add_argument(
        "--method",
        choices=[method.value for method in CycleMethod],
        default=CycleMethod.BRENT.value,
        help="Cycle detection algorithm. Default: %(default)s",
    )
    _add_run_arguments(orbit)

    # Create the `geonil depth-table` parser
    depth_table = subparsers.add_parser("depth-table", help=command_line_depth_table.__doc__)
    _add_system_arguments(depth_table)
    _add_field_arguments(depth_table, m_max=True)
    _add_run_arguments(depth_table)

    # Create the `geonil verify` parser
    verify = subparsers.add_parser("verify", help=command_line_verify.__doc__)
    verify.add_argument(
        "--claim",
        required=True,
        choices=ALL_CLAIMS + ("all",),
        help="Claim to check",
    )
    verify.add_argument(
        "--variant",
        choices=[variant.value for variant in Variant],
        default=Variant.CORRECTED.value,
        help="Transcription of Examples 2 and 3. Default: %(default)s",
    )
    verify.add_argument("--n-max", type=int, help="Largest n for the Z/n suite. Default: 50")
    _add_system_arguments(verify)
    _add_field_arguments(verify, m_max=True)
    _add_run_arguments(verify)

    # Create the `geonil rho-stats` parser
    rho = subparsers.add_parser("rho-stats", help=command_line_rho_stats.__doc__)
    _add_field_arguments(rho)
    rho.add_argument("--a", type=int, help="Use t^2 + a")
    rho.add_argument("--poly", help="A polynomial in t, such as 't^2 + [0,1]'")

    # Create the `geonil fib` parser
    fib = subparsers.add_parser("fib", help=command_line_fib.__doc__)
    fib.add_argument("fib_action", choices=("hit-time", "lemma-check", "generator-bound"))
    fib.add_argument("--n", type=int, help="Use the additive group Z/n")
    _add_field_arguments(fib)
    fib.add_argument("--a0", help="Seed of the recursion")
    fib.add_argument("--n-max", type=int, help="Check every seed of Z/n for n up to this")
    fib.add_argument("--k", type=int, help="Index bound for generator-bound")
    fib.add_argument("--q-max", type=int, help="Check every field up to this size")
    _add_run_arguments(fib)

    # Create the `geonil compose` parser
    composer = subparsers.add_parser("compose", help=command_line_compose.__doc__)
    _add_system_arguments(composer)
    _add_field_arguments(composer)
    composer.add_argument(
        "--times", type=int, default=2, help="Number of iterations. Default: %(default)s"
    )
    _add_run_arguments(composer)

    # Create the `geonil search2d` parser
    search = subparsers.add_parser("search2d", help=command_line_search2d.__doc__)
    search.add_argument("--q", type=int, required=True, help="Size of the (prime) base field")
    search.add_argument(
        "--max-degree", type=int, default=2, help="Map degree cap. Default: %(default)s"
    )
    search.add_argument(
        "--variety-degree", type=int, default=1, help="Variety degree cap. Default: %(default)s"
    )
    search.add_argument(
        "--m-max", type=int, default=3, help="Extensions to screen over. Default: %(default)s"
    )
    search.add_argument("--shard-index", type=int, default=0, help="This shard's index")
    search.add_argument("--shard-count", type=int, default=1, help="Number of shards")
    search.add_argument("--seed", type=int, help="Seed for random mode")
    search.add_argument("--samples", type=int, help="Screen this many random pairs")
    search.add_argument(
        "--all", dest="all_candidates", action="store_true", help="Output every candidate"
    )
    _add_run_arguments(search)

    return parser


def configure_logging(verbosity: int):
    """Log warnings by default, INFO with -v and DEBUG with -vv."""

    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def handle_command_line(argv: Optional[Sequence[str]] = None):
    """Process the command line arguments."""

    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command is None:
        parser.print_help()
        sys.exit(ExitCode.ERROR)

    configure_logging(args.verbose)

    options = {key: value for key, value in vars(args).items() if value is not None}
    try:
        config = RunConfig(**options)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(ExitCode.ERROR)

    logger.debug("Running %s", config)
    sys.exit(dispatch(config))


if __name__ == "__main__":
    handle_command_line()
