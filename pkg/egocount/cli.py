"""Command line: egocount {orbits, exact, estimate, simulate}.

Exit codes: 0 on success, 1 on I/O errors, 2 on invalid input or an estimation
precondition failure. Failures print one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import typing

import pandas as pd
import yaml
from pydantic import ValidationError

from egocount.config import RunConfig, read_config
from egocount.counting import exact_count
from egocount.errors import EgoCountError
from egocount.estimation import (
    Estimator,
    VarianceMethod,
    estimate_from_egonets,
    estimate_from_graph,
)
from egocount.evaluation import format_report, load_simulation_spec, run_simulation
from egocount.graph import NeighborhoodMode, largest_component, load_graph_file
from egocount.log import setup_logging
from egocount.parallel import default_workers
from egocount.pattern import read_pattern
from egocount.progress import Progress
from egocount.replay import read_replay, replay_from_sample, write_replay

if typing.TYPE_CHECKING:
    from typing import Sequence

    from egocount.estimation import EstimateReport
    from egocount.pattern import PatternSpec

logger = logging.getLogger(__name__)

IO_ERROR = 1
USAGE_ERROR = 2


def _mode(value: str) -> NeighborhoodMode:
    try:
        return NeighborhoodMode.parse(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown neighborhood mode {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="egocount",
        description="Estimate subgraph counts of a network from sampled egonets.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--quiet", action="store_true", help="Only log errors; no progress bar")
    commands = parser.add_subparsers(dest="command", required=True)

    orbits = commands.add_parser("orbits", help="Show the orbits and observable roles of a pattern")
    orbits.add_argument("pattern", help="Pattern file or catalog:NAME")
    orbits.add_argument("--mode", type=_mode)

    exact = commands.add_parser("exact", help="Count a pattern in a whole (small) graph")
    exact.add_argument("--graph", required=True)
    exact.add_argument("--attrs")
    exact.add_argument("--directed", action="store_true")
    exact.add_argument("--pattern", required=True)
    exact.add_argument("--mode", type=_mode)
    exact.add_argument("--budget", type=int)

    # Defaults live in RunConfig; unset flags stay None so a config file can fill them.
    estimate = commands.add_parser("estimate", help="Estimate a count from a sample of egonets")
    estimate.add_argument("--config", help="YAML file with estimate settings")
    estimate.add_argument("--graph")
    estimate.add_argument("--attrs")
    estimate.add_argument("--directed", action="store_true", default=None)
    estimate.add_argument("--largest-component", action="store_true", default=None)
    estimate.add_argument("--pattern")
    estimate.add_argument("--mode", type=_mode)
    estimate.add_argument("--design", choices=["uis-wr", "uis-wor", "wis-wr", "wis-wor", "rw"])
    estimate.add_argument("--thinning", type=int)
    estimate.add_argument("--burn-in", type=int)
    estimate.add_argument("--n", type=int, help="Number of draws n'")
    estimate.add_argument("--seed", type=int)
    estimate.add_argument("--estimator", choices=[e.value for e in Estimator])
    estimate.add_argument("--variance", choices=[v.value for v in VarianceMethod])
    estimate.add_argument("--pop-size", type=int, help="Population size N for replayed samples")
    estimate.add_argument("--replay", help="Estimate from an egonet replay file")
    estimate.add_argument("--save-replay", help="Write the sampled egonets to a replay file")
    estimate.add_argument("--anonymize", action="store_true", default=None)
    estimate.add_argument("--out")
    estimate.add_argument("--format", choices=["json", "csv"])
    estimate.add_argument("--workers", type=int)

    simulate = commands.add_parser("simulate", help="Run a simulation spec")
    simulate.add_argument("spec", help="YAML or JSON simulation spec")
    simulate.add_argument("--replications", type=int)
    simulate.add_argument("--seed", type=int)
    simulate.add_argument("--out")
    simulate.add_argument("--format", choices=["json", "csv"], default="csv")
    simulate.add_argument("--workers", type=int, default=default_workers())

    return parser


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w") as f:
        f.write(text)
    logger.info("Wrote %s", out)


def orbit_report(spec: PatternSpec) -> str:
    orbits = spec.orbits
    observable = list(orbits.observable or ())
    noun = "orbit" if orbits.orbit_count == 1 else "orbits"
    lines = [
        f"{orbits.orbit_count} {noun}, M={list(orbits.multiplicities)}, "
        f"observable={observable}, Σm={orbits.multiplicity_sum}"
    ]
    for i in range(orbits.orbit_count):
        mark = " (observable)" if i in observable else ""
        members = " ".join(map(str, orbits.members(i)))
        lines.append(f"  orbit {i}: {members}{mark}")
    lines.append(f"measurable under {spec.mode.value}")
    return "\n".join(lines) + "\n"


def cmd_orbits(args: argparse.Namespace) -> None:
    spec = read_pattern(args.pattern, mode=args.mode)
    _write(orbit_report(spec), None)


def cmd_exact(args: argparse.Namespace) -> None:
    g = load_graph_file(args.graph, args.attrs, args.directed)
    spec = read_pattern(args.pattern, mode=args.mode)
    kwargs = {} if args.budget is None else {"budget": args.budget}
    _write(f"{exact_count(g, spec, **kwargs)}\n", None)


def run_config(args: argparse.Namespace) -> RunConfig:
    """Config file values, overridden by every flag given on the command line."""
    base = read_config(args.config, RunConfig) if args.config else RunConfig()
    flags = {
        field: getattr(args, field)
        for field in RunConfig.model_fields
        if getattr(args, field, None) is not None
    }
    return RunConfig.model_validate(base.model_dump() | flags)


def format_estimate(report: EstimateReport, fmt: str) -> str:
    if fmt == "csv":
        frame = pd.DataFrame([report.model_dump(mode="json")])
        return frame.to_csv(index=False, lineterminator="\n")
    return report.model_dump_json(indent=2) + "\n"


def cmd_estimate(args: argparse.Namespace) -> None:
    config = run_config(args)
    estimator = config.estimator
    if config.pattern is None:
        raise ValueError("--pattern is required")

    if config.replay is not None:
        replay = read_replay(config.replay)
        spec = read_pattern(config.pattern, mode=config.mode or replay.header.mode)
        report = estimate_from_egonets(
            replay.egonets(),
            replay.to_sample(config.pop_size),
            spec,
            estimator,
            config.variance,
            config.workers,
        )
    else:
        if config.graph is None:
            raise ValueError("--graph or --replay is required")
        g = load_graph_file(config.graph, config.attrs, config.directed)
        if config.largest_component:
            g = largest_component(g)
        spec = read_pattern(config.pattern, mode=config.mode)
        n_prime = config.n if config.n is not None else g.vertex_count
        design = config.sample_design()
        report, egonets, sample = estimate_from_graph(
            g,
            spec,
            design,
            n_prime,
            config.seed,
            estimator,
            config.variance,
            config.workers,
        )
        if config.save_replay is not None:
            write_replay(replay_from_sample(sample, egonets, config.anonymize), config.save_replay)

    _write(format_estimate(report, config.format), config.out)


def cmd_simulate(args: argparse.Namespace) -> None:
    spec = load_simulation_spec(args.spec)
    update = {}
    if args.replications is not None:
        update["replications"] = args.replications
    if args.seed is not None:
        update["seed"] = args.seed
    if update:
        spec = spec.model_copy(update=update)
    with Progress(description="Replications", enabled=not args.quiet) as progress:
        rows = run_simulation(spec, workers=args.workers, progress=progress)
    _write(format_report(rows, args.format), args.out)


COMMANDS = {
    "orbits": cmd_orbits,
    "exact": cmd_exact,
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
}


def _fail(error: BaseException, exit_code: int) -> int:
    payload = {
        "error": type(error).__name__,
        "message": str(error),
        "exit_code": exit_code,
    }
    sys.stderr.write(json.dumps(payload) + "\n")
    return exit_code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose, args.quiet)
    try:
        COMMANDS[args.command](args)
    except EgoCountError as e:
        return _fail(e, e.exit_code)
    except ValidationError as e:
        return _fail(e, USAGE_ERROR)
    except OSError as e:
        return _fail(e, IO_ERROR)
    except (ValueError, KeyError, yaml.YAMLError) as e:
        return _fail(e, USAGE_ERROR)
    return 0
