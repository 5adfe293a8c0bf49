"""
Command-line interface
======================
    dlog-sim table          capture probability table
    dlog-sim build-hist     build and save a histogram
    dlog-sim sample         sample (j, k) outputs from a histogram
    dlog-sim solve          recover d from one pair
    dlog-sim simulate       end-to-end simulation campaign
    dlog-sim exact-compare  exact oracle versus heuristic
    dlog-sim cost           quantum group-operation count

Exit codes: 0 success, 1 usage or input error, 2 computation failure,
3 no solution, 4 resource guard.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
import pandas as pd
from pandera.errors import SchemaError, SchemaErrors
from pydantic import ValidationError
from sympy import nextprime, prevprime

from dlog_simulator import __version__
from dlog_simulator.config import get_settings, load_config
from dlog_simulator.exceptions import (
    DlogSimulatorError,
    HistogramFormatError,
    InvalidInstanceError,
    ReportFormatError,
    ResourceGuardError,
)
from dlog_simulator.histogram.builder import build
from dlog_simulator.histogram.codec import deserialize, serialize
from dlog_simulator.histogram.sampler import OutsideCapture, sample
from dlog_simulator.kernel.schemas import FrequencyPair, ProblemInstance, PublicInstance
from dlog_simulator.logging_setup import setup_logging
from dlog_simulator.oracle.exact import METHODS, exact_distribution
from dlog_simulator.oracle.report import AGREEMENT_BOUND, compare_report
from dlog_simulator.outputs import atomic_write, git_commit, provenance_lines
from dlog_simulator.pipeline.base import PipelineContext, SimulationPipeline
from dlog_simulator.pipeline.steps import (
    HistogramStep,
    PostProcessingStep,
    ReportStep,
    SamplingStep,
)
from dlog_simulator.quadrature.capture import capture_probability, capture_table
from dlog_simulator.rng import make_rng, uniform_below
from dlog_simulator.solver.postprocess import search_bound, solve
from dlog_simulator.solver.verifier import VerifierFactory

logger = logging.getLogger("dlog_simulator.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTATION = 2
EXIT_NO_SOLUTION = 3
EXIT_RESOURCE = 4

DEFAULT_SEED = 1


# --- FLAG PARSING ---


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; 2 is reserved for computation failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_int(text: str) -> int:
    """Decimal or 0x-hex."""
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def parse_int_list(text) -> list[int]:
    """'0,1,2', '0..8' or a mix such as '0..2,10'; YAML lists pass through."""
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    values = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = (parse_int(p) for p in part.split("..", 1))
            values.extend(range(lo, hi + 1))
        elif part:
            values.append(parse_int(part))
    if not values:
        raise argparse.ArgumentTypeError(f"empty list: {text!r}")
    return values


def resolve_r(text: str, m: int, rng: np.random.Generator) -> int:
    """Explicit value, or one of the presets max, min, prime:<bits>."""
    if text == "max":
        return (1 << m) - 1
    if text == "min":
        return (1 << (m - 1)) + 1
    if text.startswith("prime:"):
        bits = parse_int(text.split(":", 1)[1])
        start = (1 << (bits - 1)) + uniform_below(rng, 1 << (bits - 1))
        prime = nextprime(start - 1)
        return prime if prime < 1 << bits else prevprime(1 << bits)
    return parse_int(text)


def _pick(flag, section: dict, key: str, default):
    """CLI flag, then YAML campaign value, then built-in default."""
    if flag is not None:
        return flag
    return section.get(key, default)


def _flags(args) -> dict:
    return {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in ("handler",) and value is not None
    }


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
        logger.info(f"💾 Written to {out}")
    else:
        sys.stdout.write(text)


def _instance(
    args, rng: np.random.Generator, stored: ProblemInstance | None = None
) -> ProblemInstance:
    """Flags first; r and d of a loaded histogram fill what the flags omit."""
    if args.r is not None:
        r = resolve_r(args.r, args.m, rng)
    elif stored is not None:
        r = stored.r
    else:
        raise ValueError("--r is required unless --hist is given")
    if args.d is not None:
        d = args.d
    elif stored is not None:
        d = stored.d
    else:
        d = uniform_below(rng, r)
    return ProblemInstance(m=args.m, ell=args.ell, r=r, d=d)


def _quadrature(args):
    return get_settings().quadrature_config(args.precision)


# --- COMMANDS ---


def cmd_table(args, campaign: dict) -> int:
    section = campaign.get("table", {})
    rng = make_rng(_pick(args.seed, section, "seed", DEFAULT_SEED))
    r = resolve_r(args.r, args.m, rng)
    ells = parse_int_list(_pick(args.ell, section, "ell", "0"))
    Bs = parse_int_list(_pick(args.B, section, "B", "0"))
    PublicInstance(m=args.m, ell=max(ells), r=r)

    table = capture_table(
        args.m, r, ells, Bs, _quadrature(args), workers=args.workers
    )
    if not table.is_monotone():
        logger.warning("⚠️ Capture table is not monotone in ell and B")
    _emit(table.to_text(provenance_lines(_flags(args))), args.out)
    return EXIT_OK


def cmd_build_hist(args, campaign: dict) -> int:
    section = campaign.get("simulation", {})
    rng = make_rng(_pick(args.seed, section, "seed", DEFAULT_SEED))
    inst = _instance(args, rng)
    cells_per_unit = _pick(
        args.cells_per_unit, section, "cells_per_unit", get_settings().CELLS_PER_UNIT
    )
    hist = build(inst, args.B_max, cells_per_unit, _quadrature(args))
    atomic_write(args.out, serialize(hist))
    logger.info(f"💾 Histogram for d={inst.d} written to {args.out}")
    return EXIT_OK


def cmd_sample(args, campaign: dict) -> int:
    section = campaign.get("simulation", {})
    hist = deserialize(Path(args.hist).read_bytes())
    rng = make_rng(_pick(args.seed, section, "seed", DEFAULT_SEED))
    count = _pick(args.count, section, "count", 1000)

    rows = []
    for outcome in sample(hist.instance, hist, rng, count):
        if outcome is OutsideCapture:
            rows.append({"outcome": "outside"})
        else:
            rows.append(
                {
                    "outcome": "pair",
                    "j": outcome.j,
                    "k": outcome.k,
                    "Delta": outcome.Delta,
                    "alpha_r": outcome.alpha_r,
                    "alpha_d": outcome.alpha_d,
                }
            )
    columns = ["outcome", "j", "k", "Delta", "alpha_r", "alpha_d"]
    frame = pd.DataFrame(rows, columns=columns, dtype=object)
    body = frame.to_csv(sep="\t", index=False, na_rep="")
    _emit("\n".join(provenance_lines(_flags(args))) + "\n" + body, args.out)
    return EXIT_OK


def cmd_solve(args, campaign: dict) -> int:
    r = resolve_r(args.r, args.m, make_rng(0))
    pub = PublicInstance(m=args.m, ell=args.ell, r=r)
    pair = FrequencyPair(j=args.j, k=args.k)
    if args.d is not None:
        verifier = VerifierFactory.get_verifier("equality", d=args.d)
    elif None not in (args.p, args.g, args.x):
        verifier = VerifierFactory.get_verifier("group", p=args.p, g=args.g, x=args.x)
    else:
        raise InvalidInstanceError("solve needs --d, or --p, --g and --x")

    result = solve(pub, pair, args.B, verifier, get_settings().TAU_BOUND)
    _emit(result.model_dump_json(indent=2) + "\n", args.out)
    if not result.success:
        logger.warning(f"🚫 No solution: {result.reason.value}")
        return EXIT_NO_SOLUTION
    return EXIT_OK


def cmd_simulate(args, campaign: dict) -> int:
    section = campaign.get("simulation", {})
    seed = _pick(args.seed, section, "seed", DEFAULT_SEED)
    rng = make_rng(seed)
    stored = None
    if args.hist is not None:
        stored = deserialize(Path(args.hist).read_bytes()).instance
    inst = _instance(args, rng, stored)
    B = _pick(args.B, section, "B", 0)
    B_max = args.B_max if args.B_max is not None else B
    count = _pick(args.count, section, "count", 1000)
    cells_per_unit = _pick(
        args.cells_per_unit, section, "cells_per_unit", get_settings().CELLS_PER_UNIT
    )

    context = PipelineContext(inst=inst, rng=rng, config=campaign)
    pipeline = SimulationPipeline(
        [
            HistogramStep(B_max, cells_per_unit, _quadrature(args), path=args.hist),
            SamplingStep(count),
            PostProcessingStep(B, get_settings().TAU_BOUND),
            ReportStep(B, seed),
        ]
    )
    context = pipeline.execute(context)

    document = {
        "provenance": {
            "version": __version__,
            "commit": git_commit(),
            "flags": {k: str(v) for k, v in _flags(args).items()},
        },
        "report": context.report.model_dump(),
    }
    _emit(json.dumps(document, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_exact_compare(args, campaign: dict) -> int:
    section = campaign.get("oracle", {})
    rng = make_rng(_pick(args.seed, section, "seed", DEFAULT_SEED))
    settings = get_settings()
    max_bits = _pick(args.max_bits, section, "max_bits", settings.ORACLE_MAX_BITS)
    bits = args.m + args.ell
    if bits > max_bits:
        raise ResourceGuardError(
            f"m + ell = {bits} exceeds the oracle limit {max_bits}"
        )

    inst = _instance(args, rng)
    Bs = parse_int_list(_pick(args.B, section, "B", "0,1,2,10"))
    bound = _pick(args.bound, section, "agreement_bound", AGREEMENT_BOUND)

    dist = exact_distribution(inst, method=args.method, max_bits=max_bits)
    report = compare_report(dist, Bs, _quadrature(args))
    _emit(report.to_text(provenance_lines(_flags(args))), args.out)

    if not report.passes(bound):
        logger.error(
            f"❌ Exact and heuristic capture differ by "
            f"{report.max_difference:.4f} > {bound}"
        )
        return EXIT_COMPUTATION
    return EXIT_OK


def cmd_cost(args, campaign: dict) -> int:
    bound = search_bound(args.B, args.ell)
    document = {
        "m": args.m,
        "ell": args.ell,
        "B": args.B,
        "group_operations_per_run": 2 * (args.m + args.ell),
        "padding_overhead": 2 * args.ell,
        "search_bound": bound,
        "search_size": 2 * bound + 1,
    }
    if args.r is not None:
        r = resolve_r(args.r, args.m, make_rng(0))
        pub = PublicInstance(m=args.m, ell=args.ell, r=r)
        p = float(capture_probability(pub, args.B, _quadrature(args)))
        document.update(
            {
                "r": hex(pub.r),
                "capture_probability": p,
                "expected_runs": 1 / p,
                "expected_group_operations": 2 * (args.m + args.ell) / p,
            }
        )
    _emit(json.dumps(document, indent=2) + "\n", args.out)
    return EXIT_OK


# --- PARSER ---


def _instance_flags(parser, need_r: bool = True):
    parser.add_argument("--m", type=parse_int, required=True, help="bit length of r")
    parser.add_argument("--ell", type=parse_int, default=0, help="padding length")
    parser.add_argument(
        "--r",
        required=need_r,
        help="group order: integer, 'max', 'min' or 'prime:<bits>'",
    )


def _common_flags(parser):
    parser.add_argument("--seed", type=parse_int, help="rng seed")
    parser.add_argument("--precision", type=parse_int, help="mantissa bits")
    parser.add_argument("--out", help="output path (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dlog-sim", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", default="config/main.yaml", help="campaign YAML")
    parser.add_argument("--log-level", default=None)
    parser.add_argument("--log-json", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("table", help="capture probability table")
    p.add_argument("--m", type=parse_int, required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--ell", help="e.g. 0..8")
    p.add_argument("--B", help="e.g. 0,1,2,10,20")
    p.add_argument("--workers", type=parse_int, help="processes, one ell row each")
    _common_flags(p)
    p.set_defaults(handler=cmd_table)

    p = sub.add_parser("build-hist", help="build and save a histogram")
    _instance_flags(p)
    p.add_argument("--d", type=parse_int, help="logarithm (uniform when omitted)")
    p.add_argument("--B-max", dest="B_max", type=parse_int, required=True)
    p.add_argument("--cells-per-unit", dest="cells_per_unit", type=parse_int)
    _common_flags(p)
    p.set_defaults(handler=cmd_build_hist)

    p = sub.add_parser("sample", help="sample outputs from a histogram file")
    p.add_argument("--hist", required=True)
    p.add_argument("--count", type=parse_int)
    _common_flags(p)
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("solve", help="recover d from a pair (j, k)")
    _instance_flags(p)
    p.add_argument("--j", type=parse_int, required=True)
    p.add_argument("--k", type=parse_int, required=True)
    p.add_argument("--B", type=parse_int, required=True)
    p.add_argument("--d", type=parse_int, help="known logarithm (equality check)")
    p.add_argument("--p", type=parse_int, help="group modulus")
    p.add_argument("--g", type=parse_int, help="generator of order r")
    p.add_argument("--x", type=parse_int, help="g^d mod p")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_solve)

    p = sub.add_parser("simulate", help="end-to-end simulation")
    _instance_flags(p, need_r=False)
    p.add_argument("--d", type=parse_int)
    p.add_argument("--B", type=parse_int)
    p.add_argument("--B-max", dest="B_max", type=parse_int)
    p.add_argument("--count", type=parse_int)
    p.add_argument("--cells-per-unit", dest="cells_per_unit", type=parse_int)
    p.add_argument("--hist", help="prebuilt histogram file")
    _common_flags(p)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("exact-compare", help="exact oracle versus heuristic")
    _instance_flags(p)
    p.add_argument("--d", type=parse_int)
    p.add_argument("--B", help="e.g. 0,1,2,10")
    p.add_argument("--method", choices=METHODS, default="closed_form")
    p.add_argument("--bound", type=float, help="agreement bound on capture")
    p.add_argument("--max-bits", dest="max_bits", type=parse_int)
    _common_flags(p)
    p.set_defaults(handler=cmd_exact_compare)

    p = sub.add_parser("cost", help="quantum cost per run")
    _instance_flags(p, need_r=False)
    p.add_argument("--B", type=parse_int, default=0)
    p.add_argument("--precision", type=parse_int)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_cost)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    settings = get_settings()
    setup_logging(
        args.log_level or settings.LOG_LEVEL, args.log_json or settings.LOG_JSON
    )

    try:
        campaign = load_config(args.config)
        return args.handler(args, campaign)
    except ResourceGuardError as e:
        logger.error(f"🛑 {e}")
        return EXIT_RESOURCE
    except (
        ValidationError,
        InvalidInstanceError,
        HistogramFormatError,
        ReportFormatError,
        OSError,
        ValueError,
    ) as e:
        logger.error(f"❌ Invalid input: {e}")
        return EXIT_USAGE
    except (DlogSimulatorError, SchemaError, SchemaErrors) as e:
        logger.error(f"❌ Computation failed: {e}")
        return EXIT_COMPUTATION


if __name__ == "__main__":
    sys.exit(main())
