"""
Command-line surface: lamtest <command> [options].

Exit codes: 0 positive verdict, 2 negative verdict within bounds
(exhausted, no witness, fuzz failures), 1 usage or input error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, ValidationError

from lamtest import config
from lamtest.errors import LamtestError, UsageError
from lamtest.fuzz import SUITES, FuzzSettings, make_pool, run_suite
from lamtest.hyper import probe, probe_hf, run_counterexample
from lamtest.interp import derivable, member_op
from lamtest.kmodel import BUILTINS, GSpec, Model, builtin, load_model
from lamtest.logging_config import setup_logging
from lamtest.parser import parse, parse_element, parse_judgment
from lamtest.reduction import full_converges, head_converges, render_trace
from lamtest.separation import separating_context
from lamtest.syntax import show

logger = logging.getLogger("cli")

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2

COMMANDS = ("reduce", "member", "typecheck", "probe", "counterexample", "fuzz", "models", "separate")


class Invocation(BaseModel):
    """One reproducible run: identical invocations print identical output."""

    command: Literal[COMMANDS]
    model: str = "dinf"
    model_file: str | None = None
    model_size: int | None = Field(None, ge=1)
    f_table: tuple[int, ...] | None = None
    fuel: int = Field(config.FUEL, ge=0)
    depth: int | None = Field(None, ge=0)
    width: int = Field(config.WIDTH, ge=0)
    seed: int = Field(config.SEED, ge=0)
    search_depth: int = Field(config.SEARCH_DEPTH, ge=0)
    format: Literal["human", "tsv"] = "human"
    exprs: tuple[str, ...] = ()
    strategy: Literal["head", "full"] = "head"
    g: str = "const 1"
    alpha: str | None = None
    suite: str = "all"
    cases: int = Field(100, ge=0)
    size: int = Field(30, ge=1)
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] | None = None

    @property
    def window_depth(self) -> int:
        return config.DEPTH if self.depth is None else self.depth


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _f_table(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"f table must be integers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--model", default="dinf", help=f"builtin model ({', '.join(BUILTINS)})")
    common.add_argument("--model-file", help="model-spec document")
    common.add_argument("--model-size", type=int, help="window size for omega, zed and hf")
    common.add_argument("--f-table", type=_f_table, help="f table for hf, e.g. 1,1,2")
    common.add_argument("--fuel", type=int, default=config.FUEL)
    common.add_argument("--depth", type=int, help="window depth (probe depth for probe)")
    common.add_argument("--width", type=int, default=config.WIDTH)
    common.add_argument("--seed", type=int, default=config.SEED)
    common.add_argument("--search-depth", type=int, default=config.SEARCH_DEPTH)
    common.add_argument("--format", choices=["human", "tsv"], default="human")
    common.add_argument("--log-level", type=str.upper, help="overrides LAMTEST_LOG_LEVEL")

    parser = _Parser(prog="lamtest", description="Executable K-models and the lambda-calculus with tests.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", parents=[common], help="reduce an expression to a may-head-normal form")
    p.add_argument("exprs", nargs=1, metavar="EXPR")
    p.add_argument("--strategy", choices=["head", "full"], default="head")

    p = sub.add_parser("member", parents=[common], help="operational membership via the test oracle")
    p.add_argument("exprs", nargs=1, metavar="JUDGMENT")

    p = sub.add_parser("typecheck", parents=[common], help="search for an intersection-type derivation")
    p.add_argument("exprs", nargs=1, metavar="JUDGMENT")

    p = sub.add_parser("probe", parents=[common], help="look for a chain witness against hyperimmunity")
    p.add_argument("--g", default="const 1")
    p.add_argument("--alpha", help="start element (default: every atom)")

    p = sub.add_parser("counterexample", parents=[common], help="run I and Jg side by side")
    p.add_argument("--g", default="const 1")
    p.add_argument("--alpha", help="head of the chain witness")

    p = sub.add_parser("fuzz", parents=[common], help="randomized property suites")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--size", type=int, default=30)

    sub.add_parser("models", parents=[common], help="list builtin models")

    p = sub.add_parser("separate", parents=[common], help="Böhm-separate two pure lambda-terms")
    p.add_argument("exprs", nargs=2, metavar="TERM")
    return parser


def resolve_model(inv: Invocation) -> Model:
    if inv.model_file:
        path = Path(inv.model_file)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise UsageError(f"cannot read model file {path}: {e}")
        return load_model(text, name=path.stem)
    return builtin(inv.model, size=inv.model_size, table=inv.f_table)


# -------------------------------------------------
# Commands
# -------------------------------------------------
def cmd_reduce(inv: Invocation) -> int:
    model = resolve_model(inv)
    e = parse(inv.exprs[0], model)
    run = full_converges if inv.strategy == "full" else head_converges
    trace = run(model, e, inv.fuel)
    print(render_trace(trace, inv.format))
    return EXIT_OK if trace.converged else EXIT_NEGATIVE


def cmd_member(inv: Invocation) -> int:
    model = resolve_model(inv)
    j = parse_judgment(inv.exprs[0], model)
    if j.point is None:
        raise UsageError("member needs a term judgment with a point")
    verdict = member_op(model, j.subject, j.env, j.point, inv.fuel)
    print(verdict)
    print(render_trace(verdict.witness, inv.format))
    return EXIT_OK if verdict.yes else EXIT_NEGATIVE


def cmd_typecheck(inv: Invocation) -> int:
    model = resolve_model(inv)
    j = parse_judgment(inv.exprs[0], model)
    verdict = derivable(model, j, inv.search_depth)
    print(verdict)
    if verdict.yes:
        print(verdict.witness.render())
    return EXIT_OK if verdict.yes else EXIT_NEGATIVE


def cmd_probe(inv: Invocation) -> int:
    g = GSpec.parse(inv.g)
    depth = config.PROBE_DEPTH if inv.depth is None else inv.depth
    if inv.model == "hf" and not inv.model_file:
        if inv.f_table is None:
            raise UsageError("probe on hf needs --f-table")
        witness = probe_hf(inv.f_table, g, depth)
    else:
        model = resolve_model(inv)
        start = None if inv.alpha is None else [parse_element(inv.alpha, model)]
        witness = probe(model, g, depth, start)
    if witness is None:
        print(f"EXHAUSTED  no witness to depth {depth} for g = {g}")
        return EXIT_NEGATIVE
    print(f"REFUTED  {witness}")
    return EXIT_OK


def cmd_counterexample(inv: Invocation) -> int:
    model = resolve_model(inv)
    g = GSpec.parse(inv.g)
    alpha = None if inv.alpha is None else parse_element(inv.alpha, model)
    depth = config.PROBE_DEPTH if inv.depth is None else inv.depth
    report = run_counterexample(model, g, alpha, inv.fuel, depth)
    print(report.render(inv.format))
    ok = report.i_trace.converged and not report.jg_trace.converged
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_fuzz(inv: Invocation) -> int:
    model = resolve_model(inv)
    settings = FuzzSettings(model, make_pool(model, inv.window_depth, inv.width), inv.size)
    suites = SUITES if inv.suite == "all" else (inv.suite,)
    failed = 0
    for suite in suites:
        summary = run_suite(suite, settings, inv.cases, inv.seed)
        print(summary.render(inv.format))
        failed += summary.failed
    return EXIT_NEGATIVE if failed else EXIT_OK


def cmd_models(inv: Invocation) -> int:
    sep = "\t" if inv.format == "tsv" else "  "
    for name, description in BUILTINS.items():
        print(f"{name}{sep}{description}")
    return EXIT_OK


def cmd_separate(inv: Invocation) -> int:
    model = resolve_model(inv)
    m, n = (parse(text, model) for text in inv.exprs)
    ctx = separating_context(m, n, inv.fuel, model)
    if ctx is None:
        print("UNKNOWN")
        return EXIT_NEGATIVE
    print(show(ctx))
    return EXIT_OK


_DISPATCH = {
    "reduce": cmd_reduce,
    "member": cmd_member,
    "typecheck": cmd_typecheck,
    "probe": cmd_probe,
    "counterexample": cmd_counterexample,
    "fuzz": cmd_fuzz,
    "models": cmd_models,
    "separate": cmd_separate,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        inv = Invocation(**{k: v for k, v in vars(args).items() if v is not None})
    except (UsageError, ValidationError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_ERROR
    setup_logging(inv.log_level)
    logger.debug(f"invocation: {inv.model_dump_json()}")
    try:
        return _DISPATCH[inv.command](inv)
    except LamtestError as e:
        logger.error(f"❌ {inv.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
