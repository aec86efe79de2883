"""
FastAPI Application - Lambda-Test API
"""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from lamtest import config
from lamtest.errors import LamtestError
from lamtest.hyper import probe, probe_hf, run_counterexample
from lamtest.interp import derivable, member_op
from lamtest.kmodel import BUILTINS, GSpec, Model, builtin
from lamtest.logging_config import setup_logging
from lamtest.parser import parse, parse_element, parse_judgment
from lamtest.reduction import full_converges, head_converges, show_position
from lamtest.separation import separating_context
from lamtest.syntax import show

logger = logging.getLogger("api")


@asynccontextmanager
async def lifespan(app: FastAPI):
    setup_logging()
    yield


app = FastAPI(title="Lambda-Test API", lifespan=lifespan)


@app.exception_handler(LamtestError)
async def lamtest_error(request: Request, exc: LamtestError):
    logger.warning(f"❌ {request.url.path}: {exc}")
    return JSONResponse(status_code=400, content={"status": "error", "reason": str(exc)})


def _table(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise LamtestError(f"f table must be integers: {text!r}")


def _model(name: str, size: int | None, f_table: str | None) -> Model:
    return builtin(name, size=size, table=None if f_table is None else _table(f_table))


def _trace_dict(trace) -> dict:
    return {
        "converged": trace.converged,
        "fuel": trace.fuel,
        "steps": [
            {"rule": s.rule, "position": show_position(s.position), "expr": show(s.result)}
            for s in trace.steps
        ],
        "final": show(trace.final),
    }


# -------------------------------------------------
# Models
# -------------------------------------------------
@app.get("/models", tags=["Models"])
def list_models():
    return {"count": len(BUILTINS), "models": BUILTINS}


# -------------------------------------------------
# Reduction
# -------------------------------------------------
@app.get("/reduce", tags=["Reduction"])
def reduce(
    expr: str,
    model: str = "dinf",
    strategy: str = "head",
    fuel: int = config.FUEL,
    size: int | None = None,
    f_table: str | None = None,
):
    """Bounded breadth-first search for a may-head-normal form."""
    m = _model(model, size, f_table)
    run = full_converges if strategy == "full" else head_converges
    return {"status": "success", "trace": _trace_dict(run(m, parse(expr, m), fuel))}


# -------------------------------------------------
# Interpretation
# -------------------------------------------------
@app.get("/member", tags=["Interpretation"])
def member(
    judgment: str,
    model: str = "dinf",
    fuel: int = config.FUEL,
    size: int | None = None,
    f_table: str | None = None,
):
    m = _model(model, size, f_table)
    j = parse_judgment(judgment, m)
    if j.point is None:
        raise LamtestError("member needs a term judgment with a point")
    verdict = member_op(m, j.subject, j.env, j.point, fuel)
    return {"status": "success", "verdict": str(verdict), "trace": _trace_dict(verdict.witness)}


@app.get("/typecheck", tags=["Interpretation"])
def typecheck(
    judgment: str,
    model: str = "dinf",
    search_depth: int = config.SEARCH_DEPTH,
    size: int | None = None,
    f_table: str | None = None,
):
    m = _model(model, size, f_table)
    verdict = derivable(m, parse_judgment(judgment, m), search_depth)
    derivation = verdict.witness.render() if verdict.yes else None
    return {"status": "success", "verdict": str(verdict), "derivation": derivation}


@app.get("/separate", tags=["Interpretation"])
def separate(left: str, right: str, fuel: int = config.FUEL):
    m = builtin("dinf")
    ctx = separating_context(parse(left, m), parse(right, m), fuel, m)
    return {"status": "success", "context": None if ctx is None else show(ctx)}


# -------------------------------------------------
# Hyperimmunity
# -------------------------------------------------
@app.get("/probe", tags=["Hyperimmunity"])
def probe_model(
    model: str = "dinf",
    g: str = "const 1",
    depth: int = config.PROBE_DEPTH,
    size: int | None = None,
    f_table: str | None = None,
):
    spec = GSpec.parse(g)
    if model == "hf":
        if f_table is None:
            raise LamtestError("probe on hf needs f_table")
        witness = probe_hf(_table(f_table), spec, depth)
    else:
        witness = probe(_model(model, size, None), spec, depth)
    if witness is None:
        return {"status": "success", "refuted": False, "depth": depth}
    return {
        "status": "success",
        "refuted": True,
        "chain": [str(e) for e in witness.chain],
        "lasso": witness.lasso,
        "shifted": witness.shifted,
    }


@app.get("/counterexample", tags=["Hyperimmunity"])
def counterexample(
    model: str = "norm",
    g: str = "const 1",
    alpha: str | None = None,
    fuel: int = config.FUEL,
    size: int | None = None,
    f_table: str | None = None,
):
    m = _model(model, size, f_table)
    start = None if alpha is None else parse_element(alpha, m)
    report = run_counterexample(m, GSpec.parse(g), start, fuel)
    return {
        "status": "success",
        "witness": str(report.witness),
        "i_trace": _trace_dict(report.i_trace),
        "jg_converged": report.jg_trace.converged,
        "fuel": report.fuel,
        "shift_cycle": None if report.cycle is None else report.cycle.period,
    }
