"""
Small-step engine: redexes, contraction, head reduction, may-head-normal
forms, and bounded breadth-first convergence.

Positions are tuples of child indices:
  Lam 0 = body; App 0 = fn, 1 = arg; TBarSum i = i-th summand;
  Summand 0 = its test; Sum / Prod i = i-th item; Tau 0 = body.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Callable

from lamtest import config
from lamtest.errors import InvalidRedexError, ResourceLimitError
from lamtest.kmodel import Model, leq, unfold
from lamtest.syntax import (
    App,
    Jg,
    Lam,
    Prod,
    Sum,
    Summand,
    Tau,
    TBarSum,
    Var,
    build_G,
    children,
    eps_bar,
    is_test,
    show,
    spine,
    strip_lams,
    subst,
    tbar_sum,
    test_prod,
    test_sum,
)

logger = logging.getLogger("reduction")

RULES = ("beta", "tbar", "tau", "tautbar", "prod-sum", "tbar-sum", "delta-Jg")


# -------------------------------------------------
# Positions
# -------------------------------------------------
def subexpr(e, path: tuple[int, ...]):
    for i in path:
        kids = children(e)
        if i >= len(kids):
            raise InvalidRedexError(f"position {show_position(path)} does not exist")
        e = kids[i]
    return e


def replace(e, path: tuple[int, ...], new):
    """Rebuild e with the node at path replaced; multisets are re-canonicalized."""
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(e, Lam):
        return Lam(e.binder, replace(e.body, rest, new))
    if isinstance(e, App):
        if i == 0:
            return App(replace(e.fn, rest, new), e.arg)
        return App(e.fn, replace(e.arg, rest, new))
    if isinstance(e, Summand):
        inner = replace(e.test, rest, new)
        return Summand(e.point, inner)
    if isinstance(e, TBarSum):
        others = e.summands[:i] + e.summands[i + 1:]
        return tbar_sum([*others, replace(e.summands[i], rest, new)])
    if isinstance(e, Sum):
        items = list(e.items)
        items[i] = replace(items[i], rest, new)
        return test_sum(items)
    if isinstance(e, Prod):
        items = list(e.items)
        items[i] = replace(items[i], rest, new)
        return test_prod(items)
    if isinstance(e, Tau):
        return Tau(e.point, replace(e.body, rest, new))
    raise InvalidRedexError(f"cannot descend into {type(e).__name__}")


def show_position(path: tuple[int, ...]) -> str:
    return ".".join(str(i) for i in path) if path else "root"


# -------------------------------------------------
# Rules
# -------------------------------------------------
def rule_at(node) -> str | None:
    """The rule whose left-hand side matches node at its root, if any."""
    if isinstance(node, App):
        if isinstance(node.fn, Lam):
            return "beta"
        if isinstance(node.fn, TBarSum):
            return "tbar"
    elif isinstance(node, Tau):
        if isinstance(node.body, Lam):
            return "tau"
        if isinstance(node.body, TBarSum):
            return "tautbar"
    elif isinstance(node, Prod):
        if any(isinstance(q, Sum) for q in node.items):
            return "prod-sum"
    elif isinstance(node, Summand):
        if isinstance(node.test, Sum):
            return "tbar-sum"
    elif isinstance(node, Jg):
        return "delta-Jg"
    return None


def distribute(items) -> "Sum | Prod | Tau":
    """Product of tests with every Sum factor multiplied out."""
    choices = [q.items if isinstance(q, Sum) else (q,) for q in items]
    return test_sum(test_prod(pick) for pick in itertools.product(*choices))


def contract(model: Model, node):
    rule = rule_at(node)
    if rule == "beta":
        return subst(node.fn.body, node.fn.binder, node.arg)
    if rule == "tbar":
        parts = []
        for s in node.fn.summands:
            (a,), alpha = unfold(model, s.point, 1)
            factors = [s.test] + [Tau(gamma, node.arg) for gamma in a]
            parts.append(Summand(alpha, test_prod(factors)))
        return tbar_sum(parts)
    if rule == "tau":
        (a,), alpha = unfold(model, node.point, 1)
        lam = node.body
        return Tau(alpha, subst(lam.body, lam.binder, eps_bar(a)))
    if rule == "tautbar":
        return test_sum(s.test for s in node.body.summands if leq(model, node.point, s.point))
    if rule == "prod-sum":
        return distribute(node.items)
    if rule == "tbar-sum":
        return tbar_sum(Summand(node.point, q) for q in node.test.items)
    if rule == "delta-Jg":
        return App(build_G(node.g, node.index), Jg(node.g, node.index + 1))
    raise InvalidRedexError(f"no rule applies to {type(node).__name__}")


def redexes(e, path: tuple[int, ...] = ()) -> list[tuple[tuple[int, ...], str]]:
    """Every (position, rule) of the full reduction, in pre-order."""
    found = []
    rule = rule_at(e)
    if rule is not None:
        found.append((path, rule))
    for i, child in enumerate(children(e)):
        found.extend(redexes(child, path + (i,)))
    return found


def step(model: Model, e, path: tuple[int, ...], rule: str):
    node = subexpr(e, path)
    actual = rule_at(node)
    if actual != rule:
        raise InvalidRedexError(
            f"{rule} does not fire at {show_position(path)} (found {actual or 'no redex'})"
        )
    return replace(e, path, contract(model, node))


# -------------------------------------------------
# Head reduction
# -------------------------------------------------
def _head_positions(e, path: tuple[int, ...]) -> list[tuple[tuple[int, ...], str]]:
    if isinstance(e, Lam):
        return _head_positions(e.body, path + (0,))
    if isinstance(e, App):
        rule = rule_at(e)
        if rule is not None:
            return [(path, rule)]
        if isinstance(e.fn, (App, Jg)):
            return _head_positions(e.fn, path + (0,))
        return []
    if isinstance(e, Jg):
        return [(path, "delta-Jg")]
    if isinstance(e, TBarSum):
        found = []
        for i, s in enumerate(e.summands):
            if isinstance(s.test, Sum):
                found.append((path + (i,), "tbar-sum"))
            else:
                found.extend(_head_positions(s.test, path + (i, 0)))
        return found
    if isinstance(e, Tau):
        rule = rule_at(e)
        if rule is not None:
            return [(path, rule)]
        if isinstance(e.body, (App, Jg)):
            return _head_positions(e.body, path + (0,))
        return []
    if isinstance(e, Sum):
        found = []
        for i, q in enumerate(e.items):
            found.extend(_head_positions(q, path + (i,)))
        return found
    if isinstance(e, Prod):
        found = [(path, "prod-sum")] if rule_at(e) else []
        for i, q in enumerate(e.items):
            if not isinstance(q, Sum):
                found.extend(_head_positions(q, path + (i,)))
        return found
    return []


@dataclass(frozen=True)
class Step:
    rule: str
    position: tuple[int, ...]
    result: object


def _successors(model: Model, e, positions) -> list[Step]:
    steps = [Step(rule, path, step(model, e, path, rule)) for path, rule in positions]
    return sorted(steps, key=lambda s: (s.rule, s.position))


def head_successors(model: Model, e) -> list[Step]:
    return _successors(model, e, _head_positions(e, ()))


def full_successors(model: Model, e) -> list[Step]:
    return _successors(model, e, redexes(e))


def is_head_position(e, path: tuple[int, ...]) -> bool:
    return any(p == path for p, _ in _head_positions(e, ()))


# -------------------------------------------------
# May-head-normal forms
# -------------------------------------------------
def _var_headed(term) -> bool:
    head, _ = spine(term)
    return isinstance(head, Var)


def _sum_free_hnf(q) -> bool:
    if isinstance(q, Tau):
        return _var_headed(q.body)
    if isinstance(q, Prod):
        return all(_sum_free_hnf(p) for p in q.items)
    return False


def is_mhnf(e) -> bool:
    if is_test(e):
        if isinstance(e, Sum):
            return any(_sum_free_hnf(q) for q in e.items)
        return _sum_free_hnf(e)
    _, body = strip_lams(e)
    if _var_headed(body):
        return True
    if isinstance(body, TBarSum):
        return any(_sum_free_hnf(s.test) for s in body.summands)
    return False


# -------------------------------------------------
# Bounded convergence
# -------------------------------------------------
@dataclass(frozen=True)
class Trace:
    start: object
    steps: tuple[Step, ...]
    converged: bool
    fuel: int

    @property
    def final(self):
        return self.steps[-1].result if self.steps else self.start

    @property
    def rules(self) -> tuple[str, ...]:
        return tuple(s.rule for s in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def _bfs(model: Model, start, fuel: int, successors: Callable, max_states: int | None = None) -> Trace:
    cap = config.MAX_STATES if max_states is None else max_states
    if is_mhnf(start):
        return Trace(start, (), True, fuel)
    parents: dict[tuple, tuple[tuple, Step] | None] = {start.akey: None}

    def path_to(key) -> tuple[Step, ...]:
        steps = []
        while parents[key] is not None:
            key, s = parents[key]
            steps.append(s)
        return tuple(reversed(steps))

    level = [start]
    for _ in range(fuel):
        following = []
        for node in level:
            for s in successors(model, node):
                key = s.result.akey
                if key in parents:
                    continue
                parents[key] = (node.akey, s)
                if len(parents) > cap:
                    raise ResourceLimitError(
                        f"more than {cap} states visited"
                    )
                if is_mhnf(s.result):
                    return Trace(start, path_to(key), True, fuel)
                following.append(s.result)
        if not following:
            break
        level = following
    logger.debug(f"no mhnf within fuel {fuel} ({len(parents)} states)")
    return Trace(start, path_to(level[0].akey), False, fuel)


def head_converges(model: Model, e, fuel: int, max_states: int | None = None) -> Trace:
    return _bfs(model, e, fuel, head_successors, max_states)


def full_converges(model: Model, e, fuel: int, max_states: int | None = None) -> Trace:
    return _bfs(model, e, fuel, full_successors, max_states)


def render_trace(trace: Trace, fmt: str = "human") -> str:
    sep = "\t" if fmt == "tsv" else "  "
    lines = [sep.join(["0", "start" if fmt != "tsv" else "start\t-", show(trace.start)])]
    for i, s in enumerate(trace.steps, start=1):
        where = show_position(s.position)
        label = f"{s.rule}\t{where}" if fmt == "tsv" else f"{s.rule}@{where}"
        lines.append(sep.join([str(i), label, show(s.result)]))
    if trace.converged:
        verdict = f"converged({len(trace)})"
        lines.append(f"VERDICT\t{verdict}" if fmt == "tsv" else f"VERDICT {verdict}")
    else:
        verdict = f"exhausted({trace.fuel})"
        if fmt == "tsv":
            lines.append(f"VERDICT\t{verdict}")
        else:
            lines.append(f"VERDICT {verdict}  no mhnf within fuel {trace.fuel}")
    return "\n".join(lines)
