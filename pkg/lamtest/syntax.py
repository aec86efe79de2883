"""
Abstract syntax of the lambda calculus with tests.

Terms:  Var | Lam | App | TBarSum (sum of tb<alpha>(Q), empty = 0) | Jg | Hole
Tests:  Sum (empty = 0) | Prod (empty = eps) | Tau

Nodes are immutable. Multisets (TBarSum, Sum, Prod) are always built through
tbar_sum / test_sum / test_prod, which flatten, drop units and sort their
members by alpha key, so two canonical expressions are alpha-equivalent iff
their `akey`s are equal.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Union

from lamtest.errors import ParseError
from lamtest.kmodel import Antichain, Element, GSpec


class _Node:
    """Cached structural properties shared by every node."""

    @cached_property
    def free_vars(self) -> frozenset:
        return _free_vars(self)

    @cached_property
    def akey(self) -> tuple:
        return _akey(self, (), erase=False)

    @cached_property
    def erased_key(self) -> tuple:
        """Alpha key with every Jg index forgotten."""
        return _akey(self, (), erase=True)

    @cached_property
    def size(self) -> int:
        return 1 + sum(child.size for child in children(self))


@dataclass(frozen=True)
class Var(_Node):
    name: str


@dataclass(frozen=True)
class Lam(_Node):
    binder: str
    body: "Term"


@dataclass(frozen=True)
class App(_Node):
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Summand(_Node):
    point: Element
    test: "Test"


@dataclass(frozen=True)
class TBarSum(_Node):
    summands: tuple[Summand, ...]


@dataclass(frozen=True)
class Jg(_Node):
    g: GSpec
    index: int


@dataclass(frozen=True)
class Hole(_Node):
    pass


@dataclass(frozen=True)
class Sum(_Node):
    items: tuple["Test", ...]


@dataclass(frozen=True)
class Prod(_Node):
    items: tuple["Test", ...]


@dataclass(frozen=True)
class Tau(_Node):
    point: Element
    body: "Term"


Term = Union[Var, Lam, App, TBarSum, Jg, Hole]
Test = Union[Sum, Prod, Tau]
Expr = Union[Term, Test]

TERM_TYPES = (Var, Lam, App, TBarSum, Jg, Hole)
TEST_TYPES = (Sum, Prod, Tau)

ZERO_TERM = TBarSum(())
ZERO_TEST = Sum(())
EPS = Prod(())


def is_term(e) -> bool:
    return isinstance(e, TERM_TYPES)


def is_test(e) -> bool:
    return isinstance(e, TEST_TYPES)


def children(e) -> tuple:
    if isinstance(e, Lam):
        return (e.body,)
    if isinstance(e, App):
        return (e.fn, e.arg)
    if isinstance(e, TBarSum):
        return e.summands
    if isinstance(e, Summand):
        return (e.test,)
    if isinstance(e, (Sum, Prod)):
        return e.items
    if isinstance(e, Tau):
        return (e.body,)
    return ()


def _free_vars(e) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Lam):
        return e.body.free_vars - {e.binder}
    return frozenset().union(*(c.free_vars for c in children(e)))


# -------------------------------------------------
# Alpha keys
# -------------------------------------------------
def _akey(e, env: tuple[str, ...], erase: bool) -> tuple:
    if env and not (e.free_vars & set(env)):
        return e.erased_key if erase else e.akey
    if isinstance(e, Var):
        if e.name in env:
            return ("var", "b", env[::-1].index(e.name))
        return ("var", "f", e.name)
    if isinstance(e, Lam):
        return ("lam", _akey(e.body, env + (e.binder,), erase))
    if isinstance(e, App):
        return ("app", _akey(e.fn, env, erase), _akey(e.arg, env, erase))
    if isinstance(e, Summand):
        return ("sm", e.point.key, _akey(e.test, env, erase))
    if isinstance(e, TBarSum):
        return ("tbs", tuple(sorted(_akey(s, env, erase) for s in e.summands)))
    if isinstance(e, Sum):
        return ("sum", tuple(sorted(_akey(q, env, erase) for q in e.items)))
    if isinstance(e, Prod):
        return ("prod", tuple(sorted(_akey(q, env, erase) for q in e.items)))
    if isinstance(e, Tau):
        return ("tau", e.point.key, _akey(e.body, env, erase))
    if isinstance(e, Jg):
        return ("jg", e.g.key, None if erase else e.index)
    return ("hole",)


def alpha_eq(a: Expr, b: Expr) -> bool:
    return a.akey == b.akey


def _by_key(items) -> tuple:
    return tuple(sorted(items, key=lambda x: x.akey))


# -------------------------------------------------
# Canonical constructors
# -------------------------------------------------
def tbar_sum(parts: Iterable[Union[Summand, TBarSum]]) -> TBarSum:
    flat = []
    for part in parts:
        if isinstance(part, TBarSum):
            flat.extend(part.summands)
        elif part.test != ZERO_TEST:
            flat.append(part)
    return TBarSum(_by_key(flat))


def test_sum(items: Iterable[Test]) -> Test:
    flat = []
    for q in items:
        if isinstance(q, Sum):
            flat.extend(q.items)
        else:
            flat.append(q)
    if len(flat) == 1:
        return flat[0]
    return Sum(_by_key(flat))


def test_prod(items: Iterable[Test]) -> Test:
    flat = []
    for q in items:
        if q == ZERO_TEST:
            return ZERO_TEST
        if isinstance(q, Prod):
            flat.extend(q.items)
        else:
            flat.append(q)
    if len(flat) == 1:
        return flat[0]
    return Prod(_by_key(flat))


def lams(binders: Iterable[str], body: Term) -> Term:
    for x in reversed(list(binders)):
        body = Lam(x, body)
    return body


def apps(fn: Term, args: Iterable[Term]) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def spine(term: Term) -> tuple[Term, tuple[Term, ...]]:
    """Split `h N1 ... Nk` into (h, (N1, ..., Nk))."""
    args = []
    while isinstance(term, App):
        args.append(term.arg)
        term = term.fn
    return term, tuple(reversed(args))


def strip_lams(term: Term) -> tuple[tuple[str, ...], Term]:
    binders = []
    while isinstance(term, Lam):
        binders.append(term.binder)
        term = term.body
    return tuple(binders), term


# -------------------------------------------------
# Substitution
# -------------------------------------------------
def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def subst(e: Expr, x: str, n: Term) -> Expr:
    """Capture-avoiding e[n/x]."""
    if x not in e.free_vars:
        return e
    if isinstance(e, Var):
        return n
    if isinstance(e, Lam):
        binder, body = e.binder, e.body
        if binder in n.free_vars:
            fresh = fresh_name(binder, body.free_vars | n.free_vars | {x})
            body = subst(body, binder, Var(fresh))
            binder = fresh
        return Lam(binder, subst(body, x, n))
    if isinstance(e, App):
        return App(subst(e.fn, x, n), subst(e.arg, x, n))
    if isinstance(e, Summand):
        return Summand(e.point, subst(e.test, x, n))
    if isinstance(e, TBarSum):
        return tbar_sum(subst(s, x, n) for s in e.summands)
    if isinstance(e, Sum):
        return test_sum(subst(q, x, n) for q in e.items)
    if isinstance(e, Prod):
        return test_prod(subst(q, x, n) for q in e.items)
    if isinstance(e, Tau):
        return Tau(e.point, subst(e.body, x, n))
    return e


def subst_all(e: Expr, bindings: Iterable[tuple[str, Term]]) -> Expr:
    """Sequential substitution; simultaneous whenever the replacements are closed."""
    for x, n in bindings:
        e = subst(e, x, n)
    return e


def fill(ctx: Expr, m: Expr) -> Expr:
    """Replace every hole of ctx by m, capturing freely."""
    if isinstance(ctx, Hole):
        return m
    if isinstance(ctx, Lam):
        return Lam(ctx.binder, fill(ctx.body, m))
    if isinstance(ctx, App):
        return App(fill(ctx.fn, m), fill(ctx.arg, m))
    if isinstance(ctx, Summand):
        return Summand(ctx.point, fill(ctx.test, m))
    if isinstance(ctx, TBarSum):
        return tbar_sum(fill(s, m) for s in ctx.summands)
    if isinstance(ctx, Sum):
        return test_sum(fill(q, m) for q in ctx.items)
    if isinstance(ctx, Prod):
        return test_prod(fill(q, m) for q in ctx.items)
    if isinstance(ctx, Tau):
        return Tau(ctx.point, fill(ctx.body, m))
    return ctx


def has_hole(e: Expr) -> bool:
    return isinstance(e, Hole) or any(has_hole(c) for c in children(e))


# -------------------------------------------------
# Named terms
# -------------------------------------------------
def church(n: int) -> Term:
    body: Term = Var("x")
    for _ in range(n):
        body = App(Var("f"), body)
    return lams(["f", "x"], body)


def _theta() -> Term:
    # A = \x y. y (x x y)
    a = lams(["x", "y"], App(Var("y"), apps(Var("x"), [Var("x"), Var("y")])))
    return App(a, a)


def _omega() -> Term:
    delta = Lam("x", App(Var("x"), Var("x")))
    return App(delta, delta)


COMBINATORS = {
    "I": lambda: Lam("x", Var("x")),
    "S": lambda: lams(["n", "f", "x"], App(Var("f"), apps(Var("n"), [Var("f"), Var("x")]))),
    "Theta": _theta,
    "Omega": _omega,
}


def combinator(name: str, n: int | None = None) -> Term:
    if name == "church":
        if n is None or n < 0:
            raise ParseError("church needs a non-negative numeral")
        return church(n)
    if name not in COMBINATORS:
        raise ParseError(f"unknown combinator {name!r}")
    return COMBINATORS[name]()


def eps_bar(a: Antichain) -> TBarSum:
    return tbar_sum(Summand(alpha, EPS) for alpha in a)


def build_G(g: GSpec, n: int) -> Term:
    """G_n = \\u e x1 .. xk. e (u x1) ... (u xk) with k = g(n)."""
    xs = [f"x{i}" for i in range(1, g(n) + 1)]
    body = apps(Var("e"), [App(Var("u"), Var(x)) for x in xs])
    return lams(["u", "e", *xs], body)


def jg(g: GSpec, n: int) -> Jg:
    return Jg(g, n)


# -------------------------------------------------
# Printer
# -------------------------------------------------
def _needs_parens_as_fn(t) -> bool:
    return isinstance(t, Lam) or (isinstance(t, TBarSum) and len(t.summands) > 1)


def _needs_parens_as_arg(t) -> bool:
    return isinstance(t, (App, Lam)) or (isinstance(t, TBarSum) and len(t.summands) > 1)


def _wrap(text: str, cond: bool) -> str:
    return f"({text})" if cond else text


def _show_summand(s: Summand) -> str:
    if s.test == EPS:
        return f"eb<{{{s.point}}}>"
    return f"tb<{s.point}>({show(s.test)})"


def show(e) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Lam):
        binders = []
        while isinstance(e, Lam):
            binders.append(e.binder)
            e = e.body
        return "\\" + " ".join(binders) + ". " + show(e)
    if isinstance(e, App):
        return (
            _wrap(show(e.fn), _needs_parens_as_fn(e.fn))
            + " "
            + _wrap(show(e.arg), _needs_parens_as_arg(e.arg))
        )
    if isinstance(e, TBarSum):
        if not e.summands:
            return "0"
        return " + ".join(_show_summand(s) for s in e.summands)
    if isinstance(e, Sum):
        if not e.items:
            return "0"
        return " + ".join(show(q) for q in e.items)
    if isinstance(e, Prod):
        if not e.items:
            return "eps"
        return " * ".join(_wrap(show(q), isinstance(q, Sum)) for q in e.items)
    if isinstance(e, Tau):
        return f"tau<{e.point}>({show(e.body)})"
    if isinstance(e, Jg):
        return f"Jg[{e.g}]({e.index})"
    if isinstance(e, Hole):
        return "[]"
    raise TypeError(f"cannot print {type(e).__name__}")
