"""
Concrete syntax: the Lark grammar, parse and parse_judgment.

Element names resolve against the active model only.
"""

from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from lamtest.errors import LamtestError, ModelMismatchError, ParseError
from lamtest.interp import Judgment
from lamtest.kmodel import (
    Atom,
    GSpec,
    Model,
    as_antichain,
    fold,
    is_antichain,
    show_antichain,
)
from lamtest.syntax import (
    EPS,
    ZERO_TERM,
    ZERO_TEST,
    App,
    Jg,
    Summand,
    Tau,
    TBarSum,
    Var,
    build_G,
    church,
    combinator,
    eps_bar,
    is_term,
    is_test,
    lams,
    tbar_sum,
    test_prod,
    test_sum,
)

GRAMMAR = r"""
?expr: lam
     | sum

lam: "\\" VAR+ "." expr

?sum: prod
    | sum "+" prod -> plus

?prod: app
     | prod "*" app -> times

?app: primary
    | app primary -> apply

?primary: VAR -> var
        | "(" expr ")"
        | TAU "<" elem ">" "(" expr ")" -> tau
        | TB "<" elem ">" "(" expr ")" -> tbar
        | EB "<" antichain ">" -> epsbar
        | EPS -> eps
        | ZERO -> zero
        | COMB -> comb
        | CHURCH "(" INT ")" -> church
        | GSYM "[" gspec "]" "(" INT ")" -> gterm
        | JG "[" gspec "]" "(" INT ")" -> jgterm

?elem: ATOM -> atom
     | antichain "->" elem -> arrow

antichain: "{" (elem ("," elem)*)? "}"

?gspec: "const" INT -> gconst
      | "table" INT ("," INT)* -> gtable
      | "affine" INT INT -> gaffine

judgment: bindings "|-" expr (":" elem)?
bindings: (binding ("," binding)*)?
binding: VAR ":" antichain

TAU.2: /tau(?=<)/
TB.2: /tb(?=<)/
EB.2: /eb(?=<)/
EPS.2: /eps(?![\w'])/
COMB.2: /(Theta|Omega|I|S)(?![\w'])/
GSYM.2: /G(?=\[)/
JG.2: /Jg(?=\[)/
CHURCH.2: /church(?=\()/
ZERO: "0"
VAR: /[a-z][A-Za-z0-9_']*/
ATOM: /[A-Za-z_*][A-Za-z0-9_']*|-?\d+/
INT: /\d+/

%import common.WS
%ignore WS
"""

_parser = Lark(GRAMMAR, start=["expr", "judgment"], parser="lalr", lexer="contextual")


class _Zero:
    """The literal 0 before its position decides term or test."""


_ZERO = _Zero()


def _as_term(x):
    if x is _ZERO:
        return ZERO_TERM
    if not is_term(x):
        raise ParseError("expected a term, found a test")
    return x


def _as_test(x):
    if x is _ZERO:
        return ZERO_TEST
    if not is_test(x):
        raise ParseError("expected a test, found a term")
    return x


class _ToAst(Transformer):
    def __init__(self, model: Model):
        super().__init__()
        self.model = model

    # ---- terms and tests ----
    def var(self, items):
        return Var(str(items[0]))

    def lam(self, items):
        *binders, body = items
        return lams([str(b) for b in binders], _as_term(body))

    def plus(self, items):
        a, b = items
        if a is _ZERO and b is _ZERO:
            return _ZERO
        if is_test(a) or is_test(b):
            return test_sum([_as_test(a), _as_test(b)])
        a, b = _as_term(a), _as_term(b)
        if not (isinstance(a, TBarSum) and isinstance(b, TBarSum)):
            raise ParseError("a sum of terms must be a sum of tb<...>(...) terms")
        return tbar_sum([a, b])

    def times(self, items):
        return test_prod(_as_test(x) for x in items)

    def apply(self, items):
        fn, arg = items
        return App(_as_term(fn), _as_term(arg))

    def tau(self, items):
        _, point, body = items
        return Tau(point, _as_term(body))

    def tbar(self, items):
        _, point, body = items
        return tbar_sum([Summand(point, _as_test(body))])

    def epsbar(self, items):
        _, a = items
        return eps_bar(a)

    def eps(self, _):
        return EPS

    def zero(self, _):
        return _ZERO

    def comb(self, items):
        return combinator(str(items[0]))

    def church(self, items):
        return church(int(items[1]))

    def gterm(self, items):
        _, g, n = items
        return build_G(g, int(n))

    def jgterm(self, items):
        _, g, n = items
        return Jg(g, int(n))

    # ---- gspecs ----
    def gconst(self, items):
        return GSpec("const", (int(items[0]),))

    def gtable(self, items):
        return GSpec("table", tuple(int(t) for t in items))

    def gaffine(self, items):
        return GSpec("affine", tuple(int(t) for t in items))

    # ---- elements ----
    def atom(self, items):
        name = str(items[0])
        if name not in self.model.atom_set:
            raise ModelMismatchError(f"unknown element name {name!r} for model {self.model.name}")
        return Atom(name)

    def antichain(self, items):
        a = as_antichain(items)
        if not is_antichain(self.model, a):
            raise ParseError(f"{show_antichain(a)} is not an antichain")
        return a

    def arrow(self, items):
        head, tail = items
        return fold(self.model, head, tail)

    # ---- judgments ----
    def binding(self, items):
        var, a = items
        return (str(var), a)

    def bindings(self, items):
        names = [x for x, _ in items]
        if len(set(names)) != len(names):
            raise ParseError("a variable is bound twice in the environment")
        return tuple(sorted(items))

    def judgment(self, items):
        env, subject, *point = items
        if point:
            return Judgment(env, _as_term(subject), point[0])
        return Judgment(env, _as_test(subject), None)


def _run(text: str, model: Model, start: str):
    if not text or not text.strip():
        raise ParseError("empty input")
    try:
        tree = _parser.parse(text, start=start)
    except UnexpectedInput as e:
        raise ParseError(f"syntax error at line {e.line}, column {e.column}: {text.strip()!r}") from e
    try:
        return _ToAst(model).transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, LamtestError):
            raise e.orig_exc from None
        raise


def parse(text: str, model: Model, kind: str = "term"):
    """Parse a term or test; a bare 0 is read as `kind`."""
    result = _run(text, model, "expr")
    if result is _ZERO:
        return ZERO_TEST if kind == "test" else ZERO_TERM
    return result


def parse_judgment(text: str, model: Model) -> Judgment:
    return _run(text, model, "judgment")


def parse_element(text: str, model: Model):
    judgment = parse_judgment(f"|- x : {text}", model)
    return judgment.point


def parse_antichain(text: str, model: Model):
    judgment = parse_judgment(f"x : {text} |- eps", model)
    return judgment.env[0][1]
