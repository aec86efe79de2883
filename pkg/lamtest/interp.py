"""
Denotational side: intersection-type derivability, the declarative checker,
finite windows onto interpretations, and the operational membership oracle.

The search is algorithmic: subsumption is fused into the var, tbar-sum and
application-spine cases, weakening into the leaves. Found derivations are
emitted in declarative form (explicit `sub` nodes) and can be re-checked
with check_derivation.
"""

import itertools
import logging
from dataclasses import dataclass, field

from lamtest import config
from lamtest.kmodel import (
    Antichain,
    Element,
    Model,
    enumerate_antichains,
    enumerate_elements,
    fold,
    leq,
    normalize_antichain,
    show_antichain,
    unfold,
)
from lamtest.reduction import Trace, head_converges
from lamtest.syntax import (
    App,
    Jg,
    Lam,
    Prod,
    Sum,
    Tau,
    TBarSum,
    Var,
    apps,
    build_G,
    eps_bar,
    is_test,
    show,
    spine,
    subst,
    subst_all,
)

logger = logging.getLogger("interp")

Env = tuple[tuple[str, Antichain], ...]


# -------------------------------------------------
# Judgments, derivations, verdicts
# -------------------------------------------------
@dataclass(frozen=True)
class Judgment:
    env: Env
    subject: object
    point: Element | None = None

    @property
    def env_map(self) -> dict[str, Antichain]:
        return dict(self.env)

    def __str__(self) -> str:
        env = ", ".join(f"{x}:{show_antichain(a)}" for x, a in self.env)
        text = f"{env} |- {show(self.subject)}" if env else f"|- {show(self.subject)}"
        if self.point is not None:
            text += f" : {self.point}"
        return text


def make_env(bindings) -> Env:
    return tuple(sorted(dict(bindings).items()))


def extend_env(env: Env, x: str, a: Antichain) -> Env:
    updated = dict(env)
    updated[x] = a
    return make_env(updated)


@dataclass(frozen=True)
class Derivation:
    rule: str
    judgment: Judgment
    premises: tuple["Derivation", ...] = ()

    @property
    def size(self) -> int:
        return 1 + sum(p.size for p in self.premises)

    def render(self, indent: int = 0) -> str:
        lines = [f"{'  ' * indent}{self.rule}  {self.judgment}"]
        lines += [p.render(indent + 1) for p in self.premises]
        return "\n".join(lines)


@dataclass(frozen=True)
class Verdict:
    yes: bool
    witness: Derivation | Trace | None = None
    bound: int = 0

    def __str__(self) -> str:
        return "YES" if self.yes else f"NO-WITHIN-BOUNDS({self.bound})"


# -------------------------------------------------
# Algorithmic search
# -------------------------------------------------
@dataclass
class _Search:
    model: Model
    window: tuple[Element, ...]
    memo: dict = field(default_factory=dict)

    def _sub(self, d: Derivation | None, alpha: Element) -> Derivation | None:
        if d is None or d.judgment.point == alpha:
            return d
        j = d.judgment
        return Derivation("sub", Judgment(j.env, j.subject, alpha), (d,))

    def term(self, env: Env, m, alpha: Element, budget: int) -> Derivation | None:
        relevant = tuple((x, a) for x, a in env if x in m.free_vars)
        key = (relevant, m, alpha, budget)
        if key not in self.memo:
            self.memo[key] = None
            self.memo[key] = self._term(env, m, alpha, budget)
        d = self.memo[key]
        if d is not None and d.judgment.env != env:
            return _reenv(d, env)
        return d

    def _term(self, env: Env, m, alpha: Element, budget: int) -> Derivation | None:
        model = self.model
        if isinstance(m, Lam):
            (a,), tail = unfold(model, alpha, 1)
            body = self.term(extend_env(env, m.binder, a), m.body, tail, budget)
            if body is None:
                return None
            return Derivation("lam", Judgment(env, m, alpha), (body,))
        if isinstance(m, Jg):
            if budget <= 0:
                return None
            expansion = App(build_G(m.g, m.index), Jg(m.g, m.index + 1))
            d = self.term(env, expansion, alpha, budget - 1)
            return None if d is None else Derivation("delta", Judgment(env, m, alpha), (d,))
        head, args = spine(m)
        if isinstance(head, Var):
            for beta in dict(env).get(head.name, ()):
                leaf = Derivation("var", Judgment(env, head, beta))
                d = self._spine(env, leaf, args, alpha, budget)
                if d is not None:
                    return d
            return None
        if isinstance(head, TBarSum):
            for s in head.summands:
                q = self.test(env, s.test, budget)
                if q is None:
                    continue
                leaf = Derivation("tbar-sum", Judgment(env, head, s.point), (q,))
                d = self._spine(env, leaf, args, alpha, budget)
                if d is not None:
                    return d
            return None
        if args:
            return self._generic_app(env, m, alpha, budget)
        return None

    def _spine(self, env, leaf: Derivation, args, alpha, budget) -> Derivation | None:
        """Type `leaf.subject args` at alpha by unfolding the leaf's point."""
        model = self.model
        heads, tail = unfold(model, leaf.judgment.point, len(args))
        if not leq(model, alpha, tail):
            return None
        d = leaf
        current = leaf.judgment.point
        for arg, b in zip(args, heads):
            premises = []
            for gamma in b:
                p = self.term(env, arg, gamma, budget)
                if p is None:
                    return None
                premises.append(p)
            _, current = unfold(model, current, 1)
            d = Derivation("app", Judgment(env, App(d.judgment.subject, arg), current), (d, *premises))
        return self._sub(d, alpha)

    def _generic_app(self, env, m: App, alpha, budget) -> Derivation | None:
        model = self.model
        typed = {}
        for gamma in self.window:
            p = self.term(env, m.arg, gamma, budget)
            if p is not None:
                typed[gamma] = p
        b = normalize_antichain(model, typed)
        fn = self.term(env, m.fn, fold(model, b, alpha), budget)
        if fn is None:
            return None
        return Derivation("app", Judgment(env, m, alpha), (fn, *(typed[g] for g in b)))

    def test(self, env: Env, q, budget: int) -> Derivation | None:
        j = Judgment(env, q, None)
        if isinstance(q, Tau):
            d = self.term(env, q.body, q.point, budget)
            return None if d is None else Derivation("tau", j, (d,))
        if isinstance(q, Sum):
            for item in q.items:
                d = self.test(env, item, budget)
                if d is not None:
                    return Derivation("sum", j, (d,))
            return None
        if isinstance(q, Prod):
            premises = []
            for item in q.items:
                d = self.test(env, item, budget)
                if d is None:
                    return None
                premises.append(d)
            return Derivation("prod", j, tuple(premises))
        return None


def _reenv(d: Derivation, env: Env) -> Derivation:
    """Weaken a memoized derivation into a larger environment."""
    j = d.judgment
    if d.rule == "lam":
        body = d.premises[0]
        inner = extend_env(env, j.subject.binder, dict(body.judgment.env)[j.subject.binder])
        premises = (_reenv(body, inner),)
    else:
        premises = tuple(_reenv(p, env) for p in d.premises)
    return Derivation(d.rule, Judgment(env, j.subject, j.point), premises)


def default_window(model: Model) -> tuple[Element, ...]:
    return enumerate_elements(model, config.DEPTH, config.WIDTH)


def derivable(
    model: Model,
    judgment: Judgment,
    depth: int = config.SEARCH_DEPTH,
    window: tuple[Element, ...] | None = None,
) -> Verdict:
    """Search for a derivation; `depth` bounds the delta unfoldings of Jg."""
    search = _Search(model, default_window(model) if window is None else window)
    if is_test(judgment.subject):
        d = search.test(judgment.env, judgment.subject, depth)
    else:
        d = search.term(judgment.env, judgment.subject, judgment.point, depth)
    return Verdict(d is not None, d, depth)


# -------------------------------------------------
# Declarative checker
# -------------------------------------------------
def _same(a, b) -> bool:
    return a.akey == b.akey


def check_derivation(model: Model, d: Derivation) -> bool:
    j = d.judgment
    env = dict(j.env)
    ps = d.premises
    if any(p.judgment.env != j.env for p in ps) and d.rule != "lam":
        return False
    if not all(check_derivation(model, p) for p in ps):
        return False
    s = j.subject
    if d.rule == "var":
        return isinstance(s, Var) and not ps and j.point in env.get(s.name, ())
    if d.rule == "sub":
        return (
            len(ps) == 1
            and _same(ps[0].judgment.subject, s)
            and leq(model, j.point, ps[0].judgment.point)
        )
    if d.rule == "lam":
        if not isinstance(s, Lam) or len(ps) != 1:
            return False
        (a,), tail = unfold(model, j.point, 1)
        p = ps[0].judgment
        return (
            p.env == extend_env(j.env, s.binder, a)
            and _same(p.subject, s.body)
            and p.point == tail
        )
    if d.rule == "app":
        if not isinstance(s, App) or not ps:
            return False
        fn, *args = ps
        if not _same(fn.judgment.subject, s.fn):
            return False
        (b,), tail = unfold(model, fn.judgment.point, 1)
        if tail != j.point:
            return False
        points = sorted((p.judgment.point for p in args), key=lambda e: e.key)
        return all(_same(p.judgment.subject, s.arg) for p in args) and tuple(points) == b
    if d.rule == "tbar-sum":
        if not isinstance(s, TBarSum) or len(ps) != 1:
            return False
        return any(
            sm.point == j.point and _same(sm.test, ps[0].judgment.subject) for sm in s.summands
        )
    if d.rule == "tau":
        return (
            isinstance(s, Tau)
            and len(ps) == 1
            and _same(ps[0].judgment.subject, s.body)
            and ps[0].judgment.point == s.point
        )
    if d.rule == "sum":
        return isinstance(s, Sum) and len(ps) == 1 and any(_same(q, ps[0].judgment.subject) for q in s.items)
    if d.rule == "prod":
        if not isinstance(s, Prod) or len(ps) != len(s.items):
            return False
        return sorted(p.judgment.subject.akey for p in ps) == sorted(q.akey for q in s.items)
    if d.rule == "delta":
        if not isinstance(s, Jg) or len(ps) != 1:
            return False
        expansion = App(build_G(s.g, s.index), Jg(s.g, s.index + 1))
        return _same(ps[0].judgment.subject, expansion) and ps[0].judgment.point == j.point
    return False


# -------------------------------------------------
# Windows and the operational oracle
# -------------------------------------------------
def interp_points(
    model: Model,
    m,
    variables=(),
    depth: int = config.DEPTH,
    width: int = config.WIDTH,
    search_depth: int = config.SEARCH_DEPTH,
) -> frozenset:
    """All (antichains, point) from the window with a derivation of x:a |- m : point."""
    window = enumerate_elements(model, depth, width)
    antichains = list(enumerate_antichains(model, window, width))
    search = _Search(model, window)
    found = set()
    for env_choice in itertools.product(antichains, repeat=len(variables)):
        env = make_env(zip(variables, env_choice))
        for alpha in window:
            if search.term(env, m, alpha, search_depth) is not None:
                found.add((env_choice, alpha))
    logger.debug(f"window of {show(m)}: {len(found)} points")
    return frozenset(found)


def member_op(model: Model, m, env, alpha: Element, fuel: int = config.FUEL) -> Verdict:
    """Run tau<alpha>(m[eb<a_i>/x_i]) and report whether it head-converges within fuel."""
    closed = subst_all(m, [(x, eps_bar(a)) for x, a in make_env(env)])
    trace = head_converges(model, Tau(alpha, closed), fuel)
    return Verdict(trace.converged, trace, fuel)


def typed_subst_check(model: Model, env, x: str, a: Antichain, m, alpha: Element, depth: int = config.SEARCH_DEPTH, window=None) -> bool:
    """Do `env, x:a |- m : alpha` and `env |- m[eb<a>/x] : alpha` agree?"""
    window = default_window(model) if window is None else window
    base = make_env(env)
    left = derivable(model, Judgment(extend_env(base, x, a), m, alpha), depth, window)
    right = derivable(model, Judgment(base, subst(m, x, eps_bar(a)), alpha), depth, window)
    return left.yes == right.yes
