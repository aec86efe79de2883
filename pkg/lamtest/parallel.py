"""
Parallel reduction: the maximal parallel reduct E+ and the one-step
parallel relation used by the confluence checks.
"""

import itertools
import logging

from lamtest import config
from lamtest.errors import ResourceLimitError
from lamtest.kmodel import Model, leq, unfold
from lamtest.reduction import Step, contract, subexpr
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
    eps_bar,
    subst,
    tbar_sum,
    test_prod,
    test_sum,
)

logger = logging.getLogger("reduction")


def _parts(q) -> tuple:
    return q.items if isinstance(q, Sum) else (q,)


def _tbar_app(model: Model, s: Summand, test, arg) -> list[Summand]:
    (a,), alpha = unfold(model, s.point, 1)
    taus = [Tau(gamma, arg) for gamma in a]
    return [Summand(alpha, test_prod([q, *taus])) for q in _parts(test)]


def _groupings(items) -> list[list[list]]:
    """Every set partition of items (by position, so repeats are kept apart)."""
    if not items:
        return [[]]
    first, *rest = items
    out = []
    for g in _groupings(rest):
        out.append([[first], *g])
        for i in range(len(g)):
            out.append([*g[:i], [first, *g[i]], *g[i + 1:]])
    return out


# -------------------------------------------------
# Maximal parallel reduct
# -------------------------------------------------
def full_parallel_reduct(model: Model, e):
    if isinstance(e, Var):
        return e
    if isinstance(e, Lam):
        return Lam(e.binder, full_parallel_reduct(model, e.body))
    if isinstance(e, Jg):
        return App(build_G(e.g, e.index), Jg(e.g, e.index + 1))
    if isinstance(e, App):
        arg = full_parallel_reduct(model, e.arg)
        if isinstance(e.fn, Lam):
            return subst(full_parallel_reduct(model, e.fn.body), e.fn.binder, arg)
        if isinstance(e.fn, TBarSum):
            parts = []
            for s in e.fn.summands:
                parts += _tbar_app(model, s, full_parallel_reduct(model, s.test), arg)
            return tbar_sum(parts)
        return App(full_parallel_reduct(model, e.fn), arg)
    if isinstance(e, TBarSum):
        # split over the summands as written; each reduct stays whole
        return tbar_sum(
            Summand(s.point, full_parallel_reduct(model, q))
            for s in e.summands
            for q in _parts(s.test)
        )
    if isinstance(e, Tau):
        body = e.body
        if isinstance(body, Lam):
            (a,), alpha = unfold(model, e.point, 1)
            return Tau(alpha, subst(full_parallel_reduct(model, body.body), body.binder, eps_bar(a)))
        if isinstance(body, TBarSum):
            return test_sum(
                full_parallel_reduct(model, s.test)
                for s in body.summands
                if leq(model, e.point, s.point)
            )
        return Tau(e.point, full_parallel_reduct(model, body))
    if isinstance(e, Sum):
        return test_sum(full_parallel_reduct(model, q) for q in e.items)
    if isinstance(e, Prod):
        return test_sum(
            test_prod(full_parallel_reduct(model, q) for q in pick)
            for pick in itertools.product(*(_parts(f) for f in e.items))
        )
    return e


def plus_iterates(model: Model, e, times: int) -> list:
    seq = [e]
    for _ in range(times):
        seq.append(full_parallel_reduct(model, seq[-1]))
    return seq


# -------------------------------------------------
# One-step parallel relation
# -------------------------------------------------
class _Reducts:
    """Memoized sets of one-step parallel reducts, keyed by alpha key."""

    def __init__(self, model: Model):
        self.model = model
        self.memo: dict[tuple, dict] = {}

    def __call__(self, e) -> dict:
        key = e.akey
        if key not in self.memo:
            found = self._compute(e)
            if len(found) > config.MAX_STATES:
                raise ResourceLimitError(f"more than {config.MAX_STATES} parallel reducts")
            self.memo[key] = found
        return self.memo[key]

    def _grouped(self, test) -> list[list]:
        """
        Reducts of a test taken group by group: the parts of the test are
        partitioned, and each group is reduced to one of its reducts and
        kept whole. One list of group reducts per choice.
        """
        options = []
        for grouping in _groupings(list(_parts(test))):
            reducts = [self(test_sum(group)).values() for group in grouping]
            options.extend(list(choice) for choice in itertools.product(*reducts))
        return options

    def _products(self, items) -> list:
        out = []
        for grouping in itertools.product(*(_groupings(list(_parts(q))) for q in items)):
            picks = [
                [test_sum(group) for group in pick]
                for pick in itertools.product(*grouping)
            ]
            per_pick = [
                [test_prod(choice) for choice in itertools.product(*(self(g).values() for g in pick))]
                for pick in picks
            ]
            out.extend(test_sum(choice) for choice in itertools.product(*per_pick))
        return out

    def _compute(self, e) -> dict:
        model = self.model
        out: dict[tuple, object] = {}

        def add(x):
            out.setdefault(x.akey, x)

        if isinstance(e, Var):
            add(e)
        elif isinstance(e, Jg):
            add(e)
            add(App(build_G(e.g, e.index), Jg(e.g, e.index + 1)))
        elif isinstance(e, Lam):
            for b in self(e.body).values():
                add(Lam(e.binder, b))
        elif isinstance(e, App):
            args = list(self(e.arg).values())
            for f, n in itertools.product(self(e.fn).values(), args):
                add(App(f, n))
            if isinstance(e.fn, Lam):
                for b, n in itertools.product(self(e.fn.body).values(), args):
                    add(subst(b, e.fn.binder, n))
            if isinstance(e.fn, TBarSum):
                # the reduct of each summand test is grouped, then split one summand per group
                per_summand = []
                for s in e.fn.summands:
                    per_summand.append([
                        (s, [test_sum(group) for group in grouping])
                        for q in self(s.test).values()
                        for grouping in _groupings(list(_parts(q)))
                    ])
                for choice, n in itertools.product(itertools.product(*per_summand), args):
                    parts = []
                    for s, groups in choice:
                        (a,), alpha = unfold(model, s.point, 1)
                        taus = [Tau(g, n) for g in a]
                        parts += [Summand(alpha, test_prod([q, *taus])) for q in groups]
                    add(tbar_sum(parts))
        elif isinstance(e, TBarSum):
            per_summand = [
                [[Summand(s.point, q) for q in groups] for groups in self._grouped(s.test)]
                for s in e.summands
            ]
            for choice in itertools.product(*per_summand):
                add(tbar_sum(itertools.chain.from_iterable(choice)))
        elif isinstance(e, Tau):
            body = e.body
            for b in self(body).values():
                add(Tau(e.point, b))
            if isinstance(body, Lam):
                (a,), alpha = unfold(model, e.point, 1)
                for b in self(body.body).values():
                    add(Tau(alpha, subst(b, body.binder, eps_bar(a))))
            if isinstance(body, TBarSum):
                kept = [s for s in body.summands if leq(model, e.point, s.point)]
                for choice in itertools.product(*(self(s.test).values() for s in kept)):
                    add(test_sum(choice))
        elif isinstance(e, Sum):
            for choice in itertools.product(*(self(q).values() for q in e.items)):
                add(test_sum(choice))
        elif isinstance(e, Prod):
            for x in self._products(e.items):
                add(x)
        else:
            add(e)
        return out


def parallel_reducts(model: Model, e) -> list:
    return list(_Reducts(model)(e).values())


def par_reduces(model: Model, e, f) -> bool:
    """Does e reduce to f in one parallel step (up to alpha and multiset order)?"""
    return f.akey in _Reducts(model)(e)


def _splits(model: Model, q) -> bool:
    """Is the maximal reduct of q a sum of several parts?"""
    plus = full_parallel_reduct(model, q)
    return isinstance(plus, Sum) and len(plus.items) > 1


def reaches_plus(model: Model, e, step: Step) -> bool:
    """
    Whether the fork made by step should reach the maximal reduct of e in
    one parallel step.

    False when the step drops a test whose maximal reduct has several parts
    into a flat product: a summand test under tbar, a picked product under
    prod-sum, or the single product a tautbar leaves inside a product. Such
    forks only join E+ later.
    """
    node = subexpr(e, step.position)
    if step.rule == "tbar":
        return not any(_splits(model, s.test) for s in node.fn.summands)
    if step.rule == "prod-sum":
        picked = [p for q in node.items if isinstance(q, Sum) for p in q.items]
        return not any(isinstance(p, Prod) and _splits(model, p) for p in picked)
    if step.rule == "tautbar" and step.position:
        parent = subexpr(e, step.position[:-1])
        result = contract(model, node)
        return not (isinstance(parent, Prod) and isinstance(result, Prod) and _splits(model, result))
    return True


def join_witness(model: Model, e, f1, f2, rounds: int = 10):
    """A common reduct of two one-step reducts of e, or None."""
    left = plus_iterates(model, f1, rounds)
    right = {x.akey: x for x in plus_iterates(model, f2, rounds)}
    for x in left:
        if x.akey in right:
            return x
    target = full_parallel_reduct(model, e)
    if par_reduces(model, f1, target) and par_reduces(model, f2, target):
        logger.debug("iterates did not meet; joined at the parallel reduct of the source")
        return target
    return None
