"""
Böhm-style separation for pure lambda-terms: build a context that makes the
first term head-converge and the second diverge.

Candidates are substitutions plus trailing arguments. Every free variable
of the two inputs that a candidate assigns is bound once, at the outermost
level of the context:

    (\\f1 .. fm. [] a1 .. aL pads) s1 .. sm

where a_i is what the candidate assigns to the i-th (eta-aligned) binder.
"""

import itertools
import logging
from typing import Iterator

from lamtest import config
from lamtest.errors import NonConvergingError
from lamtest.kmodel import Model, builtin
from lamtest.reduction import head_converges
from lamtest.syntax import (
    Hole,
    Var,
    apps,
    combinator,
    fill,
    lams,
    spine,
    strip_lams,
    subst,
)

logger = logging.getLogger("separation")

MAX_CANDIDATES = 64

# (assignment, binder names of this level, trailing arguments)
Candidate = tuple[dict, list[str], list]


class _Names:
    """Fresh-name supply threaded through one separation."""

    def __init__(self, used):
        self.used = set(used)

    def fresh(self, base: str) -> str:
        i = 1
        while f"{base}{i}" in self.used:
            i += 1
        name = f"{base}{i}"
        self.used.add(name)
        return name


def _all_names(e) -> set[str]:
    names = set(e.free_vars)
    stack = [e]
    while stack:
        node = stack.pop()
        if hasattr(node, "binder"):
            names.add(node.binder)
        stack.extend(getattr(node, f) for f in ("body", "fn", "arg") if hasattr(node, f))
    return names


def _align(hnf, zs: list[str]):
    """Rename the leading binders to zs and eta-expand up to len(zs)."""
    binders, body = strip_lams(hnf)
    for old, new in reversed(list(zip(binders, zs))):
        body = subst(body, old, Var(new))
    head, args = spine(body)
    return head, list(args) + [Var(z) for z in zs[len(binders):]]


def _applied(sigma: dict, zs: list[str], pads: list) -> list:
    return [sigma.get(z, Var(z)) for z in zs] + list(pads)


def _candidates(model: Model, m, n, fuel: int, names: _Names) -> Iterator[Candidate]:
    if fuel <= 0:
        return
    left = head_converges(model, m, fuel)
    if not left.converged:
        raise NonConvergingError("the left term has no head-normal form within fuel")
    right = head_converges(model, n, fuel)
    if not right.converged:
        yield {}, [], []
        return

    m_binders, _ = strip_lams(left.final)
    n_binders, _ = strip_lams(right.final)
    zs = [names.fresh("z") for _ in range(max(len(m_binders), len(n_binders)))]
    y, m_args = _align(left.final, zs)
    y2, n_args = _align(right.final, zs)
    if not (isinstance(y, Var) and isinstance(y2, Var)):
        return

    omega, ident = combinator("Omega"), combinator("I")
    if y.name != y2.name:
        yield {y2.name: omega}, zs, []
        return

    k, k2 = len(m_args), len(n_args)
    if k != k2:
        d = abs(k - k2)
        selector = [names.fresh("p") for _ in range(min(k, k2) + d + 1)]
        ts = [names.fresh("t") for _ in range(d)]
        middle = [Var(names.fresh("w")) for _ in range(d - 1)]
        if k < k2:
            pads = [lams(ts, omega), *middle, ident]
        else:
            pads = [lams(ts, ident), *middle, omega]
        yield {y.name: lams(selector, Var(selector[-1]))}, zs, pads
        return

    for i, (mi, ni) in enumerate(zip(m_args, n_args)):
        if mi.akey == ni.akey:
            continue
        try:
            for inner, inner_zs, inner_pads in _candidates(model, mi, ni, fuel - 1, names):
                if y.name in inner:
                    continue
                us = [names.fresh("u") for _ in m_args]
                chooser = lams(us, apps(Var(us[i]), _applied(inner, inner_zs, inner_pads)))
                yield {**inner, y.name: chooser}, zs, []
        except NonConvergingError:
            continue


def _context(sigma: dict, zs: list[str], pads: list, free: frozenset):
    bound = sorted(x for x in sigma if x in free and x not in zs)
    return apps(lams(bound, apps(Hole(), _applied(sigma, zs, pads))), [sigma[x] for x in bound])


def _validate(model: Model, ctx, m, n, fuel: int) -> bool:
    if not head_converges(model, fill(ctx, m), fuel).converged:
        return False
    return not head_converges(model, fill(ctx, n), fuel).converged


def separating_context(m, n, fuel: int = config.FUEL, model: Model | None = None):
    """A context C with C[m] converging and C[n] not, or None when none was found."""
    model = model or builtin("dinf")
    names = _Names(_all_names(m) | _all_names(n))
    free = m.free_vars | n.free_vars
    for sigma, zs, pads in itertools.islice(_candidates(model, m, n, fuel, names), MAX_CANDIDATES):
        ctx = _context(sigma, zs, pads, free)
        if _validate(model, ctx, m, n, fuel):
            return ctx
    logger.debug("no validated separating context")
    return None
