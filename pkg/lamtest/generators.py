"""
Seeded random expressions for the fuzz suites and property tests.
"""

import random

from lamtest.kmodel import Element, Model
from lamtest.syntax import (
    EPS,
    ZERO_TERM,
    ZERO_TEST,
    App,
    Lam,
    Summand,
    Tau,
    Var,
    tbar_sum,
    test_prod,
    test_sum,
)

FREE_VARS = ("x", "y", "z")


class _Gen:
    def __init__(self, seed: int, pool: tuple[Element, ...], closed: bool, beta_free: bool):
        self.rng = random.Random(seed)
        self.pool = tuple(pool)
        self.closed = closed
        self.beta_free = beta_free

    def _var(self, scope: list[str]):
        names = list(scope) if self.closed else list(scope) + list(FREE_VARS)
        if not names:
            return None
        return Var(self.rng.choice(names))

    def term(self, size: int, scope: list[str]):
        rng = self.rng
        if size <= 1:
            var = self._var(scope)
            if var is None or rng.random() < 0.15:
                return ZERO_TERM
            return var
        kinds = ["lam", "app", "app"]
        if self.pool:
            kinds.append("tbar")
        kind = rng.choice(kinds)
        if kind == "lam":
            binder = f"v{len(scope)}"
            return Lam(binder, self.term(size - 1, scope + [binder]))
        if kind == "app":
            left = rng.randint(1, size - 1)
            fn = self.term(left, scope)
            if self.beta_free and isinstance(fn, Lam):
                fn = self._var(scope) or ZERO_TERM
            return App(fn, self.term(size - left, scope))
        count = 1 if size < 4 else rng.randint(1, 2)
        share = max(1, (size - 1) // count)
        return tbar_sum(
            Summand(rng.choice(self.pool), self.test(share, scope)) for _ in range(count)
        )

    def test(self, size: int, scope: list[str]):
        rng = self.rng
        if size <= 1:
            return EPS if rng.random() < 0.8 else ZERO_TEST
        kinds = ["sum", "prod"]
        if self.pool:
            kinds += ["tau", "tau", "tau"]
        kind = rng.choice(kinds)
        if kind == "tau":
            return Tau(rng.choice(self.pool), self.term(size - 1, scope))
        left = rng.randint(1, size - 1)
        items = [self.test(left, scope), self.test(size - left, scope)]
        return test_sum(items) if kind == "sum" else test_prod(items)


def random_term(
    seed: int,
    size: int,
    model: Model,
    pool: tuple[Element, ...] = (),
    kind: str = "term",
    closed: bool = False,
    beta_free: bool = False,
):
    """A canonical expression of roughly `size` nodes; identical for identical arguments.

    An empty pool yields pure lambda-terms (tests are then built from eps and 0).
    `model` only fixes where the pool's points live.
    """
    gen = _Gen(seed, pool, closed, beta_free)
    if kind == "test":
        return gen.test(size, [])
    return gen.term(size, [])
