"""
Hyperimmunity probing over finite windows and the end-to-end run of the
Jg-versus-identity counterexample.

A probe certifies NON-hyperimmunity for one g by exhibiting a lasso; an
exhausted probe is only evidence the other way.
"""

import logging
from dataclasses import dataclass

from lamtest import config
from lamtest.errors import (
    CrossCheckError,
    LamtestError,
    ModelSpecError,
    NoWitnessError,
    ShapeMismatchError,
    WindowExceededError,
)
from lamtest.kmodel import (
    Antichain,
    Atom,
    Element,
    GSpec,
    Model,
    builtin,
    enumerate_antichains,
    enumerate_elements,
    hf_atom,
    leq,
    shift_element,
    show_antichain,
    unfold,
)
from lamtest.reduction import Trace, head_converges, head_successors, is_mhnf, render_trace
from lamtest.syntax import (
    App,
    Jg,
    Tau,
    children,
    combinator,
    eps_bar,
    show,
    test_prod,
    test_sum,
)

logger = logging.getLogger("hyper")


# -------------------------------------------------
# Chains
# -------------------------------------------------
@dataclass(frozen=True)
class ChainWitness:
    chain: tuple[Element, ...]
    indices: tuple[int, ...]  # k_n: alpha_{n+1} sits in the k_n-th unfolded head of alpha_n
    lasso: tuple[int, int] | None  # (start, period)
    g: GSpec
    shifted: bool = False  # the cycle closes up to the model's window shift

    def unrolled(self, model: Model, times: int = 2) -> tuple[Element, ...]:
        if self.lasso is None:
            return self.chain
        _, period = self.lasso
        chain = list(self.chain)
        for _ in range(times * period):
            prev = chain[-period]
            nxt = shift_element(model, prev) if self.shifted else prev
            if nxt is None:
                raise WindowExceededError(f"cannot unroll past {prev} in the {model.name} window")
            chain.append(nxt)
        return tuple(chain)

    def __str__(self) -> str:
        text = "chain " + " ".join(str(e) for e in self.chain)
        if self.lasso is not None:
            start, period = self.lasso
            text += f"  lasso start {start} period {period}"
            if self.shifted:
                text += " (shifted)"
        return text + f"  g {self.g}"


def check_condition(model: Model, g: GSpec, chain) -> bool:
    """Every alpha_{n+1} lies in one of the first g(n) heads of alpha_n."""
    chain = tuple(chain)
    if not chain:
        raise LamtestError("check_condition needs a non-empty chain")
    for n, (alpha, nxt) in enumerate(zip(chain, chain[1:])):
        heads, _ = unfold(model, alpha, g(n))
        if not any(nxt in head for head in heads):
            return False
    return True


def _lasso(model: Model, g: GSpec, chain: list) -> tuple[int, int, bool] | None:
    if g.tail_start is None:
        return None
    m = len(chain) - 1
    for i in range(g.tail_start, m):
        if chain[m] == chain[i]:
            return i, m - i, False
        if model.shift and shift_element(model, chain[i]) == chain[m]:
            return i, m - i, True
    return None


def _extend(model: Model, g: GSpec, depth: int, chain: list, indices: list) -> ChainWitness | None:
    found = _lasso(model, g, chain)
    if found is not None:
        start, period, shifted = found
        return ChainWitness(tuple(chain), tuple(indices), (start, period), g, shifted)
    m = len(chain) - 1
    if m >= depth:
        return None
    heads, _ = unfold(model, chain[m], g(m))
    tried = set()
    for k, head in enumerate(heads, start=1):
        for beta in head:
            if beta in tried:
                continue
            tried.add(beta)
            w = _extend(model, g, depth, chain + [beta], indices + [k])
            if w is not None:
                return w
    return None


def probe(model: Model, g: GSpec, depth: int = config.PROBE_DEPTH, start=None) -> ChainWitness | None:
    """Depth-first search for a lasso chain; None means no witness to this depth."""
    if depth < 1:
        raise LamtestError("probe depth must be at least 1")
    if start is None:
        start = sorted((Atom(a) for a in model.atoms if a not in model.frontier), key=lambda e: e.key)
    for alpha in start:
        w = _extend(model, g, depth, [alpha], [])
        if w is not None:
            logger.info(f"🔁 {model.name}: refuted for g = {g} ({w})")
            return w
    logger.info(f"{model.name}: no witness to depth {depth} for g = {g}")
    return None


def project_to_atoms(witness: ChainWitness) -> int | None:
    """Index from which the chain stays among base atoms, or None.

    Arrow-depth strictly drops along the chain until it reaches an atom, and
    the lasso has to close inside the atom suffix.
    """
    chain = witness.chain
    for alpha, nxt in zip(chain, chain[1:]):
        if alpha.depth > 0 and nxt.depth >= alpha.depth:
            return None
    first = next((i for i, e in enumerate(chain) if e.depth == 0), None)
    if first is None or any(e.depth > 0 for e in chain[first:]):
        return None
    if witness.lasso is not None and witness.lasso[0] < first:
        return None
    return first


def probe_hf(f_table, g: GSpec, depth: int = config.PROBE_DEPTH) -> ChainWitness | None:
    """Probe H^f along a0_1, a1_1, ... and cross-check against g(n) >= f(n) + 1."""
    f = GSpec.table(f_table)
    if g.tail_start is None:
        raise ModelSpecError("probe_hf needs an eventually constant g (const or table)")
    window = max(depth, f.tail_start + 1, g.tail_start + 1)
    model = builtin("hf", size=window + 1, table=f.values)
    witness = probe(model, g, window, start=[Atom(hf_atom(0, 1))])
    expected = all(g(n) >= f(n) + 1 for n in range(window))
    if (witness is not None) != expected:
        raise CrossCheckError(
            f"H^f probe for f = {f}, g = {g}: witness {witness is not None}, pointwise check {expected}"
        )
    return witness


# -------------------------------------------------
# Counterexample
# -------------------------------------------------
@dataclass(frozen=True)
class ShiftCycle:
    first: int
    second: int
    period: int  # Jg numeral increment between the two states


def _jg_indices(e) -> list[int]:
    found = []
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Jg):
            found.append(node.index)
        stack.extend(reversed(children(node)))
    return found


def find_shift_cycle(trace: Trace) -> ShiftCycle | None:
    """First pair of states equal up to the Jg numerals, which all moved by the same d > 0."""
    states = [trace.start] + [s.result for s in trace.steps]
    seen: dict[tuple, int] = {}
    for j, state in enumerate(states):
        key = state.erased_key
        if key in seen:
            i = seen[key]
            before, after = _jg_indices(states[i]), _jg_indices(state)
            shifts = {b - a for a, b in zip(before, after)}
            if len(before) == len(after) and len(shifts) == 1:
                d = shifts.pop()
                if d > 0:
                    return ShiftCycle(i, j, d)
        else:
            seen[key] = j
    return None


@dataclass(frozen=True)
class CounterexampleReport:
    model: str
    witness: ChainWitness
    i_trace: Trace
    jg_trace: Trace
    cycle: ShiftCycle | None

    @property
    def fuel(self) -> int:
        return self.jg_trace.fuel

    def render(self, fmt: str = "human") -> str:
        sep = "\t" if fmt == "tsv" else "  "
        verdict = "converged" if self.jg_trace.converged else "exhausted"
        lines = [
            sep.join(["WITNESS", str(self.witness)]),
            "I-TRACE",
            render_trace(self.i_trace, fmt),
            sep.join([f"JG-VERDICT({self.fuel})", verdict, show(self.jg_trace.start)]),
        ]
        if self.cycle is not None:
            c = self.cycle
            lines.append(sep.join([f"SHIFT-CYCLE({c.period})", f"states {c.first}..{c.second}"]))
        return "\n".join(lines)


def run_counterexample(
    model: Model,
    g: GSpec,
    alpha0: Element | None = None,
    fuel: int = config.FUEL,
    depth: int = config.PROBE_DEPTH,
) -> CounterexampleReport:
    """Run I and Jg[g](0) against eb<{alpha0}> under tau<alpha0>."""
    witness = probe(model, g, depth, start=None if alpha0 is None else [alpha0])
    if witness is None:
        raise NoWitnessError(f"{model.name} has no chain witness for g = {g} to depth {depth}")
    alpha0 = witness.chain[0]
    arg = eps_bar((alpha0,))
    i_trace = head_converges(model, Tau(alpha0, App(combinator("I"), arg)), fuel)
    jg_trace = head_converges(model, Tau(alpha0, App(Jg(g, 0), arg)), fuel)
    if jg_trace.converged:
        logger.error(f"🚨 Jg converged on {model.name} in {len(jg_trace)} steps")
    cycle = find_shift_cycle(jg_trace)
    return CounterexampleReport(model.name, witness, i_trace, jg_trace, cycle)


def cefact_rhs(model: Model, g: GSpec, n: int, alpha: Element, b: Antichain):
    """Sum over beta in b with alpha' <= beta' of the products of tau<gamma>(Jg(n+1) eb<a_i>)."""
    k = g(n)
    a, alpha_tail = unfold(model, alpha, k)
    nxt = Jg(g, n + 1)
    summands = []
    for beta in b:
        b_heads, beta_tail = unfold(model, beta, k)
        if not leq(model, alpha_tail, beta_tail):
            continue
        summands.append(test_prod(
            Tau(gamma, App(nxt, eps_bar(a[i])))
            for i in range(k)
            for gamma in b_heads[i]
        ))
    return test_sum(summands)


def cefact_trace(model: Model, g: GSpec, n: int, alpha: Element, b: Antichain) -> Trace:
    """Replay delta, beta x2, tau x k, tbar x k, tautbar from tau<alpha>(Jg(n) eb<b>)."""
    k = g(n)
    expected = ["delta-Jg", "beta", "beta"] + ["tau"] * k + ["tbar"] * k + ["tautbar"]
    start = Tau(alpha, App(Jg(g, n), eps_bar(b)))
    e = start
    steps = []
    for rule in expected:
        options = [s for s in head_successors(model, e) if s.rule == rule]
        if len(options) != 1:
            raise ShapeMismatchError(f"expected one {rule} head step from {show(e)}, found {len(options)}")
        steps.append(options[0])
        e = options[0].result
    rhs = cefact_rhs(model, g, n, alpha, b)
    if e.akey != rhs.akey:
        raise ShapeMismatchError(f"replay ended at {show(e)}, expected {show(rhs)}")
    return Trace(start, tuple(steps), is_mhnf(e), len(steps))


def ce_refutation(model: Model, g: GSpec, n: int, alpha: Element, b: Antichain, fuel: int = config.FUEL) -> bool:
    """tau<alpha>(Jg(n) eb<b>) stays unconverged at every checked fuel up to the bound.

    Only meaningful when no member of b dominates alpha.
    """
    if any(leq(model, alpha, beta) for beta in b):
        raise LamtestError(f"{alpha} is dominated by {show_antichain(b)}; the divergence check does not apply")
    expr = Tau(alpha, App(Jg(g, n), eps_bar(b)))
    k = 1
    while True:
        if head_converges(model, expr, min(k, fuel)).converged:
            logger.error(f"🚨 {show(expr)} converged within fuel {k}")
            return False
        if k >= fuel:
            return True
        k *= 2


def jg_identity_window(
    g: GSpec,
    n: int = 0,
    depth: int = config.DEPTH,
    width: int = config.WIDTH,
    fuel: int = config.FUEL,
) -> bool:
    """On D-infinity: tau<alpha>(Jg(n) eb<a0>) converges iff some beta in a0 has alpha <= beta."""
    model = builtin("dinf")
    window = enumerate_elements(model, depth, width)
    ok = True
    for a0 in enumerate_antichains(model, window, width):
        for alpha in window:
            run = head_converges(model, Tau(alpha, App(Jg(g, n), eps_bar(a0))), fuel)
            expected = any(leq(model, alpha, beta) for beta in a0)
            if run.converged != expected:
                logger.warning(
                    f"Jg({n}) vs I mismatch at {alpha}, {show_antichain(a0)}: "
                    f"run {run.converged}, criterion {expected}"
                )
                ok = False
    return ok
