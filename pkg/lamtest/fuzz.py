"""
Randomized property suites over the reduction engine and the oracle.

Each case is derived from its own seed, so a failing seed printed in a
summary replays the exact same expression.
"""

import logging
import random
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field

from lamtest import config
from lamtest.errors import LamtestError, ResourceLimitError
from lamtest.generators import random_term
from lamtest.interp import Judgment, default_window, derivable, member_op
from lamtest.kmodel import Model, enumerate_elements
from lamtest.parallel import full_parallel_reduct, join_witness, par_reduces, reaches_plus
from lamtest.reduction import full_converges, full_successors, head_converges
from lamtest.syntax import show

logger = logging.getLogger("fuzz")

SUITES = ("confluence", "standardization", "invariance", "oracle")

OK, FAIL, SKIP = "ok", "fail", "skip"


@dataclass
class FuzzSummary:
    suite: str
    checked: int = 0
    failed: int = 0
    skipped: int = 0
    failing_seeds: list[int] = field(default_factory=list)

    def render(self, fmt: str = "human") -> str:
        seeds = ",".join(str(s) for s in self.failing_seeds) or "-"
        if fmt == "tsv":
            return "\t".join([self.suite, str(self.checked), str(self.failed), str(self.skipped), seeds])
        return (
            f"{self.suite}: {self.checked} checked, {self.failed} failed, "
            f"{self.skipped} skipped  failing seeds: {seeds}"
        )


@dataclass(frozen=True)
class FuzzSettings:
    model: Model
    pool: tuple
    max_size: int = 30
    fuel: int = 30
    full_steps: int = 20
    max_states: int = config.FUZZ_MAX_STATES


def make_pool(model: Model, depth: int, width: int) -> tuple:
    """Points for tb / tau nodes; width 0 gives pure lambda-terms."""
    if width == 0:
        return ()
    return enumerate_elements(model, depth, width)


def _expr(settings: FuzzSettings, seed: int, closed: bool = False):
    size = random.Random(seed).randint(1, settings.max_size)
    return random_term(seed, size, settings.model, settings.pool, closed=closed)


# -------------------------------------------------
# Cases
# -------------------------------------------------
def confluence_case(settings: FuzzSettings, seed: int) -> str:
    model = settings.model
    e = _expr(settings, seed)
    steps = full_successors(model, e)
    if not steps:
        return SKIP
    plus = full_parallel_reduct(model, e)
    for s in steps:
        if reaches_plus(model, e, s):
            if not par_reduces(model, s.result, plus):
                logger.warning(f"❌ seed {seed}: {show(s.result)} does not reach {show(plus)} in one parallel step")
                return FAIL
        elif join_witness(model, e, s.result, plus) is None:
            logger.warning(f"❌ seed {seed}: {s.rule} fork {show(s.result)} never meets {show(plus)}")
            return FAIL
    forks = [s.result for s in steps]
    for i, f1 in enumerate(forks):
        for f2 in forks[i + 1:]:
            if join_witness(model, e, f1, f2) is None:
                logger.warning(f"❌ seed {seed}: no join for a fork of {show(e)}")
                return FAIL
    return OK


def standardization_case(settings: FuzzSettings, seed: int) -> str:
    model = settings.model
    e = _expr(settings, seed)
    full = full_converges(model, e, settings.full_steps, settings.max_states)
    if not full.converged:
        return SKIP
    bound = config.STANDARDIZATION_FACTOR * len(full)
    if not head_converges(model, e, bound, settings.max_states).converged:
        logger.warning(f"❌ seed {seed}: full mhnf in {len(full)} steps, no head mhnf within {bound}")
        return FAIL
    return OK


def check_invariance(model: Model, e, fuel: int, max_states: int | None = None) -> str:
    """Every one-step reduct of a term converging in n head steps converges within n."""
    trace = head_converges(model, e, fuel, max_states)
    if not trace.converged:
        return SKIP
    n = len(trace)
    for s in full_successors(model, e):
        if not head_converges(model, s.result, n, max_states).converged:
            logger.warning(f"❌ {s.rule} step from {show(e)} needs more than {n} head steps")
            return FAIL
    return OK


def invariance_case(settings: FuzzSettings, seed: int) -> str:
    outcome = check_invariance(settings.model, _expr(settings, seed), settings.fuel, settings.max_states)
    if outcome == FAIL:
        logger.warning(f"❌ seed {seed}: convergence bound not invariant")
    return outcome


def oracle_case(settings: FuzzSettings, seed: int) -> str:
    model = settings.model
    m = _expr(settings, seed, closed=True)
    window = default_window(model)
    for alpha in window:
        typed = derivable(model, Judgment((), m, alpha), window=window).yes
        ran = member_op(model, m, (), alpha, 2 * config.FUEL).yes
        if typed != ran:
            logger.warning(f"❌ seed {seed}: derivable {typed}, oracle {ran} for {show(m)} : {alpha}")
            return FAIL
    return OK


_CASES = {
    "confluence": confluence_case,
    "standardization": standardization_case,
    "invariance": invariance_case,
    "oracle": oracle_case,
}


def _guarded(case, settings: FuzzSettings, seed: int) -> tuple[int, str]:
    try:
        return seed, case(settings, seed)
    except ResourceLimitError as e:
        logger.debug(f"seed {seed} skipped: {e}")
        return seed, SKIP


def run_suite(suite: str, settings: FuzzSettings, cases: int, seed: int = config.SEED, workers: int = 8) -> FuzzSummary:
    if suite not in _CASES:
        raise LamtestError(f"unknown fuzz suite {suite!r}; known: {', '.join(SUITES)}")
    case = _CASES[suite]
    summary = FuzzSummary(suite)
    with ThreadPoolExecutor(max_workers=workers) as ex:
        futures = [ex.submit(_guarded, case, settings, seed + i) for i in range(cases)]
        for future in as_completed(futures):
            case_seed, outcome = future.result()
            if outcome == SKIP:
                summary.skipped += 1
                continue
            summary.checked += 1
            if outcome == FAIL:
                summary.failed += 1
                summary.failing_seeds.append(case_seed)
    summary.failing_seeds.sort()
    logger.info(f"📊 {summary.render()}")
    return summary
