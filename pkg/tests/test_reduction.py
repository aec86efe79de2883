import pytest
from hypothesis import given, settings, strategies as st

from lamtest.errors import InvalidRedexError
from lamtest.generators import random_term
from lamtest.kmodel import Atom, GSpec, builtin, enumerate_elements
from lamtest.parser import parse
from lamtest.reduction import (
    full_converges,
    full_successors,
    head_converges,
    head_successors,
    is_head_position,
    is_mhnf,
    redexes,
    render_trace,
    step,
)
from lamtest.syntax import EPS, ZERO_TEST, App, Jg, Tau, combinator, eps_bar, show


def _positions(trace):
    return [(s.rule, s.position) for s in trace.steps]


class TestGoldenTraces:
    def test_dinf_application_converges(self, dinf):
        trace = head_converges(dinf, parse("tau<*>((\\x y. x y) eb<{*}>)", dinf), 100)
        assert trace.converged
        assert trace.rules == ("beta", "tau", "tbar", "tautbar")
        assert trace.final == EPS

    def test_dinf_flipped_application_reaches_zero(self, dinf):
        trace = head_converges(dinf, parse("tau<*>((\\x y. y x) eb<{*}>)", dinf), 100)
        assert not trace.converged
        assert trace.rules == ("beta", "tau", "tbar", "tautbar")
        assert trace.final == ZERO_TEST

    def test_park_self_application(self, park):
        trace = head_converges(park, parse("tau<*>(\\x. x x)", park), 100)
        assert trace.converged
        assert trace.rules == ("tau", "tbar", "tautbar", "tautbar")

    def test_norm_identity(self, norm):
        at_p = head_converges(norm, parse("tau<p>(\\x. x)", norm), 100)
        assert at_p.converged and at_p.rules == ("tau", "tautbar")
        at_q = head_converges(norm, parse("tau<q>(\\x. x)", norm), 100)
        assert not at_q.converged
        assert at_q.final == ZERO_TEST

    def test_norm_identity_against_eps_bar(self, norm):
        trace = head_converges(norm, parse("tau<p>(I eb<{p}>)", norm), 100)
        assert _positions(trace) == [("beta", (0,)), ("tautbar", ())]


class TestSteps:
    def test_redexes_in_preorder(self, dinf):
        e = parse("(\\x. x) ((\\y. y) z)", dinf)
        assert redexes(e) == [((), "beta"), ((1,), "beta")]

    def test_step_rejects_wrong_rule(self, dinf):
        e = parse("(\\x. x) z", dinf)
        with pytest.raises(InvalidRedexError):
            step(dinf, e, (), "tbar")
        with pytest.raises(InvalidRedexError):
            step(dinf, e, (0, 0, 0), "beta")

    def test_head_position(self, dinf):
        e = parse("(\\x. x) ((\\y. y) z)", dinf)
        assert is_head_position(e, ())
        assert not is_head_position(e, (1,))

    def test_prod_sum_distributes(self, norm):
        e = parse("tau<p>(x) * (tau<q>(y) + tau<q>(z))", norm)
        (s,) = [s for s in full_successors(norm, e) if s.rule == "prod-sum"]
        assert show(s.result) == "tau<p>(x) * tau<q>(y) + tau<p>(x) * tau<q>(z)"

    def test_tbar_sum_splits(self, norm):
        e = parse("tb<p>(tau<q>(x) + tau<q>(y))", norm)
        (s,) = head_successors(norm, e)
        assert s.rule == "tbar-sum"
        assert show(s.result) == "tb<p>(tau<q>(x)) + tb<p>(tau<q>(y))"

    def test_delta_unfolds_jg(self, norm):
        (s,) = head_successors(norm, Jg(GSpec.const(1), 0))
        assert s.rule == "delta-Jg"
        assert show(s.result) == "(\\u e x1. e (u x1)) Jg[const 1](1)"


class TestNormalForms:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("\\x. x y", True),
            ("tau<p>(x y)", True),
            ("eps", True),
            ("0", False),
            ("tau<p>(x) + tau<q>(I)", True),
            ("tau<p>(I)", False),
            ("\\x. tb<p>(eps) + tb<q>(tau<p>(I))", True),
        ],
    )
    def test_mhnf(self, norm, text, expected):
        assert is_mhnf(parse(text, norm)) is expected

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 100_000), st.integers(1, 14))
    def test_non_head_steps_keep_mhnf(self, seed, size):
        model = builtin("norm")
        e = random_term(seed, size, model, enumerate_elements(model, 1, 1))
        if not is_mhnf(e):
            return
        for s in full_successors(model, e):
            if not is_head_position(e, s.position):
                assert is_mhnf(s.result), show(e)


class TestConvergence:
    def test_omega_exhausts(self, dinf):
        trace = head_converges(dinf, combinator("Omega"), 50)
        assert not trace.converged
        assert trace.fuel == 50

    def test_full_strategy_reduces_under_arguments(self, dinf):
        e = parse("tau<*>(x ((\\y. y) z))", dinf)
        assert full_converges(dinf, e, 10).converged

    @pytest.mark.parametrize("name", ["dinf", "park", "norm"])
    def test_jg_convergence_is_monotone_in_fuel(self, name):
        model = builtin(name)
        for alpha in enumerate_elements(model, 0, 1):
            e = Tau(alpha, App(Jg(GSpec.const(1), 0), eps_bar((alpha,))))
            verdicts = [head_converges(model, e, fuel).converged for fuel in (2, 4, 8, 16, 32, 64)]
            assert verdicts == sorted(verdicts)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000))
    def test_head_and_full_agree_on_one_step_convergence(self, seed):
        model = builtin("norm")
        e = random_term(seed, 12, model, enumerate_elements(model, 0, 1))
        head = head_converges(model, e, 30)
        if head.converged:
            assert full_converges(model, e, 30).converged


class TestRendering:
    def test_human(self, norm):
        trace = head_converges(norm, parse("tau<p>(I eb<{p}>)", norm), 100)
        assert render_trace(trace) == "\n".join([
            "0  start  tau<p>((\\x. x) eb<{p}>)",
            "1  beta@0  tau<p>(eb<{p}>)",
            "2  tautbar@root  eps",
            "VERDICT converged(2)",
        ])

    def test_tsv(self, norm):
        trace = head_converges(norm, parse("tau<q>(\\x. x)", norm), 7)
        lines = render_trace(trace, "tsv").splitlines()
        assert lines[0].split("\t")[:2] == ["0", "start"]
        assert lines[1].split("\t")[:3] == ["1", "tau", "root"]
        assert lines[-1] == "VERDICT\texhausted(7)"
