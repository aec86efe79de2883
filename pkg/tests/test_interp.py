import pytest
from hypothesis import given, settings, strategies as st

from lamtest.generators import random_term
from lamtest.interp import (
    Derivation,
    Judgment,
    check_derivation,
    default_window,
    derivable,
    interp_points,
    make_env,
    member_op,
    typed_subst_check,
)
from lamtest.kmodel import Arrow, Atom, builtin, enumerate_antichains, enumerate_elements
from lamtest.parser import parse, parse_judgment
from lamtest.syntax import EPS, ZERO_TERM, Tau, church, combinator

P, Q, STAR = Atom("p"), Atom("q"), Atom("*")


class TestDerivable:
    def test_identity_at_p(self, norm):
        verdict = derivable(norm, Judgment((), combinator("I"), P))
        assert verdict.yes
        assert check_derivation(norm, verdict.witness)
        assert "sub" in verdict.witness.render()

    def test_empty_product(self, norm):
        verdict = derivable(norm, Judgment(make_env({"x": (P,)}), EPS))
        assert verdict.yes
        assert verdict.witness.rule == "prod"

    @pytest.mark.parametrize("depth", [0, 3, 8])
    def test_zero_is_never_typed(self, norm, depth):
        verdict = derivable(norm, Judgment((), ZERO_TERM, P), depth)
        assert not verdict.yes
        assert str(verdict) == f"NO-WITHIN-BOUNDS({depth})"

    def test_variable_axiom_with_subsumption(self, norm):
        j = parse_judgment("x:{q} |- x : p", norm)
        d = derivable(norm, j).witness
        assert [d.rule, d.premises[0].rule] == ["sub", "var"]

    def test_judgment_text(self, norm):
        j = parse_judgment("x:{q} |- x : p", norm)
        assert str(j) == "x:{q} |- x : p"

    def test_tau_lemma(self, norm):
        for text in ("\\x. x", "\\x. x x", "tb<q>(eps)"):
            m = parse(text, norm)
            for alpha in (P, Q):
                assert derivable(norm, Judgment((), m, alpha)).yes == derivable(norm, Judgment((), Tau(alpha, m))).yes

    def test_jg_needs_delta_budget(self, norm):
        j = parse_judgment("x:{p} |- Jg[const 1](0) x : p", norm)
        assert not derivable(norm, j, 0).yes


class TestChecker:
    def test_rejects_a_forged_derivation(self, norm):
        honest = Derivation("var", Judgment(make_env({"x": (P,)}), parse("x", norm), P))
        assert check_derivation(norm, honest)
        wrong = Derivation("var", Judgment(make_env({"x": (Q,)}), parse("x", norm), P))
        assert not check_derivation(norm, wrong)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 100_000), st.integers(1, 12))
    def test_found_derivations_check(self, seed, size):
        model = builtin("norm")
        m = random_term(seed, size, model, enumerate_elements(model, 0, 1), closed=True)
        for alpha in (P, Q):
            verdict = derivable(model, Judgment((), m, alpha))
            if verdict.yes:
                assert check_derivation(model, verdict.witness)


class TestWindows:
    def test_identity_contains_star_arrow(self, dinf):
        points = interp_points(dinf, combinator("I"), depth=1, width=1)
        assert ((), Arrow((STAR,), STAR)) in points

    @pytest.mark.parametrize("name", ["dinf", "norm"])
    def test_omega_is_empty(self, name):
        assert interp_points(builtin(name), combinator("Omega")) == frozenset()

    @pytest.mark.parametrize("name", ["dinf", "norm"])
    def test_extensionality(self, name):
        model = builtin(name)
        assert interp_points(model, church(1)) == interp_points(model, combinator("I"))

    def test_free_variables(self, norm):
        points = interp_points(norm, parse("x", norm), ("x",), depth=0, width=1)
        assert ((Q,), P) in points
        assert ((P,), Q) not in points

    def test_invariance_under_reduction(self, norm):
        before = interp_points(norm, parse("(\\x y. x y) z", norm), ("z",), depth=1, width=1)
        after = interp_points(norm, parse("\\y. z y", norm), ("z",), depth=1, width=1)
        assert before == after


class TestOracle:
    def test_identity_at_p(self, norm):
        verdict = member_op(norm, combinator("I"), (), P)
        assert verdict.yes
        assert verdict.witness.rules == ("tau", "tautbar")

    def test_omega_exhausts(self, norm):
        verdict = member_op(norm, combinator("Omega"), (), P, 200)
        assert not verdict.yes
        assert str(verdict) == "NO-WITHIN-BOUNDS(200)"

    def test_variable(self, norm):
        assert member_op(norm, parse("x", norm), {"x": (P,)}, P).yes

    @pytest.mark.parametrize("name", ["norm", "dinf"])
    def test_agrees_with_derivability(self, name):
        model = builtin(name)
        window = default_window(model)
        terms = [combinator("I"), church(1), church(2), combinator("Omega")]
        terms += [random_term(seed, 8, model, closed=True) for seed in range(10)]
        for m in terms:
            for alpha in window:
                typed = derivable(model, Judgment((), m, alpha), window=window).yes
                assert typed == member_op(model, m, (), alpha, 2000).yes

    def test_park_types_omega_but_never_runs_it(self, park):
        omega = combinator("Omega")
        assert derivable(park, Judgment((), omega, STAR)).yes
        assert not member_op(park, omega, (), STAR, 200).yes


class TestTypedSubstitution:
    def test_variable(self, norm):
        assert typed_subst_check(norm, {}, "x", (P,), parse("x", norm), P)

    def test_unused_variable(self, norm):
        assert typed_subst_check(norm, {"y": (Q,)}, "x", (P,), parse("y", norm), P)

    def test_window(self, norm):
        window = enumerate_elements(norm, 1, 1)
        m = parse("x z", norm)
        for a in enumerate_antichains(norm, window, 1):
            for c in enumerate_antichains(norm, window, 1):
                for alpha in window:
                    assert typed_subst_check(norm, {"z": c}, "x", a, m, alpha, 6, window)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 100_000), st.integers(1, 8), st.data())
    def test_random_terms(self, seed, size, data):
        model = builtin("norm")
        window = enumerate_elements(model, 0, 1)
        m = random_term(seed, size, model)
        a = data.draw(st.sampled_from(list(enumerate_antichains(model, window, 1))))
        alpha = data.draw(st.sampled_from(window))
        env = {"y": (Q,), "z": (P,)}
        assert typed_subst_check(model, env, "x", a, m, alpha, 6, window)
