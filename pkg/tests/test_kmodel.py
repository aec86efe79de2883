import pytest
from hypothesis import given, settings, strategies as st

from lamtest.errors import ModelMismatchError, ModelSpecError, ParseError, WindowExceededError
from lamtest.kmodel import (
    Arrow,
    Atom,
    GSpec,
    antichain_leq,
    builtin,
    enumerate_antichains,
    enumerate_elements,
    fold,
    hf_atom,
    is_antichain,
    leq,
    load_model,
    normalize_antichain,
    shift_element,
    unfold,
)

STAR = Atom("*")
P, Q = Atom("p"), Atom("q")

NORM_SPEC = """
# the Norm web
atoms: p q
order: p < q
arrow: {p} q = q
arrow: {q} p = p
"""


class TestOrder:
    def test_norm_base_order(self, norm):
        assert leq(norm, P, Q)
        assert not leq(norm, Q, P)

    def test_dinf_arrow_below_star(self, dinf):
        assert leq(dinf, Arrow((STAR,), STAR), STAR)
        assert not leq(dinf, STAR, Arrow((STAR,), STAR))

    def test_antichain_order(self, norm, dinf):
        assert antichain_leq(norm, (), (Q,))
        assert antichain_leq(norm, (P,), (Q,))
        assert not antichain_leq(dinf, (STAR,), ())

    def test_unknown_atom(self, norm):
        with pytest.raises(ModelMismatchError):
            leq(norm, Atom("*"), P)

    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_leq_is_a_partial_order(self, data):
        model = builtin("norm")
        window = enumerate_elements(model, 1, 2)
        x, y, z = (data.draw(st.sampled_from(window)) for _ in range(3))
        assert leq(model, x, x)
        if leq(model, x, y) and leq(model, y, x):
            assert x == y
        if leq(model, x, y) and leq(model, y, z):
            assert leq(model, x, z)


class TestFoldUnfold:
    def test_fold_hits_the_table(self, dinf, park):
        assert fold(dinf, (), STAR) == STAR
        assert fold(park, (STAR,), STAR) == STAR

    def test_fold_outside_the_table(self, dinf):
        assert fold(dinf, (STAR,), STAR) == Arrow((STAR,), STAR)

    def test_unfold(self, norm):
        assert unfold(norm, P, 0) == ((), P)
        assert unfold(norm, P, 1) == (((Q,),), P)
        assert unfold(norm, Q, 2) == (((P,), (P,)), Q)

    def test_unfold_hf(self):
        model = builtin("hf", size=4, table=[2])
        heads, tail = unfold(model, Atom(hf_atom(1, 1)), 3)
        assert heads == ((), (), (Atom(hf_atom(2, 1)),))
        assert tail == STAR

    def test_frontier_is_not_unfolded(self, zed):
        with pytest.raises(WindowExceededError):
            unfold(zed, Atom("6"), 1)

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(["dinf", "park", "norm", "strat"]), st.integers(0, 3), st.data())
    def test_unfold_then_fold(self, name, k, data):
        model = builtin(name)
        alpha = data.draw(st.sampled_from(enumerate_elements(model, 1, 1)))
        heads, tail = unfold(model, alpha, k)
        for head in reversed(heads):
            tail = fold(model, head, tail)
        assert tail == alpha

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(["dinf", "park", "norm", "strat"]), st.data())
    def test_fold_then_unfold(self, name, data):
        model = builtin(name)
        window = enumerate_elements(model, 1, 1)
        a = data.draw(st.sampled_from(list(enumerate_antichains(model, window, 2))))
        alpha = data.draw(st.sampled_from(window))
        (head,), tail = unfold(model, fold(model, a, alpha), 1)
        assert set(head) == set(a)
        assert tail == alpha

    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from(["dinf", "park", "norm", "strat"]), st.data())
    def test_arrows_are_contravariant(self, name, data):
        model = builtin(name)
        window = enumerate_elements(model, 1, 1)
        heads = list(enumerate_antichains(model, window, 2))
        a, b = data.draw(st.sampled_from(heads)), data.draw(st.sampled_from(heads))
        alpha, beta = data.draw(st.sampled_from(window)), data.draw(st.sampled_from(window))
        expected = antichain_leq(model, b, a) and leq(model, alpha, beta)
        assert leq(model, fold(model, a, alpha), fold(model, b, beta)) == expected


class TestAntichains:
    def test_normalize(self, norm):
        assert normalize_antichain(norm, [P, Q]) == (Q,)
        assert normalize_antichain(norm, [P]) == (P,)
        assert normalize_antichain(norm, []) == ()

    def test_enumerated_antichains_are_antichains(self, norm):
        window = enumerate_elements(norm, 1, 2)
        for a in enumerate_antichains(norm, window, 2):
            assert is_antichain(norm, a)


class TestEnumeration:
    def test_depth_zero_is_the_atom_set(self, norm, omega):
        assert set(enumerate_elements(norm, 0, 2)) == {P, Q}
        assert len(enumerate_elements(omega, 0, 2)) == 6

    def test_dinf_depth_one_width_one(self, dinf):
        assert set(enumerate_elements(dinf, 1, 1)) == {STAR, Arrow((STAR,), STAR)}

    def test_window_sizes(self, dinf, norm):
        assert len(enumerate_elements(dinf, 2, 2)) == 6
        assert len(enumerate_elements(norm, 1, 2)) == 6

    def test_frontier_left_out(self, zed):
        assert Atom("6") not in enumerate_elements(zed, 0, 1)


class TestBuiltins:
    def test_norm(self, norm):
        assert norm.atoms == ("p", "q")
        assert norm.base_leq("p", "q")
        assert norm.fold_table == {(("p",), "q"): "q", (("q",), "p"): "p"}

    def test_omega(self, omega):
        assert omega.atoms == tuple(str(n) for n in range(6))
        assert unfold(omega, Atom("3"), 1) == (((Atom("0"), Atom("1"), Atom("2")),), Atom("3"))

    def test_zed_shift(self, zed):
        assert shift_element(zed, Atom("0")) == Atom("1")
        assert shift_element(zed, Atom("6")) is None

    def test_unknown_builtin(self):
        with pytest.raises(ModelSpecError):
            builtin("nope")

    def test_hf_needs_a_table(self):
        with pytest.raises(ModelSpecError):
            builtin("hf")


class TestLoadModel:
    def test_norm_document(self, norm):
        assert load_model(NORM_SPEC, "norm") == norm

    def test_missing_preimage(self):
        with pytest.raises(ModelSpecError, match="surjective"):
            load_model("atoms: p q\narrow: {} p = p\n")

    def test_order_cycle(self):
        with pytest.raises(ModelSpecError, match="antisymmetric"):
            load_model("atoms: p q\norder: p < q\norder: q < p\narrow: {} p = p\narrow: {} q = q\n")

    def test_bad_line(self):
        with pytest.raises(ModelSpecError):
            load_model("atoms p q")

    def test_frontier_line(self):
        model = load_model("atoms: a b\narrow: {b} a = a\nfrontier: b\n")
        assert model.frontier == frozenset({"b"})


class TestGSpec:
    def test_values(self):
        assert GSpec.const(2)(7) == 2
        assert GSpec.table([1, 3])(0) == 1
        assert GSpec.table([1, 3])(9) == 3
        assert GSpec("affine", (2, 1))(3) == 7

    def test_tail_start(self):
        assert GSpec.const(1).tail_start == 0
        assert GSpec.table([4, 4, 1]).tail_start == 2
        assert GSpec("affine", (1, 0)).tail_start is None

    def test_parse_and_print(self):
        for text in ("const 1", "table 1,2,3", "affine 2 1"):
            assert str(GSpec.parse(text)) == text

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            GSpec.parse("")
        with pytest.raises(ParseError):
            GSpec.parse("const x")
        with pytest.raises(ParseError):
            GSpec.parse("const 1 2")
