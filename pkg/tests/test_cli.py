import pytest

from lamtest.cli import EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK, main
from lamtest.kmodel import BUILTINS

NORM_SPEC = """\
# Norm as a model-spec document
atoms: p q
order: p < q
arrow: {q} p = p
arrow: {p} q = q
"""


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


class TestReduce:
    def test_converges(self, capsys):
        code, out = _run(capsys, "reduce", "tau<p>(I eb<{p}>)", "--model", "norm")
        assert code == EXIT_OK
        assert out.splitlines() == [
            "0  start  tau<p>((\\x. x) eb<{p}>)",
            "1  beta@0  tau<p>(eb<{p}>)",
            "2  tautbar@root  eps",
            "VERDICT converged(2)",
        ]

    def test_exhausted(self, capsys):
        code, out = _run(capsys, "reduce", "tau<q>(\\x. x)", "--model", "norm", "--fuel", "7")
        assert code == EXIT_NEGATIVE
        assert out.splitlines()[-1] == "VERDICT exhausted(7)  no mhnf within fuel 7"

    def test_tsv_full_strategy(self, capsys):
        code, out = _run(capsys, "reduce", "tau<*>(x ((\\y. y) z))", "--strategy", "full", "--format", "tsv")
        assert code == EXIT_OK
        assert out.splitlines()[-1].startswith("VERDICT\tconverged")

    def test_model_file(self, capsys, tmp_path):
        path = tmp_path / "norm.model"
        path.write_text(NORM_SPEC, encoding="utf-8")
        code, out = _run(capsys, "reduce", "tau<p>(\\x. x)", "--model-file", str(path))
        assert code == EXIT_OK
        assert out.splitlines()[-1] == "VERDICT converged(2)"

    @pytest.mark.parametrize("expr", ["", "(\\x. x", "tau<r>(x)"])
    def test_bad_input(self, capsys, expr):
        code, out = _run(capsys, "reduce", expr, "--model", "norm")
        assert code == EXIT_ERROR
        assert out == ""


class TestInterpretation:
    def test_member(self, capsys):
        code, out = _run(capsys, "member", "|- I : p", "--model", "norm")
        assert code == EXIT_OK
        assert out.splitlines()[0] == "YES"

    def test_member_needs_a_point(self, capsys):
        code, _ = _run(capsys, "member", "|- eps", "--model", "norm")
        assert code == EXIT_ERROR

    def test_typecheck(self, capsys):
        code, out = _run(capsys, "typecheck", "x:{q} |- x : p", "--model", "norm")
        assert code == EXIT_OK
        assert out.splitlines()[0] == "YES"

    def test_typecheck_negative(self, capsys):
        code, out = _run(capsys, "typecheck", "|- 0 : p", "--model", "norm", "--search-depth", "3")
        assert code == EXIT_NEGATIVE
        assert out.strip() == "NO-WITHIN-BOUNDS(3)"


class TestHyperimmunity:
    def test_probe_refutes_park(self, capsys):
        code, out = _run(capsys, "probe", "--model", "park")
        assert code == EXIT_OK
        assert out.strip() == "REFUTED  chain * *  lasso start 0 period 1  g const 1"

    def test_probe_exhausts_on_dinf(self, capsys):
        code, out = _run(capsys, "probe", "--depth", "5")
        assert code == EXIT_NEGATIVE
        assert out.strip() == "EXHAUSTED  no witness to depth 5 for g = const 1"

    def test_probe_hf(self, capsys):
        code, out = _run(capsys, "probe", "--model", "hf", "--f-table", "1", "--g", "const 2", "--depth", "4")
        assert code == EXIT_OK
        assert out.startswith("REFUTED  chain a0_1 a1_1")

    def test_probe_hf_needs_a_table(self, capsys):
        code, _ = _run(capsys, "probe", "--model", "hf")
        assert code == EXIT_ERROR

    def test_counterexample(self, capsys):
        code, out = _run(capsys, "counterexample", "--model", "norm", "--fuel", "200")
        assert code == EXIT_OK
        assert "SHIFT-CYCLE(2)" in out
        assert "JG-VERDICT(200)  exhausted" in out

    def test_counterexample_without_witness(self, capsys):
        code, _ = _run(capsys, "counterexample", "--model", "dinf", "--fuel", "20")
        assert code == EXIT_ERROR


class TestMisc:
    def test_models(self, capsys):
        code, out = _run(capsys, "models")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert len(lines) == len(BUILTINS)
        assert lines[0] == f"dinf  {BUILTINS['dinf']}"

    def test_models_tsv(self, capsys):
        _, out = _run(capsys, "models", "--format", "tsv")
        assert all(len(line.split("\t")) == 2 for line in out.splitlines())

    def test_separate(self, capsys):
        code, out = _run(capsys, "separate", "\\x. x", "\\x y. y")
        assert code == EXIT_OK
        assert out.strip() not in ("", "UNKNOWN")

    def test_separate_unknown(self, capsys):
        code, out = _run(capsys, "separate", "\\x. x", "\\x. x")
        assert code == EXIT_NEGATIVE
        assert out.strip() == "UNKNOWN"

    def test_fuzz(self, capsys):
        code, out = _run(
            capsys, "fuzz", "--model", "norm", "--suite", "confluence",
            "--cases", "5", "--size", "8", "--depth", "1", "--width", "1",
        )
        assert code == EXIT_OK
        assert out.startswith("confluence: ")
        assert ", 0 failed," in out

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["frobnicate"],
            ["reduce"],
            ["reduce", "x", "--fuel", "-1"],
            ["reduce", "x", "--strategy", "sideways"],
            ["reduce", "x", "--log-level", "chatty"],
            ["probe", "--f-table", "1,x"],
            ["separate", "x"],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        code, out = _run(capsys, *argv)
        assert code == EXIT_ERROR
        assert out == ""
