# src/tests/test_expressions.py
"""
Testes da álgebra escalar exata e da gramática de expressões.
"""

import random
from fractions import Fraction

import pytest
from conftest import corpus

from src.expressions import (
    Expression,
    arith,
    eval_numeric,
    int_pow,
    is_zero,
    neg,
    partial_base,
    partial_jet,
    scale,
    substitute,
)
from src.grammar import ParseError, parse_expression, parse_linear_combination, to_latex, to_text, VECTOR_GENERATORS
from src.jets import BundleSignature, MultiIndex
from src.utils import random_expression, random_signature

SIG = BundleSignature(("x",), ("y",))


def e(text: str, sig: BundleSignature = SIG) -> Expression:
    return parse_expression(text, sig)


class TestArithmetic:
    """Estrutura de anel e forma canônica."""

    def test_ring_examples(self):
        y, yx = e("y"), e("y[x]")
        assert arith(y, neg(y), "add").is_zero()
        assert arith(yx, yx, "mul") == int_pow(yx, 2)
        assert arith(scale(y, 2), scale(y, 3), "add") == e("5*y")

    def test_effective_order(self):
        f = e("y*y[x,x] + x^3")
        assert f.order == 2
        assert (f * e("y[x]")).order == 2
        assert Expression.constant(SIG, 3).order == 0

    def test_is_zero_examples(self):
        assert is_zero(e("(y+1)^2 - y^2 - 2*y - 1"))
        assert not is_zero(e("y[x]"))

    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            Expression.constant(SIG, 0.5)
        with pytest.raises(TypeError):
            e("y") * 1.5

    def test_rationals_exact(self):
        f = e("y") * Fraction(1, 3) + e("2/3*y")
        assert f == e("y"), f"Aritmética racional inexata: {f}"

    def test_int_pow_negative_rejected(self):
        with pytest.raises(ValueError):
            int_pow(e("y"), -1)

    def test_rational_function_is_cancelled(self):
        f = e("(y^2 - 1)/(y - 1)")
        assert f == e("y + 1")

    @pytest.mark.parametrize("seed", corpus(50))
    def test_canonical_form_idempotent(self, seed):
        rng = random.Random(seed)
        sig = random_signature(rng)
        f = random_expression(rng, sig)
        assert Expression(sig, f.expr) == f


class TestDerivatives:
    """∂_λ e ∂_i^Λ como derivadas formais."""

    def test_partial_base_examples(self):
        assert partial_base(e("x*y[x]"), 0) == e("y[x]")
        assert partial_base(e("y[x]^2"), 0).is_zero()
        assert partial_base(e("sin(x)*y"), 0) == e("cos(x)*y")

    def test_partial_jet_examples(self):
        assert partial_jet(e("1/2*y[x]^2"), 0, MultiIndex((1,))) == e("y[x]")
        assert partial_jet(e("y*y[x,x]"), 0, MultiIndex((2,))) == e("y")
        assert partial_jet(e("y[x]"), 0, MultiIndex((0,))).is_zero()

    def test_partial_jet_field_out_of_range(self):
        with pytest.raises(ValueError):
            partial_jet(e("y"), 1, MultiIndex((0,)))

    @pytest.mark.parametrize("seed", corpus(50))
    def test_partials_commute(self, seed):
        rng = random.Random(seed)
        sig = random_signature(rng)
        f = random_expression(rng, sig)
        jets = list(f.jet_variables()) or [sig.jet(0)]
        a, b = rng.choice(jets), rng.choice(jets)
        lam = rng.randrange(sig.n)
        assert partial_jet(partial_jet(f, a.field, a.index), b.field, b.index) == \
            partial_jet(partial_jet(f, b.field, b.index), a.field, a.index)
        assert partial_base(partial_jet(f, a.field, a.index), lam) == \
            partial_jet(partial_base(f, lam), a.field, a.index)

    @pytest.mark.parametrize("seed", corpus(10))
    def test_partial_jet_matches_finite_differences(self, seed):
        """Verificação de sanidade em ponto flutuante (modo sombra)."""
        rng = random.Random(seed)
        sig = random_signature(rng)
        f = random_expression(rng, sig, terms=4)
        jets = f.jet_variables()
        if not jets:
            pytest.skip("expressão sem variáveis de jato")
        jv = rng.choice(jets)
        df = partial_jet(f, jv.field, jv.index)
        h = Fraction(1, 10 ** 4)
        for _ in range(10):
            point = {s: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for s in f.expr.free_symbols}
            point.setdefault(jv.symbol(sig), Fraction(1))
            plus, minus = dict(point), dict(point)
            plus[jv.symbol(sig)] += h
            minus[jv.symbol(sig)] -= h
            approx = (eval_numeric(f, plus, shadow=True) - eval_numeric(f, minus, shadow=True)) / (2 * float(h))
            exact = eval_numeric(df, point, shadow=True)
            assert abs(approx - exact) <= 1e-6 * max(1.0, abs(exact)), \
                f"Diferença finita {approx} longe de {exact} para {jv.name(sig)}"


class TestSubstitution:
    """Substituição simultânea e avaliação exata."""

    def test_substitute_examples(self):
        yx = SIG.jet("y", "x")
        assert substitute(e("y[x]^2"), {yx: 3}) == 9
        assert substitute(e("y + y[x]"), {"y": e("y[x]")}) == e("2*y[x]")
        assert substitute(e("x*y"), {}) == e("x*y")

    def test_substitute_unknown_name(self):
        with pytest.raises(ValueError):
            substitute(e("y"), {"z": 1})

    def test_eval_numeric_exact(self):
        value = eval_numeric(e("y[x]*y"), {"y": 2, "y[x]": 3})
        assert value == 6 and isinstance(value, Fraction)
        assert eval_numeric(e("1/3*x"), {"x": Fraction(1, 2)}) == Fraction(1, 6)

    def test_eval_numeric_missing_binding(self):
        with pytest.raises(ValueError, match="missing binding for y"):
            eval_numeric(e("x*y"), {"x": 1})

    def test_eval_numeric_at_pole(self):
        with pytest.raises(ValueError, match="not finite"):
            eval_numeric(e("1/y"), {"y": 0})
        with pytest.raises(ValueError, match="not finite"):
            eval_numeric(e("x/(y - 1)"), {"x": 2, "y": 1}, shadow=True)
        assert eval_numeric(e("1/y"), {"y": 2}) == Fraction(1, 2)

    def test_eval_numeric_opaque_atoms(self):
        value = eval_numeric(e("sin(y)"), {"y": 1})
        assert abs(float(value) - 0.8414709848078965) < 1e-12

    def test_completeness_flag(self):
        assert e("y^2").is_complete()
        assert not e("exp(y[x])").is_complete()
        assert not e("cos(y)").is_polynomial()


class TestGrammar:
    """Leitura e impressão na gramática textual."""

    def test_jet_variables_and_functions(self):
        sig = BundleSignature(("t", "x"), ("u",))
        f = e("u[x,t] + u[t,x] + exp(u)", sig)
        assert f == e("2*u[t,x] + exp(u)", sig)
        assert f.order == 2

    def test_unknown_coordinate_position(self):
        with pytest.raises(ParseError) as info:
            e("y[z]")
        assert info.value.message == "unknown coordinate z"
        assert (info.value.line, info.value.column) == (1, 3)

    def test_unexpected_token_reports_expected(self):
        with pytest.raises(ParseError) as info:
            e("y +")
        assert info.value.column == 4
        assert "expected" in str(info.value)

    def test_non_integer_exponent(self):
        with pytest.raises(ParseError, match="exponent must be an integer"):
            e("y^(1/2)")

    def test_division_by_zero(self):
        with pytest.raises(ParseError, match="division by zero"):
            e("y/(x - x)")

    def test_generators_only_when_enabled(self):
        with pytest.raises(ParseError):
            e("y*d/dy")
        components = parse_linear_combination("x*d/dy", SIG, VECTOR_GENERATORS)
        assert components == {0: e("x")}

    def test_linear_combination_rejects_free_terms(self):
        with pytest.raises(ParseError, match="every term must end in a generator"):
            parse_linear_combination("x*d/dy + 1", SIG, VECTOR_GENERATORS)
        with pytest.raises(ParseError):
            parse_linear_combination("d/dy*d/dy", SIG, VECTOR_GENERATORS)

    @pytest.mark.parametrize("seed", corpus(50))
    def test_print_parse_round_trip(self, seed):
        rng = random.Random(seed)
        sig = random_signature(rng)
        f = random_expression(rng, sig)
        text = to_text(f)
        assert text.isascii()
        assert parse_expression(text, sig) == f, f"Texto {text!r} não relê a mesma expressão"

    def test_round_trip_with_opaque_atoms(self):
        f = e("1/2*y[x]^2 - cos(y) + exp(x)*y")
        assert parse_expression(to_text(f), SIG) == f

    def test_latex_subscripts(self):
        assert to_latex(e("y[x,x]")) == "y_{xx}"
