# src/expressions.py
"""
Álgebra escalar exata sobre coordenadas de base e variáveis de jato.

Uma Expression embrulha uma expressão sympy em forma canônica (expandida;
funções racionais passam por `cancel`). No núcleo polinomial com
coeficientes racionais a igualdade das formas canônicas decide a igualdade
semântica. Com átomos opacos (sin, cos, exp) o teste de zero é sintático:
correto quando diz "zero", incompleto quando diz "não zero".
"""

import logging
from fractions import Fraction
from numbers import Rational as _RationalNumber
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import sympy

from .jets import BundleSignature, JetVariable, MultiIndex

# Dígitos usados ao aproximar átomos opacos por racionais em eval_numeric.
EVAL_PRECISION = 40

OPAQUE_FUNCTIONS = (sympy.sin, sympy.cos, sympy.exp)

Scalar = Union["Expression", int, Fraction, sympy.Rational]


def canonicalize(raw) -> sympy.Expr:
    """
    Forma canônica de uma expressão sympy.

    Raises:
        TypeError: se houver números de ponto flutuante.
    """
    e = sympy.expand(sympy.sympify(raw))
    if e.has(sympy.Float):
        logging.error("Ponto flutuante no núcleo exato: %s", e)
        raise TypeError(f"floating point is not allowed in exact expressions: {e}")
    if not e.is_polynomial() and not _has_opaque(e) and e.is_rational_function():
        e = sympy.cancel(e)
    return e


def _has_opaque(e: sympy.Expr) -> bool:
    return any(e.has(f) for f in OPAQUE_FUNCTIONS)


def _to_sympy_scalar(value) -> sympy.Expr:
    if isinstance(value, bool):
        raise TypeError("bool não é um escalar válido")
    if isinstance(value, float):
        raise TypeError(f"floating point is not allowed in exact expressions: {value}")
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, int):
        return sympy.Integer(value)
    if isinstance(value, sympy.Basic):
        return value
    if isinstance(value, _RationalNumber):
        return sympy.Rational(int(value.numerator), int(value.denominator))
    raise TypeError(f"Escalar não suportado: {type(value)}")


class Expression:
    """
    Função escalar exata de um número finito de variáveis de jato.

    Imutável. Operadores aritméticos aceitam outras Expressions da mesma
    assinatura, inteiros e racionais (Fraction ou sympy.Rational).

    Example:
        >>> sig = BundleSignature(("x",), ("y",))
        >>> y = Expression.jet(sig, sig.jet("y"))
        >>> (y + y).expr
        2*y
    """

    __slots__ = ("sig", "expr", "_order")

    def __init__(self, sig: BundleSignature, expr=0, canonical: bool = False):
        self.sig = sig
        self.expr = expr if canonical else canonicalize(expr)
        self._order: Optional[int] = None

    # --- construtores -------------------------------------------------

    @classmethod
    def constant(cls, sig: BundleSignature, value) -> "Expression":
        return cls(sig, _to_sympy_scalar(value))

    @classmethod
    def zero(cls, sig: BundleSignature) -> "Expression":
        return cls(sig, sympy.Integer(0), canonical=True)

    @classmethod
    def one(cls, sig: BundleSignature) -> "Expression":
        return cls(sig, sympy.Integer(1), canonical=True)

    @classmethod
    def jet(cls, sig: BundleSignature, jv: JetVariable) -> "Expression":
        return cls(sig, jv.symbol(sig), canonical=True)

    @classmethod
    def base(cls, sig: BundleSignature, lam: int) -> "Expression":
        return cls(sig, sig.base_symbol(lam), canonical=True)

    @classmethod
    def param(cls, sig: BundleSignature, name: str) -> "Expression":
        if name not in sig.param_names:
            raise ValueError(f"unknown parameter {name}")
        return cls(sig, sympy.Symbol(name), canonical=True)

    # --- coerção e aritmética -----------------------------------------

    def _coerce(self, other) -> "Expression":
        if isinstance(other, Expression):
            if other.sig != self.sig:
                raise ValueError("Expressões de assinaturas diferentes")
            return other
        return Expression(self.sig, _to_sympy_scalar(other), canonical=True)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Expression(self.sig, self.expr + other.expr)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Expression(self.sig, self.expr - other.expr)

    def __rsub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Expression(self.sig, other.expr - self.expr)

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Expression(self.sig, self.expr * other.expr)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("divisão por expressão nula")
        return Expression(self.sig, self.expr / other.expr)

    def __neg__(self):
        return Expression(self.sig, -self.expr, canonical=True)

    def __pow__(self, k: int):
        return int_pow(self, k)

    def __eq__(self, other) -> bool:
        if isinstance(other, Expression):
            return self.sig == other.sig and self.expr == other.expr
        try:
            return self.expr == _to_sympy_scalar(other)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.sig, self.expr))

    def __repr__(self) -> str:
        return f"Expression({self.expr})"

    # --- consultas ----------------------------------------------------

    def is_zero(self) -> bool:
        return self.expr == 0

    def is_constant(self) -> bool:
        return not self.coordinate_symbols()

    def has_opaque(self) -> bool:
        return _has_opaque(self.expr)

    def is_polynomial(self) -> bool:
        """Polinômio nas coordenadas (x, jatos); parâmetros contam como coeficientes."""
        if self.has_opaque():
            return False
        return self.expr.is_polynomial(*self.coordinate_symbols())

    def is_complete(self) -> bool:
        """Se o teste de zero sobre esta expressão é decisão (núcleo polinomial ou racional)."""
        return not self.has_opaque()

    def coordinate_symbols(self) -> Tuple[sympy.Symbol, ...]:
        out = []
        for s in self.expr.free_symbols:
            kind = self.sig.classify(s)
            if kind is None:
                raise ValueError(f"Símbolo desconhecido na expressão: {s}")
            if kind[0] != "param":
                out.append(s)
        return tuple(sorted(out, key=lambda s: s.name))

    def jet_variables(self) -> Tuple[JetVariable, ...]:
        """Variáveis de jato presentes, em ordem canônica."""
        jets = []
        for s in self.expr.free_symbols:
            kind = self.sig.classify(s)
            if kind is not None and kind[0] == "jet":
                jets.append(kind[1])
        return tuple(sorted(jets))

    @property
    def order(self) -> int:
        """Ordem efetiva de jato (0 quando não há variáveis de jato)."""
        if self._order is None:
            self._order = max((jv.order for jv in self.jet_variables()), default=0)
        return self._order

    def degree(self) -> int:
        """Grau total em (x, jatos); 0 para constantes e para a expressão nula."""
        if self.is_zero():
            return 0
        if not self.is_polynomial():
            raise ValueError("degree só está definido no núcleo polinomial")
        gens = self.coordinate_symbols()
        if not gens:
            return 0
        return sympy.Poly(self.expr, *gens).total_degree()

    def diff_jet(self, jv: JetVariable) -> "Expression":
        return Expression(self.sig, sympy.diff(self.expr, jv.symbol(self.sig)))


# --- operações do módulo ------------------------------------------------

def arith(a: Expression, b: Expression, op: str) -> Expression:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"Operação desconhecida: {op}")


def neg(a: Expression) -> Expression:
    return -a


def int_pow(a: Expression, k: int) -> Expression:
    if not isinstance(k, int) or isinstance(k, bool) or k < 0:
        raise ValueError(f"Expoente deve ser inteiro >= 0, recebido: {k}")
    return Expression(a.sig, a.expr ** k)


def scale(a: Expression, q) -> Expression:
    return a * q


def partial_base(f: Expression, lam: int) -> Expression:
    """∂_λ: só a dependência explícita em x^λ; variáveis de jato são independentes."""
    return Expression(f.sig, sympy.diff(f.expr, f.sig.base_symbol(lam)))


def partial_jet(f: Expression, field: int, index: MultiIndex) -> Expression:
    """∂_i^Λ: derivada formal em relação a y^i_Λ."""
    if not 0 <= field < f.sig.m:
        raise ValueError(f"fiber index out of range: {field}")
    return f.diff_jet(JetVariable(field, index))


def _binding_symbol(sig: BundleSignature, key) -> sympy.Symbol:
    if isinstance(key, JetVariable):
        return key.symbol(sig)
    if isinstance(key, sympy.Symbol):
        return key
    if isinstance(key, str):
        if key in sig.base_names or key in sig.param_names:
            return sympy.Symbol(key)
        kind = sig.classify(sympy.Symbol(key))
        if kind is not None:
            return sympy.Symbol(key)
        raise ValueError(f"unknown coordinate {key}")
    raise TypeError(f"Chave de substituição não suportada: {type(key)}")


def substitute(f: Expression, bindings: Mapping) -> Expression:
    """Substituição simultânea (sem cascata), seguida de canonicalização."""
    mapping = {}
    for key, value in bindings.items():
        sym = _binding_symbol(f.sig, key)
        if isinstance(value, Expression):
            if value.sig != f.sig:
                raise ValueError("Substituição com assinatura diferente")
            mapping[sym] = value.expr
        else:
            mapping[sym] = _to_sympy_scalar(value)
    return Expression(f.sig, f.expr.xreplace(mapping))


def is_zero(f: Expression) -> bool:
    return f.is_zero()


def eval_numeric(f: Expression, point: Mapping, shadow: bool = False):
    """
    Avalia f num ponto racional.

    Args:
        f: expressão
        point: mapa JetVariable / nome / símbolo -> racional
        shadow: se True, devolve float (modo sombra, só para verificações de sanidade)

    Returns:
        Fraction exata no núcleo polinomial; átomos opacos são aproximados
        com EVAL_PRECISION dígitos.

    Raises:
        ValueError: se faltar valor para algum símbolo presente ou se f
            tiver um polo no ponto.
    """
    mapping: Dict[sympy.Symbol, sympy.Expr] = {}
    for key, value in point.items():
        mapping[_binding_symbol(f.sig, key)] = _to_sympy_scalar(value)
    missing = sorted(s.name for s in f.expr.free_symbols if s not in mapping)
    if missing:
        logging.error("eval_numeric sem valores para: %s", missing)
        raise ValueError(f"missing binding for {', '.join(missing)}")
    value = f.expr.xreplace(mapping)
    if value.is_finite is not True:
        logging.error("eval_numeric: valor não finito %s no ponto dado", value)
        raise ValueError(f"expression is not finite at the given point: {value}")
    if shadow:
        return float(sympy.N(value, 17))
    if not value.is_Rational:
        value = sympy.Rational(str(sympy.N(value, EVAL_PRECISION)))
    return Fraction(int(value.p), int(value.q))


def sum_expressions(sig: BundleSignature, items: Iterable[Expression]) -> Expression:
    return Expression(sig, sympy.Add(*[e.expr for e in items]))
