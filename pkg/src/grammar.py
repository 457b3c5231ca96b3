# src/grammar.py
"""
Gramática textual de expressões (compartilhada com a CLI) e impressoras.

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := primary ('^' unary)?
    primary := NUMBER | NAME | NAME '[' bases ']' | FUNC '(' expr ')'
             | 'd/d' FIELD | 'theta' '[' FIELD ']' | '(' expr ')'

`u[x,t]` é y^u_(x,t), `u` sozinho é a variável de ordem zero. Os geradores
`d/du` (campos verticais) e `theta[u]` (formas-fonte) só são aceitos quando
o chamador os habilita. Toda falha vira ParseError com linha e coluna.
"""

import logging
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import sympy
from sympy.printing.str import StrPrinter

from .expressions import Expression
from .jets import BundleSignature, JetVariable, MultiIndex

FUNCTIONS = {"sin": sympy.sin, "cos": sympy.cos, "exp": sympy.exp}

VECTOR_GENERATORS = "vector"
THETA_GENERATORS = "theta"

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<dgen>d/d(?P<dfield>[A-Za-z_][A-Za-z_0-9]*))
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()\[\],])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    """Erro de sintaxe ou de nome, com posição (1-based) e tokens esperados."""

    def __init__(self, message: str, line: int, column: int, expected: Sequence[str] = ()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        text = f"line {line}, column {column}: {message}"
        if self.expected:
            text += f" (expected: {', '.join(self.expected)})"
        super().__init__(text)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    column: int


def generator_symbol(kind: str, field_name: str) -> sympy.Symbol:
    """Símbolo auxiliar de um gerador; nunca colide com nomes de coordenadas."""
    if kind == VECTOR_GENERATORS:
        return sympy.Symbol(f"d/d{field_name}")
    return sympy.Symbol(f"theta[{field_name}]")


def tokenize(text: str, line: int = 1, column_offset: int = 0) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column_offset + pos + 1)
        kind = match.lastgroup
        if kind == "dfield":
            kind = "dgen"
        if kind != "ws":
            tokens.append(Token(kind, match.group(0), column_offset + pos + 1))
        pos = match.end()
    tokens.append(Token("end", "", column_offset + len(text) + 1))
    return tokens


class ExpressionParser:
    """
    Parser descendente recursivo para uma linha de expressão.

    Args:
        text: texto da expressão
        sig: assinatura que define os nomes válidos
        line: linha do arquivo de modelo (para diagnósticos)
        column_offset: coluna onde `text` começa na linha original
        generators: None, VECTOR_GENERATORS ou THETA_GENERATORS
    """

    def __init__(self, text: str, sig: BundleSignature, line: int = 1,
                 column_offset: int = 0, generators: Optional[str] = None):
        self.sig = sig
        self.line = line
        self.generators = generators
        self.tokens = tokenize(text, line, column_offset)
        self.pos = 0

    # --- utilitários --------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _error(self, message: str, tok: Optional[Token] = None, expected: Sequence[str] = ()):
        tok = tok or self.current
        return ParseError(message, self.line, tok.column, expected)

    def _expect(self, text: str) -> Token:
        if self.current.text != text:
            found = self.current.text or "end of line"
            raise self._error(f"unexpected {found!r}", expected=(repr(text),))
        return self._advance()

    # --- gramática ----------------------------------------------------

    def parse(self) -> sympy.Expr:
        value = self._expr()
        if self.current.kind != "end":
            raise self._error(f"unexpected {self.current.text!r}", expected=("operator", "end of line"))
        return value

    def _expr(self) -> sympy.Expr:
        value = self._term()
        while self.current.text in ("+", "-"):
            op = self._advance().text
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self) -> sympy.Expr:
        value = self._unary()
        while self.current.text in ("*", "/"):
            op_tok = self._advance()
            rhs = self._unary()
            if op_tok.text == "*":
                value = value * rhs
            else:
                if sympy.expand(rhs) == 0:
                    raise self._error("division by zero", op_tok)
                value = value / rhs
        return value

    def _unary(self) -> sympy.Expr:
        if self.current.text == "-":
            self._advance()
            return -self._unary()
        if self.current.text == "+":
            self._advance()
            return self._unary()
        return self._power()

    def _power(self) -> sympy.Expr:
        base = self._primary()
        if self.current.text == "^":
            caret = self._advance()
            exponent = sympy.expand(self._unary())
            if not exponent.is_Integer:
                raise self._error("exponent must be an integer constant", caret)
            if exponent < 0 and sympy.expand(base) == 0:
                raise self._error("division by zero", caret)
            return base ** exponent
        return base

    def _primary(self) -> sympy.Expr:
        tok = self.current
        if tok.kind == "number":
            self._advance()
            return sympy.Rational(tok.text)
        if tok.text == "(":
            self._advance()
            value = self._expr()
            self._expect(")")
            return value
        if tok.kind == "dgen":
            return self._vector_generator()
        if tok.kind == "name":
            return self._name()
        found = tok.text or "end of line"
        raise self._error(f"unexpected {found!r}", expected=("number", "name", "'('"))

    def _vector_generator(self) -> sympy.Expr:
        tok = self._advance()
        field_name = tok.text[3:]
        if self.generators != VECTOR_GENERATORS:
            raise self._error("vector generators are only allowed in symmetry lines", tok)
        if field_name not in self.sig.fiber_names:
            raise self._error(f"unknown field {field_name}", tok)
        return generator_symbol(VECTOR_GENERATORS, field_name)

    def _name(self) -> sympy.Expr:
        tok = self._advance()
        name = tok.text
        sig = self.sig
        if name in FUNCTIONS and self.current.text == "(":
            self._advance()
            arg = self._expr()
            self._expect(")")
            return FUNCTIONS[name](arg)
        if name == "theta" and self.generators == THETA_GENERATORS:
            self._expect("[")
            field_tok = self._advance()
            if field_tok.kind != "name":
                raise self._error("expected a field name", field_tok, expected=("field",))
            if field_tok.text not in sig.fiber_names:
                raise self._error(f"unknown field {field_tok.text}", field_tok)
            self._expect("]")
            return generator_symbol(THETA_GENERATORS, field_tok.text)
        if name in sig.fiber_names:
            if self.current.text != "[":
                return sympy.Symbol(name)
            self._advance()
            indices: List[int] = []
            while True:
                base_tok = self.current
                if base_tok.kind != "name":
                    raise self._error("expected a base coordinate", expected=("base coordinate",))
                self._advance()
                if base_tok.text not in sig.base_names:
                    raise self._error(f"unknown coordinate {base_tok.text}", base_tok)
                indices.append(sig.base_names.index(base_tok.text))
                if self.current.text == ",":
                    self._advance()
                    continue
                self._expect("]")
                break
            jv = JetVariable(sig.fiber_names.index(name), MultiIndex.from_indices(sig.n, indices))
            return jv.symbol(sig)
        if name in sig.base_names or name in sig.param_names:
            if self.current.text == "[":
                raise self._error(f"{name} is not a field and takes no derivative indices")
            return sympy.Symbol(name)
        raise self._error(f"unknown coordinate {name}", tok)


def parse_expression(text: str, sig: BundleSignature, line: int = 1, column_offset: int = 0) -> Expression:
    """Lê uma expressão da gramática e devolve sua forma canônica."""
    raw = ExpressionParser(text, sig, line, column_offset).parse()
    return Expression(sig, raw)


def parse_linear_combination(text: str, sig: BundleSignature, kind: str,
                             line: int = 1, column_offset: int = 0) -> Dict[int, Expression]:
    """
    Lê Σ c_i·g_i com geradores `d/du` ou `theta[u]` e devolve {i: c_i}.

    Raises:
        ParseError: se a expressão não for linear homogênea nos geradores.
    """
    raw = sympy.expand(ExpressionParser(text, sig, line, column_offset, generators=kind).parse())
    gens = [generator_symbol(kind, name) for name in sig.fiber_names]
    components: Dict[int, Expression] = {}
    remainder = raw
    for i, gen in enumerate(gens):
        coeff = raw.coeff(gen)
        if coeff.has(*gens):
            raise ParseError("expression is not linear in the generators", line, column_offset + 1)
        remainder = remainder - coeff * gen
        if coeff != 0:
            components[i] = Expression(sig, coeff)
    if sympy.expand(remainder) != 0:
        label = "d/d<field>" if kind == VECTOR_GENERATORS else "theta[<field>]"
        raise ParseError(f"every term must end in a generator {label}", line, column_offset + 1)
    logging.debug("Combinação linear lida: %d componentes", len(components))
    return components


# --- impressoras -----------------------------------------------------------

class _GrammarPrinter(StrPrinter):
    """Impressora compatível com a gramática."""

    def _print_Exp1(self, expr):
        return "exp(1)"


_PRINTER = _GrammarPrinter()


def to_text(f: Expression) -> str:
    """Texto ASCII que a gramática relê como a mesma Expression."""
    return _PRINTER.doprint(f.expr).replace("**", "^")


def latex_symbol_names(sig: BundleSignature, expr: sympy.Expr) -> Dict[sympy.Symbol, str]:
    names = {}
    for s in expr.free_symbols:
        kind = sig.classify(s)
        if kind is None or kind[0] != "jet":
            continue
        jv = kind[1]
        field = sig.fiber_names[jv.field]
        if jv.order == 0:
            names[s] = field
            continue
        bases = [sig.base_names[lam] for lam in jv.index.indices()]
        sep = "" if all(len(b) == 1 for b in bases) else ","
        names[s] = f"{field}_{{{sep.join(bases)}}}"
    return names


def to_latex(f: Expression) -> str:
    return sympy.latex(f.expr, symbol_names=latex_symbol_names(f.sig, f.expr))
