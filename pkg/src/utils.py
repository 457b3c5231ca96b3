import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import sympy

from .calculus import VerticalField
from .expressions import Expression, eval_numeric
from .forms import Form, WedgeMonomial
from .jets import BundleSignature, JetVariable, enumerate_jets
from .variational import Lagrangian

# Coeficientes racionais pequenos usados pelos geradores.
COEFFICIENTS = (Fraction(-2), Fraction(-1), Fraction(-1, 2), Fraction(1, 3), Fraction(1), Fraction(2), Fraction(3))


def random_signature(rng: random.Random, max_n: int = 2, max_m: int = 2) -> BundleSignature:
    """Assinatura com n <= max_n coordenadas de base (x, t, z) e m <= max_m campos (u, v, w)."""
    n = rng.randint(1, max_n)
    m = rng.randint(1, max_m)
    return BundleSignature(("x", "t", "z")[:n], ("u", "v", "w")[:m])


def random_expression(rng: random.Random, sig: BundleSignature, max_order: int = 2,
                      max_degree: int = 3, terms: int = 3, with_base: bool = True) -> Expression:
    """
    Gera um polinômio aleatório nas variáveis de jato (e em x, se with_base).

    Parâmetros:
        rng: gerador semeado (reprodutibilidade)
        sig: assinatura
        max_order: ordem máxima de jato
        max_degree: grau total máximo de cada monômio
        terms: número de monômios sorteados

    Retorna:
        Expression canônica (pode ser nula se os termos se cancelarem)
    """
    jets = enumerate_jets(sig, max_order)
    atoms: List[sympy.Expr] = [jv.symbol(sig) for jv in jets]
    if with_base:
        atoms += list(sig.base_symbols())
    total = sympy.Integer(0)
    for _ in range(terms):
        degree = rng.randint(0, max_degree)
        monomial = sympy.Mul(*[rng.choice(atoms) for _ in range(degree)])
        c = rng.choice(COEFFICIENTS)
        total += sympy.Rational(c.numerator, c.denominator) * monomial
    return Expression(sig, total)


def random_lagrangian(rng: random.Random, sig: BundleSignature, max_order: int = 2,
                      max_degree: int = 3, terms: int = 3) -> Lagrangian:
    return Lagrangian(random_expression(rng, sig, max_order, max_degree, terms))


def random_vertical_field(rng: random.Random, sig: BundleSignature, max_order: int = 1,
                          max_degree: int = 2, vanishing: Optional[Sequence[int]] = None) -> VerticalField:
    """
    Campo vertical aleatório; os índices em `vanishing` ficam identicamente nulos.
    """
    vanishing = set(vanishing or ())
    components = {
        i: random_expression(rng, sig, max_order, max_degree, terms=2)
        for i in range(sig.m)
        if i not in vanishing
    }
    return VerticalField(sig, components)


def random_form(rng: random.Random, sig: BundleSignature, k: int, s: int, max_order: int = 2,
                max_degree: int = 3, terms: int = 2) -> Form:
    """
    Forma aleatória homogênea de bigrau (k,s).

    Lança:
        ValueError se s > n.
    """
    if s > sig.n:
        raise ValueError(f"Grau horizontal {s} excede n={sig.n}")
    jets = enumerate_jets(sig, max_order)
    out = Form.zero(sig)
    for _ in range(terms):
        dx = tuple(sorted(rng.sample(range(sig.n), s)))
        thetas = tuple(sorted(rng.sample(jets, k)))
        coeff = random_expression(rng, sig, max_order, max_degree, terms=2)
        out = out + Form(sig, {WedgeMonomial(dx, thetas): coeff})
    return out


def random_point(rng: random.Random, f: Expression) -> Dict[sympy.Symbol, Fraction]:
    """Ponto racional aleatório cobrindo todos os símbolos livres de f."""
    return {s: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for s in f.expr.free_symbols}


def spot_check(lhs: Expression, rhs: Expression, rng: random.Random, points: int = 5) -> bool:
    """
    Compara lhs e rhs numericamente em pontos racionais aleatórios.

    Retorna:
        True se coincidirem em todos os pontos.
    """
    difference = lhs - rhs
    for _ in range(points):
        point = random_point(rng, difference)
        if eval_numeric(difference, point) != 0:
            return False
    return True
